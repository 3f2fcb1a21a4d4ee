//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use young_core::function::{lp_norm, lp_norm_pow};
use young_core::hausdorff_young::{hy_chain_gaps, hy_norm, hy_ratio};
use young_core::output::to_json_string;
use young_core::sample::{random_complex_lattice, random_nonnegative, random_signed};
use young_core::search::{empirical_frontier, ExperimentRecord};
use young_core::stability::ALIGNED_TOL;
use young_core::*;

const SEED: u64 = 0x5eed_2024;

const INTERVAL_RATIO_TOL: f64 = 1e-12;
const INTERVAL_LIMIT_TOL: f64 = 1e-3;
const YOUNG_TOL: f64 = 1e-12;
const REDUCTION_TOL: f64 = 1e-9;
const EXPONENT_SUM_TOL: f64 = 1e-12;
const CLARKSON_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-12;
const PARSEVAL_TOL: f64 = 1e-9;
const HY_TOL: f64 = 1e-6;
const TWO_POINT_TOL: f64 = 1e-6;
const CHAIN_QUADRATURE_TOL: f64 = 1e-6;
const CHAIN_EXACT_TOL: f64 = 1e-12;
const TORSION_TOL: f64 = 1e-12;

const DOUBLING_ETA: f64 = 0.1;
const DOUBLING_DELTA: f64 = 0.01;
const DOUBLING_RUNS: usize = 200;

type Outcome = Result<String, String>;

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(SEED);
    r.set_stream(stream);
    r
}

fn z1() -> GroupDescriptor {
    GroupDescriptor::lattice(1).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn interval_records() -> Result<Vec<ExperimentRecord>, String> {
    let p = ExponentTriple::symmetric();
    [1u64, 10, 100, 1000]
        .iter()
        .map(|&n| interval_example(n, &p).map_err(|e| e.to_string()))
        .collect()
}

fn c1_interval() -> Outcome {
    let recs = interval_records()?;
    let r100 = &recs[2];
    ensure(r100.form == Some(30301), || format!("form at N=100 is {:?}", r100.form))?;
    ensure((r100.ratio - 30301.0 / 40401.0).abs() <= INTERVAL_RATIO_TOL, || {
        format!("ratio at N=100 is {}", r100.ratio)
    })?;
    ensure(recs.windows(2).all(|w| w[1].ratio < w[0].ratio), || {
        "ratios not decreasing".into()
    })?;
    let r1000 = recs[3].ratio;
    ensure((r1000 - 0.75).abs() <= INTERVAL_LIMIT_TOL, || {
        format!("ratio at N=1000 is {r1000}")
    })?;
    // Closed form against direct evaluation.
    for n in 1..=20i64 {
        let set = FiniteSubset::new(z1(), (-n..=n).map(|x| GroupElement::lattice([x]))).unwrap();
        let f = SparseFunction::indicator(&set);
        let form = trilinear_form(&f, &f, &f).unwrap();
        ensure(form == (3 * n * n + 3 * n + 1) as f64, || {
            format!("form mismatch at N={n}: {form}")
        })?;
    }
    Ok(format!(
        "form(100)=30301, ratios {:?}",
        recs.iter().map(|r| r.ratio).collect::<Vec<_>>()
    ))
}

fn acceptance_groups() -> [GroupDescriptor; 4] {
    [
        GroupDescriptor::lattice(1).unwrap(),
        GroupDescriptor::lattice(2).unwrap(),
        GroupDescriptor::free(2).unwrap(),
        GroupDescriptor::cyclic(6).unwrap(),
    ]
}

fn acceptance_triples() -> [ExponentTriple; 3] {
    [
        ExponentTriple::symmetric(),
        ExponentTriple::new(4.0 / 3.0, 4.0 / 3.0, 2.0).unwrap(),
        ExponentTriple::from_pair(1.2, 2.5).unwrap(),
    ]
}

fn c2_young_bound() -> Outcome {
    let mut r = rng(2);
    let mut worst = 0.0f64;
    let mut count = 0;
    for g in acceptance_groups() {
        for p in acceptance_triples() {
            for _ in 0..834 {
                let f: Vec<_> = (0..3).map(|_| random_nonnegative(&mut r, &g, 10, 4)).collect();
                let ratio = young_ratio(&f[0], &f[1], &f[2], &p).map_err(|e| e.to_string())?;
                ensure(ratio <= 1.0 + YOUNG_TOL, || {
                    format!("ratio {ratio} on {g} with {:?}", p.as_array())
                })?;
                worst = worst.max(ratio);
                count += 1;
            }
        }
    }
    Ok(format!("{count} triples, max ratio {worst}"))
}

fn c3_reduction() -> Outcome {
    let mut r = rng(3);
    let groups = acceptance_groups();
    let triples = acceptance_triples();
    let mut worst_gap = f64::INFINITY;
    for i in 0..1000 {
        let g = groups[i % 4];
        let p = triples[(i / 4) % 3];
        let f: Vec<_> = (0..3).map(|_| random_nonnegative(&mut r, &g, 10, 4)).collect();
        let red = reduce_triple(&f[0], &f[1], &f[2], &p).map_err(|e| e.to_string())?;
        let [s1, s2, _] = red.exponents();
        ensure((1.0 / s1 + 1.0 / s2 - 1.0).abs() <= EXPONENT_SUM_TOL, || {
            format!("1/s1+1/s2 = {}", 1.0 / s1 + 1.0 / s2)
        })?;
        let orig = young_ratio(&f[0], &f[1], &f[2], &p).unwrap();
        let reduced = red.ratio().unwrap();
        let gap = reduced - orig.powf(p.p3());
        ensure(gap >= -REDUCTION_TOL, || {
            format!("reduced {reduced} < original^p3 {}", orig.powf(p.p3()))
        })?;
        worst_gap = worst_gap.min(gap);
    }
    Ok(format!("1000 triples, min gap {worst_gap}"))
}

/// Size of the leading Clarkson term; the gap is compared relative to it.
fn clarkson_scale(f: &SparseFunction, g: &SparseFunction, p: f64) -> f64 {
    let mass = lp_norm_pow(f, p) + lp_norm_pow(g, p);
    if p >= 2.0 {
        2f64.powf(p - 1.0) * mass
    } else {
        2.0 * mass.powf(1.0 / (p - 1.0))
    }
}

fn c4_clarkson() -> Outcome {
    let mut r = rng(4);
    let mut worst = f64::INFINITY;
    for i in 0..10_000 {
        let p = [1.3, 1.7, 2.0, 2.5, 4.0][i % 5];
        let f = random_signed(&mut r, &z1(), 10, 5);
        let g = random_signed(&mut r, &z1(), 10, 5);
        let gap = clarkson_gap(&f, &g, p).map_err(|e| e.to_string())?;
        let scale = clarkson_scale(&f, &g, p);
        ensure(gap >= -CLARKSON_TOL * scale, || {
            format!("gap {gap} at p={p}, scale {scale}")
        })?;
        worst = worst.min(gap / scale);
    }
    Ok(format!("10000 pairs, min relative gap {worst}"))
}

fn c5_partition() -> Outcome {
    let mut r = rng(5);
    let mut aligned = 0;
    for i in 0..200 {
        let p = [1.3, 1.7, 2.0, 2.5, 4.0][i % 5];
        let base = random_nonnegative(&mut r, &z1(), 8, 5);
        let size = r.random_range(2..=8);
        let contaminated = i % 2 == 1;
        let family: Vec<_> = (0..size)
            .map(|_| {
                let f = base.scaled(r.random_range(0.1..5.0));
                if contaminated && r.random_bool(0.4) {
                    let bump = random_nonnegative(&mut r, &z1(), 3, 12).scaled(r.random_range(0.001..1.0));
                    f.plus(&bump).unwrap()
                } else {
                    f
                }
            })
            .collect();
        let res = convexity_partition(&family, p, None, None).map_err(|e| e.to_string())?;
        let mut all: Vec<usize> = res.s_prime.iter().chain(&res.s_double_prime).copied().collect();
        all.sort_unstable();
        ensure(all == (0..size).collect::<Vec<_>>(), || {
            format!("family {i}: not a partition")
        })?;
        for &j in &res.s_prime {
            let (res_j, n_j) = (res.residual_norms[j], res.norms[j]);
            ensure(res_j < res.eta_used * n_j || res_j <= ALIGNED_TOL * n_j, || {
                format!("family {i}: member {j} in S' fails the residual criterion")
            })?;
        }
        for &j in &res.s_double_prime {
            ensure(res.residual_norms[j] >= res.eta_used * res.norms[j], || {
                format!("family {i}: member {j} in S'' satisfies the residual criterion")
            })?;
        }
        let light: f64 = res.s_double_prime.iter().map(|&j| res.norms[j]).sum();
        let total: f64 = res.norms.iter().sum();
        ensure(light <= res.epsilon_delta * total * (1.0 + 1e-12), || {
            format!("family {i}: S'' mass {light} exceeds {} of {total}", res.epsilon_delta)
        })?;
        if !contaminated {
            ensure(res.s_double_prime.is_empty(), || {
                format!("aligned family {i} has S'' = {:?}", res.s_double_prime)
            })?;
            ensure(
                res.residual_norms
                    .iter()
                    .zip(&res.norms)
                    .all(|(a, n)| *a <= RESIDUAL_TOL * n),
                || format!("aligned family {i} has residuals {:?}", res.residual_norms),
            )?;
            aligned += 1;
        }
    }
    Ok(format!("200 families ({aligned} aligned)"))
}

/// Least subset size leaving strictly less than an η-share of the mass.
fn brute_force_n(f: &SparseFunction, eta: f64, p: f64) -> usize {
    let top = lp_norm(f, f64::INFINITY).unwrap();
    let m: Vec<f64> = f.iter().map(|(_, v)| (v / top).powf(p)).collect();
    let total: f64 = m.iter().sum();
    let n = m.len();
    let mut best = n;
    for mask in 0u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if size >= best {
            continue;
        }
        let outside: f64 = (0..n).filter(|i| mask & (1 << i) == 0).map(|i| m[i]).sum();
        if outside < eta * total {
            best = size;
        }
    }
    best
}

fn c6_concentration() -> Outcome {
    let mut r = rng(6);
    let mut checks = 0;
    for _ in 0..500 {
        let mut f = random_nonnegative(&mut r, &z1(), 12, 20);
        if r.random_bool(0.2) {
            // Exact ties stress the strict inequality.
            f = f.map_values(|v| (v * 4.0).ceil());
        }
        let p = r.random_range(1.0..4.0);
        for eta in [0.1, 0.3, 0.5, 0.9] {
            let greedy = concentration(&f, eta, p).map_err(|e| e.to_string())?.n;
            let exact = brute_force_n(&f, eta, p);
            ensure(greedy == exact, || {
                format!("greedy {greedy} != exhaustive {exact} at eta={eta}")
            })?;
            checks += 1;
        }
    }
    Ok(format!("{checks} comparisons"))
}

fn nonempty_subsets(pool: &[GroupElement], max_size: usize) -> Vec<Vec<GroupElement>> {
    let mut out = Vec::new();
    for mask in 1u64..(1 << pool.len()) {
        if mask.count_ones() as usize <= max_size {
            out.push(
                (0..pool.len())
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| pool[i].clone())
                    .collect(),
            );
        }
    }
    out
}

fn c7_kemperman() -> Outcome {
    let limit = group::DEFAULT_SUMSET_LIMIT;
    let z = z1();
    let pool: Vec<_> = (0..=6).map(|x| GroupElement::lattice([x])).collect();
    let sets: Vec<FiniteSubset> = nonempty_subsets(&pool, 7)
        .into_iter()
        .map(|s| FiniteSubset::new(z, s).unwrap())
        .collect();
    let mut pairs = 0usize;
    for a in &sets {
        for b in &sets {
            let m = kemperman_margin(&z, a, b, limit).map_err(|e| e.to_string())?;
            ensure(m >= 0, || format!("negative margin {m} in Z"))?;
            pairs += 1;
        }
    }
    let f2 = GroupDescriptor::free(2).unwrap();
    let words = FiniteSubset::free_ball(2, 2).unwrap();
    let free_sets: Vec<FiniteSubset> = nonempty_subsets(words.elements(), 3)
        .into_iter()
        .map(|s| FiniteSubset::new(f2, s).unwrap())
        .collect();
    for a in &free_sets {
        for b in &free_sets {
            let m = kemperman_margin(&f2, a, b, limit).map_err(|e| e.to_string())?;
            ensure(m >= 0, || format!("negative margin {m} in F2"))?;
            pairs += 1;
        }
    }
    let c4 = GroupDescriptor::cyclic(4).unwrap();
    let h = FiniteSubset::parse(c4, "0,2").unwrap();
    let witness = kemperman_margin(&c4, &h, &h, limit).unwrap();
    ensure(witness < 0, || format!("Cyclic(4) subgroup margin is {witness}"))?;
    Ok(format!("{pairs} pairs nonnegative; Cyclic(4) {{0,2}} margin {witness}"))
}

fn c8_hausdorff_young() -> Outcome {
    let cfg = QuadratureConfig::default();
    let mut r = rng(8);
    for _ in 0..100 {
        let dim = r.random_range(1..=2);
        let f = random_complex_lattice(&mut r, dim, 10, 5);
        let q = hy_norm(&f, 2.0, &cfg).map_err(|e| e.to_string())?;
        let l2 = lp_norm(&f, 2.0).unwrap();
        ensure((q.value - l2).abs() <= PARSEVAL_TOL * l2, || {
            format!("Parseval: {} vs {l2}", q.value)
        })?;
    }
    let mut worst = 0.0f64;
    for p in [1.1, 4.0 / 3.0, 1.6, 1.9] {
        for _ in 0..1000 {
            let dim = r.random_range(1..=2);
            let f = random_complex_lattice(&mut r, dim, 8, 4);
            let h = hy_ratio(&f, p, &cfg).map_err(|e| e.to_string())?;
            ensure(h.ratio <= 1.0 + HY_TOL, || format!("HY ratio {} at p={p}", h.ratio))?;
            worst = worst.max(h.ratio);
        }
    }
    let two = SparseFunction::from_entries(
        z1(),
        [(GroupElement::lattice([0]), 1.0), (GroupElement::lattice([1]), 1.0)],
    )
    .unwrap();
    let v = hy_norm(&two, 4.0, &cfg).unwrap().value;
    ensure((v - 6f64.powf(0.25)).abs() <= TWO_POINT_TOL, || {
        format!("two-point L4 norm {v}")
    })?;
    let p = 4.0 / 3.0;
    for _ in 0..200 {
        let f = random_nonnegative(&mut r, &z1(), 8, 6);
        let gaps = hy_chain_gaps(&f, p, &cfg).map_err(|e| e.to_string())?;
        let scale = lp_norm(&f, p).unwrap().powi(2);
        ensure(gaps.gap1 >= -CHAIN_QUADRATURE_TOL * scale, || {
            format!("chain gap1 {}", gaps.gap1)
        })?;
        ensure(gaps.gap2 >= -CHAIN_EXACT_TOL * scale, || {
            format!("chain gap2 {}", gaps.gap2)
        })?;
    }
    Ok(format!("Parseval ok, max HY ratio {worst}, two-point {v}"))
}

fn torsion_record() -> Result<ExperimentRecord, String> {
    torsion_control(4, 2).map_err(|e| e.to_string())
}

fn c9_torsion() -> Outcome {
    let rec = torsion_record()?;
    ensure((rec.ratio - 1.0).abs() <= TORSION_TOL, || {
        format!("ratio {}", rec.ratio)
    })?;
    let h = FiniteSubset::parse(GroupDescriptor::cyclic(4).unwrap(), "0,2").unwrap();
    let n = concentration(&SparseFunction::indicator(&h), 0.1, 1.5).unwrap().n;
    ensure(n == 2 && rec.concentration_n == vec![2; 3], || {
        format!("N = {n}, record {:?}", rec.concentration_n)
    })?;
    ensure(!rec.is_torsion_free, || "record claims torsion-free".into())?;
    Ok(format!("ratio {}, N = 2", rec.ratio))
}

fn doubling_records() -> Result<Vec<ExperimentRecord>, String> {
    let p = ExponentTriple::symmetric();
    let mut cfg = SearchConfig::new(FiniteSubset::lattice_box(1, -30, 30).unwrap(), p).map_err(|e| e.to_string())?;
    cfg.seed = SEED;
    cfg.restarts = DOUBLING_RUNS;
    doubling_scan(&p, DOUBLING_ETA, DOUBLING_DELTA, &cfg).map_err(|e| e.to_string())
}

fn c10_frontier() -> Outcome {
    let recs = doubling_records()?;
    let runs = recs
        .iter()
        .filter_map(|r| match r.parameters.get("run") {
            Some(ParamValue::Int(i)) => Some(*i),
            _ => None,
        })
        .collect::<std::collections::BTreeSet<_>>()
        .len();
    for rec in &recs {
        if rec.concentration_n.iter().any(|&n| n != 1) {
            return Err(format!(
                "non-concentrated near-extremizer: {}",
                to_json_string(rec).unwrap_or_default()
            ));
        }
    }
    ensure(!recs.is_empty(), || "no records".into())?;
    let frontier = empirical_frontier(&recs);
    Ok(format!(
        "{} records from {runs} of {DOUBLING_RUNS} runs, all N_j = 1; frontier {:?}",
        recs.len(),
        frontier.iter().map(|f| (f.max_n, f.delta)).collect::<Vec<_>>()
    ))
}

fn c11_determinism() -> Outcome {
    let serialize = |recs: &[ExperimentRecord]| to_json_string(recs).map_err(|e| e.to_string());
    let a = [
        serialize(&interval_records()?)?,
        serialize(&[torsion_record()?])?,
        serialize(&doubling_records()?)?,
    ];
    let b = [
        serialize(&interval_records()?)?,
        serialize(&[torsion_record()?])?,
        serialize(&doubling_records()?)?,
    ];
    for (i, (x, y)) in a.iter().zip(&b).enumerate() {
        ensure(x == y, || format!("serialization {i} differs between runs"))?;
    }
    Ok(format!("{} bytes identical", a.iter().map(String::len).sum::<usize>()))
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("1 interval example", c1_interval, Duration::from_secs(5)),
        ("2 Young bound", c2_young_bound, Duration::from_secs(60)),
        ("3 reduction law", c3_reduction, Duration::from_secs(30)),
        ("4 Clarkson gaps", c4_clarkson, Duration::from_secs(10)),
        ("5 partition contract", c5_partition, Duration::from_secs(20)),
        ("6 concentration oracle", c6_concentration, Duration::from_secs(60)),
        ("7 Kemperman", c7_kemperman, Duration::from_secs(30)),
        ("8 Hausdorff-Young", c8_hausdorff_young, Duration::from_secs(120)),
        ("9 torsion control", c9_torsion, Duration::from_secs(1)),
        ("10 concentration frontier", c10_frontier, Duration::from_secs(300)),
        ("11 determinism", c11_determinism, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => Err(format!("{detail}; took {elapsed:.2?}, budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS  criterion {name} ({elapsed:.2?}): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name} ({elapsed:.2?}): {why}");
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all 11 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}

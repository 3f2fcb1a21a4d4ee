//! Near-extremizer search and the named experiments: the interval family, the
//! torsion control, the stability-curve scan and the concentration scan.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{lp_norm, SparseFunction};
use crate::group::{FiniteSubset, GroupDescriptor, GroupElement};
use crate::sample::random_element;
use crate::stability::concentration;
use crate::young::{young_ratio, ExponentTriple};

/// Responses are max-normalized before the power map; entries below this are
/// dropped so supports stay small once an iterate has concentrated.
const PRUNE_BELOW: f64 = 1e-100;

/// η used for the `concentration_N` column of every record unless a scan
/// chooses its own.
pub const RECORD_ETA: f64 = 0.1;

/// Largest window the default constructor will enumerate.
const MAX_DEFAULT_WINDOW: usize = 2_000_000;

/// Knobs shared by the ascent-based searches.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Every iterate is restricted to this set.
    pub window: FiniteSubset,
    pub max_iters: usize,
    /// Stop once successive ratios differ by less than this.
    pub convergence_tol: f64,
    pub seed: u64,
    pub exponents: ExponentTriple,
    /// Random restarts per grid point (curve scan) or in total (doubling scan).
    pub restarts: usize,
}

impl SearchConfig {
    pub fn new(window: FiniteSubset, exponents: ExponentTriple) -> Result<Self> {
        let cfg = SearchConfig {
            window,
            max_iters: 200,
            convergence_tol: 1e-12,
            seed: 0,
            exponents,
            restarts: 16,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Config over [`default_window`].
    pub fn for_group(g: &GroupDescriptor, exponents: ExponentTriple) -> Result<Self> {
        Self::new(default_window(g)?, exponents)
    }

    pub fn validate(&self) -> Result<()> {
        if self.window.is_empty() {
            return Err(Error::invalid("search window is empty"));
        }
        if self.convergence_tol.is_nan() || self.convergence_tol <= 0.0 {
            return Err(Error::invalid("convergence tolerance must be positive"));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be at least 1"));
        }
        Ok(())
    }

    fn group(&self) -> GroupDescriptor {
        self.window.group()
    }
}

/// `[-50, 50]^d` for lattices, words of length at most 6 for free groups, the
/// whole group for cyclic groups.
pub fn default_window(g: &GroupDescriptor) -> Result<FiniteSubset> {
    let size: u128 = match *g {
        GroupDescriptor::Lattice { dim } => 101u128.saturating_pow(dim as u32),
        GroupDescriptor::Free { rank } => {
            let k = 2 * rank as u128;
            1 + (0..6).map(|i| k * (k - 1).pow(i)).sum::<u128>()
        }
        GroupDescriptor::Cyclic { order } => order as u128,
    };
    if size > MAX_DEFAULT_WINDOW as u128 {
        return Err(Error::ResourceLimit {
            what: "default search window",
            needed: size,
            limit: MAX_DEFAULT_WINDOW as u128,
        });
    }
    match *g {
        GroupDescriptor::Lattice { dim } => FiniteSubset::lattice_box(dim, -50, 50),
        GroupDescriptor::Free { rank } => FiniteSubset::free_ball(rank, 6),
        GroupDescriptor::Cyclic { order } => FiniteSubset::new(*g, (0..order).map(GroupElement::Cyclic)),
    }
}

/// Short human label for a window, stored with every record.
fn window_label(w: &FiniteSubset) -> String {
    match w.group() {
        GroupDescriptor::Lattice { dim } => {
            let mut lo = i64::MAX;
            let mut hi = i64::MIN;
            for e in w.iter() {
                if let GroupElement::Lattice(c) = e {
                    for &x in c {
                        lo = lo.min(x);
                        hi = hi.max(x);
                    }
                }
            }
            let full = (hi - lo + 1) as u128;
            if full.checked_pow(dim as u32) == Some(w.len() as u128) {
                format!("[{lo},{hi}]^{dim}")
            } else {
                format!("custom({})", w.len())
            }
        }
        GroupDescriptor::Free { .. } => {
            let longest = w
                .iter()
                .map(|e| match e {
                    GroupElement::Free(word) => word.len(),
                    _ => 0,
                })
                .max()
                .unwrap_or(0);
            format!("words<={longest}({})", w.len())
        }
        GroupDescriptor::Cyclic { order } => {
            if w.len() as u64 == order {
                "all".into()
            } else {
                format!("custom({})", w.len())
            }
        }
    }
}

/// A scalar experiment parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        ParamValue::Float(v)
    }
}
impl From<i64> for ParamValue {
    fn from(v: i64) -> Self {
        ParamValue::Int(v)
    }
}
impl From<usize> for ParamValue {
    fn from(v: usize) -> Self {
        ParamValue::Int(v as i64)
    }
}
impl From<u64> for ParamValue {
    fn from(v: u64) -> Self {
        ParamValue::Int(v as i64)
    }
}
impl From<bool> for ParamValue {
    fn from(v: bool) -> Self {
        ParamValue::Bool(v)
    }
}
impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Text(v.to_string())
    }
}
impl From<String> for ParamValue {
    fn from(v: String) -> Self {
        ParamValue::Text(v)
    }
}

/// One row of experiment output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub experiment_name: String,
    pub parameters: BTreeMap<String, ParamValue>,
    pub ratio: f64,
    /// Exact value of the trilinear form, when it is an integer known in
    /// closed form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<u128>,
    /// `||f_j||_inf / ||f_j||_{p_j}` for each function.
    pub t_values: Vec<f64>,
    /// Concentration count of each function.
    #[serde(rename = "concentration_N")]
    pub concentration_n: Vec<usize>,
    pub iterations_used: usize,
    pub is_torsion_free: bool,
    /// Seconds; left empty unless timing was requested, so that records are
    /// reproducible byte for byte.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl ExperimentRecord {
    fn new(name: &str, g: &GroupDescriptor) -> Self {
        ExperimentRecord {
            experiment_name: name.to_string(),
            parameters: BTreeMap::new(),
            ratio: 0.0,
            form: None,
            t_values: Vec::new(),
            concentration_n: Vec::new(),
            iterations_used: 0,
            is_torsion_free: g.is_torsion_free(),
            wall_time: None,
        }
    }

    fn param(mut self, key: &str, v: impl Into<ParamValue>) -> Self {
        self.parameters.insert(key.to_string(), v.into());
        self
    }

    fn exponents(self, p: &ExponentTriple) -> Self {
        self.param("p1", p.p1()).param("p2", p.p2()).param("p3", p.p3())
    }

    /// Fills `t_values` and `concentration_n` from a triple.
    fn describe(mut self, triple: &[SparseFunction; 3], p: &ExponentTriple, eta: f64) -> Result<Self> {
        let ps = p.as_array();
        self.t_values = triple
            .iter()
            .zip(ps)
            .map(|(f, pj)| t_value(f, pj))
            .collect::<Result<_>>()?;
        self.concentration_n = triple
            .iter()
            .zip(ps)
            .map(|(f, pj)| concentration(f, eta, pj).map(|r| r.n))
            .collect::<Result<_>>()?;
        Ok(self)
    }
}

/// `||f||_inf / ||f||_p`, in `(0, 1]` for nonzero `f`.
pub fn t_value(f: &SparseFunction, p: f64) -> Result<f64> {
    if f.is_zero() {
        return Err(Error::invalid("t of the zero function"));
    }
    Ok((lp_norm(f, f64::INFINITY)? / lp_norm(f, p)?).min(1.0))
}

/// Final triple of an ascent and the ratio after every full cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct AscentOutcome {
    pub triple: [SparseFunction; 3],
    /// Starts with the ratio of the initial triple.
    pub ratio_history: Vec<f64>,
}

/// Duality-optimal response for slot `j` (0-based) given the other two,
/// restricted to the window: `h1(x) = Σ f2(y) f3(x+y)`, `h2(y) = Σ f1(x) f3(x+y)`,
/// `h3 = f1 * f2`.
fn response(j: usize, fs: &[SparseFunction; 3], window: &FiniteSubset) -> BTreeMap<GroupElement, f64> {
    let g = window.group();
    let mut acc: BTreeMap<GroupElement, f64> = BTreeMap::new();
    let (a, b) = match j {
        0 => (&fs[1], &fs[2]),
        1 => (&fs[0], &fs[2]),
        _ => (&fs[0], &fs[1]),
    };
    for (u, va) in a.iter() {
        let inv_u = g.neg_unchecked(u);
        for (v, vb) in b.iter() {
            let x = match j {
                0 => g.add_unchecked(v, &inv_u),
                1 => g.add_unchecked(&inv_u, v),
                _ => g.add_unchecked(u, v),
            };
            if window.contains(&x) {
                *acc.entry(x).or_insert(0.0) += va * vb;
            }
        }
    }
    acc
}

/// `h^(p'-1)`, normalized in `ℓ^p`.
fn dual_power(g: GroupDescriptor, h: BTreeMap<GroupElement, f64>, p: f64, index: usize) -> Result<SparseFunction> {
    let top = h.values().copied().fold(0.0, f64::max);
    if top.is_nan() || top <= 0.0 {
        return Err(Error::Degenerate { index });
    }
    let power = 1.0 / (p - 1.0);
    let values: BTreeMap<_, _> = h
        .into_iter()
        .map(|(x, v)| (x, (v / top).powf(power)))
        .filter(|(_, v)| *v >= PRUNE_BELOW)
        .collect();
    let f = SparseFunction::from_map_unchecked(g, values);
    let n = lp_norm(&f, p)?;
    Ok(f.scaled(1.0 / n))
}

type Projection<'a> = &'a (dyn Fn(&SparseFunction) -> Option<SparseFunction> + Sync);

fn check_init(init: &[SparseFunction; 3], window: &FiniteSubset) -> Result<()> {
    for (j, f) in init.iter().enumerate() {
        f.check_group(&window.group())?;
        if f.is_zero() {
            return Err(Error::invalid(format!("initial function {} is zero", j + 1)));
        }
        if !f.is_nonnegative() {
            return Err(Error::invalid(format!(
                "initial function {} must be nonnegative",
                j + 1
            )));
        }
        if let Some((x, _)) = f.iter().find(|(x, _)| !window.contains(x)) {
            return Err(Error::invalid(format!(
                "initial function {} has support point {} outside the window",
                j + 1,
                window.group().format_element(x)
            )));
        }
    }
    Ok(())
}

/// Core loop. `project` (if any) is applied to `f1` after each of its updates;
/// an infeasible projection ends the run. `observe` sees every full-cycle
/// iterate, starting with the initial triple at iteration 0.
fn ascend(
    init: [SparseFunction; 3],
    cfg: &SearchConfig,
    project: Option<Projection<'_>>,
    mut observe: impl FnMut(usize, &[SparseFunction; 3], f64) -> Result<()>,
) -> Result<AscentOutcome> {
    let p = cfg.exponents;
    let ps = p.as_array();
    let g = cfg.group();
    let mut fs = init;
    let mut last = young_ratio(&fs[0], &fs[1], &fs[2], &p)?;
    observe(0, &fs, last)?;
    let mut history = vec![last];
    for it in 1..=cfg.max_iters {
        if last >= 1.0 {
            break;
        }
        let mut next = fs.clone();
        let mut feasible = true;
        for j in 0..3 {
            let h = response(j, &next, &cfg.window);
            let mut f = dual_power(g, h, ps[j], j + 1)?;
            if j == 0 {
                if let Some(proj) = project {
                    match proj(&f) {
                        Some(q) => f = q,
                        None => {
                            feasible = false;
                            break;
                        }
                    }
                }
            }
            next[j] = f;
        }
        if !feasible {
            break;
        }
        fs = next;
        let r = young_ratio(&fs[0], &fs[1], &fs[2], &p)?;
        observe(it, &fs, r)?;
        history.push(r);
        let settled = (r - last).abs() < cfg.convergence_tol;
        last = r;
        if settled {
            break;
        }
    }
    Ok(AscentOutcome {
        triple: fs,
        ratio_history: history,
    })
}

/// Alternating maximization of the Young ratio: each `f_j` in turn becomes the
/// normalized maximizer of the form against the other two, restricted to the
/// window. The history is nondecreasing up to rounding.
pub fn alternating_ascent(init: [SparseFunction; 3], cfg: &SearchConfig) -> Result<AscentOutcome> {
    cfg.validate()?;
    check_init(&init, &cfg.window)?;
    ascend(init, cfg, None, |_, _, _| Ok(()))
}

/// `{k·u : |k| <= n}` along the first generator (`e_1`, the letter `1`, or the
/// residue 1).
fn interval_set(g: &GroupDescriptor, n: u64) -> Result<FiniteSubset> {
    let unit = match *g {
        GroupDescriptor::Lattice { dim } => {
            let mut c = vec![0; dim];
            c[0] = 1;
            GroupElement::Lattice(c)
        }
        GroupDescriptor::Free { .. } => GroupElement::word([1]),
        GroupDescriptor::Cyclic { .. } => GroupElement::Cyclic(1),
    };
    let back = g.neg_unchecked(&unit);
    let mut pts = vec![g.identity()];
    let (mut fwd, mut bwd) = (g.identity(), g.identity());
    for _ in 0..n {
        fwd = g.add_unchecked(&fwd, &unit);
        bwd = g.add_unchecked(&bwd, &back);
        pts.push(fwd.clone());
        pts.push(bwd.clone());
    }
    FiniteSubset::new(*g, pts)
}

/// Least `k` with `m - k < eta·m`, matching [`concentration`] on an indicator
/// of `m` points without materializing it.
fn flat_concentration(m: u64, eta: f64) -> usize {
    let c = eta * m as f64;
    let mut k = ((m as f64 - c).floor().max(1.0) as u64).min(m);
    while k < m && (m - k) as f64 >= c {
        k += 1;
    }
    while k > 1 && ((m - (k - 1)) as f64) < c {
        k -= 1;
    }
    k as usize
}

/// Indicators of `[-N, N] ⊂ ℤ`: form `3N² + 3N + 1`, ratio
/// `(3N² + 3N + 1) / (2N + 1)²`, decreasing to 3/4.
pub fn interval_example(n: u64, p: &ExponentTriple) -> Result<ExperimentRecord> {
    if n == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    let n128 = n as u128;
    let m = 2 * n128 + 1;
    let form = 3 * n128 * n128 + 3 * n128 + 1;
    let g = GroupDescriptor::Lattice { dim: 1 };
    let mut rec = ExperimentRecord::new("interval", &g)
        .param("N", n)
        .exponents(p)
        .param("eta", RECORD_ETA);
    rec.form = Some(form);
    rec.ratio = form as f64 / (m * m) as f64;
    rec.t_values = p.as_array().iter().map(|pj| (m as f64).powf(-1.0 / pj)).collect();
    rec.concentration_n = vec![flat_concentration(m as u64, RECORD_ETA); 3];
    Ok(rec)
}

/// The indicator triple of a finite subgroup `H = ⟨generator⟩ ⊂ ℤ_n`, which
/// attains equality.
pub fn torsion_control(n: u64, generator: u64) -> Result<ExperimentRecord> {
    let g = GroupDescriptor::cyclic(n)?;
    let gen = generator % n;
    let mut h = vec![0u64];
    let mut x = gen;
    while x != 0 {
        h.push(x);
        x = (x + gen) % n;
    }
    let set = FiniteSubset::new(g, h.into_iter().map(GroupElement::Cyclic))?;
    let size = set.len();
    // Any η below 1/|H| makes every point of H necessary.
    let eta = if RECORD_ETA < 1.0 / size as f64 {
        RECORD_ETA
    } else {
        0.5 / size as f64
    };
    let f = SparseFunction::indicator(&set);
    let p = ExponentTriple::symmetric();
    let triple = [f.clone(), f.clone(), f];
    let mut rec = ExperimentRecord::new("torsion_control", &g)
        .param("n", n)
        .param("generator", gen)
        .param("subgroup_order", size)
        .param("eta", eta)
        .exponents(&p)
        .describe(&triple, &p, eta)?;
    rec.ratio = young_ratio(&triple[0], &triple[1], &triple[2], &p)?;
    Ok(rec)
}

/// Modifies `f` so that `||f||_inf / ||f||_p = t`: raises the largest value
/// when `f` is too flat, and clips the top values to a common level when it is
/// too peaked. `None` if the support is too small for `t`.
pub fn project_to_t(f: &SparseFunction, t: f64, p: f64) -> Option<SparseFunction> {
    if f.is_zero() || !(t > 0.0 && t <= 1.0) {
        return None;
    }
    let mut vals: Vec<(&GroupElement, f64)> = f.iter().map(|(x, v)| (x, *v)).collect();
    vals.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let top = vals[0].1;
    let current = t_value(f, p).ok()?;
    if ((current - t) / t).abs() <= 1e-15 {
        return Some(f.clone());
    }
    let g = f.group();
    if t == 1.0 {
        return SparseFunction::delta(g, vals[0].0.clone(), top).ok();
    }
    // Work with values scaled so the maximum is 1.
    let w: Vec<f64> = vals.iter().map(|(_, v)| v / top).collect();
    let tp = t.powf(p);
    let mut out: BTreeMap<GroupElement, f64> = BTreeMap::new();
    if t > current {
        let rest: f64 = w[1..].iter().map(|v| v.powf(p)).sum();
        let raised = (tp * rest / (1.0 - tp)).powf(1.0 / p);
        out.insert(vals[0].0.clone(), raised * top);
        for (x, v) in &vals[1..] {
            out.insert((*x).clone(), *v);
        }
    } else {
        // Need Σ min(w/c, 1)^p = t^-p for a clip level c.
        let target = 1.0 / tp;
        let n = w.len();
        if target > n as f64 * (1.0 + 1e-12) {
            return None;
        }
        let mut tail: Vec<f64> = vec![0.0; n + 1];
        for k in (0..n).rev() {
            tail[k] = tail[k + 1] + w[k].powf(p);
        }
        let mut level = w[n - 1];
        for k in 1..n {
            if target > k as f64 {
                let c = (tail[k] / (target - k as f64)).powf(1.0 / p);
                if c <= w[k - 1] && c >= w[k] {
                    level = c;
                    break;
                }
            }
        }
        for (x, v) in &vals {
            out.insert((*x).clone(), v.min(level * top));
        }
    }
    let q = SparseFunction::from_map_unchecked(g, out);
    let achieved = t_value(&q, p).ok()?;
    (((achieved - t) / t).abs() <= 1e-9).then_some(q)
}

fn chacha(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Random element of the window near the identity.
fn window_point<R: Rng + ?Sized>(rng: &mut R, window: &FiniteSubset, spread: i64) -> GroupElement {
    let g = window.group();
    for _ in 0..32 {
        let x = random_element(rng, &g, spread);
        if window.contains(&x) {
            return x;
        }
    }
    window.elements()[rng.random_range(0..window.len())].clone()
}

fn random_window_function<R: Rng + ?Sized>(
    rng: &mut R,
    window: &FiniteSubset,
    size: usize,
    spread: i64,
) -> SparseFunction {
    let entries: Vec<_> = (0..size.max(1))
        .map(|_| (window_point(rng, window, spread), rng.random_range(0.05..1.0)))
        .collect();
    SparseFunction::from_entries(window.group(), entries).expect("window points are valid")
}

/// Keeps the part of `f` inside the window.
fn restrict(f: &SparseFunction, window: &FiniteSubset) -> SparseFunction {
    let values = f
        .iter()
        .filter(|(x, _)| window.contains(x))
        .map(|(x, v)| (x.clone(), *v))
        .collect();
    SparseFunction::from_map_unchecked(f.group(), values)
}

struct Best {
    ratio: f64,
    triple: [SparseFunction; 3],
    iterations: usize,
}

fn curve_point(i: usize, t: f64, cfg: &SearchConfig) -> Result<ExperimentRecord> {
    let p = cfg.exponents;
    let p1 = p.p1();
    let g = cfg.group();
    let window = &cfg.window;
    let project = move |f: &SparseFunction| project_to_t(f, t, p1);
    let mut seeds: Vec<[SparseFunction; 3]> = Vec::new();

    let origin = if window.contains(&g.identity()) {
        g.identity()
    } else {
        window.elements()[0].clone()
    };
    let delta = SparseFunction::delta(g, origin, 1.0)?;
    seeds.push([delta.clone(), delta.clone(), delta]);

    // Largest interval whose flat t is at least the target.
    let max_points = (t.powf(-p1) + 1e-9).floor() as u64;
    let half = max_points.saturating_sub(1) / 2;
    for n in [half, half + 1] {
        let ind = restrict(&SparseFunction::indicator(&interval_set(&g, n)?), window);
        if !ind.is_zero() {
            seeds.push([ind.clone(), ind.clone(), ind]);
        }
    }

    let mut rng = chacha(cfg.seed, i as u64);
    let need = (t.powf(-p1).ceil() as usize).max(1);
    for _ in 0..cfg.restarts {
        let size1 = need + rng.random_range(0..=need.max(4));
        let spread = (size1 as i64).max(3);
        let f1 = random_window_function(&mut rng, window, size1, spread);
        let (n2, n3) = (rng.random_range(1..=12), rng.random_range(1..=12));
        let f2 = random_window_function(&mut rng, window, n2, spread);
        let f3 = random_window_function(&mut rng, window, n3, spread);
        seeds.push([f1, f2, f3]);
    }

    let mut best: Option<Best> = None;
    for seed in seeds {
        let Some(f1) = project(&seed[0]) else { continue };
        let [_, f2, f3] = seed;
        let init = [f1, f2, f3];
        let mut local: Option<(f64, [SparseFunction; 3], usize)> = None;
        ascend(init, cfg, Some(&project), |it, fs, r| {
            if local.as_ref().is_none_or(|(b, _, _)| r > *b) {
                local = Some((r, fs.clone(), it));
            }
            Ok(())
        })?;
        if let Some((r, triple, it)) = local {
            if best.as_ref().is_none_or(|b| r > b.ratio) {
                best = Some(Best {
                    ratio: r,
                    triple,
                    iterations: it,
                });
            }
        }
    }
    let best =
        best.ok_or_else(|| Error::invalid(format!("t = {t} is not attainable by any seed inside the window")))?;
    let mut rec = ExperimentRecord::new("curve_scan", &g)
        .param("t", t)
        .param("grid_index", i)
        .exponents(&p)
        .param("seed", cfg.seed)
        .param("restarts", cfg.restarts)
        .param("window", window_label(window))
        .param("eta", RECORD_ETA)
        .describe(&best.triple, &p, RECORD_ETA)?;
    rec.ratio = best.ratio;
    rec.iterations_used = best.iterations;
    Ok(rec)
}

/// Best ratio found with `||f1||_inf / ||f1||_{p1} = t` for each `t` in the
/// grid. Each record also carries `envelope_ratio`, the running maximum of the
/// best ratios over the grid so far.
pub fn curve_scan(p: &ExponentTriple, t_grid: &[f64], cfg: &SearchConfig) -> Result<Vec<ExperimentRecord>> {
    cfg.validate()?;
    if t_grid.is_empty() {
        return Err(Error::invalid("t grid is empty"));
    }
    for &t in t_grid {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::invalid(format!("t = {t} is infeasible; t must lie in (0, 1]")));
        }
    }
    if t_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::invalid("t grid must be sorted ascending"));
    }
    let cfg = SearchConfig {
        exponents: *p,
        ..cfg.clone()
    };
    let mut records = t_grid
        .par_iter()
        .enumerate()
        .map(|(i, &t)| curve_point(i, t, &cfg))
        .collect::<Result<Vec<_>>>()?;
    let mut envelope = 0.0f64;
    for rec in &mut records {
        envelope = envelope.max(rec.ratio);
        rec.parameters.insert("envelope_ratio".into(), envelope.into());
    }
    Ok(records)
}

/// One point of the empirical concentration frontier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    /// Largest per-function concentration count considered.
    pub max_n: usize,
    /// Smallest defect `1 - ratio` among records whose largest count is at
    /// least `max_n`.
    pub delta: f64,
}

/// For each observed count `k`, the least defect at which some recorded triple
/// had a function needing at least `k` points.
pub fn empirical_frontier(records: &[ExperimentRecord]) -> Vec<FrontierPoint> {
    let pts: Vec<(usize, f64)> = records
        .iter()
        .map(|r| {
            (
                r.concentration_n.iter().copied().max().unwrap_or(0),
                (1.0 - r.ratio).max(0.0),
            )
        })
        .collect();
    let mut ks: Vec<usize> = pts.iter().map(|p| p.0).collect();
    ks.sort_unstable();
    ks.dedup();
    ks.into_iter()
        .map(|k| FrontierPoint {
            max_n: k,
            delta: pts
                .iter()
                .filter(|p| p.0 >= k)
                .map(|p| p.1)
                .fold(f64::INFINITY, f64::min),
        })
        .collect()
}

struct ScanContext<'a> {
    p: ExponentTriple,
    eta: f64,
    delta_max: f64,
    cfg: &'a SearchConfig,
}

impl ScanContext<'_> {
    fn record(&self, source: &str, triple: &[SparseFunction; 3], ratio: f64) -> Result<ExperimentRecord> {
        let mut rec = ExperimentRecord::new("doubling_scan", &self.cfg.group())
            .param("source", source)
            .param("eta", self.eta)
            .param("delta_max", self.delta_max)
            .param("delta", (1.0 - ratio).max(0.0))
            .exponents(&self.p)
            .param("seed", self.cfg.seed)
            .param("window", window_label(&self.cfg.window))
            .describe(triple, &self.p, self.eta)?;
        rec.ratio = ratio;
        Ok(rec)
    }

    fn structured(&self) -> Result<Vec<ExperimentRecord>> {
        let g = self.cfg.group();
        let w = &self.cfg.window;
        let mut out = Vec::new();
        let origin = g.identity();
        let mut families: Vec<(String, [SparseFunction; 3])> = Vec::new();
        if w.contains(&origin) {
            let d = SparseFunction::delta(g, origin.clone(), 1.0)?;
            families.push(("delta".into(), [d.clone(), d.clone(), d]));
            let step = interval_set(&g, 1)?;
            let next = step.iter().find(|x| **x != origin).cloned();
            if let Some(next) = next.filter(|x| w.contains(x)) {
                for a in [0.001, 0.01, 0.05, 0.1, 0.3, 1.0] {
                    let f = SparseFunction::from_entries(g, [(origin.clone(), 1.0), (next.clone(), a)])?;
                    families.push((format!("two_point:{a}"), [f.clone(), f.clone(), f]));
                }
            }
        }
        for n in [1u64, 2, 5, 10, 20, 30, 50, 100] {
            let set = interval_set(&g, n)?;
            if set.iter().all(|x| w.contains(x)) {
                let f = SparseFunction::indicator(&set);
                families.push((format!("interval:{n}"), [f.clone(), f.clone(), f]));
            }
        }
        for (name, triple) in families {
            let r = young_ratio(&triple[0], &triple[1], &triple[2], &self.p)?;
            if r >= 1.0 - self.delta_max {
                out.push(self.record(&name, &triple, r)?);
            }
        }
        Ok(out)
    }

    fn run(&self, index: usize) -> Result<Vec<ExperimentRecord>> {
        let mut rng = chacha(self.cfg.seed, index as u64);
        let w = &self.cfg.window;
        let init = [0, 1, 2].map(|_| {
            let n = rng.random_range(1..=12);
            random_window_function(&mut rng, w, n, 10)
        });
        let mut out = Vec::new();
        ascend(init, self.cfg, None, |it, fs, r| {
            if r >= 1.0 - self.delta_max {
                let mut rec = self.record("ascent", fs, r)?.param("run", index).param("iteration", it);
                rec.iterations_used = it;
                out.push(rec);
            }
            Ok(())
        })?;
        Ok(out)
    }
}

/// Records every triple with ratio at least `1 - delta_max`, from structured
/// families and from `cfg.restarts` seeded ascent runs, together with the
/// concentration count of each function at `eta`. Records come in a fixed
/// order: structured families, then runs by index and iteration.
pub fn doubling_scan(
    p: &ExponentTriple,
    eta: f64,
    delta_max: f64,
    cfg: &SearchConfig,
) -> Result<Vec<ExperimentRecord>> {
    cfg.validate()?;
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::invalid(format!("eta must lie in (0, 1), got {eta}")));
    }
    if !(delta_max > 0.0 && delta_max < 1.0) {
        return Err(Error::invalid(format!("delta_max must lie in (0, 1), got {delta_max}")));
    }
    let cfg = SearchConfig {
        exponents: *p,
        ..cfg.clone()
    };
    let ctx = ScanContext {
        p: *p,
        eta,
        delta_max,
        cfg: &cfg,
    };
    let mut records = ctx.structured()?;
    let runs = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| ctx.run(i))
        .collect::<Result<Vec<_>>>()?;
    records.extend(runs.into_iter().flatten());
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z1() -> GroupDescriptor {
        GroupDescriptor::Lattice { dim: 1 }
    }

    fn interval(n: i64) -> SparseFunction {
        SparseFunction::indicator(&FiniteSubset::new(z1(), (-n..=n).map(|k| GroupElement::lattice([k]))).unwrap())
    }

    fn small_cfg(half: i64) -> SearchConfig {
        SearchConfig::new(
            FiniteSubset::lattice_box(1, -half, half).unwrap(),
            ExponentTriple::symmetric(),
        )
        .unwrap()
    }

    #[test]
    fn interval_closed_form() {
        let p = ExponentTriple::symmetric();
        let r = interval_example(1, &p).unwrap();
        assert_eq!(r.form, Some(7));
        assert_eq!(r.ratio, 7.0 / 9.0);
        let r = interval_example(100, &p).unwrap();
        assert_eq!(r.form, Some(30301));
        assert!((r.ratio - 30301.0 / 40401.0).abs() < 1e-12);
        assert!((r.t_values[0] - 201f64.powf(-1.0 / 1.5)).abs() < 1e-15);
    }

    #[test]
    fn flat_concentration_matches_greedy() {
        for m in 1..60u64 {
            let f = interval(((m - 1) / 2) as i64);
            let m = f.len() as u64;
            for eta in [0.1, 0.3, 0.5, 0.9] {
                assert_eq!(
                    flat_concentration(m, eta),
                    concentration(&f, eta, 1.5).unwrap().n,
                    "m={m} eta={eta}"
                );
            }
        }
    }

    #[test]
    fn torsion_examples() {
        for (n, gen, size) in [(4, 2, 2), (6, 2, 3), (5, 1, 5)] {
            let r = torsion_control(n, gen).unwrap();
            assert!((r.ratio - 1.0).abs() < 1e-12);
            assert_eq!(r.concentration_n, vec![size; 3]);
            assert!(!r.is_torsion_free);
        }
    }

    #[test]
    fn delta_triple_is_fixed() {
        let d = SparseFunction::delta(z1(), GroupElement::lattice([0]), 1.0).unwrap();
        let out = alternating_ascent([d.clone(), d.clone(), d], &small_cfg(10)).unwrap();
        assert_eq!(out.ratio_history, vec![1.0]);
    }

    #[test]
    fn interval_triple_ascends() {
        let f = interval(5);
        let out = alternating_ascent([f.clone(), f.clone(), f], &small_cfg(50)).unwrap();
        let h = &out.ratio_history;
        assert!((h[0] - 91.0 / 121.0).abs() < 1e-12);
        assert!(h[1] > h[0]);
        for w in h.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
    }

    #[test]
    fn init_outside_window_rejected() {
        let f = interval(20);
        assert!(alternating_ascent([f.clone(), f.clone(), f], &small_cfg(10)).is_err());
    }

    #[test]
    fn projection_hits_target() {
        let f = SparseFunction::from_entries(
            z1(),
            [
                (GroupElement::lattice([0]), 3.0),
                (GroupElement::lattice([1]), 1.0),
                (GroupElement::lattice([2]), 0.5),
            ],
        )
        .unwrap();
        let current = t_value(&f, 1.5).unwrap();
        for t in [0.75, current, 0.95, 1.0] {
            let q = project_to_t(&f, t, 1.5).unwrap();
            assert!((t_value(&q, 1.5).unwrap() - t).abs() < 1e-9, "t={t}");
        }
        // three points cannot be flatter than 3^{-1/p}
        assert!(project_to_t(&f, 0.4, 1.5).is_none());
    }

    #[test]
    fn curve_examples() {
        let p = ExponentTriple::symmetric();
        let mut cfg = small_cfg(30);
        cfg.restarts = 2;
        cfg.max_iters = 20;
        let t10 = 21f64.powf(-1.0 / 1.5);
        let recs = curve_scan(&p, &[t10, 1.0], &cfg).unwrap();
        assert!(recs[0].ratio >= 331.0 / 441.0 - 1e-12);
        assert!((recs[1].ratio - 1.0).abs() < 1e-12);
        assert!(curve_scan(&p, &[1.5], &cfg).is_err());
    }

    #[test]
    fn frontier_collapses() {
        let p = ExponentTriple::symmetric();
        let mut cfg = small_cfg(30);
        cfg.restarts = 8;
        let recs = doubling_scan(&p, 0.1, 0.3, &cfg).unwrap();
        assert!(recs.iter().any(|r| r.parameters["source"] == ParamValue::from("delta")));
        let frontier = empirical_frontier(&recs);
        assert_eq!(frontier[0].max_n, 1);
        assert_eq!(frontier[0].delta, 0.0);
    }
}

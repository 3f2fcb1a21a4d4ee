//! `young`: command-line access to the young-core workbench.
//!
//! Every subcommand emits records (JSON Lines by default, or CSV) with an
//! `experiment_name` and a `parameters` map. Exit codes: 0 success, 2 invalid
//! input, 3 resource limit, 64 unknown subcommand.

mod config;
mod emit;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Map, Value};
use thiserror::Error;

use young_core::function::Scalar;
use young_core::hausdorff_young::hy_chain_gaps;
use young_core::search::{default_window, empirical_frontier, AscentOutcome};
use young_core::stability::concentration;
use young_core::*;

pub use config::{CliConfig, Format, ENV_PREFIX};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] young_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("bad input: {0}")]
    Input(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("writing output: {0}")]
    Output(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_resource() => EXIT_RESOURCE,
            _ => EXIT_INVALID,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "young",
    version,
    about = "Near-extremizers of Young's convolution inequality on discrete groups"
)]
struct Cli {
    /// Settings file with `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write records here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Add `wall_time` (seconds) to experiment records.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

/// Functions are given as `@file.json`, a JSON object, or inline
/// `ELEMENT=VALUE;...` (inline needs `--group`).
#[derive(Debug, Subcommand)]
enum Command {
    /// Young ratio of a triple.
    Ratio(TripleArgs),
    /// Dyadic layers, dominant layer and Lorentz norms of a function.
    Decompose(DecomposeArgs),
    /// Least number of points carrying all but an η-share of ||f||_p^p.
    Concentration(ConcentrationArgs),
    /// Hölder reduction of a triple to exponents (s1, s2, 1).
    Reduce(TripleArgs),
    /// Norming-functional partition of a family.
    Partition(PartitionArgs),
    /// Sumset A + B (or the n-fold sumset of A) and its Kemperman margin.
    Sumset(SumsetArgs),
    /// Hausdorff–Young ratio on the torus.
    Hy(HyArgs),
    /// Alternating ascent from an initial triple.
    Ascend(AscendArgs),
    /// Best ratio under the flatness constraint ||f1||_inf/||f1||_p1 = t.
    Curve(CurveArgs),
    /// Indicator triple of [-N, N].
    Interval(IntervalArgs),
    /// Indicator triple of a finite subgroup of Z_n.
    Torsion(TorsionArgs),
    /// Near-extremizers found by ascent and their concentration counts.
    Doubling(DoublingArgs),
}

#[derive(Debug, Args)]
struct TripleArgs {
    /// Group `Z:d`, `F:k` or `C:n`; required for inline functions.
    #[arg(long)]
    group: Option<String>,
    /// First function: `@file.json`, a JSON object, or inline `x=v;y=w`.
    #[arg(long, allow_hyphen_values = true)]
    f1: String,
    /// Second function, same forms as `--f1`.
    #[arg(long, allow_hyphen_values = true)]
    f2: String,
    /// Third function, same forms as `--f1`.
    #[arg(long, allow_hyphen_values = true)]
    f3: String,
    /// Exponents `p1,p2,p3`, or `p1,p2` to complete the third.
    #[arg(long, default_value = "1.5,1.5,1.5")]
    p: String,
}

#[derive(Debug, Args)]
struct DecomposeArgs {
    /// Group `Z:d`, `F:k` or `C:n`; required for inline functions.
    #[arg(long)]
    group: Option<String>,
    /// Function: `@file.json`, a JSON object, or inline `x=v;y=w`.
    #[arg(long, allow_hyphen_values = true)]
    f: String,
    /// Exponent.
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Lorentz second exponent; defaults to 2p.
    #[arg(long)]
    r: Option<f64>,
}

#[derive(Debug, Args)]
struct ConcentrationArgs {
    /// Group `Z:d`, `F:k` or `C:n`; required for inline functions.
    #[arg(long)]
    group: Option<String>,
    /// Function: `@file.json`, a JSON object, or inline `x=v;y=w`.
    #[arg(long, allow_hyphen_values = true)]
    f: String,
    /// Tail share η left out of the concentration count.
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    /// Exponent.
    #[arg(long, default_value_t = 1.5)]
    p: f64,
}

#[derive(Debug, Args)]
struct PartitionArgs {
    /// Group `Z:d`, `F:k` or `C:n`; required for inline functions.
    #[arg(long)]
    group: Option<String>,
    /// A JSON array of functions (`@file.json` or literal).
    #[arg(long)]
    family: Option<String>,
    /// One family member; repeatable.
    #[arg(long = "f", allow_hyphen_values = true)]
    members: Vec<String>,
    /// Exponent.
    #[arg(long)]
    p: f64,
    /// Upper bound on the triangle-inequality defect.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
}

#[derive(Debug, Args)]
struct SumsetArgs {
    /// Group `Z:d`, `F:k` or `C:n`.
    #[arg(long)]
    group: String,
    #[arg(long = "A", allow_hyphen_values = true)]
    a: String,
    #[arg(long = "B", allow_hyphen_values = true)]
    b: Option<String>,
    /// n-fold sumset of A instead of A + B.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Debug, Args)]
struct HyArgs {
    /// Group `Z:d`, `F:k` or `C:n`; required for inline functions.
    #[arg(long)]
    group: Option<String>,
    /// Function: `@file.json`, a JSON object, or inline `x=v;y=w`.
    #[arg(long, allow_hyphen_values = true)]
    f: String,
    /// Exponent.
    #[arg(long, default_value_t = 4.0 / 3.0)]
    p: f64,
    /// Also report the convolution-chain gaps (p <= 4/3).
    #[arg(long)]
    chain: bool,
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Seed for the random restarts.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Iteration cap per ascent run.
    #[arg(long, default_value_t = 200)]
    max_iters: usize,
}

#[derive(Debug, Args)]
struct AscendArgs {
    #[command(flatten)]
    triple: TripleArgs,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Debug, Args)]
struct CurveArgs {
    /// Group `Z:d`, `F:k` or `C:n`.
    #[arg(long, default_value = "Z:1")]
    group: String,
    #[arg(long, default_value = "1.5,1.5,1.5")]
    p: String,
    /// Ascending grid, comma-separated, each in (0, 1].
    #[arg(long, allow_hyphen_values = true)]
    t: String,
    /// Random restarts per grid point.
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Debug, Args)]
struct IntervalArgs {
    /// Half-width: the interval is [-N, N].
    #[arg(long = "N")]
    n: u64,
    #[arg(long, default_value = "1.5,1.5,1.5")]
    p: String,
}

#[derive(Debug, Args)]
struct TorsionArgs {
    /// Order of the cyclic group.
    #[arg(long)]
    n: u64,
    /// Generator of the subgroup.
    #[arg(long, default_value_t = 1)]
    generator: u64,
}

#[derive(Debug, Args)]
struct DoublingArgs {
    /// Group `Z:d`, `F:k` or `C:n`.
    #[arg(long, default_value = "Z:1")]
    group: String,
    #[arg(long, default_value = "1.5,1.5,1.5")]
    p: String,
    /// Tail share η left out of the concentration count.
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    /// Keep iterates with ratio at least 1 - δ.
    #[arg(long, default_value_t = 0.01)]
    delta_max: f64,
    /// Number of seeded ascent runs.
    #[arg(long, default_value_t = 200)]
    runs: usize,
    /// Emit the (max N, least δ) frontier instead of the records.
    #[arg(long)]
    frontier: bool,
    #[command(flatten)]
    search: SearchArgs,
}

/// Runs the CLI against the process environment, stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env = |k: &str| std::env::var(k).ok();
    run_with(argv, &env, &mut io::stdout().lock(), &mut io::stderr().lock())
}

/// [`run`] with injectable environment lookup and output streams.
pub fn run_with<I, T>(argv: I, env: &dyn Fn(&str) -> Option<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => return clap_exit(e, out, err),
    };
    match execute(cli, env, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn clap_exit(e: clap::Error, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    use clap::error::ErrorKind;
    match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
            let _ = write!(out, "{}", e.render());
            EXIT_OK
        }
        ErrorKind::InvalidSubcommand
        | ErrorKind::MissingSubcommand
        | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = write!(err, "{}", e.render());
            let mut cmd = <Cli as clap::CommandFactory>::command();
            let _ = writeln!(err, "\n{}", cmd.render_usage());
            let _ = write!(err, "{}", cmd.render_help());
            EXIT_USAGE
        }
        _ => {
            let _ = write!(err, "{}", e.render());
            EXIT_INVALID
        }
    }
}

fn execute(cli: Cli, env: &dyn Fn(&str) -> Option<String>, stdout: &mut dyn Write) -> CliResult<()> {
    let mut cfg = CliConfig::default();
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    cfg.apply_env(env)?;
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.clone());
    }
    let start = Instant::now();
    let mut records = dispatch(&cli.command, &cfg)?;
    if cli.timing {
        let secs = start.elapsed().as_secs_f64();
        for r in &mut records {
            if let Some(obj) = r.as_object_mut() {
                obj.insert("wall_time".into(), json!(secs));
            }
        }
    }
    match &cfg.out {
        Some(path) => {
            let mut buf = Vec::new();
            emit::write_records(&records, cfg.format, &mut buf)?;
            fs::write(path, buf).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })
        }
        None => emit::write_records(&records, cfg.format, stdout),
    }
}

fn group_arg(s: &Option<String>) -> CliResult<Option<GroupDescriptor>> {
    s.as_deref().map(|g| g.parse().map_err(CliError::from)).transpose()
}

fn read_arg(source: &str) -> CliResult<String> {
    match source.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|source| CliError::Io {
            path: PathBuf::from(path),
            source,
        }),
        None => Ok(source.to_string()),
    }
}

fn parse_json(text: &str) -> CliResult<Value> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("invalid JSON: {e}")))
}

fn function_from_json<S: Scalar>(v: &Value, group: Option<GroupDescriptor>) -> CliResult<SparseFunction<S>> {
    let f = SparseFunction::<S>::from_json(v)?;
    if let Some(g) = group {
        f.check_group(&g)?;
    }
    Ok(f)
}

/// `@file.json`, a JSON object, or inline `ELEMENT=VALUE;...`.
fn load_function<S: Scalar + From<f64>>(source: &str, group: Option<GroupDescriptor>) -> CliResult<SparseFunction<S>> {
    let text = read_arg(source)?;
    if source.starts_with('@') || text.trim_start().starts_with('{') {
        return function_from_json(&parse_json(&text)?, group);
    }
    let g = group.ok_or_else(|| CliError::Input("inline functions need --group".into()))?;
    Ok(SparseFunction::parse_inline(g, &text)?)
}

fn load_triple(a: &TripleArgs) -> CliResult<[SparseFunction; 3]> {
    let g = group_arg(&a.group)?;
    let f1: SparseFunction = load_function(&a.f1, g)?;
    // Later functions must live on the first one's group.
    let g = Some(f1.group());
    Ok([f1, load_function(&a.f2, g)?, load_function(&a.f3, g)?])
}

fn window_for(g: &GroupDescriptor, cfg: &CliConfig) -> CliResult<FiniteSubset> {
    let Some(w) = cfg.window else {
        return Ok(default_window(g)?);
    };
    Ok(match *g {
        GroupDescriptor::Lattice { dim } => FiniteSubset::lattice_box(dim, -(w as i64), w as i64)?,
        GroupDescriptor::Free { rank } => FiniteSubset::free_ball(rank, w as usize)?,
        GroupDescriptor::Cyclic { .. } => default_window(g)?,
    })
}

fn search_config(
    g: &GroupDescriptor,
    p: ExponentTriple,
    s: &SearchArgs,
    restarts: usize,
    cfg: &CliConfig,
) -> CliResult<SearchConfig> {
    let mut sc = SearchConfig::new(window_for(g, cfg)?, p)?;
    sc.seed = s.seed;
    sc.max_iters = s.max_iters;
    sc.convergence_tol = cfg.norm_rel_tol;
    sc.restarts = restarts;
    sc.validate()?;
    Ok(sc)
}

fn record<T: serde::Serialize>(r: &T) -> CliResult<Value> {
    serde_json::to_value(r).map_err(|e| CliError::Output(e.to_string()))
}

fn base(name: &str, params: Value) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("experiment_name".into(), json!(name));
    m.insert("parameters".into(), params);
    m
}

fn set_json(g: &GroupDescriptor, s: &FiniteSubset) -> Value {
    Value::Array(s.iter().map(|e| g.element_to_json(e)).collect())
}

fn dispatch(cmd: &Command, cfg: &CliConfig) -> CliResult<Vec<Value>> {
    let out = match cmd {
        Command::Ratio(a) => {
            let p = ExponentTriple::parse(&a.p)?;
            let [f1, f2, f3] = load_triple(a)?;
            let mut m = base("ratio", json!({"group": f1.group().to_string(), "p": p.as_array()}));
            m.insert("ratio".into(), json!(young_ratio(&f1, &f2, &f3, &p)?));
            m.insert("form".into(), json!(trilinear_form(&f1, &f2, &f3)?));
            vec![Value::Object(m)]
        }
        Command::Decompose(a) => {
            let f: SparseFunction = load_function(&a.f, group_arg(&a.group)?)?;
            let dec = layer_decompose(&f)?;
            let g = f.group();
            let r = a.r.unwrap_or(2.0 * a.p);
            let layers: Vec<Value> = dec
                .layers
                .iter()
                .map(|l| {
                    json!({
                        "level": l.level,
                        "size": l.set.len(),
                        "set": set_json(&g, &l.set),
                        "profile": l.profile.to_json(),
                    })
                })
                .collect();
            let k = kappa_select(&dec, a.p)?;
            let mut m = base("decompose", json!({"p": a.p, "r": r}));
            m.insert("layers".into(), Value::Array(layers));
            m.insert("kappa".into(), json!(k.kappa));
            m.insert("score".into(), json!(k.score));
            m.insert("rho_hat".into(), json!(k.rho_hat));
            m.insert("norm".into(), json!(lp_norm(&f, a.p)?));
            m.insert(
                "lorentz_rearrangement".into(),
                json!(lorentz_norm(&f, a.p, r, LorentzMethod::Rearrangement)?),
            );
            m.insert(
                "lorentz_layer_proxy".into(),
                json!(lorentz_norm(&f, a.p, r, LorentzMethod::LayerProxy)?),
            );
            vec![Value::Object(m)]
        }
        Command::Concentration(a) => {
            let f: SparseFunction = load_function(&a.f, group_arg(&a.group)?)?;
            let rep = concentration(&f, a.eta, a.p)?;
            let mut m = base("concentration", json!({"eta": a.eta, "p": a.p}));
            m.insert("N".into(), json!(rep.n));
            m.insert("witness_set".into(), set_json(&f.group(), &rep.witness_set));
            m.insert("removed_mass_fraction".into(), json!(rep.removed_mass_fraction));
            vec![Value::Object(m)]
        }
        Command::Reduce(a) => {
            let p = ExponentTriple::parse(&a.p)?;
            let [f1, f2, f3] = load_triple(a)?;
            let red = reduce_triple(&f1, &f2, &f3, &p)?;
            let mut m = base("reduce", json!({"p": p.as_array()}));
            m.insert("plan".into(), record(&red.plan)?);
            m.insert("exponents_reduced".into(), json!(red.exponents()));
            m.insert("ratio_original".into(), json!(young_ratio(&f1, &f2, &f3, &p)?));
            m.insert("ratio_reduced".into(), json!(red.ratio()?));
            m.insert("g1".into(), red.g1.to_json());
            m.insert("g2".into(), red.g2.to_json());
            m.insert("g3".into(), red.g3.to_json());
            vec![Value::Object(m)]
        }
        Command::Partition(a) => {
            let g = group_arg(&a.group)?;
            let mut family: Vec<SparseFunction> = Vec::new();
            if let Some(source) = &a.family {
                let v = parse_json(&read_arg(source)?)?;
                let items = v
                    .as_array()
                    .ok_or_else(|| CliError::Input("--family must be a JSON array".into()))?;
                for item in items {
                    family.push(function_from_json(item, g)?);
                }
            }
            for source in &a.members {
                family.push(load_function(source, g)?);
            }
            let gamma = a.gamma.or_else(|| cfg.gamma_for(a.p));
            let res = convexity_partition(&family, a.p, a.delta, gamma)?;
            let mut m = base("partition", json!({"p": a.p, "delta_hint": a.delta, "gamma": gamma}));
            m.insert("S_prime".into(), json!(res.s_prime));
            m.insert("S_double_prime".into(), json!(res.s_double_prime));
            m.insert("F".into(), res.sum.to_json());
            m.insert("s_values".into(), json!(res.s_values));
            m.insert("residual_norms".into(), json!(res.residual_norms));
            m.insert("norms".into(), json!(res.norms));
            m.insert("delta".into(), json!(res.delta));
            m.insert("gamma".into(), json!(res.gamma));
            m.insert("eta_used".into(), json!(res.eta_used));
            m.insert("modulus_constant".into(), json!(res.modulus_constant));
            m.insert("epsilon_delta".into(), json!(res.epsilon_delta));
            vec![Value::Object(m)]
        }
        Command::Sumset(a) => {
            let g: GroupDescriptor = a.group.parse()?;
            let set_a = FiniteSubset::parse(g, &a.a)?;
            let mut m = base("sumset", json!({"group": g.to_string(), "n": a.n}));
            match (a.n, &a.b) {
                (Some(n), None) => {
                    let s = nfold_sumset(&g, &set_a, n, cfg.sumset_limit)?;
                    m.insert("size".into(), json!(s.len()));
                    m.insert("sumset".into(), set_json(&g, &s));
                }
                (None, Some(b)) => {
                    let set_b = FiniteSubset::parse(g, b)?;
                    let s = sumset(&g, &set_a, &set_b, cfg.sumset_limit)?;
                    m.insert("size".into(), json!(s.len()));
                    m.insert("sumset".into(), set_json(&g, &s));
                    m.insert(
                        "kemperman_margin".into(),
                        json!(kemperman_margin(&g, &set_a, &set_b, cfg.sumset_limit)?),
                    );
                }
                _ => return Err(CliError::Input("give exactly one of --B and --n".into())),
            }
            vec![Value::Object(m)]
        }
        Command::Hy(a) => {
            let f: SparseFunction<Complex64> = load_function(&a.f, group_arg(&a.group)?)?;
            let q = cfg.quadrature();
            let h = hy_ratio(&f, a.p, &q)?;
            let mut m = base(
                "hy",
                json!({"p": a.p, "quadrature_tol": q.tolerance, "oversampling": q.oversampling}),
            );
            m.insert("ratio".into(), json!(h.ratio));
            m.insert("t".into(), json!(h.t));
            m.insert("hy_norm".into(), json!(h.quadrature.value));
            m.insert("points_per_axis".into(), json!(h.quadrature.points_per_axis));
            m.insert(
                "achieved_relative_change".into(),
                json!(h.quadrature.achieved_relative_change),
            );
            if a.chain {
                m.insert("chain".into(), record(&hy_chain_gaps(&f, a.p, &q)?)?);
            }
            vec![Value::Object(m)]
        }
        Command::Ascend(a) => {
            let p = ExponentTriple::parse(&a.triple.p)?;
            let init = load_triple(&a.triple)?;
            let g = init[0].group();
            let sc = search_config(&g, p, &a.search, 0, cfg)?;
            let AscentOutcome { triple, ratio_history } = alternating_ascent(init, &sc)?;
            let mut m = base(
                "ascend",
                json!({"p": p.as_array(), "max_iters": sc.max_iters, "convergence_tol": sc.convergence_tol,
                       "window_size": sc.window.len()}),
            );
            m.insert("ratio".into(), json!(ratio_history.last().copied()));
            m.insert("iterations_used".into(), json!(ratio_history.len() - 1));
            m.insert("ratio_history".into(), json!(ratio_history));
            for (j, f) in triple.iter().enumerate() {
                m.insert(format!("f{}", j + 1), f.to_json());
            }
            vec![Value::Object(m)]
        }
        Command::Curve(a) => {
            let p = ExponentTriple::parse(&a.p)?;
            let g: GroupDescriptor = a.group.parse()?;
            let grid =
                a.t.split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|e| CliError::Input(format!("t value {t:?}: {e}")))
                    })
                    .collect::<CliResult<Vec<_>>>()?;
            let sc = search_config(&g, p, &a.search, a.restarts, cfg)?;
            curve_scan(&p, &grid, &sc)?
                .iter()
                .map(record)
                .collect::<CliResult<_>>()?
        }
        Command::Interval(a) => vec![record(&interval_example(a.n, &ExponentTriple::parse(&a.p)?)?)?],
        Command::Torsion(a) => vec![record(&torsion_control(a.n, a.generator)?)?],
        Command::Doubling(a) => {
            let p = ExponentTriple::parse(&a.p)?;
            let g: GroupDescriptor = a.group.parse()?;
            let sc = search_config(&g, p, &a.search, a.runs, cfg)?;
            let recs = doubling_scan(&p, a.eta, a.delta_max, &sc)?;
            if a.frontier {
                empirical_frontier(&recs)
                    .iter()
                    .map(|pt| {
                        let mut m = base("doubling_frontier", json!({"eta": a.eta, "delta_max": a.delta_max}));
                        m.insert("max_N".into(), json!(pt.max_n));
                        m.insert("delta".into(), json!(pt.delta));
                        Value::Object(m)
                    })
                    .collect()
            } else {
                recs.iter().map(record).collect::<CliResult<_>>()?
            }
        }
    };
    Ok(out)
}

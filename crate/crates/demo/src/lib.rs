//! Browser bindings: each export returns a JSON string for the page to plot.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;
use young_core::output::to_json_string;
use young_core::{
    alternating_ascent, hy_ratio, interval_example, ExponentTriple, FiniteSubset, GroupDescriptor, QuadratureConfig,
    SearchConfig, SparseFunction,
};

const MAX_INTERVAL_N: u32 = 2000;
const MAX_STEPS: u32 = 400;
const MAX_ASCENT_ITERS: u32 = 500;
const MAX_WINDOW: i64 = 200;

fn render(v: &Value) -> Result<String, String> {
    to_json_string(v).map_err(|e| e.to_string())
}

fn fail(e: impl ToString) -> String {
    e.to_string()
}

/// Young ratio of the interval triple `1_{[-N,N]}` for `N = 1..=max_n`.
/// Returns `[{"N", "ratio", "t"}, ...]`.
#[wasm_bindgen]
pub fn interval_curve(max_n: u32, p1: f64, p2: f64) -> Result<String, String> {
    if max_n > MAX_INTERVAL_N {
        return Err(format!("N is capped at {MAX_INTERVAL_N}"));
    }
    let p = ExponentTriple::from_pair(p1, p2).map_err(fail)?;
    let rows = (1..=max_n as u64)
        .map(|n| {
            let rec = interval_example(n, &p).map_err(fail)?;
            Ok(json!({ "N": n, "ratio": rec.ratio, "t": rec.t_values[0] }))
        })
        .collect::<Result<Vec<_>, String>>()?;
    render(&Value::Array(rows))
}

/// Hausdorff–Young ratio of `δ_0 + ε δ_1` on `ℤ` for `ε` in `(0, 1]`.
/// Returns `[{"eps", "ratio", "t"}, ...]`.
#[wasm_bindgen]
pub fn two_point_hy(p: f64, steps: u32) -> Result<String, String> {
    if steps == 0 || steps > MAX_STEPS {
        return Err(format!("steps must be in 1..={MAX_STEPS}"));
    }
    let g = GroupDescriptor::lattice(1).map_err(fail)?;
    let cfg = QuadratureConfig::default();
    let rows = (1..=steps)
        .map(|i| {
            let eps = i as f64 / steps as f64;
            let f = SparseFunction::<f64>::parse_inline(g, &format!("0=1;1={eps}")).map_err(fail)?;
            let r = hy_ratio(&f, p, &cfg).map_err(fail)?;
            Ok(json!({ "eps": eps, "ratio": r.ratio, "t": r.t }))
        })
        .collect::<Result<Vec<_>, String>>()?;
    render(&Value::Array(rows))
}

/// Alternating ascent on `ℤ` inside `[-window, window]`, starting from the
/// inline function `f` (e.g. `"-1=1;0=2;3=0.5"`) in all three slots.
/// Returns `{"history": [...], "final": <function>}`.
#[wasm_bindgen]
pub fn ascent_history(f: &str, p1: f64, p2: f64, window: i64, max_iters: u32) -> Result<String, String> {
    if !(1..=MAX_WINDOW).contains(&window) {
        return Err(format!("window must be in 1..={MAX_WINDOW}"));
    }
    if max_iters > MAX_ASCENT_ITERS {
        return Err(format!("iterations are capped at {MAX_ASCENT_ITERS}"));
    }
    let g = GroupDescriptor::lattice(1).map_err(fail)?;
    let init = SparseFunction::<f64>::parse_inline(g, f).map_err(fail)?;
    let p = ExponentTriple::from_pair(p1, p2).map_err(fail)?;
    let mut cfg = SearchConfig::new(FiniteSubset::lattice_box(1, -window, window).map_err(fail)?, p).map_err(fail)?;
    cfg.max_iters = max_iters as usize;
    let out = alternating_ascent([init.clone(), init.clone(), init], &cfg).map_err(fail)?;
    render(&json!({ "history": out.ratio_history, "final": out.triple[0].to_json() }))
}

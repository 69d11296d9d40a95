//! wasm-bindgen front end for the static page in `www/`.
//!
//! Each export takes and returns JSON strings. The `*_json` functions hold
//! the logic so they can be tested natively.

use cramer::convex::ConvexSet;
use cramer::entropy::decay_analysis;
use cramer::grid::{GridFunction, GridSpec};
use cramer::legendre::{biconjugate, rate_function};
use cramer::measures::DistributionSpec;
use cramer::ExtReal;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

// Keeps a stray click from freezing the tab.
const MAX_DECAY_N: usize = 5000;

// Finite values as numbers, infinities as "+inf" / "-inf".
fn ext(v: ExtReal) -> Value {
    serde_json::to_value(v).expect("ExtReal serializes")
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn one_dim(grid: &GridSpec, what: &str) -> Result<(), String> {
    if grid.dim() == 1 {
        Ok(())
    } else {
        Err(format!("{what} must be one-dimensional"))
    }
}

/// `{"x": [...], "s": [...]}` for a one-dimensional law.
pub fn rate_curve_json(distribution: &str, primal: &str, dual: &str) -> Result<String, String> {
    let spec: DistributionSpec = serde_json::from_str(distribution).map_err(err)?;
    let primal: GridSpec = primal.parse().map_err(err)?;
    let dual: GridSpec = dual.parse().map_err(err)?;
    one_dim(&primal, "primal lattice")?;
    let s = rate_function(&spec, &primal, &dual).map_err(err)?;
    let x = primal.axes()[0].nodes();
    let s: Vec<Value> = s.values().iter().map(|&v| ext(v)).collect();
    Ok(json!({ "x": x, "s": s }).to_string())
}

/// `{"n": [...], "value": [...], "sup": v, "k_c": k | null}`.
pub fn decay_sequence_json(distribution: &str, set: &str, n_max: usize) -> Result<String, String> {
    if n_max == 0 || n_max > MAX_DECAY_N {
        return Err(format!("n_max must lie in 1..={MAX_DECAY_N}"));
    }
    let spec: DistributionSpec = serde_json::from_str(distribution).map_err(err)?;
    let set: ConvexSet = serde_json::from_str(set).map_err(err)?;
    set.validate().map_err(err)?;
    let r = decay_analysis(&spec, &set, n_max).map_err(err)?;
    let n: Vec<usize> = r.per_n.iter().map(|(n, _)| *n).collect();
    let value: Vec<Value> = r.per_n.iter().map(|(_, v)| ext(*v)).collect();
    Ok(json!({ "n": n, "value": value, "sup": ext(r.sup_value), "k_c": r.k_c }).to_string())
}

/// Lower convex envelope `f**` of samples `values` on the lattice `primal`.
/// Returns `{"x": [...], "f": [...], "envelope": [...]}`.
pub fn envelope_json(primal: &str, values: &[f64], dual: &str) -> Result<String, String> {
    let primal: GridSpec = primal.parse().map_err(err)?;
    let dual: GridSpec = dual.parse().map_err(err)?;
    one_dim(&primal, "primal lattice")?;
    if values.iter().any(|v| v.is_nan()) {
        return Err("values must not be NaN".into());
    }
    let f = GridFunction::new(primal.clone(), values.iter().map(|&v| ExtReal::of(v)).collect()).map_err(err)?;
    let env = biconjugate(&f, &dual).map_err(err)?;
    let x = primal.axes()[0].nodes();
    let f: Vec<Value> = values.iter().map(|&v| ext(ExtReal::of(v))).collect();
    let e: Vec<Value> = env.values().iter().map(|&v| ext(v)).collect();
    Ok(json!({ "x": x, "f": f, "envelope": e }).to_string())
}

#[wasm_bindgen]
pub fn rate_curve(distribution: &str, primal: &str, dual: &str) -> Result<String, JsError> {
    rate_curve_json(distribution, primal, dual).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn decay_sequence(distribution: &str, set: &str, n_max: usize) -> Result<String, JsError> {
    decay_sequence_json(distribution, set, n_max).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn envelope(primal: &str, values: Vec<f64>, dual: &str) -> Result<String, JsError> {
    envelope_json(primal, &values, dual).map_err(|e| JsError::new(&e))
}

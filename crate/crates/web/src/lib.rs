//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every exported function returns a JSON string; the plain-Rust `*_json`
//! functions underneath are what the native tests exercise.

use qcorr::measures::Measure;
use qcorr::ordering::{
    counterexample_verify, family_c1, family_c2, scan_classical, scan_werner, FixedProb,
    DEFAULT_TOL,
};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const MAX_GRID: usize = 400;

fn check_grid(n: usize) -> Result<(), String> {
    if (2..=MAX_GRID).contains(&n) {
        Ok(())
    } else {
        Err(format!("grid size must be in [2, {MAX_GRID}], got {n}"))
    }
}

pub fn werner_curve_json(n: usize) -> Result<String, String> {
    check_grid(n)?;
    let rows = scan_werner(n).map_err(|e| e.to_string())?;
    let points: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "F": r.param("F"),
                "c1": r.c1,
                "c2": r.c2,
                "c3": r.c3,
                "c3_prime": r.c3_prime,
                "ppt_min": r.ppt_min,
            })
        })
        .collect();
    Ok(Value::Array(points).to_string())
}

/// The family `(p, ½-p, ⅛, ⅜)` sampled on `[0, ½]` together with the
/// counterexample points.
pub fn crossing_family_json(samples: usize) -> Result<String, String> {
    check_grid(samples)?;
    let curve: Vec<Value> = (0..=samples)
        .map(|k| {
            let p = 0.5 * k as f64 / samples as f64;
            json!({ "p00": p, "c1": family_c1(p), "c2": family_c2(p) })
        })
        .collect();
    let report = counterexample_verify(DEFAULT_TOL).map_err(|e| e.to_string())?;
    Ok(json!({ "curve": curve, "counterexample": report }).to_string())
}

/// A classical scan with `fixed` (`"p10"` or `"p11"`) held at `value`, as a
/// flat list of `{p00, p01, value}` points for one measure.
pub fn classical_scan_json(
    fixed: &str,
    value: f64,
    grid_n: usize,
    measure: &str,
) -> Result<String, String> {
    check_grid(grid_n)?;
    let fixed: FixedProb = fixed.parse()?;
    let measure: Measure = measure.parse()?;
    let rows = scan_classical(fixed, value, grid_n).map_err(|e| e.to_string())?;
    let points: Vec<Value> = rows
        .iter()
        .map(|r| json!({ "p00": r.param("p00"), "p01": r.param("p01"), "value": r.measure(measure) }))
        .collect();
    Ok(json!({ "grid_n": grid_n, "points": points }).to_string())
}

#[wasm_bindgen]
pub fn werner_curve(n: usize) -> Result<String, JsError> {
    werner_curve_json(n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn crossing_family(samples: usize) -> Result<String, JsError> {
    crossing_family_json(samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn classical_scan(
    fixed: &str,
    value: f64,
    grid_n: usize,
    measure: &str,
) -> Result<String, JsError> {
    classical_scan_json(fixed, value, grid_n, measure).map_err(|e| JsError::new(&e))
}

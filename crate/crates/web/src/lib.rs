//! Browser bindings for the `mecode` demo page.
//!
//! Every export takes plain numbers or strings and returns a JSON string.

use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

use mecode::metrics::{parse_grid, sweep, SweepSpec, SweepVar};
use mecode::{codebook_metrics, optimize_fixed, optimize_prefix, uniform_source, CodeKind, CostModel, RfidLink};

/// Largest alphabet the page will optimize prefix codes for.
pub const MAX_PREFIX_M: usize = 32;

fn to_js(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn kind_of(kind: &str) -> mecode::Result<CodeKind> {
    kind.parse()
}

fn check_m(kind: CodeKind, m: usize) -> mecode::Result<()> {
    if kind == CodeKind::Prefix && m > MAX_PREFIX_M {
        return Err(mecode::Error::Invalid { field: "m", reason: format!("prefix demo is limited to {MAX_PREFIX_M} symbols") });
    }
    Ok(())
}

/// Optimal codebook and its metrics for `m` equiprobable symbols.
pub fn optimize_json(kind: &str, m: usize, beta0: f64, beta1: f64) -> mecode::Result<String> {
    let kind = kind_of(kind)?;
    check_m(kind, m)?;
    let cm = CostModel::new(beta0, beta1, 1.0, 1.0)?;
    let src = uniform_source(m)?;
    let cb = match kind {
        CodeKind::Fixed => optimize_fixed(m, &cm, None)?.0,
        CodeKind::Prefix => optimize_prefix(&src, &cm, None)?,
    };
    let metrics = codebook_metrics(&src, &cb, &cm)?;
    Ok(json!({ "codebook": cb, "metrics": metrics }).to_string())
}

/// Saving ε against γ for both code kinds over a `grid` such as `1:100:log25`.
pub fn epsilon_curve_json(m: usize, grid: &str) -> mecode::Result<String> {
    check_m(CodeKind::Prefix, m)?;
    let spec = SweepSpec {
        var: SweepVar::Gamma,
        grid: parse_grid(grid)?,
        ms: vec![m],
        gammas: vec![],
        kinds: vec![CodeKind::Fixed, CodeKind::Prefix],
        dp: None,
    };
    Ok(serde_json::to_string(&sweep(&spec)?).expect("rows serialize"))
}

#[derive(Serialize)]
struct LinkPoint {
    r: f64,
    p_in: f64,
    p_dc: f64,
    beta0: f64,
    beta1: f64,
    gamma: Option<f64>,
    regime: mecode::Regime,
}

/// Tag bit costs along a distance `grid` for a link given as JSON.
pub fn rfid_curve_json(link: &str, grid: &str) -> mecode::Result<String> {
    let link: RfidLink =
        serde_json::from_str(link).map_err(|e| mecode::Error::Invalid { field: "link", reason: e.to_string() })?;
    link.validate()?;
    let points = parse_grid(grid)?
        .into_iter()
        .map(|r| {
            let at = link.at_distance(r);
            let costs = at.tag_costs();
            LinkPoint {
                r,
                p_in: at.input_power(),
                p_dc: at.harvested_dc_power(),
                beta0: costs.beta0,
                beta1: costs.beta1,
                gamma: at.cost_ratio().finite(),
                regime: costs.regime,
            }
        })
        .collect::<Vec<_>>();
    Ok(json!({ "surplus_range": link.surplus_range(), "points": points }).to_string())
}

#[wasm_bindgen]
pub fn optimize(kind: &str, m: usize, beta0: f64, beta1: f64) -> Result<String, JsValue> {
    optimize_json(kind, m, beta0, beta1).map_err(to_js)
}

#[wasm_bindgen]
pub fn epsilon_curve(m: usize, grid: &str) -> Result<String, JsValue> {
    epsilon_curve_json(m, grid).map_err(to_js)
}

#[wasm_bindgen]
pub fn rfid_curve(link: &str, grid: &str) -> Result<String, JsValue> {
    rfid_curve_json(link, grid).map_err(to_js)
}

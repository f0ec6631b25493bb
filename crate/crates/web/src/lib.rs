//! Browser bindings: one criterion cell, the line filtration curves, and the
//! matrix of `φ_s̲` for a heatmap. Every export returns a JSON string.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use gfl_core::chmorph::{criterion_report, phi_seq, qk_dim, ReportOptions};
use gfl_core::flags::flag_count;
use gfl_core::gamma::{gamma_dim, tilde_gamma_kernel};
use gfl_core::{Error, FieldSpec, Result, SeqS};

/// Largest `dim Γ` computed in the browser.
pub const BROWSER_CAP: u64 = 20_000;
/// Largest number of matrix entries sent to the heatmap.
pub const HEATMAP_CELLS: u64 = 250_000;

/// Parses `p,m[,c0,...]` or a bare order `q`.
pub fn parse_field(text: &str) -> Result<FieldSpec> {
    if text.contains(',') {
        FieldSpec::parse(text)
    } else {
        let q = text.trim().parse().map_err(|_| Error::InvalidField(format!("cannot parse {text:?}")))?;
        FieldSpec::with_order(q)
    }
}

pub fn criterion_json(field: &str, d: usize, seq: &str, cap: u64) -> Result<String> {
    let field = parse_field(field)?;
    let s = SeqS::parse(seq)?;
    let opts = ReportOptions { cap: cap.min(BROWSER_CAP), ..ReportOptions::default() };
    Ok(serde_json::to_string(&criterion_report(&field, &s, d, &opts)?)?)
}

#[derive(Serialize)]
struct QkCurve {
    d: usize,
    lines: u64,
    qk: Vec<usize>,
    tilde: Vec<usize>,
}

#[derive(Serialize)]
struct QkCurves {
    q: u32,
    k_max: u32,
    curves: Vec<QkCurve>,
}

pub fn qk_curves_json(field: &str, d_max: usize, k_max: u32) -> Result<String> {
    let field = parse_field(field)?;
    let q = field.q();
    let mut curves = Vec::new();
    for d in 1..=d_max {
        let mut qk = Vec::new();
        let mut tilde = Vec::new();
        for k in 1..=k_max {
            let n = k * (q - 1);
            if gamma_dim(n as u64, d) > BROWSER_CAP {
                break;
            }
            qk.push(qk_dim(&field, k, d)?);
            tilde.push(tilde_gamma_kernel(&field, n, d)?.len());
        }
        curves.push(QkCurve { d, lines: flag_count(q, d, 1), qk, tilde });
    }
    Ok(serde_json::to_string(&QkCurves { q, k_max, curves })?)
}

#[derive(Serialize)]
struct Heatmap {
    q: u32,
    d: usize,
    seq: Vec<u32>,
    rows: usize,
    cols: usize,
    rank: usize,
    /// Row-major element indices in `0..q`.
    entries: Vec<u16>,
}

pub fn phi_heatmap_json(field: &str, d: usize, seq: &str) -> Result<String> {
    let field = parse_field(field)?;
    let s = SeqS::parse(seq)?;
    let rows = gamma_dim(s.degree(field.q())?, d);
    let cols = flag_count(field.q(), d, s.len());
    if rows.saturating_mul(cols) > HEATMAP_CELLS {
        return Err(Error::Usage(format!("{rows} x {cols} matrix is too large to draw")));
    }
    let m = phi_seq(&field, &s, d)?;
    let heat = Heatmap {
        q: field.q(),
        d,
        seq: s.entries().to_vec(),
        rows: m.nrows(),
        cols: m.ncols(),
        rank: m.rank(),
        entries: m.data().iter().map(|x| x.0).collect(),
    };
    Ok(serde_json::to_string(&heat)?)
}

fn to_js(r: Result<String>) -> std::result::Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen(js_name = criterionReport)]
pub fn criterion_report_js(field: &str, d: usize, seq: &str, cap: u32) -> std::result::Result<String, JsValue> {
    to_js(criterion_json(field, d, seq, cap as u64))
}

#[wasm_bindgen(js_name = qkCurves)]
pub fn qk_curves_js(field: &str, d_max: usize, k_max: u32) -> std::result::Result<String, JsValue> {
    to_js(qk_curves_json(field, d_max, k_max))
}

#[wasm_bindgen(js_name = phiHeatmap)]
pub fn phi_heatmap_js(field: &str, d: usize, seq: &str) -> std::result::Result<String, JsValue> {
    to_js(phi_heatmap_json(field, d, seq))
}

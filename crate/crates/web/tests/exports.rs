//! The JSON produced for the browser page.

use serde_json::Value;

use gfl_web::{criterion_json, phi_heatmap_json, qk_curves_json};

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn criterion_cell() {
    let v = parse(criterion_json("2", 3, "4,2", 100_000).unwrap());
    assert_eq!(v["rank"], 21);
    assert_eq!(v["status"], "verified");
    let v = parse(criterion_json("2,2,1,1,1", 2, "2,1", 1000).unwrap());
    assert_eq!(v["q"], 4);
}

#[test]
fn large_cells_are_skipped_not_computed() {
    let v = parse(criterion_json("4", 4, "3,2,1", 100_000).unwrap());
    assert_eq!(v["status"], "skipped");
    assert!(v["rank"].is_null());
}

#[test]
fn qk_curves_saturate() {
    let v = parse(qk_curves_json("2", 3, 5).unwrap());
    let curves = v["curves"].as_array().unwrap();
    assert_eq!(curves.len(), 3);
    assert_eq!(curves[2]["qk"], serde_json::json!([3, 6, 7, 7, 7]));
    assert_eq!(curves[2]["lines"], 7);
}

#[test]
fn heatmap_entries() {
    let v = parse(phi_heatmap_json("2", 3, "4,2").unwrap());
    assert_eq!((v["rows"].as_u64(), v["cols"].as_u64(), v["rank"].as_u64()), (Some(190), Some(21), Some(21)));
    assert_eq!(v["entries"].as_array().unwrap().len(), 190 * 21);
    assert!(phi_heatmap_json("4", 4, "5,1").is_err());
}

#[test]
fn bad_input_is_an_error() {
    assert!(criterion_json("6", 2, "2,1", 10).is_err());
    assert!(criterion_json("2", 2, "1,2", 10).is_err());
    assert!(qk_curves_json("x", 2, 2).is_err());
}

//! Browser bindings: three interactive views over the census engine, each
//! returning a JSON payload the static page renders.
//!
//! Tables are cached per session and grown on demand; scans run on the
//! single wasm thread, so ranges are capped to keep the page responsive.
//! The `*_impl` functions carry the logic and run on any target (they back
//! the native tests); the `#[wasm_bindgen]` wrappers only translate errors
//! for JS.

use std::cell::RefCell;
use std::rc::Rc;

use serde::Serialize;
use wasm_bindgen::prelude::*;

use abc_census::census::{
    census_row, density1_rolling_mean, estimate_kappa, find_hits, CensusRow, CensusTables,
    DensityPoint, KappaEstimate,
};
use abc_census::decomposition::enumerate_decompositions;
use abc_census::inequality::{evaluate, Epsilon};

/// Largest range end for the census scan view.
pub const SCAN_MAX: u64 = 20_000;
/// Largest range end for the hits view.
pub const HITS_MAX: u64 = 50_000;
/// Largest c for the single-c split inspector.
pub const INSPECT_MAX: u64 = 500_000;

thread_local! {
    static TABLES: RefCell<Option<(u64, Rc<CensusTables>)>> = const { RefCell::new(None) };
}

fn tables_for(limit: u64) -> Result<Rc<CensusTables>, String> {
    TABLES.with(|cell| {
        let mut slot = cell.borrow_mut();
        if let Some((have, tables)) = slot.as_ref() {
            if *have >= limit {
                return Ok(Rc::clone(tables));
            }
        }
        let tables = Rc::new(CensusTables::build(limit).map_err(|e| e.to_string())?);
        *slot = Some((limit, Rc::clone(&tables)));
        Ok(tables)
    })
}

fn parse_eps(eps: &str) -> Result<Epsilon, String> {
    eps.parse::<Epsilon>().map_err(|e| e.to_string())
}

fn check_range(c_min: u64, c_max: u64, cap: u64, what: &str) -> Result<(), String> {
    if c_min < 3 {
        return Err("c_min must be at least 3".to_string());
    }
    if c_min > c_max {
        return Err("c_min exceeds c_max".to_string());
    }
    if c_max > cap {
        return Err(format!("{what} is capped at c_max = {cap} in the browser"));
    }
    Ok(())
}

#[derive(Serialize)]
struct ScanResponse {
    eps: String,
    reference_density: f64,
    kappa: KappaEstimate,
    rows: Vec<CensusRow>,
    rolling: Vec<DensityPoint>,
}

fn scan_impl(c_min: u64, c_max: u64, eps: &str) -> Result<String, String> {
    let eps = parse_eps(eps)?;
    check_range(c_min, c_max, SCAN_MAX, "the census scan")?;
    let tables = tables_for(c_max)?;

    let rows = abc_census::census::collect_range(c_min, c_max, eps, &tables, 1)
        .map_err(|e| e.to_string())?;
    let rolling =
        density1_rolling_mean(c_min, c_max, eps, &tables, 1).map_err(|e| e.to_string())?;
    let kappa = estimate_kappa(c_min, c_max, eps, &tables, 1).map_err(|e| e.to_string())?;

    let response = ScanResponse {
        eps: eps.to_string(),
        reference_density: 1.0 - eps.as_f64(),
        kappa,
        rows,
        rolling,
    };
    serde_json::to_string(&response).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct SplitView {
    a: u64,
    b: u64,
    rad_a: u64,
    rad_b: u64,
    rad_c: u64,
    rad_abc: String,
    thm1: bool,
    thm2: bool,
    quality: f64,
    exact_fallback_used: bool,
}

#[derive(Serialize)]
struct InspectResponse {
    row: CensusRow,
    splits: Vec<SplitView>,
}

fn inspect_impl(c: u64, eps: &str) -> Result<String, String> {
    let eps = parse_eps(eps)?;
    check_range(c, c, INSPECT_MAX, "the split inspector")?;
    let tables = tables_for(c)?;

    let row = census_row(c, eps, &tables).map_err(|e| e.to_string())?;
    let splits = enumerate_decompositions(c, tables.radicals())
        .map_err(|e| e.to_string())?
        .map(|d| {
            let v = evaluate(&d, eps);
            SplitView {
                a: d.a,
                b: d.b,
                rad_a: d.rad_a,
                rad_b: d.rad_b,
                rad_c: d.rad_c,
                rad_abc: d.rad_abc().to_string(),
                thm1: v.thm1,
                thm2: v.thm2,
                quality: v.quality,
                exact_fallback_used: v.exact_fallback_used,
            }
        })
        .collect();

    let response = InspectResponse { row, splits };
    serde_json::to_string(&response).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct HitView {
    quality: f64,
    c: u64,
    a: u64,
    b: u64,
    rad_abc: String,
}

#[derive(Serialize)]
struct HitsResponse {
    total: usize,
    truncated: bool,
    hits: Vec<HitView>,
}

fn hits_impl(c_min: u64, c_max: u64, threshold: f64) -> Result<String, String> {
    const LIST_CAP: usize = 500;
    check_range(c_min, c_max, HITS_MAX, "the hits view")?;
    if threshold.is_nan() || threshold < 1.0 {
        return Err("threshold must be at least 1".to_string());
    }
    let tables = tables_for(c_max)?;

    let all = find_hits(c_min, c_max, threshold, &tables, 1).map_err(|e| e.to_string())?;
    let total = all.len();
    let hits: Vec<HitView> = all
        .iter()
        .take(LIST_CAP)
        .map(|h| HitView {
            quality: h.quality,
            c: h.decomposition.c,
            a: h.decomposition.a,
            b: h.decomposition.b,
            rad_abc: h.decomposition.rad_abc().to_string(),
        })
        .collect();

    let response = HitsResponse {
        total,
        truncated: total > LIST_CAP,
        hits,
    };
    serde_json::to_string(&response).map_err(|e| e.to_string())
}

/// Census scan: per-c rows, the rolling density curve, and the κ envelope.
#[wasm_bindgen]
pub fn scan_json(c_min: u32, c_max: u32, eps: &str) -> Result<String, JsError> {
    scan_impl(c_min as u64, c_max as u64, eps).map_err(|e| JsError::new(&e))
}

/// Every split of one c with both verdicts and the quality statistic.
#[wasm_bindgen]
pub fn inspect_json(c: u32, eps: &str) -> Result<String, JsError> {
    inspect_impl(c as u64, eps).map_err(|e| JsError::new(&e))
}

/// Splits above a quality threshold, best first (list capped at 500).
#[wasm_bindgen]
pub fn hits_json(c_min: u32, c_max: u32, threshold: f64) -> Result<String, JsError> {
    hits_impl(c_min as u64, c_max as u64, threshold).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_payload_shape() {
        let json = scan_impl(3, 100, "1/2").unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["eps"], "1/2");
        assert_eq!(v["reference_density"], 0.5);
        assert_eq!(v["rows"].as_array().unwrap().len(), 98);
        assert_eq!(v["rolling"].as_array().unwrap().len(), 98);
        assert!(v["kappa"]["min_ratio"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn inspect_payload_shape() {
        let json = inspect_impl(10, "1/2").unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["row"]["pairs"], 2);
        let splits = v["splits"].as_array().unwrap();
        assert_eq!(splits.len(), 2);
        assert_eq!(splits[0]["a"], 1);
        assert_eq!(splits[0]["thm2"], true);
        assert_eq!(splits[1]["a"], 3);
        assert_eq!(splits[1]["thm1"], true);
        assert_eq!(splits[1]["rad_abc"], "210");
    }

    #[test]
    fn hits_payload_shape() {
        let json = hits_impl(3, 1000, 1.4).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["total"], 1);
        assert_eq!(v["truncated"], false);
        assert_eq!(v["hits"][0]["c"], 128);
        assert_eq!(v["hits"][0]["a"], 3);
    }

    #[test]
    fn caps_and_bad_inputs_are_rejected() {
        assert!(scan_impl(3, SCAN_MAX + 1, "1/2").is_err());
        assert!(scan_impl(3, 100, "5/4").is_err());
        assert!(scan_impl(10, 3, "1/2").is_err());
        assert!(hits_impl(3, 100, 0.2).is_err());
    }

    #[test]
    fn table_cache_grows_monotonically() {
        scan_impl(3, 50, "1/2").unwrap();
        scan_impl(3, 200, "1/2").unwrap();
        // Shrinking requests reuse the larger cached tables.
        scan_impl(3, 50, "1/3").unwrap();
    }
}

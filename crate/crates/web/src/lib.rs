//! WebAssembly entry points for the demo page. Each returns a JSON string.

use kernelcomp::ball;
use kernelcomp::dbr;
use kernelcomp::kernels::{PointSet, Sampler, Verdict};
use kernelcomp::operators::{comp_matrix, composition_upper_bound, norm_trace, SpaceSpec};
use kernelcomp::series::{DiskPoly, SelfMapDisk, C64};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_HARDY_DEGREE: usize = 256;
const MAX_BR_DEGREE: usize = 32;
const MAX_BUDGET: usize = 20_000;
const MAX_DBR_DEGREE: usize = 96;

#[derive(Serialize)]
struct TracePoint {
    n: usize,
    lower: f64,
}

#[derive(Serialize)]
struct HardyTrace {
    b0: f64,
    upper: f64,
    trace: Vec<TracePoint>,
}

fn degrees_up_to(max: usize, step: usize) -> Vec<usize> {
    let mut degrees: Vec<usize> = (1..=max / step)
        .map(|k| k * step)
        .chain(std::iter::once(max))
        .collect();
    degrees.dedup();
    degrees
}

/// Finite-section lower bounds on `||C_b||` over `H²` for the Möbius map
/// `(z + a) / (1 + a z)`, with the closed-form bound.
pub fn hardy_trace_json(a: f64, max_degree: usize) -> Result<String, String> {
    if !(-1.0 < a && a < 1.0) {
        return Err("a must lie in (-1, 1)".into());
    }
    let max_degree = max_degree.clamp(1, MAX_HARDY_DEGREE);
    let b = SelfMapDisk::mobius(a, 1e-12).map_err(|e| e.to_string())?;
    let mat = comp_matrix(&b, &SpaceSpec::hardy(), max_degree).map_err(|e| e.to_string())?;
    let bound = norm_trace(&mat, &degrees_up_to(max_degree, 8));
    let out = HardyTrace {
        b0: a.abs(),
        upper: composition_upper_bound(a.abs(), 1.0),
        trace: bound
            .trace
            .iter()
            .map(|t| TracePoint {
                n: t.n,
                lower: t.lower,
            })
            .collect(),
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct BrScan {
    r: f64,
    verdict: &'static str,
    min_eigenvalue: f64,
    trials_run: usize,
    trace: Vec<TracePoint>,
}

/// Composition trace and kernel witness search for `b_r(z1, z2) = (2r z1 z2, 0)`.
pub fn br_scan_json(r: f64, seed: u64, budget: usize, max_degree: usize) -> Result<String, String> {
    let sampler = Sampler::new(seed, 0.95, 8);
    let degrees = degrees_up_to(max_degree.clamp(2, MAX_BR_DEGREE), 2);
    let ex = ball::br_experiment(r, 1.0, &degrees, sampler, budget.clamp(1, MAX_BUDGET))
        .map_err(|e| e.to_string())?;
    let out = BrScan {
        r,
        verdict: if ex.verdict == Verdict::Negative {
            "NEGATIVE"
        } else {
            "INCONCLUSIVE"
        },
        min_eigenvalue: ex.min_eigenvalue,
        trials_run: ex.trials_run,
        trace: ex
            .comp_lower_trace
            .trace
            .iter()
            .map(|t| TracePoint {
                n: t.n,
                lower: t.lower,
            })
            .collect(),
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct ResidualPoint {
    n: usize,
    modes: usize,
    residual: f64,
}

/// Szegő-kernel reconstruction residual from the defect-operator basis of
/// `H(b)` for `b = c0 + c1 z + c2 z²`, as the section degree grows.
pub fn szego_residual_json(c0: f64, c1: f64, c2: f64, max_degree: usize) -> Result<String, String> {
    let b = SelfMapDisk::new(DiskPoly::from_real(&[c0, c1, c2]).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let pts: Vec<C64> = (0..10)
        .map(|k| C64::from_polar(0.05 * k as f64, 1.3 * k as f64))
        .collect();
    let pts = PointSet::disk(&pts).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for n in degrees_up_to(max_degree.clamp(4, MAX_DBR_DEGREE), 4) {
        let onb = dbr::onb_defect(&b, n, None).map_err(|e| e.to_string())?;
        let residual = dbr::szego_residual(&onb, &pts).map_err(|e| e.to_string())?;
        out.push(ResidualPoint {
            n,
            modes: onb.modes.len(),
            residual,
        });
    }
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn hardy_trace(a: f64, max_degree: usize) -> Result<String, JsValue> {
    hardy_trace_json(a, max_degree).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn br_scan(r: f64, seed: u32, budget: usize, max_degree: usize) -> Result<String, JsValue> {
    br_scan_json(r, seed as u64, budget, max_degree).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn szego_residual(c0: f64, c1: f64, c2: f64, max_degree: usize) -> Result<String, JsValue> {
    szego_residual_json(c0, c1, c2, max_degree).map_err(|e| JsValue::from_str(&e))
}

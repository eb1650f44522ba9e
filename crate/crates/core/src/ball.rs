//! Multiplier and composition checks on the spaces `H²_{n,alpha}` of the unit
//! ball, and the `b_r(z1, z2) = (2r z1 z2, 0)` experiment.
//!
//! Positivity of `K^{b,alpha}` is only ever sampled: a negative Gram matrix is a
//! certificate, while a clean search means no counterexample at that budget.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{self, KernelSpec, PointSet, Sampler, Verdict, DEFAULT_TOL_SCALE};
use crate::linalg;
use crate::operators::{
    comp_matrix, composition_upper_bound, mult_matrix, mult_matrix_rows, norm_trace, op_norm_lower,
    NormBound, SpaceSpec, TracePoint,
};
use crate::series::{BallMap, BallPoly, C64};

pub const INV_KERNEL_TAIL_TOL: f64 = 1e-10;
pub const INV_KERNEL_MAX_TERMS: usize = 4096;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowCheckResult {
    pub w: Vec<C64>,
    pub row_norm_lower: f64,
    pub bound: f64,
    pub margin: f64,
}

/// Lower bound on `||Σ conj(b_i(w)) M_{b_i}||` against `|b(w)|`.
pub fn row_mult_norm(b: &BallMap, alpha: f64, w: &[C64], n: usize) -> Result<RowCheckResult> {
    kernels::check_point(w, b.dim())?;
    let space = SpaceSpec::ball(b.dim(), alpha)?;
    let bw = b.eval(w)?;
    let bound = bw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let top = b.degree();
    let mut row: Option<DMatrix<C64>> = None;
    for (coord, v) in b.coords().iter().zip(&bw) {
        let m = mult_matrix_rows(coord, &space, n, top - coord.total_degree())?;
        let term = m.entries * v.conj();
        row = Some(match row {
            Some(acc) => acc + term,
            None => term,
        });
    }
    let row = row.expect("ball maps have at least one coordinate");
    let row_norm_lower = linalg::largest_singular_value(&row);
    Ok(RowCheckResult {
        w: w.to_vec(),
        row_norm_lower,
        bound,
        margin: bound - row_norm_lower,
    })
}

/// Lower bounds on `||M_{b_i}||` for each coordinate.
pub fn coordinate_multiplier_norms(b: &BallMap, alpha: f64, n: usize) -> Result<Vec<f64>> {
    let space = SpaceSpec::ball(b.dim(), alpha)?;
    b.coords()
        .iter()
        .map(|coord| Ok(op_norm_lower(&mult_matrix(coord, &space, n)?).lower))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvKernelBound {
    pub bound: NormBound,
    pub series_terms: usize,
    pub tail_estimate: f64,
}

/// Number of binomial-series terms `K` with
/// `Σ_{k>K} (alpha)_k / k! q^k <= tol`, and the tail estimate. The term ratios
/// decrease, so the tail is bounded by a geometric series.
fn binomial_terms(alpha: f64, q: f64, tol: f64) -> Result<(usize, f64)> {
    if q == 0.0 {
        return Ok((0, 0.0));
    }
    let mut term = 1.0;
    let mut tail = f64::INFINITY;
    for k in 0..INV_KERNEL_MAX_TERMS {
        let next = term * (alpha + k as f64) / (k as f64 + 1.0) * q;
        let ratio = next / term;
        if ratio < 1.0 {
            tail = next / (1.0 - ratio);
            if tail <= tol {
                return Ok((k, tail));
            }
        }
        term = next;
    }
    Err(Error::IncreaseDegree {
        tail,
        limit: INV_KERNEL_TAIL_TOL,
    })
}

/// Multiplier `g = (1 - <b(z), b(0)>)^{-alpha}` as the binomial series in
/// `h = Σ conj(b_i(0)) b_i`, truncated once the tail is below `1e-10`.
pub fn inv_kernel_multiplier(b: &BallMap, alpha: f64) -> Result<(BallPoly, usize, f64)> {
    if !(alpha >= 1.0) {
        return Err(Error::Parameter(format!("alpha = {alpha} must be >= 1")));
    }
    let b0 = b.at_origin();
    let q = b.origin_modulus();
    if q >= 1.0 {
        return Err(Error::NotSelfMap { max_modulus: q });
    }
    let dim = b.dim();
    let mut h = BallPoly::constant(dim, zero());
    for (coord, c) in b.coords().iter().zip(&b0) {
        h = h.add(&coord.scale(c.conj()))?;
    }
    let (k_max, tail) = binomial_terms(alpha, q, INV_KERNEL_TAIL_TOL)?;
    let mut g = BallPoly::constant(dim, C64::new(1.0, 0.0));
    let mut power = BallPoly::constant(dim, C64::new(1.0, 0.0));
    let mut coeff = 1.0;
    for k in 0..k_max {
        coeff *= (alpha + k as f64) / (k as f64 + 1.0);
        power = power.mul(&h)?;
        g = g.add(&power.scale(C64::new(coeff, 0.0)))?;
    }
    Ok((g, k_max, tail))
}

pub fn inv_kernel_mult_norm(b: &BallMap, alpha: f64, n: usize) -> Result<InvKernelBound> {
    let space = SpaceSpec::ball(b.dim(), alpha)?;
    let (g, terms, tail) = inv_kernel_multiplier(b, alpha)?;
    let upper = (1.0 - b.origin_modulus()).powf(-alpha);
    let bound = op_norm_lower(&mult_matrix(&g, &space, n)?).with_upper(upper);
    Ok(InvKernelBound {
        bound,
        series_terms: terms,
        tail_estimate: tail,
    })
}

/// Composition lower-bound trace on `H²_{n,alpha}` with the closed-form bound
/// attached; the bound only applies when `K^{b,alpha}` is positive.
pub fn ball_composition_trace(b: &BallMap, alpha: f64, degrees: &[usize]) -> Result<NormBound> {
    let space = SpaceSpec::ball(b.dim(), alpha)?;
    let n = degrees
        .iter()
        .copied()
        .max()
        .ok_or_else(|| Error::Parameter("no degrees".into()))?;
    let mat = comp_matrix(b, &space, n)?;
    Ok(norm_trace(&mat, degrees).with_upper(composition_upper_bound(b.origin_modulus(), alpha)))
}

/// `b_r(z1, z2) = (2r z1 z2, 0)`.
pub fn br_symbol(r: f64) -> Result<BallMap> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::Parameter(format!("r = {r} must lie in [0, 1]")));
    }
    let first = BallPoly::new(2, [(vec![1, 1], C64::new(2.0 * r, 0.0))])?;
    BallMap::new(vec![first, BallPoly::constant(2, zero())])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrRow {
    pub r: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub comp_lower: f64,
    pub psd_verdict: Verdict,
    pub min_eigenvalue: f64,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct BrExperiment {
    pub r: f64,
    pub comp_lower_trace: NormBound,
    pub verdict: Verdict,
    /// Certificate eigenvalue when negative, else the smallest seen.
    pub min_eigenvalue: f64,
    pub trials_run: usize,
    pub witness: Option<PointSet>,
    pub seed: u64,
}

impl BrExperiment {
    pub fn rows(&self) -> Vec<BrRow> {
        self.comp_lower_trace
            .trace
            .iter()
            .map(|t| BrRow {
                r: self.r,
                n: t.n,
                comp_lower: t.lower,
                psd_verdict: self.verdict,
                min_eigenvalue: self.min_eigenvalue,
                seed: self.seed,
            })
            .collect()
    }
}

/// Composition trace of `C_{b_r}` on `H²_{2,alpha}` and a witness search for
/// `K^{b_r,alpha}`. The search verdict is `NEGATIVE` with a certificate or
/// `INCONCLUSIVE` (no counterexample at this budget).
pub fn br_experiment(
    r: f64,
    alpha: f64,
    degrees: &[usize],
    sampler: Sampler,
    budget: usize,
) -> Result<BrExperiment> {
    let b = br_symbol(r)?;
    let comp_lower_trace = if r == 0.0 {
        // C_b f = f(0): rank one with norm 1
        let mut degrees = degrees.to_vec();
        degrees.sort_unstable();
        degrees.dedup();
        NormBound {
            lower: 1.0,
            upper: Some(1.0),
            col_degree: degrees.last().copied().unwrap_or(0),
            trace: degrees
                .iter()
                .map(|&n| TracePoint { n, lower: 1.0 })
                .collect(),
        }
    } else {
        let space = SpaceSpec::ball(2, alpha)?;
        let n = degrees
            .iter()
            .copied()
            .max()
            .ok_or_else(|| Error::Parameter("no degrees".into()))?;
        norm_trace(&comp_matrix(&b, &space, n)?, degrees)
    };
    let spec = KernelSpec::BallKb { b, alpha };
    let search = kernels::search_negative_witness(&spec, sampler, budget, DEFAULT_TOL_SCALE)?;
    let (verdict, min_eigenvalue, witness) = match search.found {
        Some((pts, cert)) => (Verdict::Negative, cert.min_eigenvalue, Some(pts)),
        None => (Verdict::Inconclusive, search.best_min_eigenvalue, None),
    };
    Ok(BrExperiment {
        r,
        comp_lower_trace,
        verdict,
        min_eigenvalue,
        trials_run: search.trials_run,
        witness,
        seed: sampler.seed,
    })
}

/// Smallest Gram eigenvalue of `K^{b_r,alpha}` on a fixed point set.
pub fn br_min_eigenvalue(points: &PointSet, r: f64, alpha: f64) -> Result<f64> {
    let spec = KernelSpec::BallKb {
        b: br_symbol(r)?,
        alpha,
    };
    let g = kernels::gram(&spec, points)?;
    Ok(linalg::hermitian_eigenvalues(&g.entries)[0])
}

/// Exact `||C_{b_r}||` restricted to degree `<= n` on `H²_{2,1}`: the section
/// is diagonal with entries `(2r)^k k! / sqrt((2k)!)`.
pub fn br_section_norm_closed_form(r: f64, n: usize) -> f64 {
    let mut best: f64 = 1.0;
    let mut v: f64 = 1.0;
    for k in 1..=n {
        let k = k as f64;
        v *= 2.0 * r * k / ((2.0 * k - 1.0) * (2.0 * k)).sqrt();
        best = best.max(v);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::SelfMapDisk;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn half_coords() -> BallMap {
        BallMap::new(vec![
            BallPoly::coordinate(2, 0, c(0.5, 0.0)),
            BallPoly::coordinate(2, 1, c(0.5, 0.0)),
        ])
        .unwrap()
    }

    #[test]
    fn row_check_on_disk_shift() {
        let b = SelfMapDisk::identity().to_ball_map();
        let res = row_mult_norm(&b, 1.0, &[c(0.3, 0.4)], 10).unwrap();
        assert!((res.row_norm_lower - 0.5).abs() < 1e-14);
        assert!(res.margin.abs() < 1e-14);
    }

    #[test]
    fn row_check_at_origin_vanishes() {
        let res = row_mult_norm(&half_coords(), 1.0, &[c(0.0, 0.0), c(0.0, 0.0)], 6).unwrap();
        assert_eq!(res.bound, 0.0);
        assert_eq!(res.row_norm_lower, 0.0);
    }

    #[test]
    fn row_check_half_coordinates() {
        let res = row_mult_norm(&half_coords(), 1.0, &[c(0.3, 0.0), c(0.4, 0.0)], 12).unwrap();
        assert!((res.bound - 0.25).abs() < 1e-15);
        assert!(res.row_norm_lower <= 0.25 + 1e-8);
    }

    #[test]
    fn row_check_rejects_bad_point() {
        assert!(row_mult_norm(&half_coords(), 1.0, &[c(0.3, 0.0)], 4).is_err());
        assert!(row_mult_norm(&half_coords(), 1.0, &[c(0.8, 0.0), c(0.8, 0.0)], 4).is_err());
    }

    #[test]
    fn inv_kernel_trivial_when_origin_fixed() {
        let res = inv_kernel_mult_norm(&half_coords(), 1.0, 6).unwrap();
        assert_eq!(res.series_terms, 0);
        assert!((res.bound.lower - 1.0).abs() < 1e-15);
        assert_eq!(res.bound.upper, Some(1.0));
    }

    #[test]
    fn inv_kernel_blaschke() {
        let b = SelfMapDisk::mobius(0.5, 1e-12).unwrap().to_ball_map();
        let one = inv_kernel_mult_norm(&b, 1.0, 64).unwrap();
        assert_eq!(one.bound.upper, Some(2.0));
        assert!(one.bound.lower <= 2.0 + 1e-8 && one.bound.lower > 1.9);
        let two = inv_kernel_mult_norm(&b, 2.0, 64).unwrap();
        assert_eq!(two.bound.upper, Some(4.0));
        assert!(two.bound.lower <= 4.0 + 1e-8);
    }

    #[test]
    fn binomial_terms_geometric() {
        let (k, tail) = binomial_terms(1.0, 0.5, 1e-10).unwrap();
        assert!(tail <= 1e-10);
        assert!(0.5f64.powi(k as i32 + 1) / 0.5 <= 1e-10 * 1.0001);
        assert!(binomial_terms(1.0, 0.999999, 1e-10).is_err());
    }

    #[test]
    fn br_closed_form_matches_section() {
        let b = br_symbol(1.0).unwrap();
        let space = SpaceSpec::ball(2, 1.0).unwrap();
        let trace = norm_trace(&comp_matrix(&b, &space, 12).unwrap(), &[4, 8, 12]);
        for t in &trace.trace {
            assert!((t.lower - br_section_norm_closed_form(1.0, t.n)).abs() < 1e-12);
        }
    }

    #[test]
    fn br_zero_is_rank_one() {
        let ex = br_experiment(0.0, 1.0, &[4, 8], Sampler::new(1, 0.95, 4), 5).unwrap();
        assert!(ex.comp_lower_trace.trace.iter().all(|t| t.lower == 1.0));
        assert_eq!(ex.rows().len(), 2);
    }

    #[test]
    fn br_rejects_out_of_range() {
        assert!(br_symbol(1.5).is_err());
        assert!(br_symbol(-0.1).is_err());
    }

    #[test]
    fn coordinate_norms_of_half_map() {
        let norms = coordinate_multiplier_norms(&half_coords(), 1.0, 8).unwrap();
        for v in norms {
            assert!((v - 0.5).abs() < 1e-14);
        }
    }
}

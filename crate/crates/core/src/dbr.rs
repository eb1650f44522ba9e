//! de Branges-Rovnyak spaces `H(b)` of a polynomial self-map `b`.
//!
//! Two independent norms are provided. Kernel combinations
//! `f = Σ c_i k^b_{w_i}` have `||f||² = c* G c` with `G` the kernel Gram
//! matrix. Polynomials are measured through the defect operator
//! `D = I - T_b T_b*`: `H(b)` is the range of `D^{1/2}` with the range norm, so
//! `||f||² = v* D⁺ v` for the coefficient vector `v`.
//!
//! Because `T_b*` lowers degree, the `(N+1) x (N+1)` leading block of
//! `T_b T_b*` is computed exactly from an exact-column section of `T_b`; the
//! block `D_N` has no truncation bias. Its eigenvectors scaled by the square
//! roots of the eigenvalues are an orthonormal family in `H(b)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{self, KernelSpec, PointSet, Verdict, DEFAULT_TOL_SCALE};
use crate::linalg;
use crate::operators::{comp_matrix, mult_matrix, SpaceSpec};
use crate::series::{DiskPoly, SelfMapDisk, C64};

pub const DEFAULT_RANGE_TOL: f64 = 1e-6;
const RANK_TOL_SCALE: f64 = 100.0;
const SZEGO_TEST_MAX_MODULUS: f64 = 0.7;

/// `f = Σ c_i k^{b,alpha}_{w_i}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelCombo {
    pub b: SelfMapDisk,
    pub alpha: u32,
    pub nodes: PointSet,
    pub coeffs: Vec<C64>,
}

impl KernelCombo {
    pub fn new(b: SelfMapDisk, alpha: u32, nodes: PointSet, coeffs: Vec<C64>) -> Result<Self> {
        if alpha == 0 {
            return Err(Error::Parameter("alpha must be >= 1".into()));
        }
        if nodes.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: nodes.dim(),
            });
        }
        if coeffs.len() != nodes.len() {
            return Err(Error::DimensionMismatch {
                expected: nodes.len(),
                got: coeffs.len(),
            });
        }
        if b.is_constant() {
            return Err(Error::ConstantSymbol("H(b) needs a non-constant b"));
        }
        Ok(Self {
            b,
            alpha,
            nodes,
            coeffs,
        })
    }

    /// The reproducing kernel of `H(b)` (or `A(b, alpha)`) at `w`.
    pub fn kernel_at(b: SelfMapDisk, alpha: u32, w: C64) -> Result<Self> {
        Self::new(b, alpha, PointSet::disk(&[w])?, vec![C64::new(1.0, 0.0)])
    }

    pub fn spec(&self) -> KernelSpec {
        if self.alpha == 1 {
            KernelSpec::Dbr { b: self.b.clone() }
        } else {
            KernelSpec::DbrAlpha {
                b: self.b.clone(),
                alpha: self.alpha,
            }
        }
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        let spec = self.spec();
        let mut acc = C64::new(0.0, 0.0);
        for (w, &c) in self.nodes.points().iter().zip(&self.coeffs) {
            acc += c * kernels::eval_kernel(&spec, &[z], w)?;
        }
        Ok(acc)
    }

    /// Taylor coefficients through degree `n`.
    pub fn to_disk_poly(&self, n: usize) -> DiskPoly {
        let mut acc = DiskPoly::constant(C64::new(0.0, 0.0)).truncate(n);
        for (w, &c) in self.nodes.points().iter().zip(&self.coeffs) {
            let w = w[0];
            let numerator = DiskPoly::constant(C64::new(1.0, 0.0))
                .add(&self.b.series().scale(-self.b.eval(w).conj()));
            let mut geo = Vec::with_capacity(n + 1);
            let mut p = C64::new(1.0, 0.0);
            for _ in 0..=n {
                geo.push(p);
                p *= w.conj();
            }
            let geo = DiskPoly::new(geo).expect("finite geometric coefficients");
            let section = numerator
                .mul_truncated(&geo, n)
                .pow_truncated(self.alpha, n);
            acc = acc.add(&section.scale(c));
        }
        acc
    }

    /// Upper bound on the absolute sum of the Taylor coefficients beyond
    /// degree `n`.
    pub fn tail_bound(&self, n: usize) -> f64 {
        let l1_b: f64 = self.b.series().coeffs().iter().map(|c| c.norm()).sum();
        let shift = self.alpha as usize * self.b.degree();
        let alpha = self.alpha as f64;
        let mut total = 0.0;
        for (w, c) in self.nodes.points().iter().zip(&self.coeffs) {
            let r = w[0].norm();
            let num_l1 = (1.0 + self.b.eval(w[0]).norm() * l1_b).powi(self.alpha as i32);
            // Σ_{k > n - shift} binom(k + alpha - 1, alpha - 1) r^k
            let start = (n + 1).saturating_sub(shift);
            let mut term = 1.0;
            for k in 0..start {
                term *= (alpha + k as f64) / (k as f64 + 1.0) * r;
            }
            let mut tail = 0.0;
            let mut k = start;
            while term > 1e-300 && k < start + 100_000 {
                tail += term;
                term *= (alpha + k as f64) / (k as f64 + 1.0) * r;
                k += 1;
            }
            total += c.norm() * num_l1 * tail;
        }
        total
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum HbMethod {
    ComboExact,
    DefectPseudoinverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HbDiagnostics {
    pub rank: usize,
    pub residual: f64,
    pub rank_tol: f64,
    pub in_range: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HbNorm {
    pub value: f64,
    pub method: HbMethod,
    pub diagnostics: HbDiagnostics,
}

/// `(c* G c)^{1/2}` with `G` the kernel Gram matrix on the nodes.
pub fn hb_norm_combo(f: &KernelCombo) -> Result<HbNorm> {
    let g = kernels::gram(&f.spec(), &f.nodes)?;
    let summary = kernels::psd_summary(&g.entries, DEFAULT_TOL_SCALE)?;
    if summary.verdict == Verdict::Negative {
        return Err(Error::KernelNotPositive(summary.min_eigenvalue));
    }
    let c = DVector::from_column_slice(&f.coeffs);
    let q = c.dotc(&(&g.entries * &c)).re;
    let rank = summary
        .eigenvalues
        .iter()
        .filter(|&&l| l > summary.tolerance)
        .count();
    Ok(HbNorm {
        value: q.max(0.0).sqrt(),
        method: HbMethod::ComboExact,
        diagnostics: HbDiagnostics {
            rank,
            residual: 0.0,
            rank_tol: summary.tolerance,
            in_range: true,
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectConfig {
    /// Eigenvalue cutoff; defaults to `100 * size * ||D|| * eps`.
    pub rank_tol: Option<f64>,
    pub range_tol: f64,
}

impl Default for DefectConfig {
    fn default() -> Self {
        Self {
            rank_tol: None,
            range_tol: DEFAULT_RANGE_TOL,
        }
    }
}

/// `D_N = I - T_b T_b*` restricted to degree `<= n`.
pub fn defect_matrix(b: &SelfMapDisk, n: usize) -> Result<DMatrix<C64>> {
    let t = mult_matrix(b.series(), &SpaceSpec::hardy(), n)?;
    let ttstar = &t.entries * t.entries.adjoint();
    let block = ttstar.view((0, 0), (n + 1, n + 1));
    Ok(linalg::hermitianize(
        &(DMatrix::identity(n + 1, n + 1) - block),
    ))
}

/// Eigendecomposition of `D_N` with the pseudo-inverse machinery on top.
#[derive(Clone, Debug)]
pub struct DefectOperator {
    pub b: SelfMapDisk,
    pub n: usize,
    pub rank_tol: f64,
    pub range_tol: f64,
    /// Descending.
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<C64>,
}

impl DefectOperator {
    pub fn new(b: &SelfMapDisk, n: usize, config: &DefectConfig) -> Result<Self> {
        if b.is_constant() {
            return Err(Error::ConstantSymbol("H(b) needs a non-constant b"));
        }
        let d = defect_matrix(b, n)?;
        let (vals, vecs) = linalg::hermitian_eigen(&d);
        let size = n + 1;
        let norm = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let rank_tol = config
            .rank_tol
            .unwrap_or(RANK_TOL_SCALE * size as f64 * norm * f64::EPSILON);
        let mut eigenvalues = Vec::with_capacity(size);
        let mut eigenvectors = DMatrix::zeros(size, size);
        for (k, i) in (0..size).rev().enumerate() {
            eigenvalues.push(vals[i]);
            eigenvectors.set_column(k, &vecs.column(i));
        }
        Ok(Self {
            b: b.clone(),
            n,
            rank_tol,
            range_tol: config.range_tol,
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn rank(&self) -> usize {
        self.eigenvalues
            .iter()
            .filter(|&&l| l > self.rank_tol)
            .count()
    }

    fn coefficients(&self, f: &DiskPoly) -> Result<DVector<C64>> {
        if f.degree() > self.n {
            return Err(Error::Parameter(format!(
                "degree {} exceeds section degree {}",
                f.degree(),
                self.n
            )));
        }
        Ok(DVector::from_iterator(
            self.n + 1,
            (0..=self.n).map(|k| f.coeff(k)),
        ))
    }

    /// `⟨f, g⟩ = g* D⁺ f`.
    pub fn inner(&self, f: &DiskPoly, g: &DiskPoly) -> Result<C64> {
        let v = self.coefficients(f)?;
        let u = self.coefficients(g)?;
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..self.rank() {
            let col = self.eigenvectors.column(k);
            acc += col.dotc(&u).conj() * col.dotc(&v) / self.eigenvalues[k];
        }
        Ok(acc)
    }

    pub fn norm(&self, f: &DiskPoly) -> Result<HbNorm> {
        let v = self.coefficients(f)?;
        let rank = self.rank();
        let mut value_sq = 0.0;
        let mut projected = DVector::<C64>::zeros(self.n + 1);
        for k in 0..rank {
            let col = self.eigenvectors.column(k);
            let x = col.dotc(&v);
            value_sq += x.norm_sqr() / self.eigenvalues[k];
            projected += col * x;
        }
        let residual = (v - projected).norm();
        Ok(HbNorm {
            value: value_sq.sqrt(),
            method: HbMethod::DefectPseudoinverse,
            diagnostics: HbDiagnostics {
                rank,
                residual,
                rank_tol: self.rank_tol,
                in_range: residual <= self.range_tol,
            },
        })
    }

    /// Kept modes `f_m = sqrt(λ_m) u_m`, eigenvalues descending.
    pub fn onb(&self) -> OnbApprox {
        let modes = (0..self.rank())
            .map(|k| {
                let lam = self.eigenvalues[k];
                let coeffs = self
                    .eigenvectors
                    .column(k)
                    .iter()
                    .map(|c| c * lam.sqrt())
                    .collect();
                OnbMode {
                    eigenvalue: lam,
                    f: DiskPoly::new(coeffs).expect("finite eigenvector"),
                }
            })
            .collect();
        OnbApprox {
            b: self.b.clone(),
            n: self.n,
            rank_tol: self.rank_tol,
            modes,
        }
    }
}

/// H(b) norm of a polynomial through the pseudo-inverse of `D_N`. A large
/// `residual` means `f` is numerically outside the range of `D_N`; the value
/// is still reported.
pub fn hb_norm_defect(f: &DiskPoly, b: &SelfMapDisk, n: usize) -> Result<HbNorm> {
    DefectOperator::new(b, n, &DefectConfig::default())?.norm(f)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OnbMode {
    pub eigenvalue: f64,
    pub f: DiskPoly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OnbApprox {
    pub b: SelfMapDisk,
    pub n: usize,
    pub rank_tol: f64,
    pub modes: Vec<OnbMode>,
}

pub fn onb_defect(b: &SelfMapDisk, n: usize, rank_tol: Option<f64>) -> Result<OnbApprox> {
    let config = DefectConfig {
        rank_tol,
        ..DefectConfig::default()
    };
    Ok(DefectOperator::new(b, n, &config)?.onb())
}

/// Largest gap between the Szegő kernel and
/// `Σ_m conj(f_m(w)) f_m(z) / (1 - conj(b(w)) b(z))` over all pairs of test
/// points (modulus at most 0.7).
pub fn szego_residual(onb: &OnbApprox, test_points: &PointSet) -> Result<f64> {
    if test_points.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: test_points.dim(),
        });
    }
    let pts: Vec<C64> = test_points.points().iter().map(|p| p[0]).collect();
    if let Some(p) = pts.iter().find(|p| p.norm() > SZEGO_TEST_MAX_MODULUS) {
        return Err(Error::Parameter(format!(
            "test point modulus {} exceeds {SZEGO_TEST_MAX_MODULUS}",
            p.norm()
        )));
    }
    let values: Vec<Vec<C64>> = onb
        .modes
        .iter()
        .map(|m| pts.iter().map(|&z| m.f.eval(z)).collect())
        .collect();
    let bvals: Vec<C64> = pts.iter().map(|&z| onb.b.eval(z)).collect();
    let one = C64::new(1.0, 0.0);
    let mut worst: f64 = 0.0;
    for (i, &z) in pts.iter().enumerate() {
        for (j, &w) in pts.iter().enumerate() {
            let sum: C64 = values.iter().map(|v| v[j].conj() * v[i]).sum();
            let rebuilt = sum / (one - bvals[j].conj() * bvals[i]);
            worst = worst.max((one / (one - w.conj() * z) - rebuilt).norm());
        }
    }
    Ok(worst)
}

/// One partial sum `S_M = Σ_{m<M} T_{f_m} C_b C_b* T_{f_m}*`.
#[derive(Clone, Debug)]
pub struct SummationStep {
    pub modes: usize,
    /// Compression of `S_M` to degree `<= test_degree`.
    pub partial: DMatrix<C64>,
    /// `max_i ||(I - S_M) e_i||` over test monomials `e_i`.
    pub defect: f64,
    /// Smallest eigenvalue of the compressed increment `S_M - S_{M-1}`.
    pub increment_min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

#[derive(Clone, Debug)]
pub struct SummationTrace {
    pub n: usize,
    pub test_degree: usize,
    pub steps: Vec<SummationStep>,
}

impl SummationTrace {
    pub fn defects(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.defect).collect()
    }
}

fn toeplitz(f: &DiskPoly, n: usize) -> DMatrix<C64> {
    DMatrix::from_fn(n + 1, n + 1, |i, j| {
        if i >= j {
            f.coeff(i - j)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Partial sums of the summation identity on the Hardy space, tested on the
/// monomials of degree `<= test_degree`. Outputs are kept through degree `n`.
pub fn summation_partial(
    b: &SelfMapDisk,
    n: usize,
    max_modes: Option<usize>,
    test_degree: usize,
) -> Result<SummationTrace> {
    if test_degree > n {
        return Err(Error::Parameter("test degree must not exceed N".into()));
    }
    let onb = onb_defect(b, n, None)?;
    let comp = comp_matrix(b, &SpaceSpec::hardy(), n)?;
    let rows = comp.entries.rows(0, n + 1);
    let ccstar = rows * rows.adjoint();
    let t = test_degree + 1;
    let mut sum = DMatrix::<C64>::zeros(n + 1, t);
    let count = max_modes.unwrap_or(onb.modes.len()).min(onb.modes.len());
    let mut steps = Vec::with_capacity(count);
    for (m, mode) in onb.modes.iter().take(count).enumerate() {
        let f = toeplitz(&mode.f, n);
        let right = f.rows(0, t).adjoint();
        let term = &f * &ccstar * right;
        sum += &term;
        let increment = linalg::hermitianize(&term.rows(0, t).into_owned());
        let partial = linalg::hermitianize(&sum.rows(0, t).into_owned());
        let mut defect: f64 = 0.0;
        for i in 0..t {
            let mut col = -sum.column(i).into_owned();
            col[i] += C64::new(1.0, 0.0);
            defect = defect.max(col.norm());
        }
        let inc_eigs = linalg::hermitian_eigenvalues(&increment);
        let part_eigs = linalg::hermitian_eigenvalues(&partial);
        steps.push(SummationStep {
            modes: m + 1,
            partial,
            defect,
            increment_min_eigenvalue: inc_eigs[0],
            max_eigenvalue: *part_eigs.last().expect("non-empty"),
        });
    }
    Ok(SummationTrace {
        n,
        test_degree,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kernel_at_origin_norm() {
        let b = SelfMapDisk::mobius(0.5, 1e-12).unwrap();
        let f = KernelCombo::kernel_at(b, 1, c(0.0, 0.0)).unwrap();
        assert!((hb_norm_combo(&f).unwrap().value - 0.75f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn single_node_norm_is_diagonal_kernel() {
        let b = SelfMapDisk::new(DiskPoly::from_real(&[0.1, 0.5, 0.3]).unwrap()).unwrap();
        let w = c(0.4, -0.2);
        let f = KernelCombo::kernel_at(b.clone(), 1, w).unwrap();
        let k = kernels::eval_kernel(&KernelSpec::Dbr { b }, &[w], &[w]).unwrap();
        assert!((hb_norm_combo(&f).unwrap().value - k.re.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn identity_symbol_defect() {
        let b = SelfMapDisk::identity();
        let one = hb_norm_defect(&DiskPoly::constant(c(1.0, 0.0)), &b, 10).unwrap();
        assert!((one.value - 1.0).abs() < 1e-14);
        assert!(one.diagnostics.residual < 1e-14 && one.diagnostics.in_range);
        let z = hb_norm_defect(&DiskPoly::identity(), &b, 10).unwrap();
        assert!(!z.diagnostics.in_range);
        assert!((z.diagnostics.residual - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_symbol_onb() {
        let onb = onb_defect(&SelfMapDisk::identity(), 12, None).unwrap();
        assert_eq!(onb.modes.len(), 1);
        assert!((onb.modes[0].eigenvalue - 1.0).abs() < 1e-14);
        assert!((onb.modes[0].f.coeff(0).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn strict_contraction_keeps_every_mode() {
        let b = SelfMapDisk::new(DiskPoly::from_real(&[0.0, 0.9]).unwrap()).unwrap();
        let onb = onb_defect(&b, 20, None).unwrap();
        assert_eq!(onb.modes.len(), 21);
        for w in onb.modes.windows(2) {
            assert!(w[0].eigenvalue >= w[1].eigenvalue);
        }
    }

    #[test]
    fn degree_too_large_rejected() {
        let b = SelfMapDisk::identity();
        assert!(hb_norm_defect(&DiskPoly::monomial(5), &b, 3).is_err());
    }

    #[test]
    fn combo_validation() {
        let b = SelfMapDisk::identity();
        let pts = PointSet::disk(&[c(0.1, 0.0)]).unwrap();
        assert!(KernelCombo::new(b.clone(), 1, pts.clone(), vec![]).is_err());
        assert!(KernelCombo::new(b, 0, pts.clone(), vec![c(1.0, 0.0)]).is_err());
        let constant = SelfMapDisk::new(DiskPoly::constant(c(0.2, 0.0))).unwrap();
        assert!(KernelCombo::new(constant, 1, pts, vec![c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn identity_summation_is_exact() {
        let trace = summation_partial(&SelfMapDisk::identity(), 10, None, 4).unwrap();
        assert_eq!(trace.steps.len(), 1);
        let s = &trace.steps[0];
        assert!((&s.partial - DMatrix::<C64>::identity(5, 5)).norm() < 1e-14);
        assert!(s.defect < 1e-14);
    }
}

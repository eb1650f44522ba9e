//! Reproducing kernels on the disk and the ball, Gram matrices and
//! eigenvalue-based positivity certificates.
//!
//! Conventions: `<z, w> = Σ z_i conj(w_i)`, Gram entry `(i, j)` is
//! `K(w_i, w_j)`, and the quadratic form of a coefficient vector `c` is
//! `c* G c`. Positivity verdicts from sampled point sets are one-sided: a
//! `Negative` verdict carries a witness, while `Psd` only means no negative
//! direction was seen on that set.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::series::{BallMap, SelfMapDisk, C64};

pub type Point = Vec<C64>;

pub const DEFAULT_TOL_SCALE: f64 = 100.0;
pub const DEFAULT_RADIUS_CAP: f64 = 0.95;
const MIN_POINT_DISTANCE: f64 = 1e-9;
const HERMITIAN_TOL: f64 = 1e-13;

/// Which reproducing kernel to evaluate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    /// `1 / (1 - conj(w) z)`.
    Szego,
    /// `(1 - conj(w) z)^{-alpha}`.
    BergmanAlpha { alpha: f64 },
    /// `(1 - conj(b(w)) b(z)) / (1 - conj(w) z)`.
    Dbr { b: SelfMapDisk },
    /// Integer Schur power of the de Branges-Rovnyak kernel.
    DbrAlpha { b: SelfMapDisk, alpha: u32 },
    /// `(1 - <z, w>)^{-alpha}` on the ball of `C^dim`.
    BallK { dim: usize, alpha: f64 },
    /// `((1 - <b(z), b(w)>) / (1 - <z, w>))^alpha`.
    BallKb { b: BallMap, alpha: f64 },
}

impl KernelSpec {
    pub fn dim(&self) -> usize {
        match self {
            KernelSpec::Szego
            | KernelSpec::BergmanAlpha { .. }
            | KernelSpec::Dbr { .. }
            | KernelSpec::DbrAlpha { .. } => 1,
            KernelSpec::BallK { dim, .. } => *dim,
            KernelSpec::BallKb { b, .. } => b.dim(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            KernelSpec::BergmanAlpha { alpha } | KernelSpec::BallKb { alpha, .. }
                if !(*alpha >= 1.0) =>
            {
                Err(Error::Parameter(format!("alpha = {alpha} must be >= 1")))
            }
            KernelSpec::BallK { dim, alpha } => {
                if *dim == 0 {
                    Err(Error::Parameter("ball dimension must be positive".into()))
                } else if !(*alpha >= 1.0) {
                    Err(Error::Parameter(format!("alpha = {alpha} must be >= 1")))
                } else {
                    Ok(())
                }
            }
            KernelSpec::DbrAlpha { alpha: 0, .. } => {
                Err(Error::Parameter("alpha must be >= 1".into()))
            }
            _ => Ok(()),
        }
    }
}

fn inner(z: &[C64], w: &[C64]) -> C64 {
    z.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}

pub(crate) fn check_point(z: &[C64], dim: usize) -> Result<()> {
    if z.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: z.len(),
        });
    }
    let norm = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if !(norm < 1.0) {
        let parts: Vec<String> = z.iter().map(|c| c.to_string()).collect();
        return Err(Error::Domain {
            point: format!("({})", parts.join(", ")),
            norm,
        });
    }
    Ok(())
}

fn integer_power(alpha: f64) -> Option<i32> {
    (alpha.fract() == 0.0 && alpha <= i32::MAX as f64).then_some(alpha as i32)
}

/// Principal power of `1 / (1 - s)`; `Re(1 - s) > 0` inside the ball.
fn szego_power(s: C64, alpha: f64) -> C64 {
    let one = C64::new(1.0, 0.0);
    let base = one / (one - s);
    match integer_power(alpha) {
        Some(1) => base,
        Some(k) => base.powi(k),
        None => (one - s).powf(-alpha),
    }
}

/// `((1 - <bz, bw>) / (1 - s))^alpha`.
fn dbr_power(bz: &[C64], bw: &[C64], s: C64, alpha: f64) -> C64 {
    let one = C64::new(1.0, 0.0);
    let num = one - inner(bz, bw);
    let den = one - s;
    match integer_power(alpha) {
        Some(1) => num / den,
        Some(k) => (num / den).powi(k),
        None => num.powf(alpha) * den.powf(-alpha),
    }
}

/// Kernel value `K(z, w)`.
pub fn eval_kernel(spec: &KernelSpec, z: &[C64], w: &[C64]) -> Result<C64> {
    spec.validate()?;
    let dim = spec.dim();
    check_point(z, dim)?;
    check_point(w, dim)?;
    let s = inner(z, w);
    Ok(match spec {
        KernelSpec::Szego => szego_power(s, 1.0),
        KernelSpec::BergmanAlpha { alpha } => szego_power(s, *alpha),
        KernelSpec::BallK { alpha, .. } => szego_power(s, *alpha),
        KernelSpec::Dbr { b } => dbr_power(&[b.eval(z[0])], &[b.eval(w[0])], s, 1.0),
        KernelSpec::DbrAlpha { b, alpha } => {
            dbr_power(&[b.eval(z[0])], &[b.eval(w[0])], s, *alpha as f64)
        }
        KernelSpec::BallKb { b, alpha } => dbr_power(&b.eval(z)?, &b.eval(w)?, s, *alpha),
    })
}

/// Distinct points strictly inside the unit ball of `C^dim`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPointSet")]
pub struct PointSet {
    dim: usize,
    points: Vec<Point>,
    #[serde(skip_serializing)]
    min_distance: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPointSet {
    dim: usize,
    points: Vec<Point>,
}

impl TryFrom<RawPointSet> for PointSet {
    type Error = Error;

    fn try_from(raw: RawPointSet) -> Result<Self> {
        PointSet::new(raw.dim, raw.points)
    }
}

impl PointSet {
    pub fn new(dim: usize, points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::PointSet("no points".into()));
        }
        for p in &points {
            check_point(p, dim)?;
        }
        let mut min_distance = f64::INFINITY;
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                let d = points[i]
                    .iter()
                    .zip(&points[j])
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                min_distance = min_distance.min(d);
            }
        }
        if min_distance <= MIN_POINT_DISTANCE {
            return Err(Error::PointSet(format!(
                "points closer than {MIN_POINT_DISTANCE:e}"
            )));
        }
        Ok(Self {
            dim,
            points,
            min_distance,
        })
    }

    /// Convenience constructor for disk points.
    pub fn disk(points: &[C64]) -> Result<Self> {
        Self::new(1, points.iter().map(|&z| vec![z]).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn min_distance(&self) -> f64 {
        self.min_distance
    }
}

/// Hermitian kernel matrix on a point set.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    pub spec: KernelSpec,
    pub points: PointSet,
    pub entries: DMatrix<C64>,
}

pub fn gram(spec: &KernelSpec, pts: &PointSet) -> Result<GramMatrix> {
    if pts.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: pts.dim(),
        });
    }
    let n = pts.len();
    let mut raw = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            raw[(i, j)] = eval_kernel(spec, &pts.points[i], &pts.points[j])?;
        }
    }
    Ok(GramMatrix {
        spec: spec.clone(),
        points: pts.clone(),
        entries: linalg::hermitianize(&raw),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Psd,
    Negative,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub points: PointSet,
    pub coeffs: Vec<C64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositivityCertificate {
    pub spec: KernelSpec,
    pub min_eigenvalue: f64,
    pub matrix_norm: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub seed: Option<u64>,
}

/// Spectral summary of a Hermitian matrix against the PSD tolerance
/// `tol_scale * size * ||G||_2 * eps`.
#[derive(Clone, Debug)]
pub struct PsdSummary {
    pub eigenvalues: Vec<f64>,
    pub min_eigenvalue: f64,
    pub matrix_norm: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub min_vector: Vec<C64>,
}

pub fn psd_summary(m: &DMatrix<C64>, tol_scale: f64) -> Result<PsdSummary> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::Parameter(
            "PSD check needs a non-empty square matrix".into(),
        ));
    }
    let scale = m.iter().map(|c| c.norm()).fold(1.0, f64::max);
    let asym = linalg::hermitian_asymmetry(m);
    if asym > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(asym));
    }
    let (values, vectors) = linalg::hermitian_eigen(&linalg::hermitianize(m));
    let n = values.len();
    let min_eigenvalue = values[0];
    let matrix_norm = values[0].abs().max(values[n - 1].abs());
    let tolerance = tol_scale * n as f64 * matrix_norm * f64::EPSILON;
    let verdict = if min_eigenvalue >= -tolerance {
        Verdict::Psd
    } else {
        Verdict::Negative
    };
    Ok(PsdSummary {
        eigenvalues: values.iter().copied().collect(),
        min_eigenvalue,
        matrix_norm,
        tolerance,
        verdict,
        min_vector: vectors.column(0).iter().copied().collect(),
    })
}

/// Binary PSD verdict for a Gram matrix; `Negative` carries the minimizing
/// eigenvector as witness.
pub fn check_psd(g: &GramMatrix, tol_scale: f64) -> Result<PositivityCertificate> {
    let s = psd_summary(&g.entries, tol_scale)?;
    let witness = (s.verdict == Verdict::Negative).then(|| Witness {
        points: g.points.clone(),
        coeffs: s.min_vector.clone(),
    });
    Ok(PositivityCertificate {
        spec: g.spec.clone(),
        min_eigenvalue: s.min_eigenvalue,
        matrix_norm: s.matrix_norm,
        tolerance: s.tolerance,
        verdict: s.verdict,
        witness,
        seed: None,
    })
}

/// `c* G c` rebuilt from fresh kernel evaluations.
pub fn quadratic_form(spec: &KernelSpec, witness: &Witness) -> Result<f64> {
    let pts = witness.points.points();
    if witness.coeffs.len() != pts.len() {
        return Err(Error::DimensionMismatch {
            expected: pts.len(),
            got: witness.coeffs.len(),
        });
    }
    let mut acc = C64::new(0.0, 0.0);
    for (i, zi) in pts.iter().enumerate() {
        for (j, zj) in pts.iter().enumerate() {
            acc += witness.coeffs[i].conj() * eval_kernel(spec, zi, zj)? * witness.coeffs[j];
        }
    }
    Ok(acc.re)
}

/// Random point-set generator for witness searches.
///
/// Each point is a uniformly random direction on the unit sphere of `C^n`
/// (normalized complex Gaussian; a uniform angle when `n = 1`) scaled to
/// radius `radius * sqrt(u)` with `u` uniform on `[0, 1)`. Trial `t` draws from
/// ChaCha8 stream `t` of `seed`, so results do not depend on trial order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampler {
    pub seed: u64,
    pub radius: f64,
    pub set_size: usize,
}

impl Sampler {
    pub fn new(seed: u64, radius: f64, set_size: usize) -> Self {
        Self {
            seed,
            radius,
            set_size,
        }
    }

    pub fn point(rng: &mut impl Rng, dim: usize, radius: f64) -> Point {
        let dir: Vec<C64> = if dim == 1 {
            vec![C64::from_polar(
                1.0,
                rng.random::<f64>() * std::f64::consts::TAU,
            )]
        } else {
            let v: Vec<C64> = (0..dim)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(rng);
                    let im: f64 = StandardNormal.sample(rng);
                    C64::new(re, im)
                })
                .collect();
            let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            v.into_iter().map(|c| c / n).collect()
        };
        let r = radius * rng.random::<f64>().sqrt();
        dir.into_iter().map(|c| c * r).collect()
    }

    pub fn draw(&self, dim: usize, trial: u64) -> Result<PointSet> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        let points = (0..self.set_size)
            .map(|_| Self::point(&mut rng, dim, self.radius))
            .collect();
        PointSet::new(dim, points)
    }
}

/// Outcome of a witness search, including the best eigenvalue seen.
#[derive(Clone, Debug)]
pub struct WitnessSearch {
    pub found: Option<(PointSet, PositivityCertificate)>,
    pub trials_run: usize,
    pub best_min_eigenvalue: f64,
}

pub fn search_negative_witness(
    spec: &KernelSpec,
    sampler: Sampler,
    budget: usize,
    tol_scale: f64,
) -> Result<WitnessSearch> {
    spec.validate()?;
    if budget == 0 {
        return Err(Error::Parameter("budget must be >= 1".into()));
    }
    if !(sampler.radius > 0.0 && sampler.radius < 1.0) || sampler.set_size == 0 {
        return Err(Error::Parameter(
            "sampler needs radius in (0, 1) and set_size >= 1".into(),
        ));
    }
    let mut best = f64::INFINITY;
    for trial in 0..budget {
        let Ok(pts) = sampler.draw(spec.dim(), trial as u64) else {
            continue;
        };
        let g = gram(spec, &pts)?;
        let mut cert = check_psd(&g, tol_scale)?;
        best = best.min(cert.min_eigenvalue);
        if cert.verdict == Verdict::Negative {
            cert.seed = Some(sampler.seed);
            return Ok(WitnessSearch {
                found: Some((pts, cert)),
                trials_run: trial + 1,
                best_min_eigenvalue: best,
            });
        }
    }
    Ok(WitnessSearch {
        found: None,
        trials_run: budget,
        best_min_eigenvalue: best,
    })
}

/// First negative certificate within `budget` sampled sets, if any.
pub fn find_negative_witness(
    spec: &KernelSpec,
    sampler: Sampler,
    budget: usize,
) -> Result<Option<(PointSet, PositivityCertificate)>> {
    Ok(search_negative_witness(spec, sampler, budget, DEFAULT_TOL_SCALE)?.found)
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use crate::series::BallPoly;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn szego_at_origin_is_one() {
        let v = eval_kernel(&KernelSpec::Szego, &[c(0.0, 0.0)], &[c(0.3, -0.2)]).unwrap();
        assert_eq!(v, c(1.0, 0.0));
    }

    #[test]
    fn dbr_identity_cancels() {
        let spec = KernelSpec::Dbr {
            b: SelfMapDisk::identity(),
        };
        let v = eval_kernel(&spec, &[c(0.4, 0.1)], &[c(-0.2, 0.5)]).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn dbr_at_origin() {
        let b = SelfMapDisk::mobius(0.5, 1e-12).unwrap();
        let v = eval_kernel(&KernelSpec::Dbr { b }, &[c(0.0, 0.0)], &[c(0.0, 0.0)]).unwrap();
        assert!((v - c(0.75, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        let err = eval_kernel(&KernelSpec::Szego, &[c(1.0, 0.0)], &[c(0.0, 0.0)]);
        assert!(matches!(err, Err(Error::Domain { .. })));
        let ball = KernelSpec::BallK { dim: 2, alpha: 1.0 };
        assert!(eval_kernel(
            &ball,
            &[c(0.8, 0.0), c(0.7, 0.0)],
            &[c(0.0, 0.0), c(0.0, 0.0)]
        )
        .is_err());
        assert!(eval_kernel(
            &KernelSpec::BergmanAlpha { alpha: 0.5 },
            &[c(0.0, 0.0)],
            &[c(0.0, 0.0)]
        )
        .is_err());
    }

    #[test]
    fn gram_two_points() {
        let pts = PointSet::disk(&[c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
        let g = gram(&KernelSpec::Szego, &pts).unwrap();
        let expected = [[1.0, 1.0], [1.0, 4.0 / 3.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((g.entries[(i, j)] - c(expected[i][j], 0.0)).norm() < 1e-15);
            }
        }
        let cert = check_psd(&g, DEFAULT_TOL_SCALE).unwrap();
        // trace 7/3, determinant 1/3
        let lam = (7.0 - 37f64.sqrt()) / 6.0;
        assert!(
            (cert.min_eigenvalue - lam).abs() < 1e-14,
            "{} vs {lam}",
            cert.min_eigenvalue
        );
        assert_eq!(cert.verdict, Verdict::Psd);
        assert!(cert.witness.is_none());
    }

    #[test]
    fn single_point_gram() {
        let pts = PointSet::disk(&[c(0.3, 0.4)]).unwrap();
        let g = gram(&KernelSpec::BergmanAlpha { alpha: 2.0 }, &pts).unwrap();
        assert!((g.entries[(0, 0)].re - 1.0 / (0.75f64 * 0.75)).abs() < 1e-14);
        assert_eq!(g.entries[(0, 0)].im, 0.0);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m =
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            psd_summary(&m, 100.0),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn point_set_validation() {
        assert!(PointSet::disk(&[c(0.1, 0.0), c(0.1, 0.0)]).is_err());
        assert!(PointSet::disk(&[]).is_err());
        assert!(PointSet::new(2, vec![vec![c(0.1, 0.0)]]).is_err());
    }

    #[test]
    fn negative_witness_for_non_contractive_symbol() {
        let b = BallMap::new(vec![
            BallPoly::new(2, [(vec![1, 1], c(2.0 * 0.99, 0.0))]).unwrap(),
            BallPoly::constant(2, c(0.0, 0.0)),
        ])
        .unwrap();
        let spec = KernelSpec::BallKb { b, alpha: 1.0 };
        let (pts, cert) = find_negative_witness(&spec, Sampler::new(11, 0.95, 8), 100)
            .unwrap()
            .unwrap();
        assert_eq!(cert.verdict, Verdict::Negative);
        assert_eq!(pts.len(), 8);
        let q = quadratic_form(&spec, cert.witness.as_ref().unwrap()).unwrap();
        assert!(q <= -cert.tolerance / 2.0, "{q}");
        assert_eq!(cert.seed, Some(11));
    }

    #[test]
    fn sampler_is_deterministic_and_inside() {
        let s = Sampler::new(3, 0.95, 6);
        let a = s.draw(2, 17).unwrap();
        let b = s.draw(2, 17).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, s.draw(2, 18).unwrap());
        for p in a.points() {
            assert!(p.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() <= 0.95);
        }
    }

    #[test]
    fn certificate_json_keys() {
        let pts = PointSet::disk(&[c(0.0, 0.0)]).unwrap();
        let cert = check_psd(&gram(&KernelSpec::Szego, &pts).unwrap(), 100.0).unwrap();
        let v = serde_json::to_value(&cert).unwrap();
        for key in [
            "spec",
            "min_eigenvalue",
            "tolerance",
            "verdict",
            "witness",
            "seed",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["verdict"], "PSD");
        assert_eq!(v["spec"]["kind"], "szego");
        assert!(v["witness"].is_null());
    }
}

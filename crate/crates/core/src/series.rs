//! Truncated power series on the disk and polynomials on the ball.
//!
//! Every symbol `b` and weight `f` in the crate is a finite polynomial. Disk
//! polynomials are dense coefficient vectors; ball polynomials are sparse maps
//! from multi-indices to coefficients. Composition and reciprocals are computed
//! by sampling on a circle of radius `rho < 1` and inverting the discrete
//! Fourier transform, which works whether or not `b(0) = 0`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Multi-index of a ball monomial `z_1^{m_1} ... z_n^{m_n}`.
pub type MultiIndex = Vec<u32>;

pub const DEFAULT_SAMPLE_RADIUS: f64 = 0.9;
pub const MIN_SAMPLES: usize = 256;
pub const SELF_MAP_GRID: usize = 1024;
pub const SELF_MAP_TOL: f64 = 1e-12;
pub const RECIPROCAL_TOL: f64 = 1e-10;

const BALL_SAMPLE_SEED: u64 = 0x5eed_ba11;

fn check_finite(c: C64) -> Result<()> {
    if c.re.is_finite() && c.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("non-finite coefficient {c}")))
    }
}

fn fmt_point(z: &[C64]) -> String {
    let parts: Vec<String> = z
        .iter()
        .map(|c| format!("{:.6}{:+.6}i", c.re, c.im))
        .collect();
    format!("({})", parts.join(", "))
}

/// Truncated analytic function on the unit disk; `coeffs[n]` multiplies `z^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiskPoly {
    coeffs: Vec<C64>,
}

impl DiskPoly {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Parameter(
                "polynomial needs at least one coefficient".into(),
            ));
        }
        for &c in &coeffs {
            check_finite(c)?;
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn constant(c: C64) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
        coeffs[n] = C64::new(1.0, 0.0);
        Self { coeffs }
    }

    pub fn identity() -> Self {
        Self::monomial(1)
    }

    /// Taylor polynomial of degree `degree` of the disk automorphism
    /// `(z + a) / (1 + conj(a) z)`, which is inner and sends 0 to `a`.
    pub fn mobius(a: C64, degree: usize) -> Result<Self> {
        if a.norm() >= 1.0 {
            return Err(Error::Parameter(format!("|a| = {} must be < 1", a.norm())));
        }
        let mut coeffs = Vec::with_capacity(degree + 1);
        coeffs.push(a);
        let ratio = -a.conj();
        let mut power = C64::new(1.0 - a.norm_sqr(), 0.0);
        for _ in 1..=degree {
            coeffs.push(power);
            power *= ratio;
        }
        Ok(Self { coeffs })
    }

    /// Smallest truncation degree whose neglected Möbius coefficients have
    /// absolute sum at most `tol`.
    pub fn mobius_degree_for(a: f64, tol: f64) -> usize {
        let a = a.abs();
        if a == 0.0 {
            return 1;
        }
        // tail after degree T = (1 - a^2) a^T / (1 - a)
        let mut t = 1;
        while (1.0 - a * a) * a.powi(t as i32) / (1.0 - a) > tol {
            t += 1;
        }
        t
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    /// Length of the coefficient array minus one.
    pub fn degree_bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Largest `n` with a nonzero coefficient, or 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| c.norm() > 0.0)
            .unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn coeff(&self, n: usize) -> C64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Pads with zeros or drops coefficients so the result has degree bound `n`.
    pub fn truncate(&self, n: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n + 1, C64::new(0.0, 0.0));
        Self { coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|n| self.coeff(n) + other.coeff(n)).collect();
        Self { coeffs }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    /// Full product; the degree bound is the sum of the two bounds.
    pub fn mul(&self, other: &Self) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == C64::new(0.0, 0.0) {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self { coeffs }
    }

    /// Product truncated to degree bound `n`.
    pub fn mul_truncated(&self, other: &Self, n: usize) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
        for (i, &a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a == C64::new(0.0, 0.0) {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                coeffs[i + j] += a * b;
            }
        }
        Self { coeffs }
    }

    /// `self^k` truncated to degree bound `n`.
    pub fn pow_truncated(&self, k: u32, n: usize) -> Self {
        let mut acc = Self::constant(C64::new(1.0, 0.0)).truncate(n);
        for _ in 0..k {
            acc = acc.mul_truncated(self, n);
        }
        acc
    }

    pub fn to_ball(&self) -> BallPoly {
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, &c)| (vec![n as u32], c))
            .collect();
        BallPoly { dim: 1, terms }
    }
}

/// Polynomial on the unit ball of `C^dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct BallPoly {
    dim: usize,
    terms: BTreeMap<MultiIndex, C64>,
}

impl BallPoly {
    pub fn new(dim: usize, terms: impl IntoIterator<Item = (MultiIndex, C64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Parameter("ball dimension must be positive".into()));
        }
        let mut map = BTreeMap::new();
        for (m, c) in terms {
            if m.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: m.len(),
                });
            }
            check_finite(c)?;
            *map.entry(m).or_insert(C64::new(0.0, 0.0)) += c;
        }
        if map.is_empty() {
            map.insert(vec![0; dim], C64::new(0.0, 0.0));
        }
        Ok(Self { dim, terms: map })
    }

    pub fn constant(dim: usize, c: C64) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0; dim], c);
        Self { dim, terms }
    }

    /// The coordinate function `z_i` scaled by `c`.
    pub fn coordinate(dim: usize, i: usize, c: C64) -> Self {
        let mut m = vec![0; dim];
        m[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(m, c);
        Self { dim, terms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, C64> {
        &self.terms
    }

    pub fn coeff(&self, m: &[u32]) -> C64 {
        self.terms.get(m).copied().unwrap_or_default()
    }

    /// Largest total degree carrying a nonzero coefficient.
    pub fn total_degree(&self) -> usize {
        self.terms
            .iter()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(m, _)| m.iter().sum::<u32>() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.total_degree() == 0
    }

    pub fn eval(&self, z: &[C64]) -> Result<C64> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: z.len(),
            });
        }
        if self.dim == 1 {
            // same Horner recurrence as DiskPoly::eval
            let zero = C64::new(0.0, 0.0);
            let top = self.total_degree() as u32;
            return Ok((0..=top).rev().fold(zero, |acc, d| {
                acc * z[0] + self.terms.get(&vec![d]).copied().unwrap_or(zero)
            }));
        }
        let mut acc = C64::new(0.0, 0.0);
        for (m, &c) in &self.terms {
            let mut term = c;
            for (zi, &e) in z.iter().zip(m) {
                term *= zi.powu(e);
            }
            acc += term;
        }
        Ok(acc)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut terms = self.terms.clone();
        for (m, &c) in &other.terms {
            *terms.entry(m.clone()).or_insert(C64::new(0.0, 0.0)) += c;
        }
        Ok(Self {
            dim: self.dim,
            terms,
        })
    }

    pub fn scale(&self, s: C64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, &c)| (m.clone(), c * s))
            .collect();
        Self {
            dim: self.dim,
            terms,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut terms: BTreeMap<MultiIndex, C64> = BTreeMap::new();
        for (ma, &a) in &self.terms {
            for (mb, &b) in &other.terms {
                let m: MultiIndex = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                *terms.entry(m).or_insert(C64::new(0.0, 0.0)) += a * b;
            }
        }
        Ok(Self {
            dim: self.dim,
            terms,
        })
    }
}

/// Sampled evidence for a sup-norm bound (not a proof).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupCheck {
    pub grid_size: usize,
    pub max_modulus: f64,
}

/// Polynomial self-map of the disk, validated on a boundary grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SelfMapDisk {
    series: DiskPoly,
    sup_check: SupCheck,
}

impl SelfMapDisk {
    pub fn new(series: DiskPoly) -> Result<Self> {
        Self::with_grid(series, SELF_MAP_GRID, SELF_MAP_TOL)
    }

    pub fn with_grid(series: DiskPoly, grid_size: usize, tol: f64) -> Result<Self> {
        let max_modulus = sup_norm_circle(&series, grid_size);
        if max_modulus > 1.0 + tol {
            return Err(Error::NotSelfMap { max_modulus });
        }
        if series.coeff(0).norm() >= 1.0 {
            return Err(Error::Parameter("|b(0)| must be < 1".into()));
        }
        Ok(Self {
            series,
            sup_check: SupCheck {
                grid_size,
                max_modulus,
            },
        })
    }

    pub fn identity() -> Self {
        Self::new(DiskPoly::identity()).expect("identity is a self-map")
    }

    /// Truncated disk automorphism sending 0 to `a` (real), with neglected
    /// coefficients summing to at most `tail`.
    pub fn mobius(a: f64, tail: f64) -> Result<Self> {
        let degree = DiskPoly::mobius_degree_for(a, tail);
        Self::with_grid(
            DiskPoly::mobius(C64::new(a, 0.0), degree)?,
            SELF_MAP_GRID,
            SELF_MAP_TOL.max(tail),
        )
    }

    pub fn series(&self) -> &DiskPoly {
        &self.series
    }

    pub fn sup_check(&self) -> SupCheck {
        self.sup_check
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.series.eval(z)
    }

    pub fn at_origin(&self) -> C64 {
        self.series.coeff(0)
    }

    pub fn degree(&self) -> usize {
        self.series.degree()
    }

    pub fn is_constant(&self) -> bool {
        self.series.is_constant()
    }

    /// The same map viewed as a one-dimensional ball map.
    pub fn to_ball_map(&self) -> BallMap {
        BallMap {
            dim: 1,
            coords: vec![self.series.to_ball()],
            sup_check: self.sup_check,
        }
    }
}

/// Polynomial map of the unit ball of `C^n` into itself.
#[derive(Clone, Debug, PartialEq)]
pub struct BallMap {
    dim: usize,
    coords: Vec<BallPoly>,
    sup_check: SupCheck,
}

/// Deterministic sample of `count` points on the unit sphere of `C^dim`.
/// In dimension one these are the equispaced roots of unity.
pub fn sphere_samples(dim: usize, count: usize) -> Vec<Vec<C64>> {
    if dim == 1 {
        return (0..count)
            .map(|k| vec![C64::from_polar(1.0, 2.0 * PI * k as f64 / count as f64)])
            .collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(BALL_SAMPLE_SEED);
    (0..count)
        .map(|_| {
            let v: Vec<C64> = (0..dim)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    C64::new(re, im)
                })
                .collect();
            let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            v.into_iter().map(|c| c / norm).collect()
        })
        .collect()
}

impl BallMap {
    pub fn new(coords: Vec<BallPoly>) -> Result<Self> {
        Self::with_grid(coords, SELF_MAP_GRID, SELF_MAP_TOL)
    }

    pub fn with_grid(coords: Vec<BallPoly>, grid_size: usize, tol: f64) -> Result<Self> {
        let dim = coords.len();
        if dim == 0 {
            return Err(Error::Parameter(
                "ball map needs at least one coordinate".into(),
            ));
        }
        for p in &coords {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.dim(),
                });
            }
        }
        let mut map = Self {
            dim,
            coords,
            sup_check: SupCheck {
                grid_size,
                max_modulus: 0.0,
            },
        };
        let mut max_sq: f64 = 0.0;
        for z in sphere_samples(dim, grid_size) {
            max_sq = max_sq.max(map.image_norm_sqr(&z)?);
        }
        let max_modulus = max_sq.sqrt();
        if max_modulus > 1.0 + tol {
            return Err(Error::NotSelfMap { max_modulus });
        }
        if map.at_origin().iter().map(|c| c.norm_sqr()).sum::<f64>() >= 1.0 {
            return Err(Error::Parameter("|b(0)| must be < 1".into()));
        }
        map.sup_check.max_modulus = max_modulus;
        Ok(map)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[BallPoly] {
        &self.coords
    }

    pub fn sup_check(&self) -> SupCheck {
        self.sup_check
    }

    pub fn eval(&self, z: &[C64]) -> Result<Vec<C64>> {
        self.coords.iter().map(|p| p.eval(z)).collect()
    }

    fn image_norm_sqr(&self, z: &[C64]) -> Result<f64> {
        Ok(self.eval(z)?.iter().map(|c| c.norm_sqr()).sum())
    }

    pub fn at_origin(&self) -> Vec<C64> {
        self.coords
            .iter()
            .map(|p| p.coeff(&vec![0; self.dim]))
            .collect()
    }

    /// Euclidean norm `|b(0)|`.
    pub fn origin_modulus(&self) -> f64 {
        self.at_origin()
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Maximum total degree over the coordinates.
    pub fn degree(&self) -> usize {
        self.coords
            .iter()
            .map(BallPoly::total_degree)
            .max()
            .unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }
}

/// Borrowing conversion so ball routines accept disk symbols unchanged.
pub trait AsBallMap {
    fn as_ball_map(&self) -> std::borrow::Cow<'_, BallMap>;
}

impl AsBallMap for BallMap {
    fn as_ball_map(&self) -> std::borrow::Cow<'_, BallMap> {
        std::borrow::Cow::Borrowed(self)
    }
}

impl AsBallMap for SelfMapDisk {
    fn as_ball_map(&self) -> std::borrow::Cow<'_, BallMap> {
        std::borrow::Cow::Owned(self.to_ball_map())
    }
}

pub trait AsBallPoly {
    fn as_ball_poly(&self) -> std::borrow::Cow<'_, BallPoly>;
}

impl AsBallPoly for BallPoly {
    fn as_ball_poly(&self) -> std::borrow::Cow<'_, BallPoly> {
        std::borrow::Cow::Borrowed(self)
    }
}

impl AsBallPoly for DiskPoly {
    fn as_ball_poly(&self) -> std::borrow::Cow<'_, BallPoly> {
        std::borrow::Cow::Owned(self.to_ball())
    }
}

fn sample_count(n: usize) -> usize {
    (4 * (n + 1)).max(MIN_SAMPLES)
}

fn check_radius(n: usize, rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Parameter(format!(
            "sample radius {rho} must lie in (0, 1)"
        )));
    }
    if rho.powi(n as i32) < 1e-290 {
        return Err(Error::Parameter(format!(
            "sample radius {rho} underflows at degree {n}"
        )));
    }
    Ok(())
}

fn circle_points(count: usize, rho: f64) -> Vec<C64> {
    (0..count)
        .map(|k| C64::from_polar(rho, 2.0 * PI * k as f64 / count as f64))
        .collect()
}

/// Recovers the first `n + 1` Taylor coefficients from samples on the circle
/// of radius `rho`.
fn coefficients_from_samples(mut values: Vec<C64>, n: usize, rho: f64) -> DiskPoly {
    let count = values.len();
    let fft = FftPlanner::new().plan_fft_forward(count);
    fft.process(&mut values);
    let scale = 1.0 / count as f64;
    let mut radius_power = 1.0;
    let mut coeffs = Vec::with_capacity(n + 1);
    for v in values.into_iter().take(n + 1) {
        coeffs.push(v * scale / radius_power);
        radius_power *= rho;
    }
    DiskPoly { coeffs }
}

/// Degree-`n` truncation of the Taylor series of `f ∘ b`.
pub fn compose(f: &DiskPoly, b: &SelfMapDisk, n: usize, rho: f64) -> Result<DiskPoly> {
    if n == 0 {
        return Err(Error::Parameter("output degree must be at least 1".into()));
    }
    check_radius(n, rho)?;
    let values = circle_points(sample_count(n), rho)
        .into_iter()
        .map(|z| f.eval(b.eval(z)))
        .collect();
    Ok(coefficients_from_samples(values, n, rho))
}

/// Degree-`n` truncation of `1 / f`. Fails if `f` nearly vanishes on the
/// sampling circle or winds around zero there (a zero inside the circle).
pub fn reciprocal(f: &DiskPoly, n: usize, rho: f64) -> Result<DiskPoly> {
    reciprocal_with_tol(f, n, rho, RECIPROCAL_TOL)
}

pub fn reciprocal_with_tol(f: &DiskPoly, n: usize, rho: f64, tol: f64) -> Result<DiskPoly> {
    check_radius(n.max(1), rho)?;
    let points = circle_points(sample_count(n), rho);
    let samples: Vec<C64> = points.iter().map(|&z| f.eval(z)).collect();
    for (z, v) in points.iter().zip(&samples) {
        if v.norm() <= tol {
            return Err(Error::Singularity {
                point: fmt_point(&[*z]),
                modulus: v.norm(),
            });
        }
    }
    let mut winding = 0.0;
    for k in 0..samples.len() {
        let next = samples[(k + 1) % samples.len()];
        winding += (next / samples[k]).arg();
    }
    let turns = (winding / (2.0 * PI)).round() as i64;
    if turns != 0 {
        return Err(Error::Singularity {
            point: format!("{turns} zero(s) inside radius {rho}"),
            modulus: 0.0,
        });
    }
    let values = samples.into_iter().map(|v| v.inv()).collect();
    Ok(coefficients_from_samples(values, n, rho))
}

/// Maximum of `|f|` over `k` equispaced points of the unit circle: a lower
/// bound on the sup norm. Grids smaller than 16 points are raised to 16.
pub fn sup_norm_circle(f: &DiskPoly, k: usize) -> f64 {
    let k = k.max(16);
    (0..k)
        .map(|j| {
            f.eval(C64::from_polar(1.0, 2.0 * PI * j as f64 / k as f64))
                .norm()
        })
        .fold(0.0, f64::max)
}

/// Hardy-space norm `(Σ |a_n|²)^{1/2}`.
pub fn h2_norm(f: &DiskPoly) -> f64 {
    f.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyJson {
    dim: usize,
    terms: Vec<(MultiIndex, [f64; 2])>,
}

impl Serialize for BallPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), [c.re, c.im]))
            .collect();
        PolyJson {
            dim: self.dim,
            terms,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BallPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PolyJson::deserialize(d)?;
        BallPoly::new(
            raw.dim,
            raw.terms
                .into_iter()
                .map(|(m, [re, im])| (m, C64::new(re, im))),
        )
        .map_err(serde::de::Error::custom)
    }
}

impl Serialize for DiskPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| (vec![n as u32], [c.re, c.im]))
            .collect();
        PolyJson { dim: 1, terms }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiskPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = PolyJson::deserialize(d)?;
        if raw.dim != 1 {
            return Err(D::Error::custom(format!(
                "disk polynomial needs dim 1, got {}",
                raw.dim
            )));
        }
        let len = raw
            .terms
            .iter()
            .map(|(m, _)| m.first().copied().unwrap_or(0) as usize + 1)
            .max();
        let mut coeffs = vec![C64::new(0.0, 0.0); len.unwrap_or(1)];
        for (m, [re, im]) in raw.terms {
            if m.len() != 1 {
                return Err(D::Error::custom("disk multi-index must have length 1"));
            }
            coeffs[m[0] as usize] += C64::new(re, im);
        }
        DiskPoly::new(coeffs).map_err(D::Error::custom)
    }
}

impl Serialize for SelfMapDisk {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.series.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SelfMapDisk {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let p = DiskPoly::deserialize(d)?;
        SelfMapDisk::new(p).map_err(serde::de::Error::custom)
    }
}

impl Serialize for BallMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BallMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<BallPoly>::deserialize(d)?;
        BallMap::new(coords).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eval_simple() {
        let p = DiskPoly::from_real(&[1.0, 1.0]).unwrap();
        assert_eq!(p.eval(c(0.0, 0.0)), c(1.0, 0.0));
        let q = DiskPoly::monomial(2);
        assert_abs_diff_eq!(q.eval(c(0.5, 0.0)).re, 0.25, epsilon = 1e-16);
    }

    #[test]
    fn rejects_bad_coefficients() {
        assert!(DiskPoly::new(vec![]).is_err());
        assert!(DiskPoly::new(vec![c(f64::NAN, 0.0)]).is_err());
        assert!(BallPoly::new(2, [(vec![1], c(1.0, 0.0))]).is_err());
    }

    #[test]
    fn degree_ignores_trailing_zeros() {
        let p = DiskPoly::from_real(&[1.0, 2.0, 0.0, 0.0]).unwrap();
        assert_eq!(p.degree(), 1);
        assert_eq!(p.degree_bound(), 3);
        assert_eq!(DiskPoly::from_real(&[0.0, 0.0]).unwrap().degree(), 0);
    }

    #[test]
    fn ball_eval_dimension_mismatch() {
        let p = BallPoly::coordinate(2, 0, c(1.0, 0.0));
        assert!(matches!(
            p.eval(&[c(0.1, 0.0)]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(p.eval(&[c(0.3, 0.0), c(0.1, 0.0)]).unwrap(), c(0.3, 0.0));
    }

    #[test]
    fn compose_identity_weight_returns_symbol() {
        let b = SelfMapDisk::new(DiskPoly::from_real(&[0.2, 0.5, 0.1]).unwrap()).unwrap();
        let out = compose(&DiskPoly::identity(), &b, 6, DEFAULT_SAMPLE_RADIUS).unwrap();
        let expected = b.series().truncate(6);
        for (x, y) in out.coeffs().iter().zip(expected.coeffs()) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn compose_polynomial_case() {
        let f = DiskPoly::from_real(&[0.0, 1.0, 1.0]).unwrap();
        let b = SelfMapDisk::new(DiskPoly::monomial(2)).unwrap();
        let out = compose(&f, &b, 6, DEFAULT_SAMPLE_RADIUS).unwrap();
        let expected = [0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0];
        for (x, &y) in out.coeffs().iter().zip(&expected) {
            assert!((x - c(y, 0.0)).norm() < 1e-13, "{x} vs {y}");
        }
    }

    #[test]
    fn compose_rejects_bad_radius() {
        let b = SelfMapDisk::identity();
        assert!(compose(&DiskPoly::identity(), &b, 4, 1.0).is_err());
        assert!(compose(&DiskPoly::identity(), &b, 4, 0.0).is_err());
        assert!(compose(&DiskPoly::identity(), &b, 400, 1e-3).is_err());
    }

    #[test]
    fn reciprocal_geometric_series() {
        let a = c(0.3, 0.4);
        let f = DiskPoly::new(vec![c(1.0, 0.0), -a]).unwrap();
        let inv = reciprocal(&f, 20, DEFAULT_SAMPLE_RADIUS).unwrap();
        for (n, x) in inv.coeffs().iter().enumerate() {
            assert!((x - a.powu(n as u32)).norm() < 1e-12);
        }
        let one = reciprocal(&DiskPoly::constant(c(1.0, 0.0)), 5, 0.9).unwrap();
        assert!((one.coeff(0) - c(1.0, 0.0)).norm() < 1e-14);
        assert!(one.coeffs()[1..].iter().all(|x| x.norm() < 1e-14));
    }

    #[test]
    fn reciprocal_detects_zero_inside() {
        let f = DiskPoly::from_real(&[0.1, 1.0]).unwrap();
        assert!(matches!(
            reciprocal(&f, 10, 0.9),
            Err(Error::Singularity { .. })
        ));
        // zero exactly on a sample point
        let g = DiskPoly::from_real(&[-0.9, 1.0]).unwrap();
        let err = reciprocal(&g, 10, 0.9).unwrap_err();
        assert!(err.to_string().contains("0.9"), "{err}");
    }

    #[test]
    fn sup_norm_of_monomial_is_one() {
        for n in 0..5 {
            assert_abs_diff_eq!(
                sup_norm_circle(&DiskPoly::monomial(n), 32),
                1.0,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn h2_norms() {
        assert_eq!(h2_norm(&DiskPoly::constant(c(1.0, 0.0))), 1.0);
        assert_abs_diff_eq!(
            h2_norm(&DiskPoly::from_real(&[1.0, 1.0]).unwrap()),
            2f64.sqrt()
        );
    }

    #[test]
    fn mobius_coefficients() {
        let p = DiskPoly::mobius(c(0.5, 0.0), 4).unwrap();
        let expected = [0.5, 0.75, -0.375, 0.1875, -0.09375];
        for (x, &y) in p.coeffs().iter().zip(&expected) {
            assert_abs_diff_eq!(x.re, y, epsilon = 1e-16);
        }
        let t = DiskPoly::mobius_degree_for(0.5, 1e-12);
        assert!(1.5 * 0.5f64.powi(t as i32) <= 1e-12);
        assert!(1.5 * 0.5f64.powi(t as i32 - 1) > 1e-12);
    }

    #[test]
    fn self_map_validation() {
        assert!(SelfMapDisk::new(DiskPoly::from_real(&[0.0, 1.1]).unwrap()).is_err());
        let b = SelfMapDisk::new(DiskPoly::from_real(&[0.5, 0.5]).unwrap()).unwrap();
        assert_abs_diff_eq!(b.sup_check().max_modulus, 1.0, epsilon = 1e-12);
        assert!(BallMap::new(vec![
            BallPoly::coordinate(2, 0, c(0.8, 0.0)),
            BallPoly::coordinate(2, 1, c(0.8, 0.0)),
        ])
        .is_ok());
        let too_big = BallMap::new(vec![
            BallPoly::coordinate(2, 0, c(1.0, 0.0))
                .add(&BallPoly::coordinate(2, 1, c(1.0, 0.0)))
                .unwrap(),
            BallPoly::constant(2, c(0.0, 0.0)),
        ]);
        assert!(matches!(too_big, Err(Error::NotSelfMap { .. })));
    }

    #[test]
    fn json_format() {
        let p = DiskPoly::from_real(&[1.0, 0.5]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"dim":1,"terms":[[[0],[1.0,0.0]],[[1],[0.5,0.0]]]}"#);
        let q = BallPoly::new(2, [(vec![1, 1], c(2.0, -1.0))]).unwrap();
        let s = serde_json::to_string(&q).unwrap();
        assert_eq!(s, r#"{"dim":2,"terms":[[[1,1],[2.0,-1.0]]]}"#);
        let back: BallPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, q);
        assert!(serde_json::from_str::<BallPoly>(r#"{"dim":2,"terms":[],"extra":1}"#).is_err());
    }
}

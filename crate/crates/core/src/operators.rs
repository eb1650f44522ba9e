//! Finite sections of composition, multiplication and weighted composition
//! operators on `H^2_{n,alpha}` (the Hardy space when `n = alpha = 1`, the
//! weighted Bergman spaces `A^2_alpha` when `n = 1`).
//!
//! Matrices are written in the orthonormalized monomial basis
//! `e_m = z^m / ||z^m||`. Columns are indexed by monomials of total degree
//! `<= N` and rows by monomials up to the degree that the image of every
//! column can reach, so each column is the complete expansion of the operator
//! applied to a basis vector. The largest singular value of such a section is
//! therefore the norm of the operator restricted to polynomials of degree
//! `<= N`: a certified lower bound for the operator norm that can only grow
//! with `N`.
//!
//! Ball monomials are ordered graded-lexicographically: by total degree, and
//! within a degree by decreasing exponent of `z_1`, then `z_2`, and so on. In
//! dimension one the basis index is the degree.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::series::{AsBallMap, AsBallPoly, BallMap, BallPoly, MultiIndex, C64};

/// `H^2_{dim, alpha}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub dim: usize,
    pub alpha: f64,
}

impl SpaceSpec {
    pub fn new(dim: usize, alpha: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Parameter("space dimension must be positive".into()));
        }
        if !(alpha >= 1.0) {
            return Err(Error::Parameter(format!("alpha = {alpha} must be >= 1")));
        }
        Ok(Self { dim, alpha })
    }

    pub fn hardy() -> Self {
        Self { dim: 1, alpha: 1.0 }
    }

    pub fn bergman(alpha: f64) -> Result<Self> {
        Self::new(1, alpha)
    }

    pub fn ball(dim: usize, alpha: f64) -> Result<Self> {
        Self::new(dim, alpha)
    }
}

/// Monomials of total degree `<= max_degree` in graded-lex order.
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    dim: usize,
    max_degree: usize,
    exps: Vec<MultiIndex>,
    // compositions[k][p] = number of ways to write k as an ordered sum of p parts
    compositions: Vec<Vec<usize>>,
}

fn push_compositions(rest: u32, slots: usize, prefix: &mut MultiIndex, out: &mut Vec<MultiIndex>) {
    if slots == 1 {
        prefix.push(rest);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=rest).rev() {
        prefix.push(first);
        push_compositions(rest - first, slots - 1, prefix, out);
        prefix.pop();
    }
}

impl MonomialBasis {
    pub fn new(dim: usize, max_degree: usize) -> Self {
        assert!(dim >= 1, "basis dimension must be positive");
        let mut compositions = vec![vec![0usize; dim + 1]; max_degree + 1];
        for (k, row) in compositions.iter_mut().enumerate() {
            row[0] = usize::from(k == 0);
            for (p, slot) in row.iter_mut().enumerate().skip(1) {
                *slot = binomial(k + p - 1, p - 1);
            }
        }
        let mut exps = Vec::new();
        if dim == 1 {
            exps.extend((0..=max_degree as u32).map(|n| vec![n]));
        } else {
            let mut prefix = Vec::with_capacity(dim);
            for d in 0..=max_degree as u32 {
                push_compositions(d, dim, &mut prefix, &mut exps);
            }
        }
        Self {
            dim,
            max_degree,
            exps,
            compositions,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self) -> &[MultiIndex] {
        &self.exps
    }

    /// Number of monomials of total degree `<= d`.
    pub fn count_up_to(&self, d: usize) -> usize {
        binomial(d + self.dim, self.dim)
    }

    /// Position of `m` in the basis, or `None` if its degree is too large.
    pub fn index_of(&self, m: &[u32]) -> Option<usize> {
        if m.len() != self.dim {
            return None;
        }
        if self.dim == 1 {
            let n = m[0] as usize;
            return (n <= self.max_degree).then_some(n);
        }
        let total: usize = m.iter().map(|&e| e as usize).sum();
        if total > self.max_degree {
            return None;
        }
        let mut idx = if total == 0 {
            0
        } else {
            self.count_up_to(total - 1)
        };
        let mut rest = total;
        for (pos, &e) in m.iter().enumerate().take(self.dim - 1) {
            let parts = self.dim - pos - 1;
            // compositions whose current coordinate exceeds e come first
            for a in (e as usize + 1)..=rest {
                idx += self.compositions[rest - a][parts];
            }
            rest -= e as usize;
        }
        Some(idx)
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// `||z^m||` in `H^2_{n,alpha}`: the reciprocal square root of the
/// coefficient of `z^m conj(w)^m` in `(1 - <z,w>)^{-alpha}`, which is
/// `(alpha)_{|m|} / m!`.
pub fn monomial_norm(m: &[u32], alpha: f64) -> f64 {
    let mut num: Vec<f64> = m.iter().flat_map(|&e| (1..=e).map(f64::from)).collect();
    num.sort_by(f64::total_cmp);
    // pair k-th numerator factor with alpha + k so each ratio stays <= 1
    let sq: f64 = num
        .iter()
        .enumerate()
        .map(|(k, &x)| x / (alpha + k as f64))
        .product();
    sq.sqrt()
}

/// `||z^m||` for every monomial of total degree `<= max_degree`, in basis order.
pub fn monomial_norms(space: &SpaceSpec, max_degree: usize) -> Result<Vec<f64>> {
    SpaceSpec::new(space.dim, space.alpha)?;
    let basis = MonomialBasis::new(space.dim, max_degree);
    Ok(basis
        .exponents()
        .iter()
        .map(|m| monomial_norm(m, space.alpha))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SectionKind {
    Composition { b0_modulus: f64 },
    Multiplication,
    WeightedComposition,
}

/// Exact-column finite section in the orthonormalized monomial basis.
#[derive(Clone, Debug)]
pub struct SectionMatrix {
    pub space: SpaceSpec,
    pub col_degree: usize,
    pub row_degree: usize,
    pub kind: SectionKind,
    pub entries: DMatrix<C64>,
}

impl SectionMatrix {
    pub fn col_basis(&self) -> MonomialBasis {
        MonomialBasis::new(self.space.dim, self.col_degree)
    }

    pub fn row_basis(&self) -> MonomialBasis {
        MonomialBasis::new(self.space.dim, self.row_degree)
    }
}

type SparseColumn = Vec<(usize, C64)>;

struct Factor {
    terms: Vec<(MultiIndex, C64)>,
}

impl Factor {
    fn new(p: &BallPoly) -> Self {
        let terms = p
            .terms()
            .iter()
            .filter(|(_, c)| **c != C64::new(0.0, 0.0))
            .map(|(m, &c)| (m.clone(), c))
            .collect();
        Self { terms }
    }
}

/// Multiplies a sparse coefficient column by a polynomial factor.
fn multiply_column(
    col: &[(usize, C64)],
    factor: &Factor,
    basis: &MonomialBasis,
    scratch: &mut [C64],
) -> SparseColumn {
    let zero = C64::new(0.0, 0.0);
    let mut buf: MultiIndex = vec![0; basis.dim()];
    let mut touched = Vec::new();
    for &(i, a) in col {
        let mi = &basis.exps[i];
        for (mf, c) in &factor.terms {
            for ((slot, x), y) in buf.iter_mut().zip(mi).zip(mf) {
                *slot = x + y;
            }
            let k = basis
                .index_of(&buf)
                .expect("row degree covers every product");
            if scratch[k] == zero {
                touched.push(k);
            }
            scratch[k] += a * c;
        }
    }
    touched.sort_unstable();
    touched.dedup();
    let mut out = Vec::with_capacity(touched.len());
    for k in touched {
        let v = std::mem::replace(&mut scratch[k], zero);
        if v != zero {
            out.push((k, v));
        }
    }
    out
}

/// Coefficient columns `b^{m_j}` for every column monomial `m_j`.
fn power_columns(
    b: &BallMap,
    col_basis: &MonomialBasis,
    row_basis: &MonomialBasis,
) -> Vec<SparseColumn> {
    let factors: Vec<Factor> = b.coords().iter().map(Factor::new).collect();
    let mut scratch = vec![C64::new(0.0, 0.0); row_basis.len()];
    let mut cols: Vec<SparseColumn> = Vec::with_capacity(col_basis.len());
    for m in col_basis.exponents() {
        let Some(k) = m.iter().position(|&e| e > 0) else {
            cols.push(vec![(0, C64::new(1.0, 0.0))]);
            continue;
        };
        let mut prev = m.clone();
        prev[k] -= 1;
        let p = col_basis
            .index_of(&prev)
            .expect("predecessor precedes in graded order");
        let col = multiply_column(&cols[p], &factors[k], row_basis, &mut scratch);
        cols.push(col);
    }
    cols
}

fn assemble(
    space: SpaceSpec,
    col_degree: usize,
    row_degree: usize,
    kind: SectionKind,
    cols: &[SparseColumn],
) -> SectionMatrix {
    let row_basis = MonomialBasis::new(space.dim, row_degree);
    let norms: Vec<f64> = row_basis
        .exponents()
        .iter()
        .map(|m| monomial_norm(m, space.alpha))
        .collect();
    let mut entries = DMatrix::zeros(row_basis.len(), cols.len());
    for (j, col) in cols.iter().enumerate() {
        for &(i, v) in col {
            entries[(i, j)] = v * (norms[i] / norms[j]);
        }
    }
    SectionMatrix {
        space,
        col_degree,
        row_degree,
        kind,
        entries,
    }
}

fn check_space(space: &SpaceSpec, dim: usize) -> Result<()> {
    SpaceSpec::new(space.dim, space.alpha)?;
    if space.dim != dim {
        return Err(Error::DimensionMismatch {
            expected: space.dim,
            got: dim,
        });
    }
    Ok(())
}

/// Section of `C_b` with column degree `n` and row degree `n * deg(b)`.
pub fn comp_matrix(b: &impl AsBallMap, space: &SpaceSpec, n: usize) -> Result<SectionMatrix> {
    let b = b.as_ball_map();
    check_space(space, b.dim())?;
    if b.is_constant() {
        return Err(Error::ConstantSymbol(
            "composition sections need a non-constant symbol",
        ));
    }
    let row_degree = n * b.degree();
    let col_basis = MonomialBasis::new(space.dim, n);
    let row_basis = MonomialBasis::new(space.dim, row_degree);
    let cols = power_columns(&b, &col_basis, &row_basis);
    let kind = SectionKind::Composition {
        b0_modulus: b.origin_modulus(),
    };
    Ok(assemble(*space, n, row_degree, kind, &cols))
}

/// Section of the multiplication (Toeplitz) operator by `f`.
pub fn mult_matrix(f: &impl AsBallPoly, space: &SpaceSpec, n: usize) -> Result<SectionMatrix> {
    mult_matrix_rows(f, space, n, 0)
}

/// As [`mult_matrix`], with `extra` additional row degrees of zero padding.
pub fn mult_matrix_rows(
    f: &impl AsBallPoly,
    space: &SpaceSpec,
    n: usize,
    extra: usize,
) -> Result<SectionMatrix> {
    let f = f.as_ball_poly();
    check_space(space, f.dim())?;
    let row_degree = n + f.total_degree() + extra;
    let col_basis = MonomialBasis::new(space.dim, n);
    let row_basis = MonomialBasis::new(space.dim, row_degree);
    let factor = Factor::new(&f);
    let mut scratch = vec![C64::new(0.0, 0.0); row_basis.len()];
    let cols: Vec<SparseColumn> = (0..col_basis.len())
        .map(|j| {
            multiply_column(
                &[(j, C64::new(1.0, 0.0))],
                &factor,
                &row_basis,
                &mut scratch,
            )
        })
        .collect();
    Ok(assemble(
        *space,
        n,
        row_degree,
        SectionKind::Multiplication,
        &cols,
    ))
}

/// Section of `M_f C_b` (the Toeplitz-weighted composition `T_f C_b` on the disk).
pub fn weighted_comp_matrix(
    f: &impl AsBallPoly,
    b: &impl AsBallMap,
    space: &SpaceSpec,
    n: usize,
) -> Result<SectionMatrix> {
    let f = f.as_ball_poly();
    let b = b.as_ball_map();
    check_space(space, b.dim())?;
    check_space(space, f.dim())?;
    if b.is_constant() {
        return Err(Error::ConstantSymbol(
            "composition sections need a non-constant symbol",
        ));
    }
    let row_degree = n * b.degree() + f.total_degree();
    let col_basis = MonomialBasis::new(space.dim, n);
    let row_basis = MonomialBasis::new(space.dim, row_degree);
    let powers = power_columns(&b, &col_basis, &row_basis);
    let factor = Factor::new(&f);
    let mut scratch = vec![C64::new(0.0, 0.0); row_basis.len()];
    let cols: Vec<SparseColumn> = powers
        .iter()
        .map(|col| multiply_column(col, &factor, &row_basis, &mut scratch))
        .collect();
    Ok(assemble(
        *space,
        n,
        row_degree,
        SectionKind::WeightedComposition,
        &cols,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    #[serde(rename = "N")]
    pub n: usize,
    pub lower: f64,
}

/// Certified lower bound on an operator norm, with an optional closed-form
/// upper bound kept strictly separate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormBound {
    pub lower: f64,
    pub upper: Option<f64>,
    pub col_degree: usize,
    pub trace: Vec<TracePoint>,
}

impl NormBound {
    pub fn with_upper(mut self, upper: f64) -> Self {
        self.upper = Some(upper);
        self
    }

    /// CSV rows `N, lower, upper`.
    pub fn csv_rows(&self) -> Vec<(usize, f64, Option<f64>)> {
        self.trace
            .iter()
            .map(|t| (t.n, t.lower, self.upper))
            .collect()
    }
}

/// `((1 + |b(0)|) / (1 - |b(0)|))^{alpha / 2}`.
pub fn composition_upper_bound(b0_modulus: f64, alpha: f64) -> f64 {
    ((1.0 + b0_modulus) / (1.0 - b0_modulus)).powf(alpha / 2.0)
}

/// Largest singular value of the section. Disk composition sections carry the
/// closed-form upper bound; ball callers attach it once positivity is checked.
pub fn op_norm_lower(mat: &SectionMatrix) -> NormBound {
    norm_trace(mat, &[mat.col_degree])
}

/// Lower bounds for the leading sections of every degree in `degrees`
/// (clamped to the section's column degree), from one Gram matrix.
pub fn norm_trace(mat: &SectionMatrix, degrees: &[usize]) -> NormBound {
    let basis = mat.col_basis();
    let mut degrees: Vec<usize> = degrees.iter().map(|&d| d.min(mat.col_degree)).collect();
    degrees.sort_unstable();
    degrees.dedup();
    let counts: Vec<usize> = degrees.iter().map(|&d| basis.count_up_to(d)).collect();
    let sv = linalg::leading_singular_values(&mat.entries, &counts);
    let mut trace = Vec::with_capacity(sv.len());
    let mut running: f64 = 0.0;
    for (&d, &s) in degrees.iter().zip(&sv) {
        running = running.max(s);
        trace.push(TracePoint {
            n: d,
            lower: running,
        });
    }
    let upper = match mat.kind {
        SectionKind::Composition { b0_modulus } if mat.space.dim == 1 => {
            Some(composition_upper_bound(b0_modulus, mat.space.alpha))
        }
        _ => None,
    };
    NormBound {
        lower: running,
        upper,
        col_degree: degrees.last().copied().unwrap_or(0),
        trace,
    }
}

fn monomial_value(m: &[u32], z: &[C64]) -> C64 {
    m.iter()
        .zip(z)
        .fold(C64::new(1.0, 0.0), |acc, (&e, zi)| acc * zi.powu(e))
}

/// Coordinates of the kernel function `k_w` in the orthonormal basis.
pub fn kernel_vector(space: &SpaceSpec, degree: usize, w: &[C64]) -> DVector<C64> {
    let basis = MonomialBasis::new(space.dim, degree);
    DVector::from_iterator(
        basis.len(),
        basis
            .exponents()
            .iter()
            .map(|m| monomial_value(m, w).conj() / monomial_norm(m, space.alpha)),
    )
}

const ADJOINT_MAX_MODULUS: f64 = 0.7;

fn check_adjoint_point(space: &SpaceSpec, w: &[C64]) -> Result<()> {
    if w.len() != space.dim {
        return Err(Error::DimensionMismatch {
            expected: space.dim,
            got: w.len(),
        });
    }
    let norm = w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm > ADJOINT_MAX_MODULUS {
        return Err(Error::Parameter(format!(
            "|w| = {norm} exceeds {ADJOINT_MAX_MODULUS}"
        )));
    }
    Ok(())
}

/// Largest discrepancy between `C_b^* k_w` computed from the section and
/// `k_{b(w)}`, over the first `n`-degree coordinates.
pub fn adjoint_kernel_check(
    b: &impl AsBallMap,
    space: &SpaceSpec,
    n: usize,
    w: &[C64],
) -> Result<f64> {
    let b = b.as_ball_map();
    check_adjoint_point(space, w)?;
    let mat = comp_matrix(&*b, space, n)?;
    let kw = kernel_vector(space, mat.row_degree, w);
    let got = mat.entries.ad_mul(&kw);
    let target = kernel_vector(space, n, &b.eval(w)?);
    Ok(got
        .iter()
        .zip(target.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max))
}

/// Largest discrepancy between `T_f^* k_w` and `conj(f(w)) k_w`.
pub fn toeplitz_adjoint_check(
    f: &impl AsBallPoly,
    space: &SpaceSpec,
    n: usize,
    w: &[C64],
) -> Result<f64> {
    let f = f.as_ball_poly();
    check_adjoint_point(space, w)?;
    let mat = mult_matrix(&*f, space, n)?;
    let kw = kernel_vector(space, mat.row_degree, w);
    let got = mat.entries.ad_mul(&kw);
    let fw = f.eval(w)?.conj();
    Ok((0..got.len())
        .map(|j| (got[j] - fw * kw[j]).norm())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{DiskPoly, SelfMapDisk};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn basis_order_and_ranking() {
        let basis = MonomialBasis::new(2, 2);
        let expected: Vec<MultiIndex> = vec![
            vec![0, 0],
            vec![1, 0],
            vec![0, 1],
            vec![2, 0],
            vec![1, 1],
            vec![0, 2],
        ];
        assert_eq!(basis.exponents(), expected.as_slice());
        for (i, m) in expected.iter().enumerate() {
            assert_eq!(basis.index_of(m), Some(i));
        }
        assert_eq!(basis.index_of(&[2, 1]), None);
        let b3 = MonomialBasis::new(3, 5);
        for (i, m) in b3.exponents().iter().enumerate() {
            assert_eq!(b3.index_of(m), Some(i));
        }
        assert_eq!(b3.len(), b3.count_up_to(5));
    }

    #[test]
    fn hardy_and_bergman_norms() {
        let h = monomial_norms(&SpaceSpec::hardy(), 10).unwrap();
        assert!(h.iter().all(|&x| x == 1.0));
        let a2 = monomial_norms(&SpaceSpec::bergman(2.0).unwrap(), 10).unwrap();
        for (n, x) in a2.iter().enumerate() {
            assert!((x * x - 1.0 / (n as f64 + 1.0)).abs() < 1e-15);
        }
        let ball = MonomialBasis::new(2, 2);
        let idx = ball.index_of(&[1, 1]).unwrap();
        let norms = monomial_norms(&SpaceSpec::ball(2, 1.0).unwrap(), 2).unwrap();
        assert!((norms[idx] * norms[idx] - 0.5).abs() < 1e-15);
        assert!(monomial_norms(&SpaceSpec { dim: 1, alpha: 0.5 }, 3).is_err());
    }

    #[test]
    fn identity_symbol_gives_identity() {
        let m = comp_matrix(&SelfMapDisk::identity(), &SpaceSpec::hardy(), 5).unwrap();
        assert_eq!(m.entries, DMatrix::identity(6, 6));
        let nb = op_norm_lower(&m);
        assert!((nb.lower - 1.0).abs() < 1e-14);
        assert!((nb.upper.unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn z_squared_is_isometric_spread() {
        let b = SelfMapDisk::new(DiskPoly::monomial(2)).unwrap();
        let m = comp_matrix(&b, &SpaceSpec::hardy(), 4).unwrap();
        assert_eq!(m.entries.nrows(), 9);
        for j in 0..5 {
            for i in 0..9 {
                let want = if i == 2 * j { 1.0 } else { 0.0 };
                assert_eq!(m.entries[(i, j)], c(want));
            }
        }
    }

    #[test]
    fn constant_symbol_rejected() {
        let b = SelfMapDisk::new(DiskPoly::constant(c(0.3))).unwrap();
        assert!(matches!(
            comp_matrix(&b, &SpaceSpec::hardy(), 3),
            Err(Error::ConstantSymbol(_))
        ));
    }

    #[test]
    fn shift_matrices() {
        let one = mult_matrix(&DiskPoly::constant(c(1.0)), &SpaceSpec::hardy(), 4).unwrap();
        assert_eq!(one.entries, DMatrix::identity(5, 5));
        let s = mult_matrix(&DiskPoly::identity(), &SpaceSpec::hardy(), 4).unwrap();
        for i in 0..6 {
            for j in 0..5 {
                assert_eq!(s.entries[(i, j)], c(if i == j + 1 { 1.0 } else { 0.0 }));
            }
        }
        let b = mult_matrix(&DiskPoly::identity(), &SpaceSpec::bergman(2.0).unwrap(), 6).unwrap();
        for n in 0..=6 {
            let want = ((n as f64 + 1.0) / (n as f64 + 2.0)).sqrt();
            assert!((b.entries[(n + 1, n)].re - want).abs() < 1e-15);
        }
    }

    #[test]
    fn scaled_identity_has_unit_norm() {
        let b = SelfMapDisk::new(DiskPoly::from_real(&[0.0, 0.6]).unwrap()).unwrap();
        for n in [1, 5, 12] {
            let nb = op_norm_lower(&comp_matrix(&b, &SpaceSpec::hardy(), n).unwrap());
            assert!((nb.lower - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn weighted_matrix_special_cases() {
        let b = SelfMapDisk::new(DiskPoly::from_real(&[0.1, 0.4, 0.3]).unwrap()).unwrap();
        let space = SpaceSpec::hardy();
        let plain = comp_matrix(&b, &space, 6).unwrap();
        let weighted = weighted_comp_matrix(&DiskPoly::constant(c(1.0)), &b, &space, 6).unwrap();
        assert!((plain.entries - weighted.entries).norm() < 1e-15);

        let z2 = SelfMapDisk::new(DiskPoly::monomial(2)).unwrap();
        let m = weighted_comp_matrix(&DiskPoly::identity(), &z2, &space, 4).unwrap();
        for j in 0..5 {
            assert_eq!(m.entries[(2 * j + 1, j)], c(1.0));
            assert!((m.entries.column(j).norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn adjoint_identity_is_exact() {
        let r = adjoint_kernel_check(
            &SelfMapDisk::identity(),
            &SpaceSpec::hardy(),
            20,
            &[C64::new(0.3, 0.2)],
        )
        .unwrap();
        assert!(r <= 1e-12);
        assert!(
            adjoint_kernel_check(&SelfMapDisk::identity(), &SpaceSpec::hardy(), 5, &[c(0.9)])
                .is_err()
        );
    }
}

//! Dense Hermitian helpers shared by the kernel and operator modules.

use nalgebra::{DMatrix, DVector};

use crate::series::C64;

/// Largest entrywise gap `|A_ij - conj(A_ji)|`.
pub fn hermitian_asymmetry(a: &DMatrix<C64>) -> f64 {
    let n = a.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(A + A*) / 2`.
pub fn hermitianize(a: &DMatrix<C64>) -> DMatrix<C64> {
    (a + a.adjoint()).scale(0.5)
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(a: &DMatrix<C64>) -> (DVector<f64>, DMatrix<C64>) {
    let n = a.nrows();
    if n == 0 {
        return (DVector::zeros(0), DMatrix::zeros(0, 0));
    }
    let eig = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &DMatrix<C64>) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = a.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `A* A`, skipping structural zeros row by row.
pub fn column_gram(a: &DMatrix<C64>) -> DMatrix<C64> {
    let cols = a.ncols();
    let mut g = DMatrix::<C64>::zeros(cols, cols);
    let zero = C64::new(0.0, 0.0);
    let mut nz: Vec<(usize, C64)> = Vec::with_capacity(cols);
    for r in 0..a.nrows() {
        nz.clear();
        nz.extend(
            (0..cols)
                .map(|j| (j, a[(r, j)]))
                .filter(|(_, v)| *v != zero),
        );
        for &(i, ai) in &nz {
            let ci = ai.conj();
            for &(j, aj) in &nz {
                if j >= i {
                    g[(i, j)] += ci * aj;
                }
            }
        }
    }
    for i in 0..cols {
        g[(i, i)].im = 0.0;
        for j in (i + 1)..cols {
            g[(j, i)] = g[(i, j)].conj();
        }
    }
    g
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Largest eigenvalue of the leading `k x k` block of a Hermitian PSD matrix,
/// split into independent diagonal blocks along its sparsity pattern.
fn leading_max_eigenvalue(g: &DMatrix<C64>, k: usize) -> f64 {
    let zero = C64::new(0.0, 0.0);
    let mut parent: Vec<usize> = (0..k).collect();
    for i in 0..k {
        for j in (i + 1)..k {
            if g[(i, j)] != zero {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut blocks: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..k {
        let root = find(&mut parent, i);
        blocks.entry(root).or_default().push(i);
    }
    let mut best: f64 = 0.0;
    for idx in blocks.values() {
        let lam = if idx.len() == 1 {
            g[(idx[0], idx[0])].re
        } else {
            let sub = DMatrix::from_fn(idx.len(), idx.len(), |a, b| g[(idx[a], idx[b])]);
            hermitian_eigenvalues(&sub).last().copied().unwrap_or(0.0)
        };
        best = best.max(lam);
    }
    best
}

/// Largest singular value of every leading column block `A[:, ..k]`.
pub fn leading_singular_values(a: &DMatrix<C64>, col_counts: &[usize]) -> Vec<f64> {
    let g = column_gram(a);
    col_counts
        .iter()
        .map(|&k| leading_max_eigenvalue(&g, k.min(a.ncols())).max(0.0).sqrt())
        .collect()
}

pub fn largest_singular_value(a: &DMatrix<C64>) -> f64 {
    leading_singular_values(a, &[a.ncols()])[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_sorted_and_reconstructs() {
        let a = DMatrix::from_row_slice(
            3,
            3,
            &[
                C64::new(2.0, 0.0),
                C64::new(0.0, 1.0),
                C64::new(0.5, 0.0),
                C64::new(0.0, -1.0),
                C64::new(3.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.5, 0.0),
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
            ],
        );
        let (vals, vecs) = hermitian_eigen(&a);
        assert!(vals[0] <= vals[1] && vals[1] <= vals[2]);
        let rebuilt =
            &vecs * DMatrix::from_diagonal(&vals.map(|x| C64::new(x, 0.0))) * vecs.adjoint();
        assert!((rebuilt - &a).norm() < 1e-12);
    }

    #[test]
    fn singular_value_matches_svd() {
        let a = DMatrix::from_fn(7, 4, |i, j| {
            C64::new((i * 3 + j) as f64 * 0.1, (i as f64 - j as f64) * 0.05)
        });
        let svd = a.clone().svd(false, false);
        let top = svd.singular_values.max();
        assert!((largest_singular_value(&a) - top).abs() < 1e-12);
    }

    #[test]
    fn block_split_handles_disjoint_columns() {
        let mut a = DMatrix::<C64>::zeros(4, 3);
        a[(0, 0)] = C64::new(1.0, 0.0);
        a[(2, 1)] = C64::new(0.0, 2.0);
        a[(3, 2)] = C64::new(1.5, 0.0);
        let s = leading_singular_values(&a, &[1, 2, 3]);
        assert_eq!(s, vec![1.0, 2.0, 2.0]);
    }
}

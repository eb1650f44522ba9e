#![allow(dead_code)]

use kernelcomp::dbr::KernelCombo;
use kernelcomp::kernels::{PointSet, Sampler};
use kernelcomp::series::{BallMap, BallPoly, DiskPoly, SelfMapDisk, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn gaussian(r: &mut impl Rng) -> C64 {
    let re: f64 = StandardNormal.sample(r);
    let im: f64 = StandardNormal.sample(r);
    c(re, im)
}

/// Polynomial of degree 1..=max_degree with coefficient absolute sum in
/// `[sup / 2, sup]`, so its sup on the closed disk is at most `sup`.
pub fn random_symbol(r: &mut impl Rng, max_degree: usize, sup: f64) -> SelfMapDisk {
    let d = r.random_range(1..=max_degree);
    let coeffs: Vec<C64> = (0..=d).map(|_| gaussian(r)).collect();
    let l1: f64 = coeffs.iter().map(|z| z.norm()).sum();
    let s = sup * r.random_range(0.5..=1.0) / l1;
    SelfMapDisk::new(DiskPoly::new(coeffs.into_iter().map(|z| z * s).collect()).unwrap()).unwrap()
}

pub fn random_nodes(r: &mut impl Rng, max_nodes: usize, radius: f64) -> PointSet {
    let k = r.random_range(1..=max_nodes);
    let pts: Vec<C64> = (0..k).map(|_| Sampler::point(r, 1, radius)[0]).collect();
    PointSet::disk(&pts).unwrap()
}

pub fn random_combo(
    r: &mut impl Rng,
    b: &SelfMapDisk,
    alpha: u32,
    max_nodes: usize,
    radius: f64,
) -> KernelCombo {
    let nodes = random_nodes(r, max_nodes, radius);
    let coeffs = (0..nodes.len()).map(|_| gaussian(r)).collect();
    KernelCombo::new(b.clone(), alpha, nodes, coeffs).unwrap()
}

/// Taylor polynomial of `f` with coefficient tail below `tol`.
pub fn combo_poly(f: &KernelCombo, tol: f64) -> DiskPoly {
    let mut n = 16;
    while f.tail_bound(n) > tol {
        n += 16;
        assert!(n <= 2048, "tail did not fall below {tol}");
    }
    f.to_disk_poly(n)
}

/// `c + A z` on the ball of `C^2` with `|c| + ||A|| <= margin`.
pub fn random_affine_map(r: &mut impl Rng, offset_radius: f64, margin: f64) -> BallMap {
    let off = Sampler::point(r, 2, offset_radius);
    let a: Vec<C64> = (0..4).map(|_| gaussian(r)).collect();
    // largest singular value of [[a0, a1], [a2, a3]] from the 2x2 Gram matrix
    let p = a[0].norm_sqr() + a[2].norm_sqr();
    let q = a[1].norm_sqr() + a[3].norm_sqr();
    let x = a[0].conj() * a[1] + a[2].conj() * a[3];
    let op = ((p + q) / 2.0 + (((p - q) / 2.0).powi(2) + x.norm_sqr()).sqrt()).sqrt();
    let off_norm = (off[0].norm_sqr() + off[1].norm_sqr()).sqrt();
    let s = (margin - off_norm) * r.random_range(0.5..=1.0) / op;
    let coords = (0..2)
        .map(|i| {
            BallPoly::new(
                2,
                [
                    (vec![0, 0], off[i]),
                    (vec![1, 0], a[2 * i] * s),
                    (vec![0, 1], a[2 * i + 1] * s),
                ],
            )
            .unwrap()
        })
        .collect();
    BallMap::new(coords).unwrap()
}

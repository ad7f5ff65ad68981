//! Independent oracles and samplers shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schwarzpick::{CScalar, CVector, HoloMap};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> CScalar {
    CScalar::new(re, im)
}

/// Uniform-ish vector with entries in the unit square, not normalized.
pub fn raw_vector(n: usize, r: &mut impl Rng) -> CVector {
    CVector::new(
        (0..n)
            .map(|_| c(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
            .collect(),
    )
    .unwrap()
}

pub fn unit_vector(n: usize, r: &mut impl Rng) -> CVector {
    loop {
        if let Some(u) = raw_vector(n, r).normalized() {
            return u;
        }
    }
}

/// Point with `|z| = radius` in a random direction.
pub fn point_at_radius(n: usize, radius: f64, r: &mut impl Rng) -> CVector {
    unit_vector(n, r).scale(c(radius, 0.0))
}

/// Point of the ball with `|z|` uniform in `[0, max_radius)`.
pub fn ball_point(n: usize, max_radius: f64, r: &mut impl Rng) -> CVector {
    let radius = r.random_range(0.0..max_radius);
    point_at_radius(n, radius, r)
}

fn add_real(z: &CVector, j: usize, h: CScalar) -> CVector {
    let mut e = z.entries().to_vec();
    e[j] += h;
    CVector::new(e).unwrap()
}

/// Central complex difference `(f(z + h e_j) - f(z - h e_j)) / 2h` along direction `dir`.
pub fn central_partial(f: &HoloMap, z: &CVector, j: usize, dir: CScalar, h: f64) -> Vec<CScalar> {
    let step = dir * h;
    let fp = f.eval(&add_real(z, j, step)).unwrap();
    let fm = f.eval(&add_real(z, j, -step)).unwrap();
    fp.iter()
        .zip(fm.iter())
        .map(|(a, b)| (a - b) / (step * 2.0))
        .collect()
}

/// Largest entrywise gap between the analytic Jacobian and central differences.
pub fn jacobian_fd_gap(f: &HoloMap, z: &CVector, h: f64) -> f64 {
    let jac = f.jacobian(z).unwrap();
    let mut worst = 0.0f64;
    for j in 0..z.dim() {
        let col = central_partial(f, z, j, c(1.0, 0.0), h);
        for (i, v) in col.iter().enumerate() {
            worst = worst.max((jac.get(i, j) - v).norm());
        }
    }
    worst
}

/// Euclidean norm of the real 2n-gradient of `|f|`, by central differences in
/// each real coordinate.
pub fn real_gradient_norm(f: &HoloMap, z: &CVector, h: f64) -> f64 {
    let g = |w: &CVector| f.eval(w).unwrap().norm();
    let mut sq = 0.0;
    for j in 0..z.dim() {
        for dir in [c(1.0, 0.0), c(0.0, 1.0)] {
            let d = (g(&add_real(z, j, dir * h)) - g(&add_real(z, j, -dir * h))) / (2.0 * h);
            sq += d * d;
        }
    }
    sq.sqrt()
}

/// Largest singular value of a 2x2 complex matrix from the closed form
/// `s^2 = (F^2 + sqrt(F^4 - 4 |det|^2)) / 2`.
pub fn sigma_max_2x2(a: CScalar, b: CScalar, cc: CScalar, d: CScalar) -> f64 {
    let f2 = a.norm_sqr() + b.norm_sqr() + cc.norm_sqr() + d.norm_sqr();
    let det = (a * d - b * cc).norm_sqr();
    ((f2 + (f2 * f2 - 4.0 * det).max(0.0).sqrt()) / 2.0).sqrt()
}

/// Scalar disk automorphism `phi_{z0}(z) = (z0 - z) / (1 - conj(z0) z)` evaluated directly.
pub fn phi(z0: CScalar, z: CScalar) -> CScalar {
    (z0 - z) / (1.0 - z0.conj() * z)
}

//! Complex scalars, vectors and small dense matrices.
//!
//! The Hermitian inner product is linear in the first slot and conjugate-linear
//! in the second: `<x, y> = sum_j x_j * conj(y_j)`. Everything downstream (the
//! `A` vector of the modulus gradient, the slice centre) relies on this order.

use std::fmt;
use std::ops::{Add, Index, Mul, Sub};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{Error, Result};

pub type CScalar = Complex64;

/// Default stopping tolerance for [`spectral_norm`].
pub const SPECTRAL_TOL: f64 = 1e-12;
/// Default iteration cap for [`spectral_norm`].
pub const SPECTRAL_MAX_ITER: usize = 10_000;

// Seed of the check start used by `spectral_norm`.
const CHECK_START_SEED: u64 = 0x005e_ed0f_5b1d;

/// A point or direction in `C^n`, `n >= 1`.
#[derive(Clone, PartialEq)]
pub struct CVector(Vec<CScalar>);

impl CVector {
    /// Rejects empty input and non-finite components.
    pub fn new(entries: Vec<CScalar>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::input("vector must have at least one entry"));
        }
        if let Some(j) = entries.iter().position(|z| !z.is_finite()) {
            return Err(Error::input(format!("entry {j} is not finite")));
        }
        Ok(CVector(entries))
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(re, im)| CScalar::new(re, im)).collect())
    }

    pub fn from_real(xs: &[f64]) -> Result<Self> {
        Self::new(xs.iter().map(|&x| CScalar::new(x, 0.0)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        CVector(vec![CScalar::new(0.0, 0.0); n.max(1)])
    }

    /// The `j`-th standard basis vector of `C^n`.
    pub fn basis(n: usize, j: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[j] = CScalar::new(1.0, 0.0);
        v
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<CScalar>) -> Self {
        debug_assert!(!entries.is_empty());
        CVector(entries)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[CScalar] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<CScalar> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, CScalar> {
        self.0.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.is_finite())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, c: CScalar) -> Self {
        CVector(self.0.iter().map(|z| z * c).collect())
    }

    pub fn conj(&self) -> Self {
        CVector(self.0.iter().map(|z| z.conj()).collect())
    }

    /// `self / |self|`, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| self.scale(CScalar::new(1.0 / n, 0.0)))
    }

    pub(crate) fn check_dim(&self, n: usize, what: &str) -> Result<()> {
        if self.dim() != n {
            return Err(Error::input(format!(
                "{what}: expected dimension {n}, got {}",
                self.dim()
            )));
        }
        Ok(())
    }
}

impl fmt::Debug for CVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Serialized as `[[re, im], ...]`.
impl Serialize for CVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for z in &self.0 {
            seq.serialize_element(&[z.re, z.im])?;
        }
        seq.end()
    }
}

impl Index<usize> for CVector {
    type Output = CScalar;
    fn index(&self, j: usize) -> &CScalar {
        &self.0[j]
    }
}

impl Add for &CVector {
    type Output = CVector;
    fn add(self, rhs: &CVector) -> CVector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        CVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &CVector {
    type Output = CVector;
    fn sub(self, rhs: &CVector) -> CVector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        CVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

/// `<x, y> = sum_j x_j * conj(y_j)`.
pub fn herm_inner(x: &CVector, y: &CVector) -> Result<CScalar> {
    if x.dim() != y.dim() {
        return Err(Error::input(format!(
            "inner product of vectors with dimensions {} and {}",
            x.dim(),
            y.dim()
        )));
    }
    Ok(inner_unchecked(x, y))
}

pub(crate) fn inner_unchecked(x: &CVector, y: &CVector) -> CScalar {
    x.0.iter().zip(&y.0).map(|(a, b)| a * b.conj()).sum()
}

/// Dense row-major `rows x cols` complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<CScalar>,
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<CScalar>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::input("matrix must be nonempty"));
        }
        if data.len() != rows * cols {
            return Err(Error::input(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.is_finite()) {
            return Err(Error::input("matrix entry is not finite"));
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<CScalar>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::input("ragged rows"));
        }
        Self::new(r, c, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![CScalar::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = CScalar::new(1.0, 0.0);
        }
        m
    }

    /// Matrix whose columns are the given vectors (all of equal dimension).
    pub fn from_columns(cols: &[CVector]) -> Result<Self> {
        let rows = cols.first().map_or(0, CVector::dim);
        if cols.iter().any(|c| c.dim() != rows) {
            return Err(Error::input("columns of differing dimension"));
        }
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, z) in col.iter().enumerate() {
                m.set(i, j, *z);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> CScalar {
        self.data[i * self.cols + j]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, z: CScalar) {
        self.data[i * self.cols + j] = z;
    }

    pub fn entries(&self) -> &[CScalar] {
        &self.data
    }

    pub fn column(&self, j: usize) -> CVector {
        CVector::from_vec_unchecked((0..self.rows).map(|i| self.get(i, j)).collect())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        let mut t = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).conj());
            }
        }
        t
    }

    pub fn scale(&self, c: CScalar) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn mul_vec(&self, v: &CVector) -> Result<CVector> {
        v.check_dim(self.cols, "matrix-vector product")?;
        Ok(self.mul_vec_unchecked(v))
    }

    pub(crate) fn mul_vec_unchecked(&self, v: &CVector) -> CVector {
        CVector::from_vec_unchecked(
            self.data
                .chunks(self.cols)
                .map(|row| row.iter().zip(v.iter()).map(|(a, b)| a * b).sum())
                .collect(),
        )
    }

    pub fn matmul(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::input(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(self.matmul_unchecked(rhs))
    }

    pub(crate) fn matmul_unchecked(&self, rhs: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == CScalar::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    let idx = i * rhs.cols + j;
                    out.data[idx] += a * rhs.get(k, j);
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<_> = self.data.chunks(self.cols).collect();
        f.debug_struct("CMatrix")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("data", &rows)
            .finish()
    }
}

impl Mul<&CVector> for &CMatrix {
    type Output = CVector;
    fn mul(self, v: &CVector) -> CVector {
        assert_eq!(self.cols, v.dim(), "matrix-vector dimension mismatch");
        self.mul_vec_unchecked(v)
    }
}

/// Largest singular value together with a unit right-singular vector attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralNorm {
    pub value: f64,
    pub direction: CVector,
}

enum PowerRun {
    Converged { lambda: f64, v: CVector },
    Stalled,
    Exhausted { lambda: f64, v: CVector },
}

fn power_run(m: &CMatrix, gram: &CMatrix, start: CVector, tol: f64, max_iter: usize) -> PowerRun {
    let mut v = match start.normalized() {
        Some(v) => v,
        None => return PowerRun::Stalled,
    };
    let mut lambda_prev = m.mul_vec_unchecked(&v).norm_sqr();
    for _ in 0..max_iter {
        let w = gram.mul_vec_unchecked(&v);
        let Some(next) = w.normalized() else {
            return PowerRun::Stalled;
        };
        v = next;
        let lambda = m.mul_vec_unchecked(&v).norm_sqr();
        if lambda == 0.0 {
            return PowerRun::Stalled;
        }
        if (lambda - lambda_prev).abs() <= tol * lambda {
            return PowerRun::Converged { lambda, v };
        }
        lambda_prev = lambda;
    }
    let lambda = m.mul_vec_unchecked(&v).norm_sqr();
    PowerRun::Exhausted { lambda, v }
}

/// Largest singular value of `m` by power iteration on `m^H m`.
///
/// Two starts are run: the normalized all-ones vector, and a fixed seeded
/// Gaussian vector. The second start also serves as the restart when the first
/// one lands in the null space. Rayleigh quotients never exceed the top
/// eigenvalue, so the larger converged estimate is returned.
pub fn spectral_norm(m: &CMatrix, tol: f64, max_iter: usize) -> Result<SpectralNorm> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::input("spectral_norm: tol must be positive"));
    }
    let n = m.cols();
    let ones = CVector::from_vec_unchecked(vec![CScalar::new(1.0, 0.0); n]);
    if m.frobenius_norm() == 0.0 {
        return Ok(SpectralNorm {
            value: 0.0,
            direction: ones.normalized().expect("nonzero"),
        });
    }
    let gram = m.adjoint().matmul_unchecked(m);
    let mut rng = ChaCha8Rng::seed_from_u64(CHECK_START_SEED);
    let check = gaussian_vector(n, &mut rng);

    let mut best: Option<(f64, CVector)> = None;
    let mut fallback: Option<(f64, CVector)> = None;
    for start in [ones, check] {
        match power_run(m, &gram, start, tol, max_iter) {
            PowerRun::Converged { lambda, v } => {
                if best.as_ref().is_none_or(|(l, _)| lambda > *l) {
                    best = Some((lambda, v));
                }
            }
            PowerRun::Exhausted { lambda, v } => {
                if fallback.as_ref().is_none_or(|(l, _)| lambda > *l) {
                    fallback = Some((lambda, v));
                }
            }
            PowerRun::Stalled => {}
        }
    }
    match (best, fallback) {
        (Some((lambda, v)), fb) => {
            // An unconverged run can still hold the larger lower bound.
            let (lambda, v) = match fb {
                Some((lf, vf)) if lf > lambda => (lf, vf),
                _ => (lambda, v),
            };
            Ok(SpectralNorm {
                value: lambda.sqrt(),
                direction: v,
            })
        }
        (None, Some((lambda, v))) => Err(Error::Numerical {
            iterations: max_iter,
            value: lambda.sqrt(),
            direction: v,
        }),
        (None, None) => {
            // Both starts annihilated by a nonzero matrix: only possible through
            // underflow. Fall back to the largest column.
            let (j, col) = (0..n)
                .map(|j| (j, m.column(j).norm()))
                .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            Ok(SpectralNorm {
                value: col,
                direction: CVector::basis(n, j),
            })
        }
    }
}

pub(crate) fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    CVector::from_vec_unchecked(
        (0..n)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                CScalar::new(re, im)
            })
            .collect(),
    )
}

/// One uniform sample from the unit sphere of `C^n` (the real `2n-1` sphere).
pub(crate) fn unit_sphere_point<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    loop {
        if let Some(v) = gaussian_vector(n, rng).normalized() {
            return v;
        }
    }
}

/// `count` deterministic uniform samples from the unit sphere of `C^n`.
pub fn sample_unit_sphere(n: usize, count: usize, seed: u64) -> Result<Vec<CVector>> {
    if n == 0 {
        return Err(Error::input("sample_unit_sphere: n must be at least 1"));
    }
    if count == 0 {
        return Err(Error::input("sample_unit_sphere: count must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| unit_sphere_point(n, &mut rng)).collect())
}

//! The modulus gradient `|grad |f||(z)` and Schwarz-Pick-type bounds.
//!
//! `|grad |f||(z)` is the supremum over unit directions `beta` of the one-sided
//! derivative of `t -> |f(z + t beta)|` at `t = 0+`. For holomorphic `f` it has
//! the closed form
//!
//! ```text
//! |A| / |f(z)|                 if f(z) != 0,   A_j = <df/dz_j (z), f(z)>
//! sup_{|beta|=1} |Df(z) beta|  if f(z) == 0
//! ```
//!
//! [`mod_grad`] evaluates the closed form, [`mod_grad_fd`] estimates the
//! supremum directly from evaluations of `f` and serves as an oracle for it.

use serde::Serialize;

use crate::complex::{
    inner_unchecked, sample_unit_sphere, spectral_norm, CScalar, CVector, SPECTRAL_MAX_ITER,
    SPECTRAL_TOL,
};
use crate::error::{Error, Result};
use crate::holomap::HoloMap;

/// `|f(z)|` at or below this is treated as a zero of `f`.
pub const ZERO_THRESHOLD: f64 = 1e-13;

/// An FD sample above the closed form by more than this is reported as an anomaly.
pub const ANOMALY_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Nonzero,
    Zero,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Nonzero => "nonzero",
            Branch::Zero => "zero",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradResult {
    pub value: f64,
    pub branch: Branch,
    /// `A_j = <df/dz_j, f>`, present on the nonzero branch.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<CVector>,
    /// Maximizing unit direction, present on the zero branch.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub top_dir: Option<CVector>,
    /// `|f(z)|` fell in `(ZERO_THRESHOLD / 10, ZERO_THRESHOLD]`: the zero branch
    /// was taken, and `nonzero_value` holds what the other branch gives.
    pub ambiguous: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nonzero_value: Option<f64>,
}

fn a_vector(jac: &crate::complex::CMatrix, fz: &CVector) -> CVector {
    CVector::from_vec_unchecked(
        (0..jac.cols())
            .map(|j| inner_unchecked(&jac.column(j), fz))
            .collect(),
    )
}

pub fn mod_grad(f: &HoloMap, z: &CVector) -> Result<GradResult> {
    let (fz, jac) = f.eval_with_jacobian(z)?;
    let modulus = fz.norm();
    if modulus > ZERO_THRESHOLD {
        let a = a_vector(&jac, &fz);
        return Ok(GradResult {
            value: a.norm() / modulus,
            branch: Branch::Nonzero,
            a: Some(a),
            top_dir: None,
            ambiguous: false,
            nonzero_value: None,
        });
    }
    let top = spectral_norm(&jac, SPECTRAL_TOL, SPECTRAL_MAX_ITER)?;
    let ambiguous = modulus > ZERO_THRESHOLD / 10.0;
    let nonzero_value = ambiguous.then(|| a_vector(&jac, &fz).norm() / modulus);
    Ok(GradResult {
        value: top.value,
        branch: Branch::Zero,
        a: None,
        top_dir: Some(top.direction),
        ambiguous,
        nonzero_value,
    })
}

/// Parameters of the finite-difference oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct FdParams {
    /// Strictly decreasing positive step sizes, extrapolated to `t = 0`.
    pub steps: Vec<f64>,
    /// Number of random unit directions (at least 64).
    pub dirs: usize,
    pub seed: u64,
}

impl Default for FdParams {
    fn default() -> Self {
        FdParams {
            steps: vec![1e-4, 5e-5],
            dirs: 64,
            seed: 0,
        }
    }
}

impl FdParams {
    fn validate(&self) -> Result<()> {
        if self.steps.is_empty() || self.steps.iter().any(|&t| !t.is_finite() || t <= 0.0) {
            return Err(Error::input("fd steps must be positive"));
        }
        if self.steps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::input("fd steps must be strictly decreasing"));
        }
        if self.dirs < 64 {
            return Err(Error::input("fd oracle needs at least 64 directions"));
        }
        Ok(())
    }
}

/// Neville extrapolation of the samples `(t_k, d_k)` to `t = 0`.
fn extrapolate_to_zero(steps: &[f64], values: &[f64]) -> f64 {
    let mut p = values.to_vec();
    let k = steps.len();
    for level in 1..k {
        for i in 0..k - level {
            let (ti, tj) = (steps[i], steps[i + level]);
            p[i] = (ti * p[i + 1] - tj * p[i]) / (ti - tj);
        }
    }
    p[0]
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdEstimate {
    pub value: f64,
    pub direction: CVector,
}

/// Finite-difference estimate of the modulus gradient with its best direction.
pub fn mod_grad_fd_detailed(f: &HoloMap, z: &CVector, params: &FdParams) -> Result<FdEstimate> {
    params.validate()?;
    let n = f.domain_dim();
    let base = f.eval(z)?.norm();

    let mut dirs = sample_unit_sphere(n, params.dirs, params.seed)?;
    let closed = mod_grad(f, z)?;
    if let Some(a) = &closed.a {
        if let Some(d) = a.conj().normalized() {
            dirs.push(d);
        }
    }
    if let Some(d) = closed.top_dir {
        dirs.push(d);
    }

    let mut best: Option<FdEstimate> = None;
    let mut quotients = vec![0.0; params.steps.len()];
    for beta in dirs {
        for (q, &t) in quotients.iter_mut().zip(&params.steps) {
            let shifted = z + &beta.scale(CScalar::new(t, 0.0));
            *q = (f.eval(&shifted)?.norm() - base) / t;
        }
        let value = extrapolate_to_zero(&params.steps, &quotients);
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(FdEstimate {
                value,
                direction: beta,
            });
        }
    }
    Ok(best.expect("at least 64 directions"))
}

/// Finite-difference estimate of the modulus gradient straight from its
/// definition: the largest extrapolated one-sided quotient
/// `(|f(z + t beta)| - |f(z)|) / t` over sampled unit directions plus the
/// analytic maximizer candidates.
pub fn mod_grad_fd(f: &HoloMap, z: &CVector, params: &FdParams) -> Result<f64> {
    mod_grad_fd_detailed(f, z, params).map(|e| e.value)
}

/// Closed form against the finite-difference oracle at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleCheck {
    pub closed: GradResult,
    pub fd: f64,
    /// `|closed - fd|`.
    pub deviation: f64,
    /// The oracle exceeded the closed form by more than [`ANOMALY_MARGIN`].
    pub anomaly: bool,
}

pub fn oracle_check(f: &HoloMap, z: &CVector, params: &FdParams) -> Result<OracleCheck> {
    let closed = mod_grad(f, z)?;
    let fd = mod_grad_fd(f, z, params)?;
    Ok(OracleCheck {
        deviation: (closed.value - fd).abs(),
        anomaly: fd > closed.value + ANOMALY_MARGIN,
        fd,
        closed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub point: CVector,
    /// `|grad |f||` at the point.
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub slack: f64,
    pub holds: bool,
    pub branch: Branch,
    #[serde(skip)]
    pub tol: f64,
}

impl BoundReport {
    fn new(point: CVector, grad: &GradResult, rhs: f64, tol: f64) -> Self {
        let slack = rhs - grad.value;
        BoundReport {
            point,
            lhs: grad.value,
            rhs,
            slack,
            holds: slack >= -tol,
            branch: grad.branch,
            tol,
        }
    }
}

/// `1 - x^2` as `(1 - x)(1 + x)`.
fn one_minus_sq(x: f64) -> f64 {
    (1.0 - x) * (1.0 + x)
}

/// Checks `|grad |f||(z) <= (1 - |f(z)|^2) / (1 - |z|^2)` for `f` mapping the
/// unit ball into the unit ball.
pub fn sp_bound(f: &HoloMap, z: &CVector, tol: f64) -> Result<BoundReport> {
    let zn = z.norm();
    if zn >= 1.0 {
        return Err(Error::input(format!(
            "point must lie in the unit ball, |z| = {zn}"
        )));
    }
    let fz = f.eval(z)?.norm();
    if fz >= 1.0 {
        return Err(Error::Certification(fz));
    }
    let grad = mod_grad(f, z)?;
    let rhs = one_minus_sq(fz) / one_minus_sq(zn);
    Ok(BoundReport::new(z.clone(), &grad, rhs, tol))
}

/// Checks `|grad |g||(xi) <= r (1 - |g(xi)|^2) / (r^2 - |xi - c|^2)` for `g`
/// mapping the disk `D_{c,r}` into the unit ball.
pub fn sp_bound_slice(
    g: &HoloMap,
    xi: CScalar,
    c: CScalar,
    r: f64,
    tol: f64,
) -> Result<BoundReport> {
    if g.domain_dim() != 1 {
        return Err(Error::input(
            "slice bound needs a map of one complex variable",
        ));
    }
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::input("disk radius must be positive"));
    }
    let d = (xi - c).norm();
    if d >= r {
        return Err(Error::input(format!(
            "xi must lie in the disk: |xi - c| = {d} >= r = {r}"
        )));
    }
    let point = CVector::new(vec![xi])?;
    let gz = g.eval(&point)?.norm();
    if gz >= 1.0 {
        return Err(Error::Certification(gz));
    }
    let grad = mod_grad(g, &point)?;
    let rhs = r * one_minus_sq(gz) / ((r - d) * (r + d));
    Ok(BoundReport::new(point, &grad, rhs, tol))
}

/// `rhs - lhs` of [`sp_bound`] at `p`; zero exactly for extremal maps.
pub fn equality_gap(f: &HoloMap, p: &CVector) -> Result<f64> {
    sp_bound(f, p, 0.0).map(|r| r.slack)
}

//! Maps attaining equality in the Schwarz-Pick-type bound, and a diagnostic
//! that checks whether a map has the canonical Möbius form along a slice.
//!
//! Witnesses are lifted from one variable through `w -> <w, u>` with `u` a unit
//! vector collinear with `p`:
//!
//! * zero case: `f(w) = beta * phi_{z0}(<w, u>)`, `z0 = <p, u>`, so `f(p) = 0`;
//! * nonzero case: `f(w) = M(phi_{z0}(<w, u>)) * a/|a|` with
//!   `M(zeta) = (|a| + e^{i theta} zeta) / (1 + |a| e^{i theta} zeta)`, so `f(p) = a`.
//!
//! The component of a nonzero-case witness orthogonal to `a` is zero.

use std::f64::consts::PI;

use serde::Serialize;

use crate::complex::{herm_inner, CScalar, CVector};
use crate::error::{Error, Result};
use crate::geometry::{bound_factor, disk_slice};
use crate::holomap::{
    AffineScalar, HoloMap, LineEmbed, LinearFunctional, MobiusDisk, MobiusQuotient,
    ScalarTimesVector,
};
use crate::modulus::{equality_gap, ZERO_THRESHOLD};

/// Tolerance on unit norms and on the collinearity of `u` with `p`.
pub const SPEC_TOL: f64 = 1e-12;

/// Sample circle radius of [`diagnose_equality_form`], as a fraction of the slice radius.
pub const SAMPLE_RADIUS_FRACTION: f64 = 0.9;

#[derive(Debug, Clone, PartialEq)]
pub enum ExtremalCase {
    /// `f(p) = 0`; `beta` is a unit vector of `C^m`.
    Zero { beta: CVector },
    /// `f(p) = a` with `0 < |a| < 1`.
    Nonzero { a: CVector, theta: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalSpec {
    pub p: CVector,
    /// Unit direction of the slice line, collinear with `p` when `p != 0`.
    pub u: CVector,
    pub case: ExtremalCase,
}

impl ExtremalSpec {
    pub fn zero(p: CVector, u: CVector, beta: CVector) -> Self {
        ExtremalSpec {
            p,
            u,
            case: ExtremalCase::Zero { beta },
        }
    }

    pub fn nonzero(p: CVector, u: CVector, a: CVector, theta: f64) -> Self {
        ExtremalSpec {
            p,
            u,
            case: ExtremalCase::Nonzero { a, theta },
        }
    }

    fn validate_line(&self) -> Result<()> {
        self.u.check_dim(self.p.dim(), "u")?;
        let pn = self.p.norm();
        if pn >= 1.0 {
            return Err(Error::input(format!(
                "p must lie in the unit ball, |p| = {pn}"
            )));
        }
        if (self.u.norm() - 1.0).abs() > SPEC_TOL {
            return Err(Error::input(format!(
                "u must be a unit vector, |u| = {}",
                self.u.norm()
            )));
        }
        if pn > 0.0 {
            let cos = herm_inner(&self.u, &self.p)?.norm() / pn;
            if (cos - 1.0).abs() > SPEC_TOL {
                return Err(Error::input(format!(
                    "u must be collinear with p: |<u, p/|p|>| = {cos}"
                )));
            }
        }
        Ok(())
    }
}

/// `beta * phi_{<p,u>}(<w, u>)` without any collinearity check.
pub fn lift_zero_case(p: &CVector, u: &CVector, beta: &CVector) -> Result<HoloMap> {
    let z0 = herm_inner(p, u)?;
    HoloMap::pipeline(vec![
        LinearFunctional::new(u.clone()).into(),
        MobiusDisk::new(z0)?.into(),
        ScalarTimesVector::new(beta.clone()).into(),
    ])
}

/// `M(phi_{<p,u>}(<w, u>)) * a/|a|` without any collinearity check.
pub fn lift_nonzero_case(p: &CVector, u: &CVector, a: &CVector, theta: f64) -> Result<HoloMap> {
    let z0 = herm_inner(p, u)?;
    let a_abs = a.norm();
    let e = a
        .normalized()
        .ok_or_else(|| Error::input("a must be nonzero"))?;
    HoloMap::pipeline(vec![
        LinearFunctional::new(u.clone()).into(),
        MobiusDisk::new(z0)?.into(),
        MobiusQuotient::new(a_abs, theta)?.into(),
        ScalarTimesVector::new(e).into(),
    ])
}

pub fn extremal_zero_case(spec: &ExtremalSpec) -> Result<HoloMap> {
    let ExtremalCase::Zero { beta } = &spec.case else {
        return Err(Error::input("expected the zero case"));
    };
    spec.validate_line()?;
    if (beta.norm() - 1.0).abs() > SPEC_TOL {
        return Err(Error::input(format!(
            "beta must be a unit vector, |beta| = {}",
            beta.norm()
        )));
    }
    lift_zero_case(&spec.p, &spec.u, beta)
}

pub fn extremal_nonzero_case(spec: &ExtremalSpec) -> Result<HoloMap> {
    let ExtremalCase::Nonzero { a, theta } = &spec.case else {
        return Err(Error::input("expected the nonzero case"));
    };
    let a_abs = a.norm();
    if a_abs == 0.0 {
        return Err(Error::input("a = 0 belongs to the zero case"));
    }
    if a_abs >= 1.0 {
        return Err(Error::input(format!(
            "a must lie in the unit ball, |a| = {a_abs}"
        )));
    }
    if !theta.is_finite() {
        return Err(Error::input("theta must be finite"));
    }
    spec.validate_line()?;
    lift_nonzero_case(&spec.p, &spec.u, a, *theta)
}

pub fn extremal_map(spec: &ExtremalSpec) -> Result<HoloMap> {
    match spec.case {
        ExtremalCase::Zero { .. } => extremal_zero_case(spec),
        ExtremalCase::Nonzero { .. } => extremal_nonzero_case(spec),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnosis {
    pub matches: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted_theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted_a: Option<CVector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted_beta: Option<CVector>,
    pub max_residual: f64,
    pub points_tested: usize,
    /// Largest norm of the part of `f` orthogonal to `a` over the samples
    /// (nonzero case). Reported, not judged.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orthogonal_norm: Option<f64>,
    pub tol: f64,
}

/// Tests whether `f`, restricted to the slice `g(z) = f(p + z (q - p))`, has the
/// canonical equality form at `p`:
///
/// * `f(p) = 0`: `g(z) = beta * psi(z)` with `|beta| = 1`;
/// * `f(p) = a != 0`: `<g(z), a/|a|> = (|a| + e^{i theta} psi) / (1 + |a| e^{i theta} psi)`;
///
/// where `psi(z) = phi_{-c/r}((z - c) / r)` for the slice disk `D_{c,r}`.
///
/// `theta` (or `beta`) is fitted at one point and checked at `samples` points
/// spaced evenly on the circle `|z - c| = 0.9 r`. The identity is checked for
/// the given `q` only.
pub fn diagnose_equality_form(
    f: &HoloMap,
    p: &CVector,
    q: &CVector,
    samples: usize,
    tol: f64,
) -> Result<Diagnosis> {
    if samples == 0 {
        return Err(Error::input("samples must be positive"));
    }
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::input("tol must be non-negative"));
    }
    let gap = equality_gap(f, p)?;
    if gap.abs() > tol {
        return Err(Error::Precondition(format!(
            "equality does not hold at p: gap = {gap:e} exceeds tol = {tol:e}"
        )));
    }
    if !bound_factor(p, q)?.collinear {
        return Err(Error::input("q - p must be collinear with p"));
    }
    let slice = disk_slice(p, q)?;
    let (c, r) = (slice.c, slice.r);
    let g = HoloMap::pipeline(vec![
        LineEmbed::new(p.clone(), q.clone())?.into(),
        f.clone(),
    ])?;
    let psi = HoloMap::pipeline(vec![
        AffineScalar::new(1.0 / r, -c / r)?.into(),
        MobiusDisk::new(-c / r)?.into(),
    ])?;
    let at = |z: CScalar| CVector::new(vec![z]);
    let points: Vec<CScalar> = (0..samples)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / samples as f64;
            c + CScalar::from_polar(SAMPLE_RADIUS_FRACTION * r, t)
        })
        .collect();
    let gs = points
        .iter()
        .map(|&z| g.eval(&at(z)?))
        .collect::<Result<Vec<_>>>()?;
    let psis = points
        .iter()
        .map(|&z| psi.eval(&at(z)?).map(|v| v[0]))
        .collect::<Result<Vec<_>>>()?;

    let origin = at(CScalar::new(0.0, 0.0))?;
    let (g0, gjac) = g.eval_with_jacobian(&origin)?;

    if g0.norm() <= ZERO_THRESHOLD {
        let (k_fit, _) = psis.iter().enumerate().fold((0, -1.0), |acc, (k, s)| {
            if s.norm() > acc.1 {
                (k, s.norm())
            } else {
                acc
            }
        });
        let beta = gs[k_fit].scale(psis[k_fit].inv());
        let mut residual = (beta.norm() - 1.0).abs();
        for (gk, &sk) in gs.iter().zip(&psis) {
            residual = residual.max((gk - &beta.scale(sk)).norm());
        }
        return Ok(Diagnosis {
            matches: residual <= tol,
            fitted_theta: None,
            fitted_a: None,
            fitted_beta: Some(beta),
            max_residual: residual,
            points_tested: samples,
            orthogonal_norm: None,
            tol,
        });
    }

    let a = g0;
    let a_abs = a.norm();
    let e = a.normalized().expect("nonzero");
    let dpsi0 = psi.jacobian(&origin)?.get(0, 0);
    let dh0 = herm_inner(&gjac.column(0), &e)?;
    let s = dh0 / (dpsi0 * (1.0 - a_abs * a_abs));
    let theta = s.arg();
    let rot = CScalar::from_polar(1.0, theta);
    let mut residual = (s.norm() - 1.0).abs();
    let mut orthogonal: f64 = 0.0;
    for (gk, &sk) in gs.iter().zip(&psis) {
        let h = herm_inner(gk, &e)?;
        let target = (rot * sk + a_abs) / (rot * sk * a_abs + 1.0);
        residual = residual.max((h - target).norm());
        orthogonal = orthogonal.max((gk - &e.scale(h)).norm());
    }
    Ok(Diagnosis {
        matches: residual <= tol,
        fitted_theta: Some(theta),
        fitted_a: Some(a),
        fitted_beta: None,
        max_residual: residual,
        points_tested: samples,
        orthogonal_norm: Some(orthogonal),
        tol,
    })
}

/// Signed difference of two angles, wrapped into `(-pi, pi]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    if d > PI {
        d - 2.0 * PI
    } else {
        d
    }
}

//! Unit-ball membership and affine complex-line slices of the ball.
//!
//! For `p, q` in the unit ball of `C^n` the line `L(z) = p + z (q - p)` meets the
//! ball in the image of a disk `D_{c,r}` with
//!
//! ```text
//! c = -<p, q - p> / |q - p|^2
//! r = sqrt((1 - |p|^2) / |q - p|^2 + |c|^2)
//! ```
//!
//! and `L` maps the boundary circle onto the unit sphere.

use serde::Serialize;

use crate::complex::{herm_inner, CScalar, CVector};
use crate::error::{Error, Result};
use crate::holomap::LineEmbed;

/// Relative margin under which `|<p, q-p>| = |p| |q-p|` counts as collinear.
pub const COLLINEAR_TOL: f64 = 1e-12;

/// Points closer than this are treated as equal when building a slice.
pub const SAME_POINT_TOL: f64 = 1e-14;

/// `|z| < 1 - eps`.
pub fn in_ball(z: &CVector, eps: f64) -> bool {
    z.norm() < 1.0 - eps
}

fn check_pair(p: &CVector, q: &CVector) -> Result<CVector> {
    q.check_dim(p.dim(), "q")?;
    if !in_ball(p, 0.0) {
        return Err(Error::input(format!(
            "p must lie in the open unit ball, |p| = {}",
            p.norm()
        )));
    }
    if !in_ball(q, 0.0) {
        return Err(Error::input(format!(
            "q must lie in the open unit ball, |q| = {}",
            q.norm()
        )));
    }
    let d = q - p;
    if d.norm() < SAME_POINT_TOL {
        return Err(Error::input("q must differ from p"));
    }
    Ok(d)
}

/// The preimage disk `D_{c,r}` of the ball under `L(z) = p + z (q - p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskSlice {
    pub c: CScalar,
    pub r: f64,
    pub p: CVector,
    pub q: CVector,
}

impl DiskSlice {
    pub fn line(&self) -> LineEmbed {
        LineEmbed::new(self.p.clone(), self.q.clone()).expect("validated at construction")
    }

    /// `c + r e^{i theta}`.
    pub fn boundary_point(&self, theta: f64) -> CScalar {
        self.c + CScalar::from_polar(self.r, theta)
    }

    pub fn contains(&self, z: CScalar) -> bool {
        (z - self.c).norm() < self.r
    }
}

/// JSON form `{"c": [re, im], "r": real}`.
#[derive(Debug, Serialize)]
pub struct DiskSliceJson {
    pub c: [f64; 2],
    pub r: f64,
}

impl From<&DiskSlice> for DiskSliceJson {
    fn from(s: &DiskSlice) -> Self {
        DiskSliceJson {
            c: [s.c.re, s.c.im],
            r: s.r,
        }
    }
}

pub fn disk_slice(p: &CVector, q: &CVector) -> Result<DiskSlice> {
    let d = check_pair(p, q)?;
    let d2 = d.norm_sqr();
    let c = -herm_inner(p, &d)? / d2;
    let r = ((1.0 - p.norm()) * (1.0 + p.norm()) / d2 + c.norm_sqr()).sqrt();
    Ok(DiskSlice {
        c,
        r,
        p: p.clone(),
        q: q.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundFactor {
    /// `r / (r^2 - |c|^2)` of the slice through `p, q`.
    pub factor: f64,
    /// `|q - p| / (1 - |p|^2)`.
    pub rhs: f64,
    pub collinear: bool,
}

/// Compares the slice factor `r / (r^2 - |c|^2)` with `|q - p| / (1 - |p|^2)`.
///
/// The former never exceeds the latter, with equality exactly when `p` and
/// `q - p` are collinear.
pub fn bound_factor(p: &CVector, q: &CVector) -> Result<BoundFactor> {
    let d = check_pair(p, q)?;
    let dn = d.norm();
    let pn = p.norm();
    let one_minus = (1.0 - pn) * (1.0 + pn);
    let proj = herm_inner(p, &d)?.norm();
    let factor = (dn * dn * one_minus + proj * proj).sqrt() / one_minus;
    let rhs = dn / one_minus;
    Ok(BoundFactor {
        factor,
        rhs,
        collinear: is_collinear(p, &d)?,
    })
}

/// `|<p, d>| >= (1 - COLLINEAR_TOL) |p| |d|`; `p = 0` is collinear with everything.
pub fn is_collinear(p: &CVector, d: &CVector) -> Result<bool> {
    let pn = p.norm();
    if pn == 0.0 {
        return Ok(true);
    }
    Ok(herm_inner(p, d)?.norm() >= (1.0 - COLLINEAR_TOL) * pn * d.norm())
}

/// `1 - |<p, d>| / (|p| |d|)`, zero for collinear pairs (and for `p = 0`).
pub fn collinearity_defect(p: &CVector, d: &CVector) -> Result<f64> {
    let pn = p.norm();
    let dn = d.norm();
    if pn == 0.0 || dn == 0.0 {
        return Ok(0.0);
    }
    Ok((1.0 - herm_inner(p, d)?.norm() / (pn * dn)).max(0.0))
}

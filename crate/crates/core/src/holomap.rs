//! Holomorphic map descriptions `C^n -> C^m` with exact evaluation and exact
//! complex Jacobians.
//!
//! Every node is holomorphic, so the Jacobian is the matrix of complex partial
//! derivatives `df_i/dz_j` and composites are handled by the chain rule. No
//! numerical differentiation happens here.

use std::collections::BTreeMap;

use crate::complex::{inner_unchecked, CMatrix, CScalar, CVector};
use crate::error::{Error, Result};

/// `|1 - conj(z0) z|` (or the analogous Möbius denominator) below this is a pole.
pub const POLE_EPS: f64 = 1e-15;

/// Multi-index of a monomial `z^alpha = prod_j z_j^alpha_j`.
pub type MultiIndex = Vec<u32>;

/// Polynomial map: `f(z) = sum_alpha c_alpha z^alpha` with `c_alpha` in `C^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMap {
    n: usize,
    m: usize,
    terms: BTreeMap<MultiIndex, CVector>,
}

impl PolyMap {
    pub fn new(n: usize, m: usize, terms: Vec<(MultiIndex, CVector)>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::input("polynomial dimensions must be positive"));
        }
        let mut map = BTreeMap::new();
        for (k, (alpha, coef)) in terms.into_iter().enumerate() {
            if alpha.len() != n {
                return Err(Error::input(format!(
                    "term {k}: multi-index has length {}, expected {n}",
                    alpha.len()
                )));
            }
            coef.check_dim(m, &format!("term {k} coefficient"))?;
            if map.insert(alpha, coef).is_some() {
                return Err(Error::input(format!("term {k}: duplicate multi-index")));
            }
        }
        Ok(PolyMap { n, m, terms: map })
    }

    /// The identity map of `C^n`.
    pub fn identity(n: usize) -> Self {
        let terms = (0..n)
            .map(|j| {
                let mut alpha = vec![0; n];
                alpha[j] = 1;
                (alpha, CVector::basis(n, j))
            })
            .collect();
        PolyMap::new(n, n, terms).expect("identity is well formed")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Terms in lexicographic multi-index order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &CVector)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|a| a.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// `sum_k (sum_alpha |c_{k,alpha}|)^2`; its square root bounds `|f|` on the closed unit ball.
    pub fn l1_containment_bound(&self) -> f64 {
        (0..self.m)
            .map(|k| {
                let row: f64 = self.terms.values().map(|c| c[k].norm()).sum();
                row * row
            })
            .sum()
    }

    /// `c * f`.
    pub fn scaled(&self, c: CScalar) -> PolyMap {
        PolyMap {
            n: self.n,
            m: self.m,
            terms: self
                .terms
                .iter()
                .map(|(a, v)| (a.clone(), v.scale(c)))
                .collect(),
        }
    }

    /// `f + v`, folding `v` into the constant term.
    pub fn shifted(&self, v: &CVector) -> Result<PolyMap> {
        v.check_dim(self.m, "shift")?;
        let mut terms = self.terms.clone();
        let zero = vec![0; self.n];
        let c0 = match terms.get(&zero) {
            Some(c) => c + v,
            None => v.clone(),
        };
        terms.insert(zero, c0);
        Ok(PolyMap {
            n: self.n,
            m: self.m,
            terms,
        })
    }

    fn monomial(z: &CVector, alpha: &[u32], skip: Option<usize>) -> CScalar {
        let mut acc = CScalar::new(1.0, 0.0);
        for (j, (&zj, &a)) in z.iter().zip(alpha).enumerate() {
            let e = if skip == Some(j) { a - 1 } else { a };
            if e > 0 {
                acc *= zj.powu(e);
            }
        }
        acc
    }

    fn eval(&self, z: &CVector) -> CVector {
        let mut out = vec![CScalar::new(0.0, 0.0); self.m];
        for (alpha, coef) in &self.terms {
            let mono = Self::monomial(z, alpha, None);
            for (o, c) in out.iter_mut().zip(coef.iter()) {
                *o += c * mono;
            }
        }
        CVector::from_vec_unchecked(out)
    }

    fn jacobian(&self, z: &CVector) -> CMatrix {
        let mut jac = CMatrix::zeros(self.m, self.n);
        for (alpha, coef) in &self.terms {
            for j in 0..self.n {
                if alpha[j] == 0 {
                    continue;
                }
                let d = Self::monomial(z, alpha, Some(j)) * alpha[j] as f64;
                for (i, c) in coef.iter().enumerate() {
                    let v = jac.get(i, j) + c * d;
                    jac.set(i, j, v);
                }
            }
        }
        jac
    }
}

/// Disk automorphism `phi_{z0}(z) = (z0 - z) / (1 - conj(z0) z)`, an involution
/// swapping `0` and `z0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusDisk {
    z0: CScalar,
}

impl MobiusDisk {
    pub fn new(z0: CScalar) -> Result<Self> {
        if !z0.is_finite() || z0.norm() >= 1.0 {
            return Err(Error::input(format!(
                "mobius centre must lie in the unit disk, |z0| = {}",
                z0.norm()
            )));
        }
        Ok(MobiusDisk { z0 })
    }

    pub fn z0(&self) -> CScalar {
        self.z0
    }

    fn denom(&self, z: CScalar) -> Result<CScalar> {
        let d = CScalar::new(1.0, 0.0) - self.z0.conj() * z;
        if d.norm() < POLE_EPS {
            return Err(Error::Domain(format!(
                "pole of phi_{} at z = {}",
                self.z0, z
            )));
        }
        Ok(d)
    }

    pub fn apply(&self, z: CScalar) -> Result<CScalar> {
        Ok((self.z0 - z) / self.denom(z)?)
    }

    /// `(|z0|^2 - 1) / (1 - conj(z0) z)^2`.
    pub fn derivative(&self, z: CScalar) -> Result<CScalar> {
        let d = self.denom(z)?;
        Ok(CScalar::new(self.z0.norm_sqr() - 1.0, 0.0) / (d * d))
    }
}

/// `M(zeta) = (|a| + e^{i theta} zeta) / (1 + |a| e^{i theta} zeta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusQuotient {
    a_abs: f64,
    theta: f64,
}

impl MobiusQuotient {
    pub fn new(a_abs: f64, theta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&a_abs) {
            return Err(Error::input(format!(
                "a_abs must lie in [0, 1), got {a_abs}"
            )));
        }
        if !theta.is_finite() {
            return Err(Error::input("theta must be finite"));
        }
        Ok(MobiusQuotient { a_abs, theta })
    }

    pub fn a_abs(&self) -> f64 {
        self.a_abs
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    fn rotation(&self) -> CScalar {
        CScalar::from_polar(1.0, self.theta)
    }

    fn denom(&self, zeta: CScalar) -> Result<CScalar> {
        let d = CScalar::new(1.0, 0.0) + self.rotation() * zeta * self.a_abs;
        if d.norm() < POLE_EPS {
            return Err(Error::Domain(format!("pole of mobius quotient at {zeta}")));
        }
        Ok(d)
    }

    pub fn apply(&self, zeta: CScalar) -> Result<CScalar> {
        let d = self.denom(zeta)?;
        Ok((self.rotation() * zeta + self.a_abs) / d)
    }

    /// `(bc - ad) / (c + d zeta)^2` with `a = |a|, b = e^{i theta}, c = 1, d = |a| e^{i theta}`.
    pub fn derivative(&self, zeta: CScalar) -> Result<CScalar> {
        let d = self.denom(zeta)?;
        let num = self.rotation() * (1.0 - self.a_abs * self.a_abs);
        Ok(num / (d * d))
    }
}

/// Affine complex line `L(z) = p + z (q - p)`, `C -> C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineEmbed {
    p: CVector,
    q: CVector,
    dir: CVector,
}

impl LineEmbed {
    pub fn new(p: CVector, q: CVector) -> Result<Self> {
        q.check_dim(p.dim(), "line_embed q")?;
        let dir = &q - &p;
        if dir.norm() == 0.0 {
            return Err(Error::input("line_embed requires q != p"));
        }
        Ok(LineEmbed { p, q, dir })
    }

    pub fn p(&self) -> &CVector {
        &self.p
    }

    pub fn q(&self) -> &CVector {
        &self.q
    }

    /// `q - p`.
    pub fn direction(&self) -> &CVector {
        &self.dir
    }

    pub fn apply(&self, z: CScalar) -> CVector {
        &self.p + &self.dir.scale(z)
    }
}

/// `w -> <w, u>`, `C^n -> C`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFunctional {
    u: CVector,
}

impl LinearFunctional {
    pub fn new(u: CVector) -> Self {
        LinearFunctional { u }
    }

    pub fn u(&self) -> &CVector {
        &self.u
    }
}

/// `zeta -> zeta * beta`, `C -> C^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarTimesVector {
    beta: CVector,
}

impl ScalarTimesVector {
    pub fn new(beta: CVector) -> Self {
        ScalarTimesVector { beta }
    }

    pub fn beta(&self) -> &CVector {
        &self.beta
    }
}

/// `z -> r z + c` with real nonzero `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineScalar {
    r: f64,
    c: CScalar,
}

impl AffineScalar {
    pub fn new(r: f64, c: CScalar) -> Result<Self> {
        if !r.is_finite() || r == 0.0 || !c.is_finite() {
            return Err(Error::input(
                "affine_scalar needs finite nonzero r and finite c",
            ));
        }
        Ok(AffineScalar { r, c })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn c(&self) -> CScalar {
        self.c
    }
}

/// Stages applied first to last: `stages[k] o ... o stages[0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pipeline {
    stages: Vec<HoloMap>,
}

impl Pipeline {
    pub fn new(stages: Vec<HoloMap>) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::input("pipeline needs at least one stage"));
        }
        for (k, pair) in stages.windows(2).enumerate() {
            if pair[0].codomain_dim() != pair[1].domain_dim() {
                return Err(Error::input(format!(
                    "pipeline stage {} outputs dimension {} but stage {} expects {}",
                    k,
                    pair[0].codomain_dim(),
                    k + 1,
                    pair[1].domain_dim()
                )));
            }
        }
        Ok(Pipeline { stages })
    }

    pub fn stages(&self) -> &[HoloMap] {
        &self.stages
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum HoloMap {
    Poly(PolyMap),
    Mobius(MobiusDisk),
    MobiusQuotient(MobiusQuotient),
    LineEmbed(LineEmbed),
    LinearFunctional(LinearFunctional),
    ScalarTimesVector(ScalarTimesVector),
    AffineScalar(AffineScalar),
    Pipeline(Pipeline),
}

impl From<PolyMap> for HoloMap {
    fn from(p: PolyMap) -> Self {
        HoloMap::Poly(p)
    }
}

impl From<MobiusDisk> for HoloMap {
    fn from(m: MobiusDisk) -> Self {
        HoloMap::Mobius(m)
    }
}

impl From<MobiusQuotient> for HoloMap {
    fn from(m: MobiusQuotient) -> Self {
        HoloMap::MobiusQuotient(m)
    }
}

impl From<LineEmbed> for HoloMap {
    fn from(l: LineEmbed) -> Self {
        HoloMap::LineEmbed(l)
    }
}

impl From<LinearFunctional> for HoloMap {
    fn from(l: LinearFunctional) -> Self {
        HoloMap::LinearFunctional(l)
    }
}

impl From<ScalarTimesVector> for HoloMap {
    fn from(s: ScalarTimesVector) -> Self {
        HoloMap::ScalarTimesVector(s)
    }
}

impl From<AffineScalar> for HoloMap {
    fn from(a: AffineScalar) -> Self {
        HoloMap::AffineScalar(a)
    }
}

impl From<Pipeline> for HoloMap {
    fn from(p: Pipeline) -> Self {
        HoloMap::Pipeline(p)
    }
}

fn scalar(v: CScalar) -> CVector {
    CVector::from_vec_unchecked(vec![v])
}

fn one_by_one(v: CScalar) -> CMatrix {
    CMatrix::new(1, 1, vec![v]).unwrap_or_else(|_| CMatrix::zeros(1, 1))
}

impl HoloMap {
    pub fn identity(n: usize) -> Self {
        HoloMap::Poly(PolyMap::identity(n))
    }

    pub fn pipeline(stages: Vec<HoloMap>) -> Result<Self> {
        Pipeline::new(stages).map(HoloMap::Pipeline)
    }

    /// Domain dimension `n`.
    pub fn domain_dim(&self) -> usize {
        match self {
            HoloMap::Poly(p) => p.n,
            HoloMap::LinearFunctional(l) => l.u.dim(),
            HoloMap::Pipeline(p) => p.stages[0].domain_dim(),
            HoloMap::Mobius(_)
            | HoloMap::MobiusQuotient(_)
            | HoloMap::LineEmbed(_)
            | HoloMap::ScalarTimesVector(_)
            | HoloMap::AffineScalar(_) => 1,
        }
    }

    /// Codomain dimension `m`.
    pub fn codomain_dim(&self) -> usize {
        match self {
            HoloMap::Poly(p) => p.m,
            HoloMap::LineEmbed(l) => l.p.dim(),
            HoloMap::ScalarTimesVector(s) => s.beta.dim(),
            HoloMap::Pipeline(p) => p.stages[p.stages.len() - 1].codomain_dim(),
            HoloMap::Mobius(_)
            | HoloMap::MobiusQuotient(_)
            | HoloMap::LinearFunctional(_)
            | HoloMap::AffineScalar(_) => 1,
        }
    }

    fn check_point(&self, z: &CVector) -> Result<()> {
        z.check_dim(self.domain_dim(), "evaluation point")?;
        if !z.is_finite() {
            return Err(Error::input("evaluation point is not finite"));
        }
        Ok(())
    }

    pub fn eval(&self, z: &CVector) -> Result<CVector> {
        self.check_point(z)?;
        self.eval_inner(z)
    }

    fn eval_inner(&self, z: &CVector) -> Result<CVector> {
        Ok(match self {
            HoloMap::Poly(p) => p.eval(z),
            HoloMap::Mobius(m) => scalar(m.apply(z[0])?),
            HoloMap::MobiusQuotient(m) => scalar(m.apply(z[0])?),
            HoloMap::LineEmbed(l) => l.apply(z[0]),
            HoloMap::LinearFunctional(l) => scalar(inner_unchecked(z, &l.u)),
            HoloMap::ScalarTimesVector(s) => s.beta.scale(z[0]),
            HoloMap::AffineScalar(a) => scalar(z[0] * a.r + a.c),
            HoloMap::Pipeline(p) => {
                let mut x = z.clone();
                for stage in &p.stages {
                    x = stage.eval_inner(&x)?;
                }
                x
            }
        })
    }

    /// The `m x n` complex Jacobian; column `j` is `df/dz_j`.
    pub fn jacobian(&self, z: &CVector) -> Result<CMatrix> {
        self.check_point(z)?;
        self.jacobian_inner(z).map(|(_, j)| j)
    }

    /// Value and Jacobian in one pass (pipelines evaluate each stage once).
    pub fn eval_with_jacobian(&self, z: &CVector) -> Result<(CVector, CMatrix)> {
        self.check_point(z)?;
        self.jacobian_inner(z)
    }

    fn jacobian_inner(&self, z: &CVector) -> Result<(CVector, CMatrix)> {
        Ok(match self {
            HoloMap::Poly(p) => (p.eval(z), p.jacobian(z)),
            HoloMap::Mobius(m) => (scalar(m.apply(z[0])?), one_by_one(m.derivative(z[0])?)),
            HoloMap::MobiusQuotient(m) => (scalar(m.apply(z[0])?), one_by_one(m.derivative(z[0])?)),
            HoloMap::LineEmbed(l) => (
                l.apply(z[0]),
                CMatrix::from_columns(std::slice::from_ref(&l.dir))?,
            ),
            HoloMap::LinearFunctional(l) => {
                // d/dw_j sum_k w_k conj(u_k) = conj(u_j)
                let row = CMatrix::new(1, l.u.dim(), l.u.conj().into_entries())?;
                (scalar(inner_unchecked(z, &l.u)), row)
            }
            HoloMap::ScalarTimesVector(s) => (
                s.beta.scale(z[0]),
                CMatrix::from_columns(std::slice::from_ref(&s.beta))?,
            ),
            HoloMap::AffineScalar(a) => {
                (scalar(z[0] * a.r + a.c), one_by_one(CScalar::new(a.r, 0.0)))
            }
            HoloMap::Pipeline(p) => {
                let (mut x, mut jac) = p.stages[0].jacobian_inner(z)?;
                for stage in &p.stages[1..] {
                    let (y, js) = stage.jacobian_inner(&x)?;
                    jac = js.matmul_unchecked(&jac);
                    x = y;
                }
                (x, jac)
            }
        })
    }

    /// `Df(z) . beta = sum_j beta_j df/dz_j`.
    pub fn frechet_apply(&self, z: &CVector, beta: &CVector) -> Result<CVector> {
        beta.check_dim(self.domain_dim(), "direction")?;
        let jac = self.jacobian(z)?;
        jac.mul_vec(beta)
    }
}

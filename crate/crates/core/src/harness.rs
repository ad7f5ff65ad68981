//! Randomized campaigns over the Schwarz-Pick-type inequality.
//!
//! Maps are random polynomials whose coefficients are rescaled so that
//! `sum_k (sum_alpha |c_{k,alpha}|)^2 <= (1 - margin)^2`. Since `|z^alpha| <= 1`
//! on the closed unit ball this certifies `|f| <= 1 - margin` there, so every
//! generated map satisfies the hypothesis of the inequality and any violation
//! is an implementation bug.
//!
//! Each point check becomes one JSONL record:
//!
//! ```text
//! {"trial":0,"point":[[re,im],...],"lhs":..,"rhs":..,"slack":..,"branch":"nonzero","fd":..,"fd_dev":..}
//! ```
//!
//! The pinned classical counterexample, when enabled, is logged first with `"trial": -1`.

use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{gaussian_vector, unit_sphere_point, CScalar, CVector};
use crate::error::{Error, Result};
use crate::holomap::{HoloMap, MultiIndex, PolyMap};
use crate::modulus::{mod_grad_fd, sp_bound, BoundReport, Branch, FdParams};

/// Sampled points with `|z|` above this are rejected.
pub const MAX_SAMPLE_RADIUS: f64 = 0.999;

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzConfig {
    pub trials: usize,
    pub points_per_trial: usize,
    pub n: usize,
    pub m: usize,
    pub max_degree: u32,
    pub margin: f64,
    pub seed: u64,
    pub tol: f64,
    pub fd: FdParams,
    /// Log the classical counterexample `f(z) = (z, 1)/sqrt(2)` as trial `-1`.
    pub pin_counterexample: bool,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            trials: 1000,
            points_per_trial: 100,
            n: 2,
            m: 2,
            max_degree: 3,
            margin: 0.05,
            seed: 0,
            tol: 1e-9,
            fd: FdParams::default(),
            pin_counterexample: true,
        }
    }
}

impl FuzzConfig {
    pub fn validate(&self) -> Result<()> {
        if self.points_per_trial == 0 || self.n == 0 || self.m == 0 {
            return Err(Error::input("points_per_trial, n and m must be positive"));
        }
        check_margin(self.margin)?;
        if self.tol.is_nan() || self.tol < 0.0 {
            return Err(Error::input("tol must be non-negative"));
        }
        Ok(())
    }
}

fn check_margin(margin: f64) -> Result<()> {
    if !(margin > 0.0 && margin < 1.0) {
        return Err(Error::input(format!(
            "margin must lie in (0, 1), got {margin}"
        )));
    }
    Ok(())
}

/// One JSONL record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRecord {
    pub trial: i64,
    pub point: CVector,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub branch: Branch,
    pub fd: f64,
    pub fd_dev: f64,
    #[serde(skip)]
    pub holds: bool,
}

/// The classical-form comparison for `f(z) = (z, 1)/sqrt(2)` at the origin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PinnedCheck {
    /// `|grad |f||(0)`.
    pub lhs: f64,
    /// `1 - |f(0)|^2`.
    pub rhs: f64,
    pub holds: bool,
    /// `|f'(0)|`, the left side of the classical one-variable inequality.
    pub classical_lhs: f64,
    /// `classical_lhs - rhs`; positive means the classical form fails.
    pub classical_excess: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CampaignReport {
    pub trials_run: usize,
    pub points_checked: usize,
    pub violations: Vec<BoundReport>,
    /// Smallest slack seen; `None` when nothing was checked.
    pub worst_slack: Option<f64>,
    pub oracle_max_dev: Option<f64>,
    pub oracle_p99_dev: Option<f64>,
    /// Points where the oracle exceeded the closed form by more than the anomaly margin.
    pub oracle_anomalies: usize,
    pub zero_branch_points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pinned: Option<PinnedCheck>,
    pub runtime_ms: u128,
}

/// `f(z) = (z, 1) / sqrt(2)`: it violates `|f'| <= 1 - |f|^2` at the origin.
pub fn classical_counterexample() -> HoloMap {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    PolyMap::new(
        1,
        2,
        vec![
            (
                vec![0],
                CVector::from_vec_unchecked(vec![CScalar::new(0.0, 0.0), CScalar::new(s, 0.0)]),
            ),
            (
                vec![1],
                CVector::from_vec_unchecked(vec![CScalar::new(s, 0.0), CScalar::new(0.0, 0.0)]),
            ),
        ],
    )
    .expect("well formed")
    .into()
}

pub fn pinned_check(tol: f64) -> Result<PinnedCheck> {
    let f = classical_counterexample();
    let o = CVector::zeros(1);
    let report = sp_bound(&f, &o, tol)?;
    let classical_lhs = f.jacobian(&o)?.column(0).norm();
    Ok(PinnedCheck {
        lhs: report.lhs,
        rhs: report.rhs,
        holds: report.holds,
        classical_lhs,
        classical_excess: classical_lhs - report.rhs,
    })
}

/// All multi-indices in `n` variables with total degree at most `max_degree`,
/// in lexicographic order.
pub fn multi_indices(n: usize, max_degree: u32) -> Vec<MultiIndex> {
    fn rec(prefix: &mut Vec<u32>, left: usize, budget: u32, out: &mut Vec<MultiIndex>) {
        if left == 0 {
            out.push(prefix.clone());
            return;
        }
        for e in 0..=budget {
            prefix.push(e);
            rec(prefix, left - 1, budget - e, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), n, max_degree, &mut out);
    out
}

/// Random polynomial map certified to send the closed unit ball into `|w| <= 1 - margin`.
pub fn gen_random_polymap(
    n: usize,
    m: usize,
    max_degree: u32,
    margin: f64,
    seed: u64,
) -> Result<PolyMap> {
    if n == 0 || m == 0 {
        return Err(Error::input("dimensions must be positive"));
    }
    check_margin(margin)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms: Vec<_> = multi_indices(n, max_degree)
        .into_iter()
        .map(|alpha| (alpha, gaussian_vector(m, &mut rng)))
        .collect();
    let raw = PolyMap::new(n, m, terms)?;
    Ok(certify(&raw, margin))
}

// Rescales so the l1 certificate holds; the factor is shaved by a few ulps so
// that rounding in the rescale cannot push the bound over.
fn certify(f: &PolyMap, margin: f64) -> PolyMap {
    let bound = f.l1_containment_bound().sqrt();
    if bound == 0.0 {
        return f.clone();
    }
    let target = 1.0 - margin;
    if bound <= target {
        return f.clone();
    }
    let s = target / bound * (1.0 - 8.0 * f64::EPSILON);
    f.scaled(CScalar::new(s, 0.0))
}

/// `f - f(p)`, rescaled to keep the containment certificate. Vanishes at `p`.
pub fn force_zero_at(f: &PolyMap, p: &CVector, margin: f64) -> Result<PolyMap> {
    check_margin(margin)?;
    let fp = HoloMap::Poly(f.clone()).eval(p)?;
    let shifted = f.shifted(&fp.scale(CScalar::new(-1.0, 0.0)))?;
    Ok(certify(&shifted, margin))
}

/// Uniform point of the unit ball of `C^n` with `|z| <= MAX_SAMPLE_RADIUS`:
/// uniform direction times radius `U^(1/2n)`, rejecting radii above the cap.
pub fn sample_ball_point<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    let dir = unit_sphere_point(n, rng);
    loop {
        let u: f64 = rng.random();
        let radius = u.powf(1.0 / (2.0 * n as f64));
        if radius <= MAX_SAMPLE_RADIUS {
            return dir.scale(CScalar::new(radius, 0.0));
        }
    }
}

pub fn sample_ball(n: usize, count: usize, seed: u64) -> Result<Vec<CVector>> {
    if n == 0 {
        return Err(Error::input("n must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| sample_ball_point(n, &mut rng)).collect())
}

/// splitmix64 finalizer.
fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of trial `index` in a campaign seeded with `seed`.
pub fn trial_seed(seed: u64, index: usize) -> u64 {
    seed ^ mix(index as u64)
}

/// Bound check plus oracle comparison at one point.
pub fn check_point(
    f: &HoloMap,
    z: &CVector,
    trial: i64,
    tol: f64,
    fd: &FdParams,
) -> Result<PointRecord> {
    let report = sp_bound(f, z, tol)?;
    let fd_value = mod_grad_fd(f, z, fd)?;
    Ok(PointRecord {
        trial,
        point: report.point,
        lhs: report.lhs,
        rhs: report.rhs,
        slack: report.slack,
        branch: report.branch,
        fd: fd_value,
        fd_dev: (report.lhs - fd_value).abs(),
        holds: report.holds,
    })
}

fn run_trial(cfg: &FuzzConfig, index: usize) -> Result<Vec<PointRecord>> {
    let seed = trial_seed(cfg.seed, index);
    let f: HoloMap = gen_random_polymap(cfg.n, cfg.m, cfg.max_degree, cfg.margin, seed)?.into();
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed));
    (0..cfg.points_per_trial)
        .map(|k| {
            let z = sample_ball_point(cfg.n, &mut rng);
            let fd = FdParams {
                seed: seed.wrapping_add(k as u64),
                ..cfg.fd.clone()
            };
            check_point(&f, &z, index as i64, cfg.tol, &fd)
        })
        .collect()
}

/// Summary statistics over a set of records.
fn summarize(
    records: &[PointRecord],
    tol: f64,
) -> (
    Vec<BoundReport>,
    Option<f64>,
    Option<f64>,
    Option<f64>,
    usize,
    usize,
) {
    let violations = records
        .iter()
        .filter(|r| !r.holds)
        .map(|r| BoundReport {
            point: r.point.clone(),
            lhs: r.lhs,
            rhs: r.rhs,
            slack: r.slack,
            holds: r.holds,
            branch: r.branch,
            tol,
        })
        .collect();
    let worst = records.iter().map(|r| r.slack).reduce(f64::min);
    let mut devs: Vec<f64> = records.iter().map(|r| r.fd_dev).collect();
    devs.sort_by(f64::total_cmp);
    let max_dev = devs.last().copied();
    let p99 = (!devs.is_empty()).then(|| {
        let k = ((devs.len() as f64) * 0.99).ceil() as usize;
        devs[k.clamp(1, devs.len()) - 1]
    });
    let anomalies = records
        .iter()
        .filter(|r| r.fd > r.lhs + crate::modulus::ANOMALY_MARGIN)
        .count();
    let zeros = records.iter().filter(|r| r.branch == Branch::Zero).count();
    (violations, worst, max_dev, p99, anomalies, zeros)
}

/// Runs the campaign, writing one JSONL line per point check to `log`.
///
/// Trials run in parallel; records are written in trial order so the log is
/// identical for identical configurations.
pub fn fuzz_campaign(cfg: &FuzzConfig, log: Option<&mut dyn Write>) -> Result<CampaignReport> {
    cfg.validate()?;
    let start = Instant::now();
    let pinned_record = if cfg.pin_counterexample {
        let f = classical_counterexample();
        let fd = FdParams {
            seed: cfg.seed,
            ..cfg.fd.clone()
        };
        Some(check_point(&f, &CVector::zeros(1), -1, cfg.tol, &fd)?)
    } else {
        None
    };
    let per_trial: Vec<Vec<PointRecord>> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| run_trial(cfg, i))
        .collect::<Result<_>>()?;
    let records: Vec<PointRecord> = per_trial.into_iter().flatten().collect();

    if let Some(out) = log {
        let mut w = std::io::BufWriter::new(out);
        for r in pinned_record.iter().chain(&records) {
            serde_json::to_writer(&mut w, r).map_err(std::io::Error::from)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
    }

    let (
        violations,
        worst_slack,
        oracle_max_dev,
        oracle_p99_dev,
        oracle_anomalies,
        zero_branch_points,
    ) = summarize(&records, cfg.tol);
    Ok(CampaignReport {
        trials_run: cfg.trials,
        points_checked: records.len(),
        violations,
        worst_slack,
        oracle_max_dev,
        oracle_p99_dev,
        oracle_anomalies,
        zero_branch_points,
        pinned: if cfg.pin_counterexample {
            Some(pinned_check(cfg.tol)?)
        } else {
            None
        },
        runtime_ms: start.elapsed().as_millis(),
    })
}

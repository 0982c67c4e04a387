//! Intercept-vs-outage tradeoff curves, swept over the codeword rate `R_o` at
//! a fixed secrecy rate, and curve dominance comparison.

use serde::{Deserialize, Serialize};

use crate::analytic::DtClosedForm;
use crate::error::{Result, SrtError};
use crate::model::SystemParams;
use crate::montecarlo::{confidence_interval, run_schemes, BernoulliEstimator, Coupling, RunOptions};
use crate::schemes::Scheme;

pub const DEFAULT_GRID_POINTS: usize = 40;
pub const DEFAULT_REDUNDANCY_MIN: f64 = 0.05;
pub const DEFAULT_REDUNDANCY_MAX: f64 = 4.0;
pub const CONFIDENCE_LEVEL: f64 = 0.95;

/// A probability estimate with its 95% Wilson interval. Analytic points carry
/// a zero-width interval and zero trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub hat: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Estimate {
    pub fn exact(p: f64) -> Self {
        Estimate { hat: p, lo: p, hi: p }
    }

    pub fn from_counts(est: &BernoulliEstimator) -> Self {
        let (lo, hi) = confidence_interval(est, CONFIDENCE_LEVEL);
        Estimate {
            hat: est.rate(),
            lo,
            hi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SrtPoint {
    pub overall_rate: f64,
    pub op: Estimate,
    pub ip: Estimate,
    pub trials: u64,
    pub master_seed: u64,
}

impl SrtPoint {
    fn standard_error(p: f64, trials: u64) -> f64 {
        if trials == 0 {
            0.0
        } else {
            (p * (1.0 - p) / trials as f64).sqrt()
        }
    }

    pub fn op_standard_error(&self) -> f64 {
        Self::standard_error(self.op.hat, self.trials)
    }

    pub fn ip_standard_error(&self) -> f64 {
        Self::standard_error(self.ip.hat, self.trials)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrtCurve {
    pub scheme: Scheme,
    pub params: SystemParams,
    pub points: Vec<SrtPoint>,
}

/// `points` codeword rates whose redundancy `R_o - R_s` is geometrically
/// spaced over `[re_min, re_max]`.
pub fn ro_grid(secrecy_rate: f64, re_min: f64, re_max: f64, points: usize) -> Result<Vec<f64>> {
    if points == 0 {
        return Err(SrtError::param("ro-points", "must be at least 1"));
    }
    if !(re_min > 0.0 && re_min.is_finite()) {
        return Err(SrtError::param("ro-min", "must exceed the secrecy rate"));
    }
    if points == 1 {
        return Ok(vec![secrecy_rate + re_min]);
    }
    if !(re_max > re_min && re_max.is_finite()) {
        return Err(SrtError::param("ro-max", "must exceed ro-min"));
    }
    let ratio = (re_max / re_min).ln() / (points - 1) as f64;
    Ok((0..points)
        .map(|k| {
            let re = if k + 1 == points {
                re_max
            } else {
                re_min * (ratio * k as f64).exp()
            };
            secrecy_rate + re
        })
        .collect())
}

/// The 40-point grid with redundancy in `[0.05, 4]` bits/s/Hz.
pub fn default_ro_grid(secrecy_rate: f64) -> Vec<f64> {
    ro_grid(
        secrecy_rate,
        DEFAULT_REDUNDANCY_MIN,
        DEFAULT_REDUNDANCY_MAX,
        DEFAULT_GRID_POINTS,
    )
    .expect("default grid is valid")
}

fn check_grid(params: &SystemParams, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(SrtError::Domain("rate grid is empty".into()));
    }
    let rs = params.secrecy_rate();
    if let Some(bad) = grid.iter().find(|&&ro| !(ro > rs && ro.is_finite())) {
        return Err(SrtError::Domain(format!(
            "grid rate {bad} does not exceed the secrecy rate {rs}"
        )));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SrtError::Domain("grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Monte Carlo settings shared by every point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepOptions {
    pub n_trials: u64,
    pub master_seed: u64,
    pub coupling: Coupling,
    pub workers: Option<usize>,
}

impl SweepOptions {
    pub fn new(n_trials: u64, master_seed: u64) -> Self {
        SweepOptions {
            n_trials,
            master_seed,
            coupling: Coupling::Shared,
            workers: None,
        }
    }

    pub fn workers(mut self, workers: Option<usize>) -> Self {
        self.workers = workers;
        self
    }
}

/// Build one curve per scheme. All schemes at a grid point share channel
/// draws; grid point `k` uses trial stream `k`.
pub fn build_curves(
    params: &SystemParams,
    schemes: &[Scheme],
    grid: &[f64],
    opts: &SweepOptions,
) -> Result<Vec<SrtCurve>> {
    check_grid(params, grid)?;
    if opts.n_trials == 0 {
        return Err(SrtError::param("trials", "must be at least 1"));
    }
    if params.n_relays() == 0 {
        if let Some(s) = schemes.iter().find(|s| s.uses_relays()) {
            return Err(SrtError::param("relays", format!("scheme {s} needs at least one relay")));
        }
    }
    let mut curves: Vec<SrtCurve> = schemes
        .iter()
        .map(|&scheme| SrtCurve {
            scheme,
            params: params.clone(),
            points: Vec::with_capacity(grid.len()),
        })
        .collect();
    for (k, &ro) in grid.iter().enumerate() {
        let at = params.with_overall_rate(ro)?;
        let run = RunOptions::new(opts.n_trials, opts.master_seed)
            .stream(k as u32)
            .coupling(opts.coupling)
            .workers(opts.workers);
        for (curve, counts) in curves.iter_mut().zip(run_schemes(&at, schemes, &run)) {
            curve.points.push(SrtPoint {
                overall_rate: ro,
                op: Estimate::from_counts(&counts.outage),
                ip: Estimate::from_counts(&counts.intercept),
                trials: opts.n_trials,
                master_seed: opts.master_seed,
            });
        }
    }
    Ok(curves)
}

pub fn build_curve(
    params: &SystemParams,
    scheme: Scheme,
    grid: &[f64],
    opts: &SweepOptions,
) -> Result<SrtCurve> {
    Ok(build_curves(params, &[scheme], grid, opts)?.remove(0))
}

/// Direct-transmission curve from the closed forms, no simulation.
pub fn analytic_dt_curve(params: &SystemParams, grid: &[f64]) -> Result<SrtCurve> {
    check_grid(params, grid)?;
    let dt = DtClosedForm::from_params(params);
    let points = grid
        .iter()
        .map(|&ro| SrtPoint {
            overall_rate: ro,
            op: Estimate::exact(dt.dt_outage(ro)),
            ip: Estimate::exact(dt.dt_intercept(ro - params.secrecy_rate())),
            trials: 0,
            master_seed: 0,
        })
        .collect();
    Ok(SrtCurve {
        scheme: Scheme::Dt,
        params: params.clone(),
        points,
    })
}

/// Slack allowed when comparing two curves' intercept probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    Absolute(f64),
    /// `k * sqrt(se_a^2 + se_b^2)` with binomial standard errors at the
    /// interpolated intercept probabilities.
    StandardErrors(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominanceMargin {
    pub op: f64,
    pub ip_a: f64,
    pub ip_b: f64,
    pub tolerance: f64,
    /// `ip_b + tolerance - ip_a`; negative means `a` is worse at this point.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dominance {
    pub dominant: bool,
    pub margins: Vec<DominanceMargin>,
}

/// Curve points as `(op, ip, ip_se)` sorted by outage probability.
fn sorted_by_op(curve: &SrtCurve) -> Vec<(f64, f64, f64)> {
    let mut pts: Vec<_> = curve
        .points
        .iter()
        .map(|p| (p.op.hat, p.ip.hat, p.trials))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
    pts.into_iter().map(|(op, ip, n)| (op, ip, n as f64)).collect()
}

/// Piecewise-linear IP at `op`, plus the trial count for its standard error.
fn interpolate(pts: &[(f64, f64, f64)], op: f64) -> Option<(f64, f64)> {
    let (first, last) = (pts.first()?, pts.last()?);
    if op < first.0 || op > last.0 {
        return None;
    }
    for w in pts.windows(2) {
        let ((x0, y0, n0), (x1, y1, n1)) = (w[0], w[1]);
        if op >= x0 && op <= x1 {
            if x1 == x0 {
                return Some((y0.min(y1), n0.min(n1)));
            }
            let f = (op - x0) / (x1 - x0);
            return Some((y0 + f * (y1 - y0), n0.min(n1)));
        }
    }
    Some((first.1, first.2))
}

fn binomial_se(p: f64, n: f64) -> f64 {
    if n == 0.0 {
        0.0
    } else {
        (p * (1.0 - p) / n).sqrt()
    }
}

/// Outage-probability range covered by both curves.
pub fn op_overlap(a: &SrtCurve, b: &SrtCurve) -> Option<(f64, f64)> {
    let range = |c: &SrtCurve| {
        let ops = c.points.iter().map(|p| p.op.hat);
        let lo = ops.clone().fold(f64::INFINITY, f64::min);
        let hi = ops.fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    let (a_lo, a_hi) = range(a);
    let (b_lo, b_hi) = range(b);
    let (lo, hi) = (a_lo.max(b_lo), a_hi.min(b_hi));
    (lo <= hi).then_some((lo, hi))
}

/// Whether `a`'s intercept probability is at most `b`'s (plus tolerance) at
/// every outage probability in `op_grid`. Curves are interpolated linearly in
/// the (OP, IP) plane; no extrapolation past either curve's end points.
pub fn dominance_check(
    a: &SrtCurve,
    b: &SrtCurve,
    op_grid: &[f64],
    tolerance: Tolerance,
) -> Result<Dominance> {
    let overlap = op_overlap(a, b)
        .ok_or_else(|| SrtError::Domain("curves have no common outage range".into()))?;
    if let Some(bad) = op_grid
        .iter()
        .find(|&&x| !(x >= overlap.0 && x <= overlap.1))
    {
        return Err(SrtError::Domain(format!(
            "outage probability {bad} outside the curves' common range [{}, {}]",
            overlap.0, overlap.1
        )));
    }
    let (pa, pb) = (sorted_by_op(a), sorted_by_op(b));
    let margins: Vec<DominanceMargin> = op_grid
        .iter()
        .map(|&op| {
            let (ip_a, n_a) = interpolate(&pa, op).expect("inside overlap");
            let (ip_b, n_b) = interpolate(&pb, op).expect("inside overlap");
            let tol = match tolerance {
                Tolerance::Absolute(t) => t,
                Tolerance::StandardErrors(k) => {
                    k * (binomial_se(ip_a, n_a).powi(2) + binomial_se(ip_b, n_b).powi(2)).sqrt()
                }
            };
            DominanceMargin {
                op,
                ip_a,
                ip_b,
                tolerance: tol,
                margin: ip_b + tol - ip_a,
            }
        })
        .collect();
    Ok(Dominance {
        dominant: margins.iter().all(|m| m.margin >= 0.0),
        margins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(op: f64, ip: f64) -> SrtPoint {
        SrtPoint {
            overall_rate: 0.0,
            op: Estimate::exact(op),
            ip: Estimate::exact(ip),
            trials: 0,
            master_seed: 0,
        }
    }

    fn curve(pts: &[(f64, f64)]) -> SrtCurve {
        SrtCurve {
            scheme: Scheme::Dt,
            params: SystemParams::builder().build().unwrap(),
            points: pts.iter().map(|&(o, i)| point(o, i)).collect(),
        }
    }

    #[test]
    fn grid_shapes() {
        let g = default_ro_grid(0.2);
        assert_eq!(g.len(), 40);
        assert!((g[0] - 0.25).abs() < 1e-15);
        assert!((g[39] - 4.2).abs() < 1e-15);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        // Geometric in the redundancy.
        let r0 = (g[1] - 0.2) / (g[0] - 0.2);
        let r1 = (g[20] - 0.2) / (g[19] - 0.2);
        assert!((r0 - r1).abs() < 1e-12);
        assert_eq!(ro_grid(0.6, 0.4, 9.0, 1).unwrap(), vec![1.0]);
        assert!(ro_grid(0.6, 0.0, 1.0, 5).is_err());
        assert!(ro_grid(0.6, 1.0, 1.0, 5).is_err());
    }

    #[test]
    fn single_point_curve() {
        let p = SystemParams::builder().build().unwrap();
        let c = build_curve(&p, Scheme::Dt, &[1.0], &SweepOptions::new(1000, 1)).unwrap();
        assert_eq!(c.points.len(), 1);
        assert_eq!(c.points[0].trials, 1000);
    }

    #[test]
    fn grid_errors() {
        let p = SystemParams::builder().secrecy_rate(0.6).overall_rate(1.0).build().unwrap();
        let o = SweepOptions::new(10, 1);
        assert!(matches!(build_curve(&p, Scheme::Dt, &[0.6, 1.0], &o), Err(SrtError::Domain(_))));
        assert!(build_curve(&p, Scheme::Dt, &[1.0, 0.9], &o).is_err());
        assert!(build_curve(&p, Scheme::Srs, &[1.0], &o).is_err());
        assert!(analytic_dt_curve(&p, &[0.5]).is_err());
    }

    #[test]
    fn curve_dominates_itself() {
        let c = curve(&[(0.01, 0.9), (0.1, 0.5), (0.5, 0.1)]);
        let d = dominance_check(&c, &c, &[0.01, 0.05, 0.3, 0.5], Tolerance::Absolute(0.0)).unwrap();
        assert!(d.dominant);
        assert!(d.margins.iter().all(|m| m.margin == 0.0));
    }

    #[test]
    fn interpolation_is_linear_in_op() {
        let a = curve(&[(0.0, 1.0), (1.0, 0.0)]);
        let b = curve(&[(0.0, 0.8), (1.0, 0.0)]);
        let d = dominance_check(&b, &a, &[0.25], Tolerance::Absolute(0.0)).unwrap();
        assert!((d.margins[0].ip_a - 0.6).abs() < 1e-15);
        assert!((d.margins[0].ip_b - 0.75).abs() < 1e-15);
        assert!(d.dominant);
        assert!(!dominance_check(&a, &b, &[0.25], Tolerance::Absolute(0.1)).unwrap().dominant);
        assert!(dominance_check(&a, &b, &[0.25], Tolerance::Absolute(0.15)).unwrap().dominant);
    }

    #[test]
    fn unsorted_points_are_sorted_by_op() {
        let a = curve(&[(0.5, 0.1), (0.01, 0.9), (0.1, 0.5)]);
        let b = curve(&[(0.01, 0.9), (0.1, 0.5), (0.5, 0.1)]);
        assert!(dominance_check(&a, &b, &[0.3], Tolerance::Absolute(0.0)).unwrap().dominant);
    }

    #[test]
    fn outside_overlap_is_an_error() {
        let a = curve(&[(0.01, 0.9), (0.2, 0.3)]);
        let b = curve(&[(0.05, 0.9), (0.5, 0.1)]);
        assert_eq!(op_overlap(&a, &b), Some((0.05, 0.2)));
        let err = dominance_check(&a, &b, &[0.01], Tolerance::Absolute(0.0)).unwrap_err();
        assert!(err.to_string().contains("[0.05, 0.2]"), "{err}");
        let c = curve(&[(0.6, 0.1), (0.7, 0.05)]);
        assert!(dominance_check(&a, &c, &[0.1], Tolerance::Absolute(0.0)).is_err());
    }

    #[test]
    fn standard_error_tolerance() {
        let mut a = curve(&[(0.0, 0.5), (1.0, 0.5)]);
        let mut b = curve(&[(0.0, 0.5), (1.0, 0.5)]);
        for p in a.points.iter_mut().chain(b.points.iter_mut()) {
            p.trials = 10_000;
        }
        let d = dominance_check(&a, &b, &[0.5], Tolerance::StandardErrors(3.0)).unwrap();
        let want = 3.0 * (2.0 * 0.25 / 10_000.0f64).sqrt();
        assert!((d.margins[0].tolerance - want).abs() < 1e-15);
    }
}

//! Oracle-versus-simulation cross-checks behind `srt-sim validate`.

use std::fmt;

use crate::analytic::{
    decoding_set_pmf, relay_intercept_closed_form, srs_outage_closed_form, DtClosedForm,
    MAX_ENUMERATED_RELAYS,
};
use crate::error::Result;
use crate::model::SystemParams;
use crate::montecarlo::{
    decoding_set_histogram, outage_pair_counts, run_schemes, within_standard_errors,
    BernoulliEstimator, Coupling, RunOptions,
};
use crate::schemes::Scheme;
use crate::sweep::{build_curves, dominance_check, op_overlap, ro_grid, SweepOptions, Tolerance};

use super::config::RunConfig;

/// Standard-error multiple used by every statistical gate.
pub const GATE_SE: f64 = 3.0;
/// Redundancy rates at which oracles are compared with simulation.
pub const CHECK_REDUNDANCIES: [f64; 3] = [0.25, 1.0, 3.0];
/// Outage probabilities at which tradeoff curves are compared.
pub const DOMINANCE_OP_GRID: [f64; 6] = [0.01, 0.02, 0.05, 0.1, 0.2, 0.5];

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {:<24} {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &'static str, passed: bool, detail: String) {
        self.checks.push(CheckResult { name, passed, detail });
    }
}

/// Gate several estimates against oracles; returns (all passed, worst z).
fn gate(pairs: &[(BernoulliEstimator, f64)]) -> (bool, f64) {
    pairs.iter().fold((true, 0.0f64), |(ok, worst), (est, p)| {
        let (pass, z) = within_standard_errors(est, *p, GATE_SE);
        (ok && pass, worst.max(z))
    })
}

pub fn run_validation(config: &RunConfig) -> Result<ValidationReport> {
    config.validate()?;
    let rs = config.rs[0];
    let n = config.relays[0].max(1);
    let base = config.params(rs, n)?;
    let mut report = ValidationReport::default();
    let opts = |stream: u32| {
        RunOptions::new(config.trials, config.seed)
            .stream(stream)
            .workers(config.workers)
    };

    // Closed-form identity between the IP(OP) curve and its generating formulas.
    let dt = DtClosedForm::from_params(&base);
    let worst = (1..=100)
        .map(|k| {
            let ro = rs + 4.0 * k as f64 / 100.0;
            let via_op = dt.dt_ip_of_op(dt.dt_outage(ro)).unwrap_or(f64::NAN);
            (via_op - dt.dt_intercept(ro - rs)).abs()
        })
        .fold(0.0f64, f64::max);
    report.push(
        "dt-round-trip",
        worst <= 1e-12,
        format!("max |IP(OP(ro)) - IP(ro)| = {worst:.3e} over 100 rates"),
    );

    let at = |re: f64| -> Result<SystemParams> { base.with_overall_rate(rs + re) };

    let mut pairs = Vec::new();
    for (k, &re) in CHECK_REDUNDANCIES.iter().enumerate() {
        let c = run_schemes(&at(re)?, &[Scheme::Dt], &opts(k as u32))[0];
        pairs.push((c.outage, dt.dt_outage(rs + re)));
        pairs.push((c.intercept, dt.dt_intercept(re)));
    }
    let (ok, z) = gate(&pairs);
    report.push("dt-monte-carlo", ok, format!("worst deviation {z:.2} SE over {} estimates", pairs.len()));

    if n <= MAX_ENUMERATED_RELAYS {
        let p = at(0.4)?;
        let pmf = decoding_set_pmf(&p)?;
        let hist = decoding_set_histogram(&p, &opts(100));
        let pairs: Vec<_> = pmf
            .iter()
            .map(|(mask, prob)| (BernoulliEstimator::new(hist[mask as usize], config.trials), prob))
            .collect();
        let (ok, z) = gate(&pairs);
        let total_err = (pmf.total() - 1.0).abs();
        report.push(
            "decoding-set-pmf",
            ok && total_err <= 1e-12,
            format!(
                "{} subsets, worst deviation {z:.2} SE, |sum - 1| = {total_err:.1e}",
                pairs.len()
            ),
        );
    }

    let relay_schemes = [Scheme::Srs, Scheme::Mrs];
    let mut srs_pairs = Vec::new();
    let mut ip_pairs = Vec::new();
    let mut ip_oracle_available = true;
    for (k, &re) in CHECK_REDUNDANCIES.iter().enumerate() {
        let p = at(re)?;
        let counts = run_schemes(&p, &relay_schemes, &opts(200 + k as u32));
        if n <= MAX_ENUMERATED_RELAYS {
            srs_pairs.push((counts[0].outage, srs_outage_closed_form(&p)?));
        }
        match relay_intercept_closed_form(&p) {
            Ok(ip) => {
                ip_pairs.push((counts[0].intercept, ip));
                ip_pairs.push((counts[1].intercept, ip));
            }
            Err(_) => ip_oracle_available = false,
        }
    }
    if !srs_pairs.is_empty() {
        let (ok, z) = gate(&srs_pairs);
        report.push("srs-outage-oracle", ok, format!("worst deviation {z:.2} SE"));
    }
    if ip_oracle_available {
        let (ok, z) = gate(&ip_pairs);
        report.push("relay-intercept-oracle", ok, format!("SRS and MRS, worst deviation {z:.2} SE"));
    }

    let coupled = outage_pair_counts(&at(1.0)?, &opts(300));
    report.push(
        "mrs-srs-outage-coupling",
        coupled.mrs_only == 0,
        format!(
            "{} of {} trials with MRS outage but no SRS outage",
            coupled.mrs_only, coupled.trials
        ),
    );

    let grid = ro_grid(rs, 0.05, 8.0, 16)?;
    let sweep = SweepOptions {
        n_trials: config.trials,
        master_seed: config.seed,
        coupling: if config.decouple { Coupling::Independent } else { Coupling::Shared },
        workers: config.workers,
    };
    let curves = build_curves(&base, &Scheme::ALL, &grid, &sweep)?;
    let (dt_c, srs_c, mrs_c) = (&curves[0], &curves[1], &curves[2]);
    let mut ok = true;
    let mut detail = Vec::new();
    for (label, a, b) in [("MRS<=SRS", mrs_c, srs_c), ("SRS<=DT", srs_c, dt_c)] {
        let Some((lo, hi)) = op_overlap(a, b) else {
            ok = false;
            detail.push(format!("{label}: no common outage range"));
            continue;
        };
        let ops: Vec<f64> = DOMINANCE_OP_GRID
            .iter()
            .copied()
            .filter(|&x| x >= lo && x <= hi)
            .collect();
        if ops.len() < 2 {
            ok = false;
            detail.push(format!("{label}: common outage range [{lo:.3e}, {hi:.3e}] too narrow"));
            continue;
        }
        let d = dominance_check(a, b, &ops, Tolerance::StandardErrors(GATE_SE))?;
        ok &= d.dominant;
        let worst = d.margins.iter().map(|m| m.margin).fold(f64::INFINITY, f64::min);
        detail.push(format!("{label}: {} OP points, min margin {worst:.3e}", ops.len()));
    }
    report.push("tradeoff-dominance", ok, detail.join("; "));

    Ok(report)
}

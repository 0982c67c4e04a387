//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs with `cargo test --test acceptance` (release-grade
//! optimisation comes from the test profile).

use std::process::{Command, ExitCode};
use std::time::Instant;

use srt_core::analytic::{decoding_set_pmf, relay_intercept_closed_form, srs_outage_closed_form, DtClosedForm};
use srt_core::model::db_to_linear;
use srt_core::montecarlo::{
    decoding_set_histogram, outage_pair_counts, within_standard_errors, BernoulliEstimator, RunOptions,
};
use srt_core::sweep::{
    analytic_dt_curve, build_curves, default_ro_grid, dominance_check, op_overlap, ro_grid, SrtCurve,
    SweepOptions, Tolerance,
};
use srt_core::{Scheme, SystemParams};

const SEED: u64 = 1;
const TRIALS: u64 = 1_000_000;
const GATE_SE: f64 = 3.0;
const ROUND_TRIP_TOL: f64 = 1e-12;
const PMF_SUM_TOL: f64 = 1e-12;
const SNR_DB: f64 = 15.0;
const GRID_POINTS: usize = 40;
/// Relay curves need redundancy up to 8 bits/s/Hz to reach outage 0.5.
const RELAY_REDUNDANCY_MAX: f64 = 8.0;
const DOMINANCE_OPS: [f64; 6] = [0.01, 0.02, 0.05, 0.1, 0.2, 0.5];
const MATCHED_OPS: [f64; 3] = [0.01, 0.1, 0.5];
const REPRO_TRIALS: &str = "100000";

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict { passed, detail: detail.into() }
}

/// Worst deviation in standard errors over `(estimate, oracle)` pairs.
struct Gate {
    passed: bool,
    worst: f64,
    count: usize,
    failures: Vec<String>,
}

impl Gate {
    fn new() -> Self {
        Gate { passed: true, worst: 0.0, count: 0, failures: Vec::new() }
    }

    fn check(&mut self, label: impl FnOnce() -> String, est: &BernoulliEstimator, oracle: f64) {
        let (ok, z) = within_standard_errors(est, oracle, GATE_SE);
        self.count += 1;
        self.worst = self.worst.max(z);
        if !ok {
            self.passed = false;
            self.failures.push(format!("{} ({:.3e} vs {oracle:.3e}, {z:.2} SE)", label(), est.rate()));
        }
    }

    fn summary(&self) -> String {
        let mut s = format!("{} estimates, worst {:.2} SE", self.count, self.worst);
        if !self.failures.is_empty() {
            s.push_str("; outside gate: ");
            s.push_str(&self.failures.join(", "));
        }
        s
    }
}

fn fig3_dt(rs: f64) -> DtClosedForm {
    DtClosedForm::new(db_to_linear(SNR_DB), rs, 1.0, 0.1).unwrap()
}

fn fig3_params(rs: f64) -> SystemParams {
    SystemParams::builder()
        .snr_db(SNR_DB)
        .secrecy_rate(rs)
        .overall_rate(rs + 1.0)
        .direct_variances(1.0, 0.1)
        .build()
        .unwrap()
}

fn relay_params(n: usize, rs: f64, ro: f64) -> SystemParams {
    SystemParams::builder()
        .snr_db(SNR_DB)
        .secrecy_rate(rs)
        .overall_rate(ro)
        .direct_variances(1.0, 0.2)
        .relays(n)
        .relay_variances(2.0, 2.0, 0.2)
        .build()
        .unwrap()
}

fn estimator(curve_point_hat: f64, trials: u64) -> BernoulliEstimator {
    BernoulliEstimator::new((curve_point_hat * trials as f64).round() as u64, trials)
}

/// Simulated relay-scenario curves shared by criteria 5, 6, 8 and 9.
struct RelayCurves {
    n_relays: usize,
    rs: f64,
    /// DT (when requested), SRS, MRS in that order.
    curves: Vec<SrtCurve>,
}

impl RelayCurves {
    fn build(n: usize, rs: f64, with_dt: bool) -> Self {
        let grid = ro_grid(rs, 0.05, RELAY_REDUNDANCY_MAX, GRID_POINTS).unwrap();
        let schemes: &[Scheme] = if with_dt { &Scheme::ALL } else { &[Scheme::Srs, Scheme::Mrs] };
        let p = relay_params(n, rs, grid[0]);
        let curves = build_curves(&p, schemes, &grid, &SweepOptions::new(TRIALS, SEED)).unwrap();
        RelayCurves { n_relays: n, rs, curves }
    }

    fn scheme(&self, s: Scheme) -> &SrtCurve {
        self.curves.iter().find(|c| c.scheme == s).unwrap()
    }

    fn tag(&self) -> String {
        format!("N={} rs={}", self.n_relays, self.rs)
    }
}

fn criterion_1() -> Verdict {
    let mut worst = 0.0f64;
    for rs in [0.2, 0.6] {
        let dt = fig3_dt(rs);
        for k in 1..=100 {
            let ro = rs + 4.0 * k as f64 / 100.0;
            let via = dt.dt_ip_of_op(dt.dt_outage(ro)).unwrap();
            worst = worst.max((via - dt.dt_intercept(ro - rs)).abs());
        }
    }
    verdict(worst <= ROUND_TRIP_TOL, format!("200 rates, max deviation {worst:.3e} (limit {ROUND_TRIP_TOL:e})"))
}

fn criterion_2() -> Verdict {
    let mut gate = Gate::new();
    for rs in [0.2, 0.6] {
        let dt = fig3_dt(rs);
        let grid = default_ro_grid(rs);
        assert_eq!(grid.len(), GRID_POINTS);
        let curve = &build_curves(&fig3_params(rs), &[Scheme::Dt], &grid, &SweepOptions::new(TRIALS, SEED))
            .unwrap()[0];
        for pt in &curve.points {
            let ro = pt.overall_rate;
            gate.check(|| format!("OP rs={rs} ro={ro:.4}"), &estimator(pt.op.hat, pt.trials), dt.dt_outage(ro));
            gate.check(|| format!("IP rs={rs} ro={ro:.4}"), &estimator(pt.ip.hat, pt.trials), dt.dt_intercept(ro - rs));
        }
    }
    verdict(gate.passed, gate.summary())
}

fn criterion_3() -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    for rs in [0.2, 0.6] {
        let grid = ro_grid(rs, 1e-3, 8.0, 400).unwrap();
        let curve = analytic_dt_curve(&fig3_params(rs), &grid).unwrap();
        let strict = curve
            .points
            .windows(2)
            .all(|w| w[1].op.hat > w[0].op.hat && w[1].ip.hat < w[0].ip.hat);
        ok &= strict;
        notes.push(format!("rs={rs} strictly decreasing over 400 points: {strict}"));
    }
    let (low, high) = (fig3_dt(0.2), fig3_dt(0.6));
    for op in MATCHED_OPS {
        let (a, b) = (low.dt_ip_of_op(op).unwrap(), high.dt_ip_of_op(op).unwrap());
        ok &= b > a;
        notes.push(format!("OP={op}: IP {b:.4} (rs=0.6) vs {a:.4} (rs=0.2)"));
    }
    verdict(ok, notes.join("; "))
}

fn criterion_4() -> Verdict {
    let p = relay_params(4, 0.6, 1.0);
    let pmf = decoding_set_pmf(&p).unwrap();
    let hist = decoding_set_histogram(&p, &RunOptions::new(TRIALS, SEED));
    let mut gate = Gate::new();
    for (mask, prob) in pmf.iter() {
        gate.check(|| format!("subset {mask:04b}"), &BernoulliEstimator::new(hist[mask as usize], TRIALS), prob);
    }
    let sum_err = (pmf.total() - 1.0).abs();
    verdict(
        gate.passed && sum_err <= PMF_SUM_TOL && hist.iter().sum::<u64>() == TRIALS,
        format!("16 subsets: {}; |sum - 1| = {sum_err:.1e}", gate.summary()),
    )
}

fn criterion_5(sets: &[&RelayCurves]) -> Verdict {
    let mut gate = Gate::new();
    for set in sets {
        for pt in &set.scheme(Scheme::Srs).points {
            let oracle = srs_outage_closed_form(&relay_params(set.n_relays, set.rs, pt.overall_rate)).unwrap();
            gate.check(
                || format!("{} ro={:.4}", set.tag(), pt.overall_rate),
                &estimator(pt.op.hat, pt.trials),
                oracle,
            );
        }
    }
    verdict(gate.passed, gate.summary())
}

fn criterion_6(sets: &[&RelayCurves]) -> Verdict {
    let mut gate = Gate::new();
    let mut pair_ok = true;
    let mut pair_worst = 0.0f64;
    for set in sets {
        let (srs, mrs) = (set.scheme(Scheme::Srs), set.scheme(Scheme::Mrs));
        for (a, b) in srs.points.iter().zip(&mrs.points) {
            let ro = a.overall_rate;
            let oracle = relay_intercept_closed_form(&relay_params(set.n_relays, set.rs, ro)).unwrap();
            gate.check(|| format!("SRS {} ro={ro:.4}", set.tag()), &estimator(a.ip.hat, a.trials), oracle);
            gate.check(|| format!("MRS {} ro={ro:.4}", set.tag()), &estimator(b.ip.hat, b.trials), oracle);
            let se = (a.ip_standard_error().powi(2) + b.ip_standard_error().powi(2)).sqrt();
            let diff = (a.ip.hat - b.ip.hat).abs();
            if diff > GATE_SE * se {
                pair_ok = false;
            }
            if se > 0.0 {
                pair_worst = pair_worst.max(diff / se);
            }
        }
    }
    verdict(
        gate.passed && pair_ok,
        format!("oracle: {}; SRS vs MRS worst {pair_worst:.2} combined SE", gate.summary()),
    )
}

fn criterion_7() -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    for (n, ro) in [(4, 3.0), (8, 5.0)] {
        let c = outage_pair_counts(&relay_params(n, 0.6, ro), &RunOptions::new(TRIALS, SEED));
        ok &= c.mrs_only == 0 && c.trials == TRIALS;
        notes.push(format!(
            "N={n} ro={ro}: {} MRS-only outages in {} trials (SRS {}, MRS {})",
            c.mrs_only, c.trials, c.srs_outages, c.mrs_outages
        ));
    }
    verdict(ok, notes.join("; "))
}

/// Dominance of `a` over `b` on the outage grid restricted to the curves'
/// common range.
fn dominates(label: &str, a: &SrtCurve, b: &SrtCurve) -> (bool, String) {
    let Some((lo, hi)) = op_overlap(a, b) else {
        return (false, format!("{label}: no common outage range"));
    };
    let ops: Vec<f64> = DOMINANCE_OPS.iter().copied().filter(|&x| x >= lo && x <= hi).collect();
    if ops.len() < 2 {
        return (false, format!("{label}: common outage range [{lo:.3e}, {hi:.3e}] too narrow"));
    }
    let d = dominance_check(a, b, &ops, Tolerance::StandardErrors(GATE_SE)).unwrap();
    let worst = d.margins.iter().map(|m| m.margin).fold(f64::INFINITY, f64::min);
    let skipped = DOMINANCE_OPS.len() - ops.len();
    (
        d.dominant,
        format!(
            "{label}: {} at OP {:?}{}, min margin {worst:.3e}",
            if d.dominant { "holds" } else { "violated" },
            ops,
            if skipped > 0 { format!(" ({skipped} outside common range)") } else { String::new() }
        ),
    )
}

fn criterion_8(sets: &[&RelayCurves]) -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    for set in sets {
        let (dt, srs, mrs) = (set.scheme(Scheme::Dt), set.scheme(Scheme::Srs), set.scheme(Scheme::Mrs));
        for (label, a, b) in [("MRS<=SRS", mrs, srs), ("SRS<=DT", srs, dt)] {
            let (pass, note) = dominates(&format!("{} {label}", set.tag()), a, b);
            ok &= pass;
            notes.push(note);
        }
    }
    verdict(ok, notes.join("; "))
}

fn criterion_9(four: &RelayCurves, eight: &RelayCurves) -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    for s in [Scheme::Srs, Scheme::Mrs] {
        let (pass, note) = dominates(&format!("{} N=8<=N=4", s.as_str().to_uppercase()), eight.scheme(s), four.scheme(s));
        ok &= pass;
        notes.push(note);
    }
    verdict(ok, notes.join("; "))
}

fn criterion_10() -> Verdict {
    let dir = std::env::temp_dir().join(format!("srt-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut outputs = Vec::new();
    for (i, workers) in ["1", "4", "8", "1"].into_iter().enumerate() {
        let path = dir.join(format!("run{i}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_srt-sim"))
            .args(["simulate", "--seed", "2024", "--trials", REPRO_TRIALS, "--workers", workers, "--out"])
            .arg(&path)
            .env_remove("SRT_SIM_SEED")
            .status()
            .expect("spawn srt-sim");
        if !status.success() {
            return verdict(false, format!("simulate with {workers} workers exited with {status}"));
        }
        outputs.push(std::fs::read(&path).unwrap());
    }
    let _ = std::fs::remove_dir_all(&dir);
    let identical = outputs.windows(2).all(|w| w[0] == w[1]);
    verdict(
        identical && !outputs[0].is_empty(),
        format!(
            "workers 1, 4, 8 and a repeat at 1: {} ({} bytes, {} rows)",
            if identical { "byte-identical" } else { "outputs differ" },
            outputs[0].len(),
            outputs[0].iter().filter(|&&b| b == b'\n').count().saturating_sub(1)
        ),
    )
}

fn main() -> ExitCode {
    // libtest flags such as --list or --nocapture are ignored.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let start = Instant::now();
    let mut results: Vec<(u32, &str, Verdict)> = Vec::new();
    let mut run = |id, name, f: &dyn Fn() -> Verdict| {
        let t = Instant::now();
        let v = f();
        println!(
            "criterion {id:>2} {} {name} [{:.1}s]: {}",
            if v.passed { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            v.detail
        );
        results.push((id, name, v));
    };
    println!("acceptance: seed {SEED}, {TRIALS} trials per estimate, gate {GATE_SE} SE");
    run(1, "dt round trip", &criterion_1);
    run(2, "dt monte carlo vs closed form", &criterion_2);
    run(3, "dt tradeoff ordering", &criterion_3);
    run(4, "decoding-set distribution", &criterion_4);

    let t = Instant::now();
    let n4_low = RelayCurves::build(4, 0.2, true);
    let n4_high = RelayCurves::build(4, 0.6, true);
    let n8_high = RelayCurves::build(8, 0.6, false);
    println!("relay curves built [{:.1}s]", t.elapsed().as_secs_f64());

    run(5, "srs outage oracle", &|| criterion_5(&[&n4_low, &n4_high, &n8_high]));
    run(6, "relay intercept oracle", &|| criterion_6(&[&n4_low, &n4_high, &n8_high]));
    run(7, "per-trial outage dominance", &criterion_7);
    run(8, "relay schemes outperform dt", &|| criterion_8(&[&n4_low, &n4_high]));
    run(9, "more relays improve tradeoff", &|| criterion_9(&n4_high, &n8_high));
    run(10, "reproducibility", &criterion_10);

    let failed: Vec<u32> = results.iter().filter(|r| !r.2.passed).map(|r| r.0).collect();
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s",
        results.len() - failed.len(),
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}

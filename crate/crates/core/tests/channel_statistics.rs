//! Distributional and reproducibility properties of the channel generator.

use num_complex::Complex64;
use srt_core::model::{draw_realization, ChannelRealization};
use srt_core::montecarlo::{run_schemes, run_trial_range, RunOptions};
use srt_core::rng::RngContract;
use srt_core::{Scheme, SystemParams};

fn scenario() -> SystemParams {
    SystemParams::builder()
        .direct_variances(1.0, 0.1)
        .relays(3)
        .relay_variances(2.0, 0.5, 0.2)
        .overall_rate(1.0)
        .build()
        .unwrap()
}

fn draws(p: &SystemParams, n: u64, seed: u64) -> Vec<ChannelRealization> {
    (0..n).map(|t| draw_realization(p, &RngContract::new(seed, t))).collect()
}

/// Kolmogorov-Smirnov distance between samples and Exp(mean).
fn ks_exponential(mut xs: Vec<f64>, mean: f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = 1.0 - (-x / mean).exp();
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn mean_square_gains_match_configured_variances() {
    let p = SystemParams::builder().relays(1).relay_variances(2.0, 2.0, 0.2).build().unwrap();
    let n = 1_000_000u64;
    let (mut sd, mut ie) = (0.0, 0.0);
    for t in 0..n {
        let r = draw_realization(&p, &RngContract::new(7, t));
        sd += r.h_sd.norm_sqr();
        ie += r.h_ie[0].norm_sqr();
    }
    let (sd, ie) = (sd / n as f64, ie / n as f64);
    assert!((sd - 1.0).abs() < 0.005, "mean |h_sd|^2 = {sd}");
    assert!((ie - 0.2).abs() < 0.002, "mean |h_ie|^2 = {ie}");
}

#[test]
fn squared_magnitudes_are_exponential() {
    let p = scenario();
    let rs = draws(&p, 100_000, 11);
    let mut links: Vec<(&str, Vec<f64>, f64)> = vec![
        ("sd", rs.iter().map(|r| r.h_sd.norm_sqr()).collect(), 1.0),
        ("se", rs.iter().map(|r| r.h_se.norm_sqr()).collect(), 0.1),
    ];
    for i in 0..3 {
        links.push(("si", rs.iter().map(|r| r.h_si[i].norm_sqr()).collect(), 2.0));
        links.push(("id", rs.iter().map(|r| r.h_id[i].norm_sqr()).collect(), 0.5));
        links.push(("ie", rs.iter().map(|r| r.h_ie[i].norm_sqr()).collect(), 0.2));
    }
    for (name, xs, mean) in links {
        let d = ks_exponential(xs, mean);
        assert!(d < 0.01, "KS distance {d} for link {name}");
    }
}

#[test]
fn quadrature_components_are_uncorrelated_and_balanced() {
    let p = scenario();
    let rs = draws(&p, 100_000, 13);
    let check = |hs: Vec<Complex64>, var: f64| {
        let n = hs.len() as f64;
        let (mut xx, mut yy, mut xy, mut mx, mut my) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for h in &hs {
            xx += h.re * h.re;
            yy += h.im * h.im;
            xy += h.re * h.im;
            mx += h.re;
            my += h.im;
        }
        let (mx, my) = (mx / n, my / n);
        let vx = xx / n - mx * mx;
        let vy = yy / n - my * my;
        let corr = (xy / n - mx * my) / (vx * vy).sqrt();
        assert!(corr.abs() < 0.01, "correlation {corr}");
        assert!((vx / (var / 2.0) - 1.0).abs() < 0.02, "re variance {vx} vs {}", var / 2.0);
        assert!((vy / (var / 2.0) - 1.0).abs() < 0.02, "im variance {vy} vs {}", var / 2.0);
    };
    check(rs.iter().map(|r| r.h_sd).collect(), 1.0);
    check(rs.iter().map(|r| r.h_id[1]).collect(), 0.5);
    check(rs.iter().map(|r| r.h_ie[2]).collect(), 0.2);
}

#[test]
fn trial_draws_are_order_independent() {
    let p = scenario();
    let forward = draws(&p, 10_000, 17);
    // A fixed pseudo-random permutation of the trial indices.
    let mut order: Vec<u64> = (0..10_000).collect();
    order.sort_by_key(|&t| (t.wrapping_mul(0x9E37_79B9_7F4A_7C15)) >> 7);
    for &t in &order {
        assert_eq!(draw_realization(&p, &RngContract::new(17, t)), forward[t as usize]);
    }
}

#[test]
fn batch_splits_reproduce_single_pass() {
    let p = scenario();
    let opts = RunOptions::new(10_000, 19).stream(3);
    let whole = run_trial_range(&p, &Scheme::ALL, &opts, 0..10_000);
    for cuts in [vec![0, 1, 10_000], vec![0, 3_333, 3_334, 9_999, 10_000], vec![0, 5_000, 10_000]] {
        let mut acc = vec![Default::default(); 3];
        // Evaluate batches back to front.
        for w in cuts.windows(2).rev() {
            let part = run_trial_range(&p, &Scheme::ALL, &opts, w[0]..w[1]);
            acc = acc.into_iter().zip(part).map(|(a, b): (srt_core::montecarlo::TrialCounts, _)| a.merge(b)).collect();
        }
        assert_eq!(acc, whole);
    }
    assert_eq!(run_schemes(&p, &Scheme::ALL, &opts), whole);
}

#[test]
fn worker_count_does_not_change_counts() {
    let p = scenario();
    let base = RunOptions::new(50_000, 23);
    let one = run_schemes(&p, &Scheme::ALL, &base.workers(Some(1)));
    for w in [2, 4, 8] {
        assert_eq!(run_schemes(&p, &Scheme::ALL, &base.workers(Some(w))), one);
    }
}

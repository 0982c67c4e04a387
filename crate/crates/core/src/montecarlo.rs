//! Reproducible Monte Carlo trial engine.
//!
//! Trials are identified by index; each draws its channels from the
//! counter-based streams in [`crate::rng`], so the integer event counts are
//! identical for any worker count or batch split.

use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{ChannelRealization, SystemParams};
use crate::rng::RngContract;
use crate::schemes::{evaluate_many, form_decoding_set, mrs_trial, srs_trial, Scheme, TrialOutcome};

/// Trials per work unit handed to a worker.
const CHUNK: u64 = 1 << 13;

/// High bit of the stream id marks the independent intercept draw.
const DECOUPLED_BIT: u32 = 1 << 31;

/// Streaming success counter for a Bernoulli event.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BernoulliEstimator {
    pub successes: u64,
    pub trials: u64,
}

impl BernoulliEstimator {
    pub fn new(successes: u64, trials: u64) -> Self {
        assert!(successes <= trials, "successes exceed trials");
        BernoulliEstimator { successes, trials }
    }

    #[inline]
    pub fn record(&mut self, success: bool) {
        self.trials += 1;
        self.successes += u64::from(success);
    }

    pub fn merge(self, other: Self) -> Self {
        BernoulliEstimator {
            successes: self.successes + other.successes,
            trials: self.trials + other.trials,
        }
    }

    pub fn rate(&self) -> f64 {
        if self.trials == 0 {
            f64::NAN
        } else {
            self.successes as f64 / self.trials as f64
        }
    }

    /// `sqrt(p (1 - p) / n)` at the empirical rate.
    pub fn standard_error(&self) -> f64 {
        let p = self.rate();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    pub fn wilson(&self, level: f64) -> (f64, f64) {
        confidence_interval(self, level)
    }
}

/// Two-sided normal quantile for a confidence level, e.g. 1.95996 for 0.95.
pub fn z_for_level(level: f64) -> f64 {
    assert!(level > 0.0 && level < 1.0, "confidence level must be in (0, 1)");
    // Two-sided tail mass 1 - level = erfc(z / sqrt 2); erfc is decreasing.
    let tail = 1.0 - level;
    let (mut lo, mut hi) = (0.0f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if libm::erfc(mid / std::f64::consts::SQRT_2) > tail {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Wilson score interval.
pub fn confidence_interval(est: &BernoulliEstimator, level: f64) -> (f64, f64) {
    assert!(est.trials >= 1, "confidence interval needs at least one trial");
    let n = est.trials as f64;
    let p = est.rate();
    let z = z_for_level(level);
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if est.successes == 0 { 0.0 } else { (center - half).clamp(0.0, p) };
    let hi = if est.successes == est.trials { 1.0 } else { (center + half).clamp(p, 1.0) };
    (lo, hi)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialCounts {
    pub outage: BernoulliEstimator,
    pub intercept: BernoulliEstimator,
}

impl TrialCounts {
    pub fn merge(self, other: Self) -> Self {
        TrialCounts {
            outage: self.outage.merge(other.outage),
            intercept: self.intercept.merge(other.intercept),
        }
    }
}

/// Whether outage and intercept are judged on the same channel draw.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coupling {
    #[default]
    Shared,
    /// Intercept events use an independent realization.
    Independent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub n_trials: u64,
    pub master_seed: u64,
    /// Trial-stream family; sweeps give each grid point its own.
    pub stream: u32,
    pub coupling: Coupling,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl RunOptions {
    pub fn new(n_trials: u64, master_seed: u64) -> Self {
        RunOptions {
            n_trials,
            master_seed,
            stream: 0,
            coupling: Coupling::Shared,
            workers: None,
        }
    }

    pub fn stream(mut self, stream: u32) -> Self {
        assert!(stream & DECOUPLED_BIT == 0, "stream id uses reserved bit");
        self.stream = stream;
        self
    }

    pub fn coupling(mut self, coupling: Coupling) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn workers(mut self, workers: Option<usize>) -> Self {
        self.workers = workers;
        self
    }
}

/// Fold `fold(acc, trial_index)` over `0..n_trials` in fixed-size chunks and
/// merge chunk results. The merge must be associative and commutative for the
/// result to be independent of `workers`.
pub fn fold_trials<A, I, F, M>(n_trials: u64, workers: Option<usize>, init: I, fold: F, merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(&mut A, u64) + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    let n_chunks = n_trials.div_ceil(CHUNK);
    let run_chunk = |c: u64| {
        let mut acc = init();
        for t in c * CHUNK..((c + 1) * CHUNK).min(n_trials) {
            fold(&mut acc, t);
        }
        acc
    };
    let par = || {
        (0..n_chunks)
            .into_par_iter()
            .map(run_chunk)
            .reduce(&init, &merge)
    };
    match workers {
        Some(1) => (0..n_chunks).map(run_chunk).fold(init(), &merge),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map(|pool| pool.install(par))
            .unwrap_or_else(|_| par()),
        None => par(),
    }
}

/// Per-worker scratch so the hot loop does not allocate channel vectors.
struct Scratch {
    counts: Vec<TrialCounts>,
    real: ChannelRealization,
    alt: ChannelRealization,
    outcomes: Vec<TrialOutcome>,
    alt_outcomes: Vec<TrialOutcome>,
}

impl Scratch {
    fn new(n_schemes: usize) -> Self {
        Scratch {
            counts: vec![TrialCounts::default(); n_schemes],
            real: ChannelRealization::default(),
            alt: ChannelRealization::default(),
            outcomes: Vec::with_capacity(n_schemes),
            alt_outcomes: Vec::with_capacity(n_schemes),
        }
    }

    fn trial(&mut self, params: &SystemParams, schemes: &[Scheme], opts: &RunOptions, t: u64) {
        let rng = RngContract::new(opts.master_seed, t).with_stream(opts.stream);
        self.real.fill(params, &rng);
        evaluate_many(schemes, params, &self.real, &mut self.outcomes);
        let intercepts = match opts.coupling {
            Coupling::Shared => &self.outcomes,
            Coupling::Independent => {
                self.alt.fill(params, &rng.with_stream(opts.stream | DECOUPLED_BIT));
                evaluate_many(schemes, params, &self.alt, &mut self.alt_outcomes);
                &self.alt_outcomes
            }
        };
        for ((c, o), i) in self.counts.iter_mut().zip(&self.outcomes).zip(intercepts) {
            c.outage.record(o.outage);
            c.intercept.record(i.intercept);
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a = a.merge(b);
        }
        self
    }
}

/// Run several schemes on shared channel draws; one [`TrialCounts`] per scheme.
pub fn run_schemes(params: &SystemParams, schemes: &[Scheme], opts: &RunOptions) -> Vec<TrialCounts> {
    assert!(opts.n_trials >= 1, "need at least one trial");
    fold_trials(
        opts.n_trials,
        opts.workers,
        || Scratch::new(schemes.len()),
        |s, t| s.trial(params, schemes, opts, t),
        Scratch::merge,
    )
    .counts
}

/// Outage and intercept counts of one scheme over trials `0..n_trials`.
pub fn run_trials(params: &SystemParams, scheme: Scheme, opts: &RunOptions) -> TrialCounts {
    run_schemes(params, &[scheme], opts)[0]
}

/// Sequential evaluation of an arbitrary trial range; used to check that any
/// partition of the trial indices reproduces a single pass.
pub fn run_trial_range(
    params: &SystemParams,
    schemes: &[Scheme],
    opts: &RunOptions,
    range: Range<u64>,
) -> Vec<TrialCounts> {
    let mut s = Scratch::new(schemes.len());
    for t in range {
        s.trial(params, schemes, opts, t);
    }
    s.counts
}

/// Whether `est` lies within `k` binomial standard errors of the reference
/// probability `p`, with the standard error taken at `p`. Returns the check
/// and the observed deviation in standard-error units.
pub fn within_standard_errors(est: &BernoulliEstimator, p: f64, k: f64) -> (bool, f64) {
    let se = (p * (1.0 - p) / est.trials as f64).sqrt();
    let diff = (est.rate() - p).abs();
    let z = if se > 0.0 { diff / se } else if diff == 0.0 { 0.0 } else { f64::INFINITY };
    (diff <= k * se, z)
}

/// Empirical decoding-set histogram indexed by [`crate::schemes::DecodingSet::mask`].
pub fn decoding_set_histogram(params: &SystemParams, opts: &RunOptions) -> Vec<u64> {
    let n = params.n_relays();
    assert!(n <= 20, "histogram over 2^{n} subsets refused");
    let buckets = 1usize << n;
    let (hist, _) = fold_trials(
        opts.n_trials,
        opts.workers,
        || (vec![0u64; buckets], ChannelRealization::default()),
        |(hist, real), t| {
            let rng = RngContract::new(opts.master_seed, t).with_stream(opts.stream);
            real.fill(params, &rng);
            hist[form_decoding_set(params, real).mask() as usize] += 1;
        },
        |(mut a, r), (b, _)| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            (a, r)
        },
    );
    hist
}

/// Per-trial coupling of MRS and SRS outages on the same draws.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OutagePairCounts {
    pub trials: u64,
    pub srs_outages: u64,
    pub mrs_outages: u64,
    /// Trials where MRS is in outage but SRS is not.
    pub mrs_only: u64,
}

pub fn outage_pair_counts(params: &SystemParams, opts: &RunOptions) -> OutagePairCounts {
    let (counts, _) = fold_trials(
        opts.n_trials,
        opts.workers,
        || (OutagePairCounts::default(), ChannelRealization::default()),
        |(c, real), t| {
            let rng = RngContract::new(opts.master_seed, t).with_stream(opts.stream);
            real.fill(params, &rng);
            let srs = srs_trial(params, real).outage;
            let mrs = mrs_trial(params, real).outage;
            c.trials += 1;
            c.srs_outages += u64::from(srs);
            c.mrs_outages += u64::from(mrs);
            c.mrs_only += u64::from(mrs && !srs);
        },
        |(a, r), (b, _)| {
            (
                OutagePairCounts {
                    trials: a.trials + b.trials,
                    srs_outages: a.srs_outages + b.srs_outages,
                    mrs_outages: a.mrs_outages + b.mrs_outages,
                    mrs_only: a.mrs_only + b.mrs_only,
                },
                r,
            )
        },
    );
    counts
}

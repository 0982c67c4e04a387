//! Closed-form oracles for outage and intercept probabilities.
//!
//! These are used to cross-check the Monte Carlo engine; none of them sits on
//! the simulation path.

use crate::error::{Result, SrtError};
use crate::model::SystemParams;
use crate::schemes::DecodingSet;

/// Subset enumeration is `O(2^N)`; refuse beyond this many relays.
pub const MAX_ENUMERATED_RELAYS: usize = 20;

/// `exp(-x)` clamped to `[0, 1]`. Exponents beyond the f64 range go to zero
/// instead of producing subnormal noise.
fn exp_neg(x: f64) -> f64 {
    if x > 700.0 {
        0.0
    } else {
        clamp_prob((-x).exp())
    }
}

fn clamp_prob(p: f64) -> f64 {
    p.clamp(0.0, 1.0)
}

/// SNR threshold `(2^(rate/prelog) - 1) / snr` a link gain must cross to
/// support `rate`.
pub fn gain_threshold(rate: f64, snr: f64, prelog: f64) -> f64 {
    (rate / prelog * std::f64::consts::LN_2).exp_m1() / snr
}

/// Direct-transmission outage / intercept in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtClosedForm {
    pub snr: f64,
    pub secrecy_rate: f64,
    pub var_main: f64,
    pub var_wiretap: f64,
}

impl DtClosedForm {
    pub fn new(snr: f64, secrecy_rate: f64, var_main: f64, var_wiretap: f64) -> Result<Self> {
        for (key, v) in [("snr", snr), ("var-sd", var_main), ("var-se", var_wiretap)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(SrtError::param(key, format!("must be positive, got {v}")));
            }
        }
        if !(secrecy_rate.is_finite() && secrecy_rate >= 0.0) {
            return Err(SrtError::param("rs", "must be >= 0"));
        }
        Ok(DtClosedForm {
            snr,
            secrecy_rate,
            var_main,
            var_wiretap,
        })
    }

    pub fn from_params(params: &SystemParams) -> Self {
        DtClosedForm {
            snr: params.snr(),
            secrecy_rate: params.secrecy_rate(),
            var_main: params.var_sd(),
            var_wiretap: params.var_se(),
        }
    }

    /// `P(log2(1 + |h_m|^2 snr) < ro)`.
    pub fn dt_outage(&self, ro: f64) -> f64 {
        let t = gain_threshold(ro, self.snr, 1.0);
        if t / self.var_main > 700.0 {
            return 1.0;
        }
        clamp_prob(-(-t / self.var_main).exp_m1())
    }

    /// `P(log2(1 + |h_w|^2 snr) > re)`.
    pub fn dt_intercept(&self, re: f64) -> f64 {
        exp_neg(gain_threshold(re, self.snr, 1.0) / self.var_wiretap)
    }

    /// Outage probability when `R_o = R_s`; below it the redundancy would be
    /// non-positive.
    pub fn min_outage(&self) -> f64 {
        self.dt_outage(self.secrecy_rate)
    }

    /// Intercept probability as a function of outage probability, with the
    /// codeword rate eliminated:
    ///
    /// `exp(-(2^-Rs - 2^-Rs * var_m * snr * ln(1 - p) - 1) / (var_w * snr))`
    ///
    /// Returns 1 below [`Self::min_outage`].
    pub fn dt_ip_of_op(&self, p_out: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p_out) {
            return Err(SrtError::Domain(format!(
                "outage probability must lie in [0, 1), got {p_out}"
            )));
        }
        if p_out < self.min_outage() {
            return Ok(1.0);
        }
        let scale = (-self.secrecy_rate).exp2();
        let numer = scale - scale * self.var_main * self.snr * (-p_out).ln_1p() - 1.0;
        Ok(exp_neg(numer.max(0.0) / (self.var_wiretap * self.snr)))
    }
}

/// Probability each relay decodes: `exp(-t_s / var_si)` with
/// `t_s = (2^(R_o/alpha) - 1) / snr`.
pub fn relay_decode_probabilities(params: &SystemParams) -> Vec<f64> {
    let t = gain_threshold(params.overall_rate(), params.snr(), params.alpha().value());
    params
        .relays()
        .iter()
        .map(|r| exp_neg(t / r.source_relay))
        .collect()
}

/// Distribution of the decoding set over all `2^N` subsets, indexed by
/// [`DecodingSet::mask`].
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetPmf {
    n_relays: usize,
    probs: Vec<f64>,
}

impl SubsetPmf {
    pub fn n_relays(&self) -> usize {
        self.n_relays
    }

    pub fn prob(&self, set: &DecodingSet) -> f64 {
        self.probs[set.mask() as usize]
    }

    pub fn prob_of_mask(&self, mask: u64) -> f64 {
        self.probs[mask as usize]
    }

    pub fn empty_set(&self) -> f64 {
        self.probs[0]
    }

    /// `(mask, probability)` for every subset, in mask order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.probs.iter().enumerate().map(|(m, &p)| (m as u64, p))
    }

    /// Compensated sum of all subset probabilities.
    pub fn total(&self) -> f64 {
        let (mut sum, mut carry) = (0.0f64, 0.0f64);
        for &x in &self.probs {
            let t = sum + x;
            carry += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
            sum = t;
        }
        sum + carry
    }
}

pub fn decoding_set_pmf(params: &SystemParams) -> Result<SubsetPmf> {
    let n = params.n_relays();
    if n == 0 {
        return Err(SrtError::Domain("decoding set needs at least one relay".into()));
    }
    if n > MAX_ENUMERATED_RELAYS {
        return Err(SrtError::TooManyRelays(n));
    }
    let p = relay_decode_probabilities(params);
    let probs = (0..1usize << n)
        .map(|mask| {
            p.iter()
                .enumerate()
                .map(|(i, &pi)| if mask >> i & 1 == 1 { pi } else { 1.0 - pi })
                .product()
        })
        .collect();
    Ok(SubsetPmf { n_relays: n, probs })
}

/// SRS outage by total probability over decoding sets: given set `S`, the
/// best relay fails iff every member's destination gain is below
/// `t_d = (2^(R_o/alpha) - 1) / snr`. The empty set is always in outage.
pub fn srs_outage_closed_form(params: &SystemParams) -> Result<f64> {
    let pmf = decoding_set_pmf(params)?;
    let t = gain_threshold(params.overall_rate(), params.snr(), params.alpha().value());
    let second_hop_fail: Vec<f64> = params
        .relays()
        .iter()
        .map(|r| 1.0 - exp_neg(t / r.relay_destination))
        .collect();
    let total = pmf
        .iter()
        .map(|(mask, p)| {
            let all_fail: f64 = second_hop_fail
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, q)| q)
                .product();
            p * all_fail
        })
        .sum();
    Ok(clamp_prob(total))
}

/// `P(X + Y > t)` for independent exponentials with means `mean_a`, `mean_b`.
///
/// Evaluated as `e^{-t/a} (1 + b (1 - e^{-g}) / (a - b))` with `a >= b` and
/// `g = t (a - b) / (a b)`, rewritten so nothing cancels as `a -> b`; at
/// equality it is the Erlang-2 tail `(1 + t/a) e^{-t/a}`.
pub fn exp_sum_tail(t: f64, mean_a: f64, mean_b: f64) -> f64 {
    debug_assert!(t >= 0.0 && mean_a > 0.0 && mean_b > 0.0);
    let (a, b) = if mean_a >= mean_b {
        (mean_a, mean_b)
    } else {
        (mean_b, mean_a)
    };
    let lead = exp_neg(t / a);
    if lead == 0.0 {
        return 0.0;
    }
    // gap = t/b - t/a, formed without subtracting two large quotients.
    let gap = t * (a - b) / (a * b);
    let shape = if gap == 0.0 { 1.0 } else { -(-gap).exp_m1() / gap };
    let ratio = t / (a * b) * shape;
    clamp_prob(lead * (1.0 + b * ratio))
}

/// Intercept probability shared by SRS and MRS.
///
/// With an empty decoding set the eavesdropper sees only the source link.
/// Otherwise it adds one relay-phase gain that is `Exp(var_ie)` whatever the
/// (channel-independent) unit-norm weights are, so both schemes reduce to
/// the two-exponential tail.
pub fn relay_intercept_closed_form(params: &SystemParams) -> Result<f64> {
    let var_ie = params
        .uniform_relay_eavesdropper_var()
        .ok_or(SrtError::HeterogeneousWiretap)?;
    let pmf = decoding_set_pmf(params)?;
    let p_empty = pmf.empty_set();
    let t = gain_threshold(params.redundancy_rate(), params.snr(), params.alpha().value());
    let direct_only = exp_neg(t / params.var_se());
    let combined = exp_sum_tail(t, params.var_se(), var_ie);
    Ok(clamp_prob(p_empty * direct_only + (1.0 - p_empty) * combined))
}

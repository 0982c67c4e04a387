//! Per-trial outage and intercept predicates for direct transmission (DT),
//! single-relay selection (SRS) and multi-relay selection (MRS).
//!
//! Boundary conventions: a relay decodes when its capacity is `>= R_o`, the
//! destination is in outage when its capacity is `< R_o`, and the eavesdropper
//! intercepts when its capacity is `> R_e`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SrtError};
use crate::model::{link_capacity, ChannelRealization, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Dt,
    Srs,
    Mrs,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Dt, Scheme::Srs, Scheme::Mrs];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Dt => "dt",
            Scheme::Srs => "srs",
            Scheme::Mrs => "mrs",
        }
    }

    pub fn uses_relays(self) -> bool {
        !matches!(self, Scheme::Dt)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = SrtError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dt" => Ok(Scheme::Dt),
            "srs" => Ok(Scheme::Srs),
            "mrs" => Ok(Scheme::Mrs),
            other => Err(SrtError::param(
                "scheme",
                format!("expected one of dt, srs, mrs; got `{other}`"),
            )),
        }
    }
}

/// Relays that decoded the source codeword, in increasing index order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct DecodingSet {
    members: Vec<usize>,
}

impl DecodingSet {
    pub fn empty() -> Self {
        DecodingSet::default()
    }

    /// Members are sorted and deduplicated.
    pub fn from_members(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        DecodingSet { members }
    }

    /// Bit `i` of `mask` set means relay `i` decoded.
    pub fn from_mask(mask: u64) -> Self {
        DecodingSet {
            members: (0..64).filter(|i| mask >> i & 1 == 1).collect(),
        }
    }

    pub fn mask(&self) -> u64 {
        self.members.iter().fold(0, |m, &i| m | 1 << i)
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, relay: usize) -> bool {
        self.members.binary_search(&relay).is_ok()
    }
}

/// Unit-norm MRS beamforming weights, one per decoding-set member.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    weights: Vec<Complex64>,
}

impl WeightVector {
    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn norm(&self) -> f64 {
        self.weights.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `w^T h` (plain transpose, no conjugation).
    pub fn apply(&self, h: &[Complex64]) -> Complex64 {
        self.weights.iter().zip(h).map(|(w, h)| w * h).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TrialOutcome {
    pub outage: bool,
    pub intercept: bool,
}

fn check_relays(params: &SystemParams, real: &ChannelRealization) {
    debug_assert_eq!(real.h_si.len(), params.n_relays());
    debug_assert_eq!(real.h_id.len(), params.n_relays());
    debug_assert_eq!(real.h_ie.len(), params.n_relays());
}

/// Relays whose source→relay capacity reaches `R_o` (with prelog alpha).
pub fn form_decoding_set(params: &SystemParams, real: &ChannelRealization) -> DecodingSet {
    check_relays(params, real);
    let (snr, alpha, ro) = (params.snr(), params.alpha().value(), params.overall_rate());
    let members = real
        .h_si
        .iter()
        .enumerate()
        .filter(|(_, h)| link_capacity(h.norm_sqr(), snr, alpha) >= ro)
        .map(|(i, _)| i)
        .collect();
    DecodingSet { members }
}

pub fn dt_trial(params: &SystemParams, real: &ChannelRealization) -> TrialOutcome {
    let snr = params.snr();
    TrialOutcome {
        outage: link_capacity(real.h_sd.norm_sqr(), snr, 1.0) < params.overall_rate(),
        intercept: link_capacity(real.h_se.norm_sqr(), snr, 1.0) > params.redundancy_rate(),
    }
}

/// Best relay by destination-side gain; ties go to the lowest index.
pub fn select_best_relay(set: &DecodingSet, real: &ChannelRealization) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &i in set.members() {
        let g = real.h_id[i].norm_sqr();
        if best.is_none_or(|(_, bg)| g > bg) {
            best = Some((i, g));
        }
    }
    best.map(|(i, _)| i)
        .ok_or_else(|| SrtError::Usage("best-relay selection needs a non-empty decoding set".into()))
}

/// No relay decoded: relays stay silent, destination fails, eavesdropper
/// only hears the source.
fn silent_relays(params: &SystemParams, real: &ChannelRealization) -> TrialOutcome {
    let alpha = params.alpha().value();
    TrialOutcome {
        outage: true,
        intercept: link_capacity(real.h_se.norm_sqr(), params.snr(), alpha)
            > params.redundancy_rate(),
    }
}

pub fn srs_trial(params: &SystemParams, real: &ChannelRealization) -> TrialOutcome {
    let set = form_decoding_set(params, real);
    srs_outcome(params, real, &set)
}

fn srs_outcome(params: &SystemParams, real: &ChannelRealization, set: &DecodingSet) -> TrialOutcome {
    let Ok(best) = select_best_relay(set, real) else {
        return silent_relays(params, real);
    };
    let (snr, alpha) = (params.snr(), params.alpha().value());
    let eve_gain = real.h_se.norm_sqr() + real.h_ie[best].norm_sqr();
    TrialOutcome {
        outage: link_capacity(real.h_id[best].norm_sqr(), snr, alpha) < params.overall_rate(),
        intercept: link_capacity(eve_gain, snr, alpha) > params.redundancy_rate(),
    }
}

fn restrict(h: &[Complex64], set: &DecodingSet) -> Vec<Complex64> {
    set.members().iter().map(|&i| h[i]).collect()
}

/// Destination-SNR-maximising unit-norm weights: `conj(H_d) / ||H_d||`
/// over the decoding set.
pub fn mrs_weights(set: &DecodingSet, real: &ChannelRealization) -> Result<WeightVector> {
    if set.is_empty() {
        return Err(SrtError::Usage("MRS weights need a non-empty decoding set".into()));
    }
    let hd = restrict(&real.h_id, set);
    let norm = hd.iter().map(|h| h.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(SrtError::Degenerate("relay-destination channel vector is all zero".into()));
    }
    Ok(WeightVector {
        weights: hd.iter().map(|h| h.conj() / norm).collect(),
    })
}

pub fn mrs_trial(params: &SystemParams, real: &ChannelRealization) -> TrialOutcome {
    let set = form_decoding_set(params, real);
    mrs_outcome(params, real, &set)
}

fn mrs_outcome(params: &SystemParams, real: &ChannelRealization, set: &DecodingSet) -> TrialOutcome {
    if set.is_empty() {
        return silent_relays(params, real);
    }
    if set.len() == 1 {
        // Unit-norm weight on a single relay: identical to SRS.
        return srs_outcome(params, real, set);
    }
    let (snr, alpha) = (params.snr(), params.alpha().value());
    // Same as mrs_weights(..).apply(H_e), without materialising the weights.
    let (dest_gain, matched) = set.members().iter().fold(
        (0.0, Complex64::new(0.0, 0.0)),
        |(g, m), &i| (g + real.h_id[i].norm_sqr(), m + real.h_id[i].conj() * real.h_ie[i]),
    );
    // Zero destination gain has probability zero; it means outage and no
    // relay signal reaching E.
    let relay_eve_gain = if dest_gain > 0.0 { matched.norm_sqr() / dest_gain } else { 0.0 };
    TrialOutcome {
        outage: link_capacity(dest_gain, snr, alpha) < params.overall_rate(),
        intercept: link_capacity(real.h_se.norm_sqr() + relay_eve_gain, snr, alpha)
            > params.redundancy_rate(),
    }
}

/// Evaluate one scheme on one realization.
pub fn evaluate(scheme: Scheme, params: &SystemParams, real: &ChannelRealization) -> TrialOutcome {
    match scheme {
        Scheme::Dt => dt_trial(params, real),
        Scheme::Srs => srs_trial(params, real),
        Scheme::Mrs => mrs_trial(params, real),
    }
}

/// Evaluate several schemes on one realization, forming the decoding set once.
pub fn evaluate_many(
    schemes: &[Scheme],
    params: &SystemParams,
    real: &ChannelRealization,
    out: &mut Vec<TrialOutcome>,
) {
    out.clear();
    let set = schemes
        .iter()
        .any(|s| s.uses_relays())
        .then(|| form_decoding_set(params, real));
    for &scheme in schemes {
        out.push(match (scheme, &set) {
            (Scheme::Srs, Some(set)) => srs_outcome(params, real, set),
            (Scheme::Mrs, Some(set)) => mrs_outcome(params, real, set),
            _ => dt_trial(params, real),
        });
    }
}

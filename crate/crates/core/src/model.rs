//! Scenario parameters, rate bookkeeping and per-trial channel generation.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SrtError};
use crate::rng::{ChannelLabel, LinkKind, RngContract};

/// Convert a decibel figure to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `prelog * log2(1 + gain_sq * snr)` in bits/s/Hz.
#[inline]
pub fn link_capacity(gain_sq: f64, snr: f64, prelog: f64) -> f64 {
    debug_assert!(gain_sq >= 0.0 && snr > 0.0 && prelog > 0.0 && prelog <= 1.0);
    prelog * (gain_sq * snr).ln_1p() / std::f64::consts::LN_2
}

/// Capacity prelog applied to relay-scheme links.
///
/// `Full` keeps the single-phase accounting; `Half` charges the two-phase
/// (half-duplex) penalty. Direct transmission always uses `Full`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PhaseFactor {
    #[default]
    Full,
    Half,
}

impl PhaseFactor {
    pub fn value(self) -> f64 {
        match self {
            PhaseFactor::Full => 1.0,
            PhaseFactor::Half => 0.5,
        }
    }

    pub fn from_value(alpha: f64) -> Result<Self> {
        if alpha == 1.0 {
            Ok(PhaseFactor::Full)
        } else if alpha == 0.5 {
            Ok(PhaseFactor::Half)
        } else {
            Err(SrtError::param("alpha", format!("must be 0.5 or 1.0, got {alpha}")))
        }
    }
}

impl fmt::Display for PhaseFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Mean-square fading gains of one relay's three links.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelayGains {
    pub source_relay: f64,
    pub relay_destination: f64,
    pub relay_eavesdropper: f64,
}

impl RelayGains {
    pub fn new(source_relay: f64, relay_destination: f64, relay_eavesdropper: f64) -> Self {
        RelayGains {
            source_relay,
            relay_destination,
            relay_eavesdropper,
        }
    }
}

/// Static description of a scenario. Always valid once constructed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    snr_db: f64,
    snr: f64,
    secrecy_rate: f64,
    overall_rate: f64,
    var_sd: f64,
    var_se: f64,
    relays: Vec<RelayGains>,
    alpha: PhaseFactor,
}

impl SystemParams {
    pub fn builder() -> SystemParamsBuilder {
        SystemParamsBuilder::default()
    }

    /// SNR `P/N_0` as configured, in dB.
    pub fn snr_db(&self) -> f64 {
        self.snr_db
    }

    /// Linear SNR `P/N_0`.
    pub fn snr(&self) -> f64 {
        self.snr
    }

    /// Confidential message rate `R_s`.
    pub fn secrecy_rate(&self) -> f64 {
        self.secrecy_rate
    }

    /// Codeword rate `R_o`.
    pub fn overall_rate(&self) -> f64 {
        self.overall_rate
    }

    /// `R_e = R_o - R_s`, always positive.
    pub fn redundancy_rate(&self) -> f64 {
        self.overall_rate - self.secrecy_rate
    }

    pub fn var_sd(&self) -> f64 {
        self.var_sd
    }

    pub fn var_se(&self) -> f64 {
        self.var_se
    }

    pub fn n_relays(&self) -> usize {
        self.relays.len()
    }

    pub fn relays(&self) -> &[RelayGains] {
        &self.relays
    }

    pub fn alpha(&self) -> PhaseFactor {
        self.alpha
    }

    /// Same scenario at a different codeword rate.
    pub fn with_overall_rate(&self, overall_rate: f64) -> Result<Self> {
        check_rates(self.secrecy_rate, overall_rate)?;
        Ok(SystemParams {
            overall_rate,
            ..self.clone()
        })
    }

    /// `Some(v)` if every relay→eavesdropper link has variance `v`.
    pub fn uniform_relay_eavesdropper_var(&self) -> Option<f64> {
        let first = self.relays.first()?.relay_eavesdropper;
        self.relays
            .iter()
            .all(|r| r.relay_eavesdropper == first)
            .then_some(first)
    }
}

fn check_positive(key: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(SrtError::param(key, format!("must be a finite positive number, got {v}")))
    }
}

fn check_rates(rs: f64, ro: f64) -> Result<()> {
    if !(rs.is_finite() && rs >= 0.0) {
        return Err(SrtError::param("rs", format!("must be finite and >= 0, got {rs}")));
    }
    if !(ro.is_finite() && ro > rs) {
        return Err(SrtError::param(
            "ro",
            format!("overall rate {ro} must exceed the secrecy rate {rs}"),
        ));
    }
    Ok(())
}

/// Builder for [`SystemParams`].
///
/// Defaults: 15 dB SNR, `R_s = 0.2`, `R_o = 1.0`, `var_sd = 1`,
/// `var_se = 0.2`, no relays, relay gains `(2, 2, 0.2)`, `alpha = 1`.
#[derive(Debug, Clone)]
pub struct SystemParamsBuilder {
    snr_db: f64,
    secrecy_rate: f64,
    overall_rate: f64,
    var_sd: f64,
    var_se: f64,
    n_relays: usize,
    uniform: RelayGains,
    profile: Option<Vec<RelayGains>>,
    alpha: f64,
}

impl Default for SystemParamsBuilder {
    fn default() -> Self {
        SystemParamsBuilder {
            snr_db: 15.0,
            secrecy_rate: 0.2,
            overall_rate: 1.0,
            var_sd: 1.0,
            var_se: 0.2,
            n_relays: 0,
            uniform: RelayGains::new(2.0, 2.0, 0.2),
            profile: None,
            alpha: 1.0,
        }
    }
}

impl SystemParamsBuilder {
    pub fn snr_db(mut self, snr_db: f64) -> Self {
        self.snr_db = snr_db;
        self
    }

    pub fn secrecy_rate(mut self, rs: f64) -> Self {
        self.secrecy_rate = rs;
        self
    }

    pub fn overall_rate(mut self, ro: f64) -> Self {
        self.overall_rate = ro;
        self
    }

    /// Source→destination and source→eavesdropper mean-square gains.
    pub fn direct_variances(mut self, var_sd: f64, var_se: f64) -> Self {
        self.var_sd = var_sd;
        self.var_se = var_se;
        self
    }

    /// `n` relays sharing the uniform relay gains.
    pub fn relays(mut self, n: usize) -> Self {
        self.n_relays = n;
        self.profile = None;
        self
    }

    pub fn relay_variances(mut self, si: f64, id: f64, ie: f64) -> Self {
        self.uniform = RelayGains::new(si, id, ie);
        self
    }

    /// Per-relay gains; overrides `relays` and `relay_variances`.
    pub fn relay_profile(mut self, profile: Vec<RelayGains>) -> Self {
        self.n_relays = profile.len();
        self.profile = Some(profile);
        self
    }

    pub fn alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn build(self) -> Result<SystemParams> {
        if !self.snr_db.is_finite() {
            return Err(SrtError::param("snr-db", "must be finite"));
        }
        check_rates(self.secrecy_rate, self.overall_rate)?;
        check_positive("var-sd", self.var_sd)?;
        check_positive("var-se", self.var_se)?;
        let alpha = PhaseFactor::from_value(self.alpha)?;
        let relays = self
            .profile
            .unwrap_or_else(|| vec![self.uniform; self.n_relays]);
        for r in &relays {
            check_positive("var-si", r.source_relay)?;
            check_positive("var-id", r.relay_destination)?;
            check_positive("var-ie", r.relay_eavesdropper)?;
        }
        let snr = db_to_linear(self.snr_db);
        check_positive("snr-db", snr)?;
        Ok(SystemParams {
            snr_db: self.snr_db,
            snr,
            secrecy_rate: self.secrecy_rate,
            overall_rate: self.overall_rate,
            var_sd: self.var_sd,
            var_se: self.var_se,
            relays,
            alpha,
        })
    }
}

/// One trial's fading coefficients for every link in the scenario.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChannelRealization {
    pub h_sd: Complex64,
    pub h_se: Complex64,
    pub h_si: Vec<Complex64>,
    pub h_id: Vec<Complex64>,
    pub h_ie: Vec<Complex64>,
}

impl ChannelRealization {
    /// Overwrite `self` with the draw for `rng`, reusing the vector buffers.
    pub fn fill(&mut self, params: &SystemParams, rng: &RngContract) {
        self.h_sd = rng.complex_gaussian(ChannelLabel::SD, params.var_sd);
        self.h_se = rng.complex_gaussian(ChannelLabel::SE, params.var_se);
        self.h_si.clear();
        self.h_id.clear();
        self.h_ie.clear();
        for (i, g) in params.relays.iter().enumerate() {
            self.h_si.push(rng.complex_gaussian(
                ChannelLabel::relay(LinkKind::SourceRelay, i),
                g.source_relay,
            ));
            self.h_id.push(rng.complex_gaussian(
                ChannelLabel::relay(LinkKind::RelayDestination, i),
                g.relay_destination,
            ));
            self.h_ie.push(rng.complex_gaussian(
                ChannelLabel::relay(LinkKind::RelayEavesdropper, i),
                g.relay_eavesdropper,
            ));
        }
    }
}

/// Draw every link of one trial. Pure in `(params, rng)`.
pub fn draw_realization(params: &SystemParams, rng: &RngContract) -> ChannelRealization {
    let mut real = ChannelRealization::default();
    real.fill(params, rng);
    real
}

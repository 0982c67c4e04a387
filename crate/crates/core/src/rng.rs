//! Counter-based random streams.
//!
//! Every random number in a simulation is a pure function of
//! `(master_seed, stream, trial_index, channel_label)`, computed with the
//! Philox4x32-10 block function. There is no generator state to advance, so a
//! trial produces the same channel draw no matter which worker evaluates it,
//! in what order, or how the trial range was split into batches.
//!
//! Counter layout: `[trial_lo, trial_hi, label, stream]`; key: `[seed_lo, seed_hi]`.

use std::f64::consts::TAU;

use num_complex::Complex64;

const PHILOX_M0: u32 = 0xD251_1F53;
const PHILOX_M1: u32 = 0xCD9E_8D57;
const PHILOX_W0: u32 = 0x9E37_79B9;
const PHILOX_W1: u32 = 0xBB67_AE85;
const PHILOX_ROUNDS: usize = 10;

#[inline(always)]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = u64::from(a) * u64::from(b);
    ((p >> 32) as u32, p as u32)
}

/// Philox4x32 with 10 rounds.
#[inline]
pub fn philox4x32(counter: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let mut ctr = counter;
    let mut key = key;
    for round in 0..PHILOX_ROUNDS {
        if round > 0 {
            key[0] = key[0].wrapping_add(PHILOX_W0);
            key[1] = key[1].wrapping_add(PHILOX_W1);
        }
        let (hi0, lo0) = mulhilo(PHILOX_M0, ctr[0]);
        let (hi1, lo1) = mulhilo(PHILOX_M1, ctr[2]);
        ctr = [hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0];
    }
    ctr
}

/// The link a random draw belongs to. The discriminants are part of the
/// reproducibility contract and must never be renumbered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum LinkKind {
    SourceDestination = 0,
    SourceEavesdropper = 1,
    SourceRelay = 2,
    RelayDestination = 3,
    RelayEavesdropper = 4,
}

/// `(link kind, relay index)`; relay index is 0 for the two direct links.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChannelLabel {
    pub kind: LinkKind,
    pub relay: u32,
}

impl ChannelLabel {
    pub const SD: ChannelLabel = ChannelLabel {
        kind: LinkKind::SourceDestination,
        relay: 0,
    };
    pub const SE: ChannelLabel = ChannelLabel {
        kind: LinkKind::SourceEavesdropper,
        relay: 0,
    };

    pub fn relay(kind: LinkKind, relay: usize) -> Self {
        assert!(relay < (1 << 24), "relay index out of label range");
        ChannelLabel {
            kind,
            relay: relay as u32,
        }
    }

    /// Stable 32-bit encoding: kind in the top byte, relay index below.
    pub fn code(self) -> u32 {
        (u32::from(self.kind as u8) << 24) | self.relay
    }
}

/// Identifies one trial's randomness.
///
/// `stream` separates independent families of trials under one master seed
/// (distinct sweep grid points, decoupled intercept draws).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngContract {
    pub master_seed: u64,
    pub stream: u32,
    pub trial_index: u64,
}

impl RngContract {
    pub fn new(master_seed: u64, trial_index: u64) -> Self {
        RngContract {
            master_seed,
            stream: 0,
            trial_index,
        }
    }

    pub fn with_stream(self, stream: u32) -> Self {
        RngContract { stream, ..self }
    }

    /// 128 raw bits for the given link.
    #[inline]
    pub fn block(&self, label: ChannelLabel) -> [u32; 4] {
        let counter = [
            self.trial_index as u32,
            (self.trial_index >> 32) as u32,
            label.code(),
            self.stream,
        ];
        let key = [self.master_seed as u32, (self.master_seed >> 32) as u32];
        philox4x32(counter, key)
    }

    /// Two uniforms in the open interval (0, 1) with 52-bit resolution.
    #[inline]
    pub fn uniform_pair(&self, label: ChannelLabel) -> (f64, f64) {
        let b = self.block(label);
        let x0 = (u64::from(b[0]) << 32) | u64::from(b[1]);
        let x1 = (u64::from(b[2]) << 32) | u64::from(b[3]);
        (open_unit(x0), open_unit(x1))
    }

    /// Circularly-symmetric complex Gaussian with `E|h|^2 = variance`.
    ///
    /// Drawn in polar form: `|h|^2 = -variance * ln(u1)` is exactly
    /// exponential and the phase `2*pi*u2` is uniform, so real and imaginary
    /// parts are independent N(0, variance/2).
    #[inline]
    pub fn complex_gaussian(&self, label: ChannelLabel, variance: f64) -> Complex64 {
        let (u1, u2) = self.uniform_pair(label);
        let r = (-variance * u1.ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        Complex64::new(r * c, r * s)
    }
}

#[inline(always)]
fn open_unit(x: u64) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 52) as f64;
    ((x >> 12) as f64 + 0.5) * SCALE
}

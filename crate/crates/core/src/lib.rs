//! Security-reliability tradeoff engine for wiretap transmission with
//! optional decode-and-forward relay selection under Rayleigh fading.
//!
//! * [`model`]: scenario parameters and channel draws
//! * [`schemes`]: per-trial outage and intercept events for DT, SRS and MRS
//! * [`analytic`]: closed-form oracles
//! * [`montecarlo`]: the reproducible trial engine and estimators
//! * [`sweep`]: tradeoff curves over the codeword rate and dominance checks
//! * [`cli`]: the `srt-sim` command line

pub mod analytic;
pub mod cli;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod rng;
pub mod schemes;
pub mod sweep;

pub use error::{Result, SrtError};
pub use model::{PhaseFactor, RelayGains, SystemParams};
pub use schemes::Scheme;

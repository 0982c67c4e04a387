//! `srt-sim` command line.
//!
//! Every run flag mirrors a config-file key. Resolution order, lowest to
//! highest priority: built-in (or preset) defaults, `SRT_SIM_SEED`, the
//! `--config` file, explicit flags.

pub mod config;
pub mod output;
pub mod validate;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Result, SrtError};
use crate::montecarlo::Coupling;
use crate::schemes::Scheme;
use crate::sweep::{analytic_dt_curve, build_curves, SrtCurve, SweepOptions};

pub use config::RunConfig;
pub use output::{OutputFormat, ResultRecord, CSV_HEADER};
pub use validate::{run_validation, ValidationReport};

#[derive(Debug, Parser)]
#[command(
    name = "srt-sim",
    version,
    about = "Intercept-vs-outage tradeoff of direct and relay-selection transmission under Rayleigh fading"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo curves for one scenario (single --rs and --relays value).
    Simulate(RunArgs),
    /// Monte Carlo curves for every combination of comma-separated --rs and --relays values.
    Sweep(RunArgs),
    /// Cross-check every closed-form oracle against simulation; nonzero exit on failure.
    Validate(RunArgs),
    /// Reproduce a figure's scenario; run flags override the preset's values.
    Preset {
        #[arg(value_enum)]
        figure: Figure,
        #[command(flatten)]
        args: RunArgs,
    },
    /// Closed-form direct-transmission curve, no simulation.
    DtCurve(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    /// DT closed form, R_s in {0.2, 0.6}, var_sd=1, var_se=0.1.
    Fig3,
    /// DT, SRS and MRS with N=4, R_s in {0.2, 0.6}.
    Fig5,
    /// DT, SRS and MRS with N in {4, 8}, R_s=0.6.
    Fig6,
}

/// Scenario and run flags. Unset flags fall back to the config file, then to
/// the defaults shown.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Flat `key = value` file using the flag names as keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated schemes: dt, srs, mrs [default: dt,srs,mrs]
    #[arg(long)]
    pub scheme: Option<String>,
    /// Number of relays N (comma-separated list for sweep) [default: 4]
    #[arg(long, allow_hyphen_values = true)]
    pub relays: Option<String>,
    /// Secrecy rate R_s in bits/s/Hz (comma-separated list for sweep) [default: 0.6]
    #[arg(long, allow_hyphen_values = true)]
    pub rs: Option<String>,
    /// Smallest codeword rate R_o [default: rs + 0.05]
    #[arg(long = "ro-min", allow_hyphen_values = true)]
    pub ro_min: Option<String>,
    /// Largest codeword rate R_o [default: rs + 4]
    #[arg(long = "ro-max", allow_hyphen_values = true)]
    pub ro_max: Option<String>,
    /// Grid points, geometric in R_o - R_s [default: 40]
    #[arg(long = "ro-points", allow_hyphen_values = true)]
    pub ro_points: Option<String>,
    /// SNR P/N_0 in dB [default: 15]
    #[arg(long = "snr-db", allow_hyphen_values = true)]
    pub snr_db: Option<String>,
    /// Relay-link capacity prelog, 1.0 or 0.5 [default: 1.0]
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Monte Carlo trials per grid point [default: 1000000]
    #[arg(long, allow_hyphen_values = true)]
    pub trials: Option<String>,
    /// Master seed [default: $SRT_SIM_SEED, else 1]
    #[arg(long, allow_hyphen_values = true)]
    pub seed: Option<String>,
    /// Worker threads, 0 for all cores [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub workers: Option<String>,
    /// Output file [default: stdout]
    #[arg(long)]
    pub out: Option<String>,
    /// Output format: csv or json (JSON lines) [default: csv]
    #[arg(long)]
    pub format: Option<String>,
    /// Source-destination mean-square gain [default: 1]
    #[arg(long = "var-sd", allow_hyphen_values = true)]
    pub var_sd: Option<String>,
    /// Source-eavesdropper mean-square gain [default: 0.2]
    #[arg(long = "var-se", allow_hyphen_values = true)]
    pub var_se: Option<String>,
    /// Source-relay gain, one value or one per relay [default: 2]
    #[arg(long = "var-si", allow_hyphen_values = true)]
    pub var_si: Option<String>,
    /// Relay-destination gain, one value or one per relay [default: 2]
    #[arg(long = "var-id", allow_hyphen_values = true)]
    pub var_id: Option<String>,
    /// Relay-eavesdropper gain, one value or one per relay [default: 0.2]
    #[arg(long = "var-ie", allow_hyphen_values = true)]
    pub var_ie: Option<String>,
    /// Judge intercept events on an independent channel draw (true/false) [default: false]
    #[arg(long)]
    pub decouple: Option<String>,
}

impl RunArgs {
    fn pairs(&self) -> Vec<(&'static str, &str)> {
        [
            ("scheme", &self.scheme),
            ("relays", &self.relays),
            ("rs", &self.rs),
            ("ro-min", &self.ro_min),
            ("ro-max", &self.ro_max),
            ("ro-points", &self.ro_points),
            ("snr-db", &self.snr_db),
            ("alpha", &self.alpha),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("workers", &self.workers),
            ("out", &self.out),
            ("format", &self.format),
            ("var-sd", &self.var_sd),
            ("var-se", &self.var_se),
            ("var-si", &self.var_si),
            ("var-id", &self.var_id),
            ("var-ie", &self.var_ie),
            ("decouple", &self.decouple),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
        .collect()
    }

    /// Layer env, config file and flags over `defaults`, then validate.
    pub fn resolve(&self, mut defaults: RunConfig) -> Result<RunConfig> {
        defaults.apply_env()?;
        if let Some(path) = &self.config {
            defaults.apply_file(path)?;
        }
        for (key, value) in self.pairs() {
            defaults.set(key, value)?;
        }
        defaults.validate()?;
        Ok(defaults)
    }
}

impl Figure {
    pub fn defaults(self) -> RunConfig {
        let base = RunConfig::default();
        match self {
            Figure::Fig3 => RunConfig {
                schemes: vec![Scheme::Dt],
                relays: vec![0],
                rs: vec![0.2, 0.6],
                var_sd: 1.0,
                var_se: 0.1,
                ..base
            },
            Figure::Fig5 => RunConfig {
                relays: vec![4],
                rs: vec![0.2, 0.6],
                default_redundancy_max: 8.0,
                ..base
            },
            Figure::Fig6 => RunConfig {
                relays: vec![4, 8],
                rs: vec![0.6],
                default_redundancy_max: 8.0,
                ..base
            },
        }
    }
}

fn sweep_options(config: &RunConfig) -> SweepOptions {
    SweepOptions {
        n_trials: config.trials,
        master_seed: config.seed,
        coupling: if config.decouple { Coupling::Independent } else { Coupling::Shared },
        workers: config.workers,
    }
}

/// Monte Carlo curves for every `(rs, relays)` combination. DT does not use
/// relays, so it is run once per secrecy rate.
pub fn simulate_curves(config: &RunConfig) -> Result<Vec<SrtCurve>> {
    let opts = sweep_options(config);
    let relay_schemes: Vec<Scheme> = config.schemes.iter().copied().filter(|s| s.uses_relays()).collect();
    let mut curves = Vec::new();
    for &rs in &config.rs {
        let grid = config.grid(rs)?;
        if config.schemes.contains(&Scheme::Dt) {
            let p = config.params(rs, 0)?;
            curves.extend(build_curves(&p, &[Scheme::Dt], &grid, &opts)?);
        }
        if relay_schemes.is_empty() {
            continue;
        }
        for &n in &config.relays {
            let p = config.params(rs, n)?;
            curves.extend(build_curves(&p, &relay_schemes, &grid, &opts)?);
        }
    }
    Ok(curves)
}

pub fn analytic_curves(config: &RunConfig) -> Result<Vec<SrtCurve>> {
    config
        .rs
        .iter()
        .map(|&rs| analytic_dt_curve(&config.params(rs, 0)?, &config.grid(rs)?))
        .collect()
}

fn records(curves: &[SrtCurve]) -> Vec<ResultRecord> {
    curves.iter().flat_map(ResultRecord::from_curve).collect()
}

fn emit(config: &RunConfig, curves: &[SrtCurve]) -> Result<()> {
    output::write_records(&records(curves), config.format, config.out.as_deref())
}

fn single_valued(config: &RunConfig) -> Result<()> {
    if config.rs.len() != 1 {
        return Err(SrtError::param("rs", "simulate takes one value; use `sweep` for lists"));
    }
    if config.relays.len() != 1 {
        return Err(SrtError::param("relays", "simulate takes one value; use `sweep` for lists"));
    }
    Ok(())
}

/// `simulate`: run and write the result file.
pub fn cmd_simulate(config: &RunConfig) -> Result<()> {
    single_valued(config)?;
    emit(config, &simulate_curves(config)?)
}

pub fn cmd_sweep(config: &RunConfig) -> Result<()> {
    emit(config, &simulate_curves(config)?)
}

pub fn cmd_dt_curve(config: &RunConfig) -> Result<()> {
    emit(config, &analytic_curves(config)?)
}

pub fn cmd_preset(figure: Figure, config: &RunConfig) -> Result<()> {
    match figure {
        Figure::Fig3 => cmd_dt_curve(config),
        Figure::Fig5 | Figure::Fig6 => cmd_sweep(config),
    }
}

/// Exit status of a finished command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    ChecksFailed,
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Simulate(args) => cmd_simulate(&args.resolve(RunConfig::default())?),
        Command::Sweep(args) => cmd_sweep(&args.resolve(RunConfig::default())?),
        Command::DtCurve(args) => {
            let defaults = RunConfig {
                schemes: vec![Scheme::Dt],
                relays: vec![0],
                ..Figure::Fig3.defaults()
            };
            cmd_dt_curve(&args.resolve(defaults)?)
        }
        Command::Preset { figure, args } => cmd_preset(figure, &args.resolve(figure.defaults())?),
        Command::Validate(args) => {
            let report = run_validation(&args.resolve(RunConfig::default())?)?;
            for check in &report.checks {
                println!("{check}");
            }
            return Ok(if report.passed() { Outcome::Success } else { Outcome::ChecksFailed });
        }
    }?;
    Ok(Outcome::Success)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn every_flag_is_a_config_key() {
        let args = RunArgs {
            scheme: Some("dt".into()),
            relays: Some("1".into()),
            rs: Some("0.1".into()),
            ro_min: Some("0.2".into()),
            ro_max: Some("1".into()),
            ro_points: Some("3".into()),
            snr_db: Some("10".into()),
            alpha: Some("0.5".into()),
            trials: Some("10".into()),
            seed: Some("4".into()),
            workers: Some("2".into()),
            out: Some("o.csv".into()),
            format: Some("json".into()),
            var_sd: Some("1".into()),
            var_se: Some("1".into()),
            var_si: Some("1".into()),
            var_id: Some("1".into()),
            var_ie: Some("1".into()),
            decouple: Some("true".into()),
            config: None,
        };
        let pairs = args.pairs();
        assert_eq!(pairs.len(), config::KEYS.len());
        for (k, _) in &pairs {
            assert!(config::KEYS.contains(k));
        }
        let c = args.resolve(RunConfig::default()).unwrap();
        assert_eq!(c.seed, 4);
        assert_eq!(c.workers, Some(2));
        assert!(c.decouple);
    }

    #[test]
    fn presets_match_figure_scenarios() {
        let f3 = Figure::Fig3.defaults();
        assert_eq!((f3.var_sd, f3.var_se, f3.snr_db), (1.0, 0.1, 15.0));
        assert_eq!(f3.rs, vec![0.2, 0.6]);
        let f5 = Figure::Fig5.defaults();
        assert_eq!(f5.relays, vec![4]);
        assert_eq!((f5.var_sd, f5.var_se, f5.var_si[0], f5.var_id[0], f5.var_ie[0]), (1.0, 0.2, 2.0, 2.0, 0.2));
        let f6 = Figure::Fig6.defaults();
        assert_eq!(f6.relays, vec![4, 8]);
        assert_eq!(f6.rs, vec![0.6]);
        for f in [f3, f5, f6] {
            f.validate().unwrap();
        }
    }

    #[test]
    fn simulate_rejects_lists() {
        let c = RunConfig {
            rs: vec![0.2, 0.6],
            ..RunConfig::default()
        };
        assert!(cmd_simulate(&c).unwrap_err().to_string().contains("`rs`"));
    }
}

//! Run configuration: defaults, flat `key = value` config files and flag
//! overrides, all validated through one code path.

use std::path::{Path, PathBuf};

use crate::error::{Result, SrtError};
use crate::model::{RelayGains, SystemParams};
use crate::schemes::Scheme;
use crate::sweep::{ro_grid, DEFAULT_GRID_POINTS, DEFAULT_REDUNDANCY_MAX, DEFAULT_REDUNDANCY_MIN};

use super::output::OutputFormat;

pub const SEED_ENV: &str = "SRT_SIM_SEED";
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_TRIALS: u64 = 1_000_000;

/// Keys accepted in config files; identical to the long flag names.
pub const KEYS: &[&str] = &[
    "scheme", "relays", "rs", "ro-min", "ro-max", "ro-points", "snr-db", "alpha", "trials", "seed",
    "workers", "out", "format", "var-sd", "var-se", "var-si", "var-id", "var-ie", "decouple",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub schemes: Vec<Scheme>,
    pub relays: Vec<usize>,
    pub rs: Vec<f64>,
    /// Absolute codeword-rate bounds; `None` means `rs + default redundancy`.
    pub ro_min: Option<f64>,
    pub ro_max: Option<f64>,
    pub ro_points: usize,
    /// Upper redundancy used when `ro_max` is unset.
    pub default_redundancy_max: f64,
    pub snr_db: f64,
    pub alpha: f64,
    pub var_sd: f64,
    pub var_se: f64,
    /// One value (uniform) or one per relay.
    pub var_si: Vec<f64>,
    pub var_id: Vec<f64>,
    pub var_ie: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub decouple: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schemes: Scheme::ALL.to_vec(),
            relays: vec![4],
            rs: vec![0.6],
            ro_min: None,
            ro_max: None,
            ro_points: DEFAULT_GRID_POINTS,
            default_redundancy_max: DEFAULT_REDUNDANCY_MAX,
            snr_db: 15.0,
            alpha: 1.0,
            var_sd: 1.0,
            var_se: 0.2,
            var_si: vec![2.0],
            var_id: vec![2.0],
            var_ie: vec![0.2],
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            workers: None,
            out: None,
            format: OutputFormat::Csv,
            decouple: false,
        }
    }
}

fn list<T>(key: &str, value: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    let items: Vec<T> = value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse)
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(SrtError::param(key, "empty list"));
    }
    Ok(items)
}

fn float(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| SrtError::param(key, format!("`{v}` is not a finite number")))
}

/// Non-negative integer; scientific notation like `1e6` is accepted.
fn count(key: &str, v: &str) -> Result<u64> {
    let v = v.trim();
    if let Ok(n) = v.parse::<u64>() {
        return Ok(n);
    }
    match v.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x < u64::MAX as f64 => Ok(x as u64),
        _ => Err(SrtError::param(key, format!("`{v}` is not a non-negative integer"))),
    }
}

fn boolean(key: &str, v: &str) -> Result<bool> {
    match v.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(SrtError::param(key, format!("`{v}` is not a boolean"))),
    }
}

impl RunConfig {
    /// Apply one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "scheme" => self.schemes = list(key, value, |s| s.parse())?,
            "relays" => self.relays = list(key, value, |s| Ok(count(key, s)? as usize))?,
            "rs" => self.rs = list(key, value, |s| float(key, s))?,
            "ro-min" => self.ro_min = Some(float(key, value)?),
            "ro-max" => self.ro_max = Some(float(key, value)?),
            "ro-points" => self.ro_points = count(key, value)? as usize,
            "snr-db" => self.snr_db = float(key, value)?,
            "alpha" => self.alpha = float(key, value)?,
            "trials" => self.trials = count(key, value)?,
            "seed" => self.seed = count(key, value)?,
            "workers" => {
                let w = count(key, value)? as usize;
                self.workers = (w > 0).then_some(w);
            }
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "format" => self.format = value.parse()?,
            "var-sd" => self.var_sd = float(key, value)?,
            "var-se" => self.var_se = float(key, value)?,
            "var-si" => self.var_si = list(key, value, |s| float(key, s))?,
            "var-id" => self.var_id = list(key, value, |s| float(key, s))?,
            "var-ie" => self.var_ie = list(key, value, |s| float(key, s))?,
            "decouple" => self.decouple = boolean(key, value)?,
            other => return Err(SrtError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Seed fallback from the environment, applied before file and flags.
    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.seed = count(SEED_ENV, &v)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            SrtError::param("config", format!("cannot read {}: {e}", path.display()))
        })?;
        for (key, value) in parse_config_text(&text)? {
            self.set(&key, &value)?;
        }
        Ok(())
    }

    /// Check every invariant; the error names the offending key.
    pub fn validate(&self) -> Result<()> {
        if self.schemes.is_empty() {
            return Err(SrtError::param("scheme", "no scheme selected"));
        }
        if self.trials == 0 {
            return Err(SrtError::param("trials", "must be at least 1"));
        }
        if self.ro_points == 0 {
            return Err(SrtError::param("ro-points", "must be at least 1"));
        }
        if self.schemes.iter().any(|s| s.uses_relays()) && self.relays.contains(&0) {
            return Err(SrtError::param("relays", "relay schemes need at least one relay"));
        }
        for &rs in &self.rs {
            self.grid(rs)?;
            for &n in &self.relays {
                self.params(rs, n)?;
            }
        }
        Ok(())
    }

    fn per_relay(key: &str, values: &[f64], n: usize) -> Result<Vec<f64>> {
        match values.len() {
            1 => Ok(vec![values[0]; n]),
            len if len == n => Ok(values.to_vec()),
            len => Err(SrtError::param(
                key,
                format!("{len} values given for {n} relays (give 1 or {n})"),
            )),
        }
    }

    /// Scenario at secrecy rate `rs` with `n` relays, at the first grid rate.
    pub fn params(&self, rs: f64, n: usize) -> Result<SystemParams> {
        let si = Self::per_relay("var-si", &self.var_si, n)?;
        let id = Self::per_relay("var-id", &self.var_id, n)?;
        let ie = Self::per_relay("var-ie", &self.var_ie, n)?;
        let profile = (0..n).map(|i| RelayGains::new(si[i], id[i], ie[i])).collect();
        let ro = self.grid(rs)?[0];
        SystemParams::builder()
            .snr_db(self.snr_db)
            .secrecy_rate(rs)
            .overall_rate(ro)
            .direct_variances(self.var_sd, self.var_se)
            .relay_profile(profile)
            .alpha(self.alpha)
            .build()
    }

    /// Codeword-rate grid for secrecy rate `rs`, geometric in the redundancy.
    pub fn grid(&self, rs: f64) -> Result<Vec<f64>> {
        let re_min = match self.ro_min {
            Some(ro) if ro <= rs => {
                return Err(SrtError::param(
                    "ro-min",
                    format!("{ro} must exceed the secrecy rate {rs}"),
                ))
            }
            Some(ro) => ro - rs,
            None => DEFAULT_REDUNDANCY_MIN,
        };
        let re_max = match self.ro_max {
            Some(ro) => ro - rs,
            None => self.default_redundancy_max,
        };
        ro_grid(rs, re_min, re_max, self.ro_points)
    }
}

/// Parse a flat `key = value` file. `#` starts a comment; blank lines are
/// ignored; unknown keys are rejected.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            SrtError::param("config", format!("line {}: expected `key = value`", lineno + 1))
        })?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(SrtError::UnknownKey(key.to_string()));
        }
        let value = value.trim().trim_matches('"');
        pairs.push((key.to_string(), value.to_string()));
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn config_text_parsing() {
        let pairs = parse_config_text(
            "# scenario\nscheme = dt, srs\nrelays=8\n\nrs = 0.2 # inline comment\nout = \"x.csv\"\n",
        )
        .unwrap();
        assert_eq!(pairs.len(), 4);
        assert_eq!(pairs[3], ("out".to_string(), "x.csv".to_string()));
        let mut c = RunConfig::default();
        for (k, v) in pairs {
            c.set(&k, &v).unwrap();
        }
        assert_eq!(c.schemes, vec![Scheme::Dt, Scheme::Srs]);
        assert_eq!(c.relays, vec![8]);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(parse_config_text("colour = red"), Err(SrtError::UnknownKey(k)) if k == "colour"));
        assert!(parse_config_text("no equals sign").is_err());
        assert!(RunConfig::default().set("bogus", "1").is_err());
    }

    #[test]
    fn bad_alpha_names_the_key() {
        let mut c = RunConfig::default();
        c.set("alpha", "0.7").unwrap();
        let err = c.validate().unwrap_err();
        assert!(err.to_string().contains("`alpha`"), "{err}");
    }

    #[test]
    fn value_errors_name_the_key() {
        let mut c = RunConfig::default();
        for (k, v) in [("trials", "many"), ("rs", "x"), ("scheme", "af"), ("format", "xml"), ("decouple", "maybe")] {
            let err = c.set(k, v).unwrap_err();
            assert!(err.to_string().contains(&format!("`{k}`")), "{err}");
        }
        c.set("ro-min", "0.5").unwrap();
        assert!(c.validate().unwrap_err().to_string().contains("ro-min"));
    }

    #[test]
    fn scientific_counts() {
        let mut c = RunConfig::default();
        c.set("trials", "1e5").unwrap();
        assert_eq!(c.trials, 100_000);
        assert!(c.set("trials", "1.5").is_err());
    }

    #[test]
    fn per_relay_variances() {
        let mut c = RunConfig::default();
        c.set("relays", "3").unwrap();
        c.set("var-ie", "0.1,0.2,0.3").unwrap();
        let p = c.params(0.6, 3).unwrap();
        assert_eq!(p.relays()[2].relay_eavesdropper, 0.3);
        c.set("relays", "4").unwrap();
        assert!(c.validate().unwrap_err().to_string().contains("var-ie"));
    }

    #[test]
    fn grid_defaults_follow_secrecy_rate() {
        let c = RunConfig::default();
        let g = c.grid(0.2).unwrap();
        assert_eq!(g.len(), 40);
        assert!((g[0] - 0.25).abs() < 1e-15);
        assert!((g[39] - 4.2).abs() < 1e-15);
    }
}

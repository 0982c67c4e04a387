//! Result records and their CSV / JSON-lines encodings.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SrtError};
use crate::sweep::SrtCurve;

pub const CSV_HEADER: &str =
    "scheme,n_relays,rs,ro,snr_db,alpha,op_hat,op_lo,op_hi,ip_hat,ip_lo,ip_hi,trials,seed";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = SrtError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" | "jsonl" => Ok(OutputFormat::Json),
            other => Err(SrtError::param("format", format!("expected csv or json, got `{other}`"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

/// One curve point, flattened for plotting tools.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub scheme: String,
    pub n_relays: usize,
    pub rs: f64,
    pub ro: f64,
    pub snr_db: f64,
    pub alpha: f64,
    pub op_hat: f64,
    pub op_lo: f64,
    pub op_hi: f64,
    pub ip_hat: f64,
    pub ip_lo: f64,
    pub ip_hi: f64,
    pub trials: u64,
    pub seed: u64,
}

impl ResultRecord {
    pub fn from_curve(curve: &SrtCurve) -> Vec<ResultRecord> {
        let p = &curve.params;
        let n_relays = if curve.scheme.uses_relays() { p.n_relays() } else { 0 };
        curve
            .points
            .iter()
            .map(|pt| ResultRecord {
                scheme: curve.scheme.to_string(),
                n_relays,
                rs: p.secrecy_rate(),
                ro: pt.overall_rate,
                snr_db: p.snr_db(),
                alpha: p.alpha().value(),
                op_hat: pt.op.hat,
                op_lo: pt.op.lo,
                op_hi: pt.op.hi,
                ip_hat: pt.ip.hat,
                ip_lo: pt.ip.lo,
                ip_hi: pt.ip.hi,
                trials: pt.trials,
                seed: pt.master_seed,
            })
            .collect()
    }

    /// CSV row. Floats use the shortest representation that parses back to
    /// the same value.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.scheme,
            self.n_relays,
            self.rs,
            self.ro,
            self.snr_db,
            self.alpha,
            self.op_hat,
            self.op_lo,
            self.op_hi,
            self.ip_hat,
            self.ip_lo,
            self.ip_hi,
            self.trials,
            self.seed
        )
    }

    pub fn parse_csv_row(line: &str) -> Result<Self> {
        let f: Vec<&str> = line.trim_end().split(',').collect();
        if f.len() != 14 {
            return Err(SrtError::Domain(format!("expected 14 CSV fields, got {}", f.len())));
        }
        let num = |i: usize| -> Result<f64> {
            f[i].parse()
                .map_err(|_| SrtError::Domain(format!("bad number `{}` in column {i}", f[i])))
        };
        let int = |i: usize| -> Result<u64> {
            f[i].parse()
                .map_err(|_| SrtError::Domain(format!("bad integer `{}` in column {i}", f[i])))
        };
        Ok(ResultRecord {
            scheme: f[0].to_string(),
            n_relays: int(1)? as usize,
            rs: num(2)?,
            ro: num(3)?,
            snr_db: num(4)?,
            alpha: num(5)?,
            op_hat: num(6)?,
            op_lo: num(7)?,
            op_hi: num(8)?,
            ip_hat: num(9)?,
            ip_lo: num(10)?,
            ip_hi: num(11)?,
            trials: int(12)?,
            seed: int(13)?,
        })
    }
}

pub fn render(records: &[ResultRecord], format: OutputFormat) -> String {
    let mut s = String::new();
    match format {
        OutputFormat::Csv => {
            s.push_str(CSV_HEADER);
            s.push('\n');
            for r in records {
                s.push_str(&r.csv_row());
                s.push('\n');
            }
        }
        OutputFormat::Json => {
            for r in records {
                s.push_str(&serde_json::to_string(r).expect("records serialize"));
                s.push('\n');
            }
        }
    }
    s
}

/// Write the whole output in one go; `None` means stdout.
pub fn write_records(records: &[ResultRecord], format: OutputFormat, out: Option<&Path>) -> Result<()> {
    let body = render(records, format);
    match out {
        Some(path) => std::fs::write(path, body).map_err(|source| SrtError::Output {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

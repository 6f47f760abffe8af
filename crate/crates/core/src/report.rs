//! CSV rows and run manifests emitted by the command-line tool.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{ObstacleLength, ScenarioConfig};
use crate::error::{invalid, Result};

pub const CSV_HEADER: &str = "method,lambda,lambda0,L,R,k_min,value,stderr,n_trials,seed";

/// Probabilities in `[0.1, 1]` print with nine decimals, anything else in
/// scientific notation with nine significant digits.
pub fn format_probability(p: f64) -> String {
    if p == 0.0 {
        "0.000000000".to_string()
    } else if (0.1..=1.0).contains(&p.abs()) {
        format!("{p:.9}")
    } else {
        format!("{p:.8e}")
    }
}

/// One evaluated point of a parameter sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub method: String,
    pub lambda: f64,
    pub lambda0: f64,
    pub length: ObstacleLength,
    pub range: f64,
    pub k_min: u32,
    pub value: f64,
    pub stderr: Option<f64>,
    pub n_trials: Option<u64>,
    pub seed: Option<u64>,
}

impl SweepRow {
    pub fn to_csv_line(&self) -> String {
        let mut line = String::new();
        write!(
            line,
            "{},{},{},{},{},{},{},",
            self.method,
            self.lambda,
            self.lambda0,
            self.length,
            self.range,
            self.k_min,
            format_probability(self.value)
        )
        .expect("write to String");
        if let Some(se) = self.stderr {
            line.push_str(&format_probability(se));
        }
        line.push(',');
        if let Some(n) = self.n_trials {
            write!(line, "{n}").expect("write to String");
        }
        line.push(',');
        if let Some(s) = self.seed {
            write!(line, "{s}").expect("write to String");
        }
        line
    }

    pub fn from_csv_line(line: &str) -> Result<Self> {
        let fields: Vec<&str> = line.trim_end_matches('\r').split(',').collect();
        if fields.len() != 10 {
            return Err(invalid(format!(
                "expected 10 CSV fields, got {}: {line:?}",
                fields.len()
            )));
        }
        fn num<T: std::str::FromStr>(name: &str, s: &str) -> Result<T> {
            s.parse()
                .map_err(|_| invalid(format!("cannot parse {name} from {s:?}")))
        }
        fn opt<T: std::str::FromStr>(name: &str, s: &str) -> Result<Option<T>> {
            if s.is_empty() {
                Ok(None)
            } else {
                num(name, s).map(Some)
            }
        }
        Ok(Self {
            method: fields[0].to_string(),
            lambda: num("lambda", fields[1])?,
            lambda0: num("lambda0", fields[2])?,
            length: fields[3].parse()?,
            range: num("R", fields[4])?,
            k_min: num("k_min", fields[5])?,
            value: num("value", fields[6])?,
            stderr: opt("stderr", fields[7])?,
            n_trials: opt("n_trials", fields[8])?,
            seed: opt("seed", fields[9])?,
        })
    }
}

/// Header plus one LF-terminated line per row.
pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv_line());
        out.push('\n');
    }
    out
}

pub fn rows_from_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(invalid(format!("unexpected CSV header {other:?}"))),
    }
    lines.filter(|l| !l.is_empty()).map(SweepRow::from_csv_line).collect()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Provenance record written next to every sweep output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub command: Vec<String>,
    pub resolved_config: ScenarioConfig,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub sweep: serde_json::Value,
    pub started_at: String,
    pub duration_s: f64,
    pub rows_written: usize,
    pub output_sha256: String,
}

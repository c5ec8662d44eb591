//! CSV and JSON result files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::HarnessError;

/// One line of a result table: a trial (or the trial mean) at one iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    /// Trial index, or `mean` for the average over trials.
    pub trial: String,
    pub iteration: usize,
    pub algorithm: String,
    pub mse_sim: f64,
    pub mse_se: Option<f64>,
    #[serde(rename = "E_metric")]
    pub e_metric: Option<f64>,
    pub v2_hat: f64,
    pub tau2_hat: f64,
    pub seed: u64,
}

pub const HEADER: [&str; 10] =
    ["experiment", "trial", "iteration", "algorithm", "mse_sim", "mse_se", "E_metric", "v2_hat", "tau2_hat", "seed"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(HarnessError::Config(format!("unknown format `{s}`"))),
        }
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn out_err<E: std::fmt::Display>(e: E) -> HarnessError {
    HarnessError::Output(e.to_string())
}

pub fn write_rows<W: Write>(rows: &[ResultRow], w: W, format: Format) -> Result<(), HarnessError> {
    match format {
        Format::Csv => {
            let mut wr = csv::Writer::from_writer(w);
            wr.write_record(HEADER).map_err(out_err)?;
            for r in rows {
                wr.write_record([
                    r.experiment.clone(),
                    r.trial.clone(),
                    r.iteration.to_string(),
                    r.algorithm.clone(),
                    fmt_f64(r.mse_sim),
                    opt(r.mse_se),
                    opt(r.e_metric),
                    fmt_f64(r.v2_hat),
                    fmt_f64(r.tau2_hat),
                    r.seed.to_string(),
                ])
                .map_err(out_err)?;
            }
            wr.flush().map_err(out_err)
        }
        Format::Json => {
            let mut w = w;
            serde_json::to_writer_pretty(&mut w, rows).map_err(out_err)?;
            writeln!(w).map_err(out_err)
        }
    }
}

/// Write `rows` to `path`.
pub fn emit(rows: &[ResultRow], path: &Path, format: Format) -> Result<(), HarnessError> {
    let f = File::create(path).map_err(|e| HarnessError::Output(format!("{}: {e}", path.display())))?;
    let mut w = BufWriter::new(f);
    write_rows(rows, &mut w, format)?;
    w.flush().map_err(out_err)
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>, HarnessError> {
    let mut rd = csv::Reader::from_path(path).map_err(out_err)?;
    rd.deserialize().collect::<Result<Vec<ResultRow>, _>>().map_err(out_err)
}

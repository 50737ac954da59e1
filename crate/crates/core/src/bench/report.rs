//! Benchmark rows and their CSV/JSON renderings.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::encode::Encoding;
use crate::error::{Error, Result};

/// CSV header, in column order.
pub const CSV_COLUMNS: [&str; 18] = [
    "p",
    "N",
    "K",
    "D",
    "V",
    "encoding",
    "ar_mean",
    "ar_std",
    "reach_pct",
    "steps_mean",
    "steps_std",
    "evals_mean",
    "evals_std",
    "pvalid_mean",
    "pvalid_std",
    "time_s_mean",
    "time_s_std",
    "best_cost",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    /// The register or oracle exceeded its budget; metrics are blank.
    SkippedResource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// One `(size, encoding, p)` line of a results table. `None` is a blank cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub p: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    #[serde(rename = "D")]
    pub d: Option<usize>,
    #[serde(rename = "V")]
    pub v: Option<usize>,
    pub encoding: Encoding,
    pub ar_mean: Option<f64>,
    pub ar_std: Option<f64>,
    pub reach_pct: Option<f64>,
    pub steps_mean: Option<f64>,
    pub steps_std: Option<f64>,
    pub evals_mean: Option<f64>,
    pub evals_std: Option<f64>,
    pub pvalid_mean: Option<f64>,
    pub pvalid_std: Option<f64>,
    pub time_s_mean: Option<f64>,
    pub time_s_std: Option<f64>,
    pub best_cost: Option<f64>,
    pub status: RowStatus,
}

/// Mean and population standard deviation; `None` for an empty sample.
pub fn mean_std(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    Some((mean, var.sqrt()))
}

fn cell_f(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.4}")).unwrap_or_default()
}

fn cell_u(x: Option<usize>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl BenchmarkRow {
    pub fn csv_record(&self) -> [String; 18] {
        [
            self.p.to_string(),
            self.n.to_string(),
            cell_u(self.k),
            cell_u(self.d),
            cell_u(self.v),
            self.encoding.as_str().to_string(),
            cell_f(self.ar_mean),
            cell_f(self.ar_std),
            cell_f(self.reach_pct),
            cell_f(self.steps_mean),
            cell_f(self.steps_std),
            cell_f(self.evals_mean),
            cell_f(self.evals_std),
            cell_f(self.pvalid_mean),
            cell_f(self.pvalid_std),
            cell_f(self.time_s_mean),
            cell_f(self.time_s_std),
            cell_f(self.best_cost),
        ]
    }
}

pub fn write_csv<W: Write>(rows: &[BenchmarkRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for row in rows {
        w.write_record(row.csv_record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(rows: &[BenchmarkRow], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    writeln!(out)?;
    Ok(())
}

/// Renders `rows` to `path`, or to stdout when `path` is `None`.
pub fn emit(rows: &[BenchmarkRow], format: OutputFormat, path: Option<&Path>) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::invalid("no rows to emit"));
    }
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    };
    match format {
        OutputFormat::Csv => write_csv(rows, sink),
        OutputFormat::Json => write_json(rows, sink),
    }
}

pub fn parse_json(text: &str) -> Result<Vec<BenchmarkRow>> {
    Ok(serde_json::from_str(text)?)
}

//! Benchmark reports: per-replicate records, per-cell aggregates, and the
//! JSON/CSV emitters. Reports carry no wall-clock fields so that identical
//! seeds reproduce byte-identical files.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

/// One (algorithm, initializer, replicate) outcome.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReplicateRecord {
    pub model: String,
    pub algorithm: String,
    pub initializer: String,
    pub dimension: usize,
    pub replicate: usize,
    pub converged: bool,
    pub n_iter: usize,
    /// None when the fit never evaluated a finite log-likelihood.
    pub final_loglik: Option<f64>,
    pub final_score_norm: Option<f64>,
    pub stop_reason: String,
    pub seed: u64,
}

/// Aggregate over the replicates of one (dimension, algorithm, initializer)
/// cell.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AggregateRow {
    pub dimension: usize,
    pub algorithm: String,
    pub initializer: String,
    pub n_total: usize,
    pub n_converged: usize,
    pub convergence_rate: f64,
    /// Mean iteration count over converged replicates only.
    pub mean_iterations_converged: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BenchReport {
    pub model: String,
    pub seed: u64,
    pub records: Vec<ReplicateRecord>,
    pub aggregates: Vec<AggregateRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!("unknown report format '{other}' (json|csv)")),
        }
    }
}

impl BenchReport {
    /// Assembles a report, computing the per-cell aggregates from the
    /// records in deterministic (dimension, algorithm, initializer) order.
    pub fn assemble(model: String, seed: u64, records: Vec<ReplicateRecord>) -> Self {
        let mut cells: Vec<(usize, String, String)> = Vec::new();
        for r in &records {
            let key = (r.dimension, r.algorithm.clone(), r.initializer.clone());
            if !cells.contains(&key) {
                cells.push(key);
            }
        }
        let aggregates = cells
            .into_iter()
            .map(|(dimension, algorithm, initializer)| {
                let cell: Vec<&ReplicateRecord> = records
                    .iter()
                    .filter(|r| {
                        r.dimension == dimension
                            && r.algorithm == algorithm
                            && r.initializer == initializer
                    })
                    .collect();
                let n_total = cell.len();
                let converged: Vec<&&ReplicateRecord> =
                    cell.iter().filter(|r| r.converged).collect();
                let n_converged = converged.len();
                let mean_iterations_converged = if n_converged > 0 {
                    Some(
                        converged.iter().map(|r| r.n_iter as f64).sum::<f64>()
                            / n_converged as f64,
                    )
                } else {
                    None
                };
                AggregateRow {
                    dimension,
                    algorithm,
                    initializer,
                    n_total,
                    n_converged,
                    convergence_rate: n_converged as f64 / n_total as f64,
                    mean_iterations_converged,
                }
            })
            .collect();
        Self {
            model,
            seed,
            records,
            aggregates,
        }
    }

    pub fn aggregate(
        &self,
        dimension: usize,
        algorithm: &str,
        initializer: &str,
    ) -> Option<&AggregateRow> {
        self.aggregates.iter().find(|a| {
            a.dimension == dimension && a.algorithm == algorithm && a.initializer == initializer
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("cannot parse report: {e}"))
    }

    /// CSV with the fixed column order (model, algorithm, initializer,
    /// replicate, converged, n_iter, final_loglik, final_score_norm, seed);
    /// one row per replicate record, empty fields for unavailable values.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "model,algorithm,initializer,replicate,converged,n_iter,final_loglik,final_score_norm,seed\n",
        );
        for r in &self.records {
            let loglik = r.final_loglik.map(fmt_float).unwrap_or_default();
            let score = r.final_score_norm.map(fmt_float).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.model,
                r.algorithm,
                r.initializer,
                r.replicate,
                r.converged,
                r.n_iter,
                loglik,
                score,
                r.seed
            );
        }
        out
    }

    /// Human-readable aggregate table.
    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<5} {:<10} {:<10} {:>10} {:>12} {:>12}",
            "dim", "algorithm", "init", "converged", "rate", "mean iters"
        );
        for a in &self.aggregates {
            let mean = a
                .mean_iterations_converged
                .map(|m| format!("{m:.2}"))
                .unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "{:<5} {:<10} {:<10} {:>4}/{:<5} {:>12.3} {:>12}",
                a.dimension,
                a.algorithm,
                a.initializer,
                a.n_converged,
                a.n_total,
                a.convergence_rate,
                mean
            );
        }
        out
    }
}

fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        String::new()
    }
}

/// Writes the report in the requested format.
pub fn emit_report(report: &BenchReport, format: ReportFormat, path: &Path) -> std::io::Result<()> {
    let content = match format {
        ReportFormat::Json => report.to_json(),
        ReportFormat::Csv => report.to_csv(),
    };
    let mut file = std::fs::File::create(path)?;
    file.write_all(content.as_bytes())
}

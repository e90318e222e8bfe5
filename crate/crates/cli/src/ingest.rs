//! Compositional CSV ingestion: numeric rows, closure to the simplex, and
//! explicit zero handling.

use std::fmt;
use std::path::Path;

use expfam::CompositionMatrix;

/// What to do with nonpositive entries.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ZeroPolicy {
    /// Fail on any entry ≤ 0, naming the row and column (default).
    #[default]
    Reject,
    /// Substitute δ for entries ≤ 0, then re-close the row.
    Replace(f64),
}

impl std::str::FromStr for ZeroPolicy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        if lower == "reject" {
            return Ok(ZeroPolicy::Reject);
        }
        if let Some(delta) = lower.strip_prefix("replace:") {
            let delta: f64 = delta
                .parse()
                .map_err(|e| format!("zero-policy replacement value: {e}"))?;
            if !(delta > 0.0) {
                return Err("zero-policy replacement value must be positive".into());
            }
            return Ok(ZeroPolicy::Replace(delta));
        }
        Err(format!("unknown zero policy '{s}' (reject|replace:<delta>)"))
    }
}

#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub delimiter: u8,
    /// Skip a header row.
    pub header: bool,
    pub zero_policy: ZeroPolicy,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            delimiter: b',',
            header: false,
            zero_policy: ZeroPolicy::Reject,
        }
    }
}

#[derive(Debug)]
pub struct IngestError(pub String);

impl fmt::Display for IngestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for IngestError {}

/// Reads a CSV of positive numeric rows and closes each row to the simplex.
/// Row and column indices in error messages are 1-based and count data rows
/// (the header, when present, is excluded).
pub fn read_composition_csv(path: &Path, options: &CsvOptions) -> Result<CompositionMatrix, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(options.header)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| IngestError(format!("cannot open {}: {e}", path.display())))?;

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| IngestError(format!("row {}: {e}", idx + 1)))?;
        let mut row = Vec::with_capacity(record.len());
        for (col, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| {
                IngestError(format!(
                    "row {}, column {}: '{field}' is not numeric",
                    idx + 1,
                    col + 1
                ))
            })?;
            row.push(value);
        }
        match options.zero_policy {
            ZeroPolicy::Reject => {
                if let Some(col) = row.iter().position(|&v| !(v > 0.0)) {
                    return Err(IngestError(format!(
                        "row {}, column {}: nonpositive entry {} (zero policy: reject)",
                        idx + 1,
                        col + 1,
                        row[col]
                    )));
                }
            }
            ZeroPolicy::Replace(delta) => {
                for v in row.iter_mut() {
                    if !(*v > 0.0) {
                        *v = delta;
                    }
                }
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(IngestError(format!("{}: no data rows", path.display())));
    }
    let width = rows[0].len();
    if let Some(bad) = rows.iter().position(|r| r.len() != width) {
        return Err(IngestError(format!(
            "row {}: {} fields, expected {width}",
            bad + 1,
            rows[bad].len()
        )));
    }
    CompositionMatrix::from_rows(rows).map_err(|e| IngestError(e.to_string()))
}

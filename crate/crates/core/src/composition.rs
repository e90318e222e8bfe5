//! Compositional data: strictly positive rows summing to one, and the
//! additive log-ratio transform between the simplex and ℝ^{K−1}.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// An n×K matrix whose rows are strictly positive compositions summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionMatrix {
    data: DMatrix<f64>,
}

impl CompositionMatrix {
    /// Builds a composition matrix from raw positive rows, closing each row
    /// (dividing by its sum).
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidArgument("no rows supplied".into()));
        }
        let k = rows[0].len();
        if k < 2 {
            return Err(Error::InvalidArgument(
                "compositions need at least two components".into(),
            ));
        }
        let n = rows.len();
        let mut data = DMatrix::zeros(n, k);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidArgument(format!(
                    "row {r} has {} entries, expected {k}",
                    row.len()
                )));
            }
            let sum: f64 = row.iter().sum();
            if !sum.is_finite() || sum <= 0.0 {
                return Err(Error::InvalidArgument(format!("row {r} has sum {sum}")));
            }
            for (c, &v) in row.iter().enumerate() {
                if !(v > 0.0) || !v.is_finite() {
                    return Err(Error::DomainError(format!(
                        "nonpositive entry {v} at row {r}, column {c}"
                    )));
                }
                data[(r, c)] = v / sum;
            }
        }
        Ok(Self { data })
    }

    /// Wraps an already-closed matrix; rows must be positive and sum to 1
    /// within 1e−12.
    pub fn from_closed(data: DMatrix<f64>) -> Result<Self> {
        for r in 0..data.nrows() {
            let mut sum = 0.0;
            for c in 0..data.ncols() {
                let v = data[(r, c)];
                if !(v > 0.0) || !v.is_finite() {
                    return Err(Error::DomainError(format!(
                        "nonpositive entry {v} at row {r}, column {c}"
                    )));
                }
                sum += v;
            }
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "row {r} sums to {sum}, not 1"
                )));
            }
        }
        Ok(Self { data })
    }

    /// Number of observations.
    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    /// Number of components.
    pub fn k(&self) -> usize {
        self.data.ncols()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[(row, col)]
    }

    pub fn row(&self, r: usize) -> DVector<f64> {
        self.data.row(r).transpose()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    /// Column means.
    pub fn means(&self) -> DVector<f64> {
        let n = self.n() as f64;
        DVector::from_iterator(self.k(), self.data.column_iter().map(|c| c.sum() / n))
    }

    /// Unbiased per-column sample variances. Needs n ≥ 2.
    pub fn variances(&self) -> Result<DVector<f64>> {
        if self.n() < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                got: self.n(),
            });
        }
        let means = self.means();
        let denom = (self.n() - 1) as f64;
        let mut v = DVector::zeros(self.k());
        for c in 0..self.k() {
            let m = means[c];
            v[c] = self
                .data
                .column(c)
                .iter()
                .map(|&x| (x - m) * (x - m))
                .sum::<f64>()
                / denom;
        }
        Ok(v)
    }

    /// Per-column means of ln y, the Dirichlet sufficient statistics over n.
    pub fn log_means(&self) -> DVector<f64> {
        let n = self.n() as f64;
        DVector::from_iterator(
            self.k(),
            self.data
                .column_iter()
                .map(|c| c.iter().map(|&x| x.ln()).sum::<f64>() / n),
        )
    }
}

/// Additive log-ratio transform: z_i = ln(y_i / y_ref), reference column
/// dropped. `ref_index` is zero-based. Output columns keep the original
/// component order with the reference removed.
pub fn alr(data: &CompositionMatrix, ref_index: usize) -> Result<DMatrix<f64>> {
    let k = data.k();
    if ref_index >= k {
        return Err(Error::InvalidArgument(format!(
            "reference index {ref_index} out of range for {k} components"
        )));
    }
    let n = data.n();
    let mut z = DMatrix::zeros(n, k - 1);
    for r in 0..n {
        let lref = data.get(r, ref_index).ln();
        let mut j = 0;
        for c in 0..k {
            if c == ref_index {
                continue;
            }
            z[(r, j)] = data.get(r, c).ln() - lref;
            j += 1;
        }
    }
    Ok(z)
}

/// Inverse additive log-ratio transform; the reference component is
/// reinserted at `ref_index`.
pub fn alr_inv(z: &DMatrix<f64>, ref_index: usize) -> Result<CompositionMatrix> {
    let k = z.ncols() + 1;
    if ref_index >= k {
        return Err(Error::InvalidArgument(format!(
            "reference index {ref_index} out of range for {k} components"
        )));
    }
    let n = z.nrows();
    let mut data = DMatrix::zeros(n, k);
    for r in 0..n {
        // Stabilized softmax over (z, 0).
        let zmax = z.row(r).iter().fold(0.0_f64, |a, &b| a.max(b));
        let mut denom = (-zmax).exp();
        for j in 0..k - 1 {
            denom += (z[(r, j)] - zmax).exp();
        }
        let mut j = 0;
        for c in 0..k {
            let e = if c == ref_index {
                (-zmax).exp()
            } else {
                let v = (z[(r, j)] - zmax).exp();
                j += 1;
                v
            };
            data[(r, c)] = e / denom;
        }
    }
    CompositionMatrix::from_closed(data)
}

/// Single-row alr, used by samplers.
pub fn alr_inv_row(z: &DVector<f64>, ref_index: usize) -> DVector<f64> {
    let k = z.len() + 1;
    let zmax = z.iter().fold(0.0_f64, |a, &b| a.max(b));
    let mut denom = (-zmax).exp();
    for j in 0..k - 1 {
        denom += (z[j] - zmax).exp();
    }
    let mut y = DVector::zeros(k);
    let mut j = 0;
    for c in 0..k {
        let e = if c == ref_index {
            (-zmax).exp()
        } else {
            let v = (z[j] - zmax).exp();
            j += 1;
            v
        };
        y[c] = e / denom;
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_rows_applies_closure() {
        let m = CompositionMatrix::from_rows(vec![vec![2.0, 3.0, 5.0]]).unwrap();
        assert!((m.get(0, 0) - 0.2).abs() < 1e-15);
        assert!((m.get(0, 1) - 0.3).abs() < 1e-15);
        assert!((m.get(0, 2) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn from_rows_rejects_nonpositive() {
        let err = CompositionMatrix::from_rows(vec![vec![1.0, 0.0, 1.0]]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 0") && msg.contains("column 1"), "{msg}");
    }

    #[test]
    fn closure_is_idempotent() {
        let m = CompositionMatrix::from_rows(vec![vec![0.2, 0.3, 0.5]]).unwrap();
        let again = CompositionMatrix::from_rows(vec![vec![m.get(0, 0), m.get(0, 1), m.get(0, 2)]])
            .unwrap();
        for c in 0..3 {
            assert!((m.get(0, c) - again.get(0, c)).abs() < 1e-12);
        }
    }

    #[test]
    fn alr_reference_example() {
        let m = CompositionMatrix::from_rows(vec![vec![0.2, 0.3, 0.5]]).unwrap();
        let z = alr(&m, 2).unwrap();
        assert!((z[(0, 0)] - 0.4_f64.ln()).abs() < 1e-14);
        assert!((z[(0, 1)] - 0.6_f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn alr_of_uniform_row_is_zero() {
        let m = CompositionMatrix::from_rows(vec![vec![1.0, 1.0, 1.0, 1.0]]).unwrap();
        let z = alr(&m, 3).unwrap();
        assert!(z.iter().all(|&v| v.abs() < 1e-14));
    }

    #[test]
    fn alr_round_trip() {
        let m = CompositionMatrix::from_rows(vec![
            vec![0.1, 0.2, 0.3, 0.4],
            vec![0.7, 0.1, 0.15, 0.05],
        ])
        .unwrap();
        for ref_index in 0..4 {
            let z = alr(&m, ref_index).unwrap();
            let back = alr_inv(&z, ref_index).unwrap();
            for r in 0..2 {
                for c in 0..4 {
                    assert!(
                        (m.get(r, c) - back.get(r, c)).abs() < 1e-12,
                        "ref {ref_index} r {r} c {c}"
                    );
                }
            }
        }
    }
}

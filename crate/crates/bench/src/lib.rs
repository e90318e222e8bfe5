//! Shared fixtures for the criterion benchmarks.

use nalgebra::DVector;

use expfam::aitchison::AitchisonParams;
use expfam::dirichlet::{sample_dirichlet, DirichletSuffStats};
use expfam::CompositionMatrix;

/// Deterministic Dirichlet data with αk spread over [1, 4].
pub fn dirichlet_fixture(k: usize, n: usize) -> (DVector<f64>, CompositionMatrix, DirichletSuffStats) {
    let alpha = DVector::from_iterator(k, (0..k).map(|i| 1.0 + 3.0 * (i as f64 / k as f64)));
    let data = sample_dirichlet(&alpha, n, 0xBE7C).expect("fixture sampling");
    let stats = DirichletSuffStats::from_data(&data);
    (alpha, data, stats)
}

/// A well-conditioned Aitchison parameter point.
pub fn aitchison_fixture(k: usize) -> AitchisonParams {
    let alpha = DVector::from_iterator(k, (0..k).map(|i| 2.0 + 0.5 * i as f64));
    let beta: Vec<f64> = (0..k * (k - 1) / 2).map(|i| 0.2 + 0.1 * (i % 4) as f64).collect();
    AitchisonParams::new(alpha, beta).expect("fixture parameters")
}

//! Central finite differences for verifying analytic scores and Hessians.

use nalgebra::{DMatrix, DVector};

/// Central-difference gradient of `f` at `x`. Step per coordinate is
/// `h_scale · (1 + |x_i|)`.
pub fn gradient<F>(f: F, x: &DVector<f64>, h_scale: f64) -> DVector<f64>
where
    F: Fn(&DVector<f64>) -> f64,
{
    let d = x.len();
    let mut g = DVector::zeros(d);
    for i in 0..d {
        let h = h_scale * (1.0 + x[i].abs());
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += h;
        xm[i] -= h;
        g[i] = (f(&xp) - f(&xm)) / (2.0 * h);
    }
    g
}

/// Central-difference Jacobian of a vector-valued `f` at `x`; row r holds
/// ∂f_r/∂x_c. Applied to a score function this is the Hessian estimate.
pub fn jacobian<F>(f: F, x: &DVector<f64>, h_scale: f64) -> DMatrix<f64>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let d = x.len();
    let rows = f(x).len();
    let mut jac = DMatrix::zeros(rows, d);
    for c in 0..d {
        let h = h_scale * (1.0 + x[c].abs());
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[c] += h;
        xm[c] -= h;
        let col = (f(&xp) - f(&xm)) / (2.0 * h);
        jac.set_column(c, &col);
    }
    jac
}

/// Largest relative component difference, with an absolute floor so that
/// near-zero entries compare absolutely.
pub fn max_rel_diff(a: &DVector<f64>, b: &DVector<f64>, floor: f64) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(&x, &y)| (x - y).abs() / x.abs().max(y.abs()).max(floor))
        .fold(0.0, f64::max)
}

/// Matrix version of [`max_rel_diff`].
pub fn max_rel_diff_mat(a: &DMatrix<f64>, b: &DMatrix<f64>, floor: f64) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(&x, &y)| (x - y).abs() / x.abs().max(y.abs()).max(floor))
        .fold(0.0, f64::max)
}

/// Norm-wise relative difference ‖a − b‖ / max(‖a‖, ‖b‖).
pub fn rel_diff_norm(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

/// Norm-wise relative difference for matrices.
pub fn rel_diff_norm_mat(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

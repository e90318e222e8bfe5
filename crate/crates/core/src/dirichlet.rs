//! Dirichlet maximum likelihood: analytic log-likelihood, score and
//! Hessian, four starting-value strategies, a fixed-point-iteration
//! baseline, and a gamma-ratio sampler.
//!
//! For parameters α > 0 and n observations the log-likelihood is
//!
//! ```text
//! l(α) = n ln Γ(Σ αk) − n Σ ln Γ(αk) + Σ (αk − 1) Σ_r ln y_rk
//! ```
//!
//! The Hessian is data-independent: n[ψ′(Σα)·11′ − diag ψ′(αk)].

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::composition::CompositionMatrix;
use crate::error::{Error, Result};
use crate::optim::{check_stop, FitOptions, FitResult, Objective, StopDecision, StopReason};
use crate::special::{digamma, inv_digamma, ln_gamma, trigamma};

/// Dirichlet parameter vector; every component must be positive.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletParams {
    pub alpha: DVector<f64>,
}

impl DirichletParams {
    pub fn new(alpha: DVector<f64>) -> Result<Self> {
        if alpha.iter().any(|&a| !(a > 0.0)) {
            return Err(Error::DomainError(format!(
                "Dirichlet parameters must be positive, got {:?}",
                alpha.as_slice()
            )));
        }
        Ok(Self { alpha })
    }
}

/// Sufficient statistics: sample count and per-component means of ln y.
#[derive(Debug, Clone)]
pub struct DirichletSuffStats {
    pub n: usize,
    pub log_means: DVector<f64>,
}

impl DirichletSuffStats {
    pub fn from_data(data: &CompositionMatrix) -> Self {
        Self {
            n: data.n(),
            log_means: data.log_means(),
        }
    }

    pub fn k(&self) -> usize {
        self.log_means.len()
    }
}

fn check_alpha(alpha: &DVector<f64>) -> Result<()> {
    if alpha.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
        return Err(Error::DomainError(
            "Dirichlet log-likelihood requires positive parameters".into(),
        ));
    }
    Ok(())
}

/// Log-likelihood of α under the given sufficient statistics.
pub fn dirichlet_loglik(alpha: &DVector<f64>, stats: &DirichletSuffStats) -> Result<f64> {
    check_alpha(alpha)?;
    let n = stats.n as f64;
    let total: f64 = alpha.sum();
    let mut l = n * ln_gamma(total);
    for (&a, &lm) in alpha.iter().zip(stats.log_means.iter()) {
        l += -n * ln_gamma(a) + (a - 1.0) * n * lm;
    }
    Ok(l)
}

/// Score: ∂l/∂αk = n[ψ(Σα) − ψ(αk) + log_means_k].
pub fn dirichlet_score(alpha: &DVector<f64>, stats: &DirichletSuffStats) -> Result<DVector<f64>> {
    check_alpha(alpha)?;
    let n = stats.n as f64;
    let psi_total = digamma(alpha.sum());
    Ok(DVector::from_iterator(
        alpha.len(),
        alpha
            .iter()
            .zip(stats.log_means.iter())
            .map(|(&a, &lm)| n * (psi_total - digamma(a) + lm)),
    ))
}

/// Hessian: n[ψ′(Σα)·11′ − diag ψ′(αk)]. Independent of the data.
pub fn dirichlet_hessian(alpha: &DVector<f64>, n: usize) -> Result<DMatrix<f64>> {
    check_alpha(alpha)?;
    let nf = n as f64;
    let c = nf * trigamma(alpha.sum());
    let k = alpha.len();
    let mut h = DMatrix::from_element(k, k, c);
    for (i, &a) in alpha.iter().enumerate() {
        h[(i, i)] -= nf * trigamma(a);
    }
    Ok(h)
}

/// The Dirichlet log-likelihood as an optimizer objective in α-space.
#[derive(Debug, Clone)]
pub struct DirichletObjective {
    stats: DirichletSuffStats,
}

impl DirichletObjective {
    pub fn new(stats: DirichletSuffStats) -> Self {
        Self { stats }
    }

    pub fn stats(&self) -> &DirichletSuffStats {
        &self.stats
    }
}

impl Objective for DirichletObjective {
    fn dim(&self) -> usize {
        self.stats.k()
    }

    fn loglik(&self, theta: &DVector<f64>) -> f64 {
        dirichlet_loglik(theta, &self.stats).unwrap_or(f64::NEG_INFINITY)
    }

    fn score(&self, theta: &DVector<f64>) -> DVector<f64> {
        dirichlet_score(theta, &self.stats).expect("score evaluated outside the parameter space")
    }

    fn hessian(&self, theta: &DVector<f64>) -> DMatrix<f64> {
        dirichlet_hessian(theta, self.stats.n)
            .expect("Hessian evaluated outside the parameter space")
    }

    fn in_domain(&self, theta: &DVector<f64>) -> bool {
        theta.len() == self.stats.k() && theta.iter().all(|&a| a > 0.0 && a.is_finite())
    }
}

fn need_two_rows(data: &CompositionMatrix) -> Result<()> {
    if data.n() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: data.n(),
        });
    }
    Ok(())
}

/// Per-component concentration estimates m(1−m)/v − 1 shared by the moments
/// and Dishon starting values.
fn componentwise_concentration(data: &CompositionMatrix) -> Result<(DVector<f64>, DVector<f64>)> {
    let means = data.means();
    let vars = data.variances()?;
    let conc = DVector::from_iterator(
        data.k(),
        means
            .iter()
            .zip(vars.iter())
            .map(|(&m, &v)| m * (1.0 - m) / v - 1.0),
    );
    Ok((means, conc))
}

/// Method of moments: total concentration taken from component 1 alone.
/// May land outside the parameter space; callers must check positivity.
pub fn init_moments(data: &CompositionMatrix) -> Result<DVector<f64>> {
    need_two_rows(data)?;
    let (means, conc) = componentwise_concentration(data)?;
    let a0 = conc[0];
    Ok(means * a0)
}

/// Dishon–Weiss style moments: the total concentration averages the
/// per-component estimates instead of using a single marginal.
pub fn init_dishon(data: &CompositionMatrix) -> Result<DVector<f64>> {
    need_two_rows(data)?;
    let (means, conc) = componentwise_concentration(data)?;
    let a0 = conc.sum() / conc.len() as f64;
    Ok(means * a0)
}

/// Ronning's proposal: every component set to the smallest observed value.
/// Always inside the parameter space.
pub fn init_ronning(data: &CompositionMatrix) -> Result<DVector<f64>> {
    need_two_rows(data)?;
    let min = data
        .as_matrix()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok(DVector::from_element(data.k(), min))
}

/// Wicker's likelihood-approximation starting value for high-dimensional
/// data: α₀ = (K−1)/2 ÷ Σ mₖ(ln mₖ − ln gₖ) with gₖ the geometric mean.
pub fn init_wicker(data: &CompositionMatrix) -> Result<DVector<f64>> {
    need_two_rows(data)?;
    let means = data.means();
    let log_means = data.log_means();
    let k = data.k() as f64;
    let denom: f64 = means
        .iter()
        .zip(log_means.iter())
        .map(|(&m, &lg)| m * (m.ln() - lg))
        .sum();
    if !(denom > 0.0) {
        return Err(Error::NumericalError(format!(
            "Wicker initializer divergence denominator is {denom}"
        )));
    }
    let a0 = (k - 1.0) / (2.0 * denom);
    Ok(means * a0)
}

/// Fixed-point iteration baseline: ψ(αk⁺) = ψ(Σα) + log_means_k, the
/// digamma inverted by a Newton sub-iteration. Stops under the same three
/// criteria as the Newton-type algorithms.
pub fn fpi_fit(stats: &DirichletSuffStats, alpha0: &DVector<f64>, opts: &FitOptions) -> FitResult {
    let make_failed = |alpha: DVector<f64>, reason: StopReason, iters: usize| FitResult {
        theta_hat: alpha,
        converged: false,
        stop_reason: reason,
        n_iter: iters,
        final_score_norm: f64::NAN,
        gamma_trace: Vec::new(),
        loglik_trace: Vec::new(),
    };

    if alpha0.iter().any(|&a| !(a > 0.0)) {
        return make_failed(alpha0.clone(), StopReason::LeftDomain, 0);
    }
    let mut alpha = alpha0.clone();
    let mut loglik_trace = vec![dirichlet_loglik(&alpha, stats).unwrap_or(f64::NEG_INFINITY)];
    let mut iter = 0usize;
    loop {
        let score = match dirichlet_score(&alpha, stats) {
            Ok(s) => s,
            Err(_) => return make_failed(alpha, StopReason::LeftDomain, iter),
        };
        let psi_total = digamma(alpha.sum());
        let mut next = alpha.clone();
        for (k, slot) in next.iter_mut().enumerate() {
            match inv_digamma(psi_total + stats.log_means[k]) {
                Ok(a) => *slot = a,
                Err(_) => return make_failed(alpha, StopReason::LinearAlgebraFailure, iter),
            }
        }
        iter += 1;
        match check_stop(&score, &next, &alpha, iter, opts) {
            StopDecision::Stop(reason) => {
                let final_alpha = if reason == StopReason::ScoreSmall {
                    alpha
                } else {
                    next
                };
                let final_score_norm = dirichlet_score(&final_alpha, stats)
                    .map(|s| s.norm())
                    .unwrap_or(f64::NAN);
                let in_domain = final_alpha.iter().all(|&a| a > 0.0);
                loglik_trace
                    .push(dirichlet_loglik(&final_alpha, stats).unwrap_or(f64::NEG_INFINITY));
                return FitResult {
                    converged: reason.is_convergent() && in_domain,
                    theta_hat: final_alpha,
                    stop_reason: reason,
                    n_iter: iter,
                    final_score_norm,
                    gamma_trace: Vec::new(),
                    loglik_trace,
                };
            }
            StopDecision::Continue => {
                alpha = next;
                loglik_trace.push(dirichlet_loglik(&alpha, stats).unwrap_or(f64::NEG_INFINITY));
            }
        }
    }
}

const UNDERFLOW_FLOOR: f64 = 1e-300;
const MAX_ROW_REDRAWS: usize = 10_000;

/// Samples n compositions from Dirichlet(α) as normalized independent gamma
/// variates. Deterministic for a fixed seed. Rows containing a component
/// below 1e−300 are redrawn.
pub fn sample_dirichlet(alpha: &DVector<f64>, n: usize, seed: u64) -> Result<CompositionMatrix> {
    check_alpha(alpha)?;
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gammas: Vec<Gamma<f64>> = alpha
        .iter()
        .map(|&a| {
            Gamma::new(a, 1.0)
                .map_err(|e| Error::InvalidArgument(format!("gamma shape {a}: {e}")))
        })
        .collect::<Result<_>>()?;
    let k = alpha.len();
    let mut data = DMatrix::zeros(n, k);
    for r in 0..n {
        let mut tries = 0;
        loop {
            let mut row = DVector::zeros(k);
            let mut sum = 0.0;
            for (c, g) in gammas.iter().enumerate() {
                let v = g.sample(&mut rng);
                row[c] = v;
                sum += v;
            }
            if sum > 0.0 && row.iter().all(|&v| v / sum >= UNDERFLOW_FLOOR) {
                for c in 0..k {
                    data[(r, c)] = row[c] / sum;
                }
                break;
            }
            tries += 1;
            if tries >= MAX_ROW_REDRAWS {
                log::warn!("sample_dirichlet: row {r} kept after {tries} underflow redraws");
                let floor_sum: f64 = row.iter().map(|&v| v.max(UNDERFLOW_FLOOR)).sum();
                for c in 0..k {
                    data[(r, c)] = row[c].max(UNDERFLOW_FLOOR) / floor_sum;
                }
                break;
            }
        }
    }
    CompositionMatrix::from_closed(data)
}

/// Draws a Fig. 1-style true parameter vector: each αk uniform on
/// [total/K − half_width, total/K + half_width].
pub fn draw_uniform_band_alpha<R: Rng>(
    rng: &mut R,
    k: usize,
    total: f64,
    half_width: f64,
) -> Result<DVector<f64>> {
    let center = total / k as f64;
    if center - half_width <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "uniform band [{}, {}] touches zero",
            center - half_width,
            center + half_width
        )));
    }
    Ok(DVector::from_iterator(
        k,
        (0..k).map(|_| center - half_width + 2.0 * half_width * rng.gen::<f64>()),
    ))
}

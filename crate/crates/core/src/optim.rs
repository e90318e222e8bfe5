//! Penalized Newton maximization with adaptive Levenberg–Marquardt-style
//! damping, plus the plain Newton–Raphson baseline.
//!
//! The iteration is
//!
//! ```text
//! θ⁺ = θ − [H(θ) + γ P(θ)]⁻¹ s(θ)
//! ```
//!
//! with `P` a negative-definite diagonal penalty (−I or diag H) and γ > 0 a
//! damping parameter driven by the gain ratio between the realized and the
//! quadratic-model change of the log-likelihood.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Behavioral interface for a log-likelihood to be maximized.
///
/// `score` and `hessian` are only ever evaluated at parameter vectors for
/// which `in_domain` returned true; implementations may assume that.
/// `hessian` must be symmetric and negative definite at interior points of
/// the natural parameter space.
pub trait Objective {
    /// Parameter dimension.
    fn dim(&self) -> usize;
    /// Log-likelihood value.
    fn loglik(&self, theta: &DVector<f64>) -> f64;
    /// Gradient of the log-likelihood.
    fn score(&self, theta: &DVector<f64>) -> DVector<f64>;
    /// Hessian of the log-likelihood.
    fn hessian(&self, theta: &DVector<f64>) -> DMatrix<f64>;
    /// Whether `theta` lies inside the natural parameter space.
    fn in_domain(&self, theta: &DVector<f64>) -> bool;
}

/// Diagonal penalty added (scaled by γ) to the Hessian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PenaltyKind {
    /// Levenberg proposal: P = −I.
    NegIdentity,
    /// Marquardt proposal: P = diag(H). Follows the curvature of the
    /// objective and is the default.
    #[default]
    DiagHessian,
}

/// Which iteration `maximize` runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Algorithm {
    /// Penalized iteration with the adaptive damping controller.
    LMAdaptive,
    /// Penalized iteration with a constant damping parameter. Steps are
    /// applied unconditionally, as in the undamped baseline.
    LMFixed(f64),
    /// Plain Newton–Raphson: no penalty, no step rejection.
    NewtonRaphson,
}

/// Stopping and algorithm options.
#[derive(Debug, Clone)]
pub struct FitOptions {
    /// Score-norm tolerance ε₁.
    pub eps1: f64,
    /// Relative step tolerance ε₂.
    pub eps2: f64,
    /// Iteration cap.
    pub maxit: usize,
    /// Penalty shape used by the LM variants.
    pub penalty: PenaltyKind,
    /// Iteration to run.
    pub algorithm: Algorithm,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            eps1: 1e-8,
            eps2: 1e-8,
            maxit: 1000,
            penalty: PenaltyKind::DiagHessian,
            algorithm: Algorithm::LMAdaptive,
        }
    }
}

impl FitOptions {
    pub fn with_algorithm(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            ..Self::default()
        }
    }
}

/// Why the iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// ‖s(θ)‖ < ε₁.
    ScoreSmall,
    /// ‖θ⁺ − θ‖ < ε₂(‖θ‖ + ε₂).
    StepSmall,
    /// Iteration cap reached.
    MaxIter,
    /// The penalized Hessian could not be factorized even after repeated
    /// damping increases.
    LinearAlgebraFailure,
    /// An iterate left the natural parameter space (undamped variants), or
    /// the starting point was already outside it.
    LeftDomain,
}

impl StopReason {
    /// The two stop reasons that may count as convergence.
    pub fn is_convergent(self) -> bool {
        matches!(self, StopReason::ScoreSmall | StopReason::StepSmall)
    }
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            StopReason::ScoreSmall => "score-small",
            StopReason::StepSmall => "step-small",
            StopReason::MaxIter => "max-iter",
            StopReason::LinearAlgebraFailure => "linear-algebra-failure",
            StopReason::LeftDomain => "left-domain",
        };
        f.write_str(s)
    }
}

/// Outcome of a maximization run.
#[derive(Debug, Clone)]
pub struct FitResult {
    /// Final parameter estimate (last in-domain iterate on failure paths).
    pub theta_hat: DVector<f64>,
    /// True iff the stop reason is score-small or step-small and the final
    /// estimate lies inside the natural parameter space.
    pub converged: bool,
    pub stop_reason: StopReason,
    /// Number of solve-and-evaluate cycles performed.
    pub n_iter: usize,
    /// ‖s(θ̂)‖ at the final estimate.
    pub final_score_norm: f64,
    /// Damping parameter at the start of each cycle (empty for Newton–Raphson).
    pub gamma_trace: Vec<f64>,
    /// Log-likelihood after each accepted step, starting with the value at θ₀.
    pub loglik_trace: Vec<f64>,
}

/// Decision returned by [`check_stop`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopDecision {
    Stop(StopReason),
    Continue,
}

/// Damping parameter state: γ and the last gain ratio. Starts at γ = 1.
#[derive(Debug, Clone, Copy)]
pub struct DampingState {
    pub gamma: f64,
    /// Last gain ratio; may be negative. NaN until the first evaluation.
    pub rho: f64,
}

impl Default for DampingState {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            rho: f64::NAN,
        }
    }
}

impl DampingState {
    /// Applies the gain-driven update to γ, remembering the ratio.
    pub fn update(&mut self, rho: f64) {
        self.rho = rho;
        self.gamma = update_damping(self.gamma, rho);
    }

    /// Doubles γ without a gain evaluation (rejected or infeasible step).
    pub fn escalate(&mut self) {
        self.gamma *= 2.0;
    }
}

/// Builds the diagonal penalty for a Hessian, returned as the diagonal.
///
/// `NegIdentity` yields −I; `DiagHessian` yields diag(H) and requires every
/// diagonal entry of `H` to be negative.
pub fn penalty_matrix(hessian: &DMatrix<f64>, kind: PenaltyKind) -> Result<DVector<f64>> {
    let d = hessian.nrows();
    match kind {
        PenaltyKind::NegIdentity => Ok(DVector::from_element(d, -1.0)),
        PenaltyKind::DiagHessian => {
            let diag = hessian.diagonal();
            for (i, &v) in diag.iter().enumerate() {
                if !(v < 0.0) {
                    return Err(Error::DegenerateCurvature { index: i, value: v });
                }
            }
            Ok(diag)
        }
    }
}

/// Solves the penalized step Δ = −(H + γP)⁻¹ s by a Cholesky factorization
/// of −(H + γP).
pub fn solve_penalized_step(
    hessian: &DMatrix<f64>,
    penalty_diag: &DVector<f64>,
    gamma: f64,
    score: &DVector<f64>,
) -> Result<DVector<f64>> {
    debug_assert!(gamma > 0.0);
    let mut m = -hessian.clone();
    for i in 0..m.nrows() {
        m[(i, i)] -= gamma * penalty_diag[i];
    }
    let chol = m
        .cholesky()
        .ok_or(Error::LinearAlgebraFailure("penalized Hessian is not negative definite"))?;
    Ok(chol.solve(score))
}

/// Gain ratio ϱ = (l⁺ − l) / (−½ Δ′HΔ).
///
/// When the Hessian denominator is numerically zero the penalized bracket
/// H + γP takes its place; if that one is zero too the ratio is degenerate.
pub fn gain_ratio(
    l_new: f64,
    l_old: f64,
    delta: &DVector<f64>,
    hessian: &DMatrix<f64>,
    fallback: &DMatrix<f64>,
) -> Result<f64> {
    let threshold = 1e-30 * (1.0 + l_old.abs());
    let quad = |m: &DMatrix<f64>| -0.5 * (m * delta).dot(delta);
    let mut den = quad(hessian);
    if den.abs() < threshold {
        den = quad(fallback);
        if den.abs() < threshold {
            return Err(Error::DegenerateGain);
        }
    }
    Ok((l_new - l_old) / den)
}

/// Damping update: γ⁺ = γ·max{1/3, 1 − (2ϱ − 1)³} for ϱ > 0, else 2γ.
///
/// Continuous in ϱ and strictly positive.
pub fn update_damping(gamma: f64, rho: f64) -> f64 {
    debug_assert!(gamma > 0.0);
    if rho > 0.0 {
        let cube = (2.0 * rho - 1.0).powi(3);
        gamma * (1.0 - cube).max(1.0 / 3.0)
    } else {
        2.0 * gamma
    }
}

/// The three stopping criteria, in priority order: score norm below ε₁,
/// relative parameter change below ε₂, iteration cap.
pub fn check_stop(
    score: &DVector<f64>,
    theta_new: &DVector<f64>,
    theta_old: &DVector<f64>,
    iter: usize,
    opts: &FitOptions,
) -> StopDecision {
    if score.norm() < opts.eps1 {
        return StopDecision::Stop(StopReason::ScoreSmall);
    }
    if (theta_new - theta_old).norm() < opts.eps2 * (theta_old.norm() + opts.eps2) {
        return StopDecision::Stop(StopReason::StepSmall);
    }
    if iter >= opts.maxit {
        return StopDecision::Stop(StopReason::MaxIter);
    }
    StopDecision::Continue
}

const MAX_FACTORIZATION_RETRIES: usize = 50;

/// Maximizes `obj` from `theta0`.
///
/// With `Algorithm::LMAdaptive`, a candidate step is accepted only when it
/// stays in the parameter space and has a positive gain ratio; otherwise the
/// current point is kept and γ doubles. `LMFixed` and `NewtonRaphson` apply
/// every step and abort with `LeftDomain` if an iterate exits the space.
///
/// A starting point outside the parameter space yields an immediate
/// `LeftDomain` result rather than a panic, so that benchmark harnesses can
/// record initializers that land outside the space.
pub fn maximize(obj: &dyn Objective, theta0: &DVector<f64>, opts: &FitOptions) -> FitResult {
    if !obj.in_domain(theta0) {
        return FitResult {
            theta_hat: theta0.clone(),
            converged: false,
            stop_reason: StopReason::LeftDomain,
            n_iter: 0,
            final_score_norm: f64::NAN,
            gamma_trace: Vec::new(),
            loglik_trace: Vec::new(),
        };
    }
    match opts.algorithm {
        Algorithm::LMAdaptive => lm_adaptive(obj, theta0, opts),
        Algorithm::LMFixed(gamma) => undamped_iteration(obj, theta0, opts, Some(gamma)),
        Algorithm::NewtonRaphson => undamped_iteration(obj, theta0, opts, None),
    }
}

fn finish(
    obj: &dyn Objective,
    theta: DVector<f64>,
    reason: StopReason,
    n_iter: usize,
    gamma_trace: Vec<f64>,
    loglik_trace: Vec<f64>,
) -> FitResult {
    let in_domain = obj.in_domain(&theta);
    let score_norm = if in_domain {
        obj.score(&theta).norm()
    } else {
        f64::NAN
    };
    FitResult {
        converged: reason.is_convergent() && in_domain,
        theta_hat: theta,
        stop_reason: reason,
        n_iter,
        final_score_norm: score_norm,
        gamma_trace,
        loglik_trace,
    }
}

fn lm_adaptive(obj: &dyn Objective, theta0: &DVector<f64>, opts: &FitOptions) -> FitResult {
    let mut theta = theta0.clone();
    let mut l_cur = obj.loglik(&theta);
    let mut score = obj.score(&theta);
    let mut hessian = obj.hessian(&theta);
    let mut damping = DampingState::default();
    let mut iter = 0usize;
    let mut gamma_trace = Vec::new();
    let mut loglik_trace = vec![l_cur];

    loop {
        if score.norm() < opts.eps1 {
            return finish(obj, theta, StopReason::ScoreSmall, iter, gamma_trace, loglik_trace);
        }
        if iter >= opts.maxit {
            return finish(obj, theta, StopReason::MaxIter, iter, gamma_trace, loglik_trace);
        }
        let penalty = match penalty_matrix(&hessian, opts.penalty) {
            Ok(p) => p,
            Err(_) => {
                return finish(
                    obj,
                    theta,
                    StopReason::LinearAlgebraFailure,
                    iter,
                    gamma_trace,
                    loglik_trace,
                );
            }
        };

        // Increase γ until the penalized Hessian factorizes.
        let mut retries = 0;
        let delta = loop {
            match solve_penalized_step(&hessian, &penalty, damping.gamma, &score) {
                Ok(d) => break d,
                Err(_) => {
                    damping.escalate();
                    retries += 1;
                    if retries > MAX_FACTORIZATION_RETRIES {
                        return finish(
                            obj,
                            theta,
                            StopReason::LinearAlgebraFailure,
                            iter,
                            gamma_trace,
                            loglik_trace,
                        );
                    }
                }
            }
        };
        let gamma = damping.gamma;
        gamma_trace.push(gamma);
        iter += 1;

        if delta.norm() < opts.eps2 * (theta.norm() + opts.eps2) {
            return finish(obj, theta, StopReason::StepSmall, iter, gamma_trace, loglik_trace);
        }

        let candidate = &theta + &delta;
        let accepted = if obj.in_domain(&candidate) {
            let l_new = obj.loglik(&candidate);
            let mut bracket = hessian.clone();
            for i in 0..bracket.nrows() {
                bracket[(i, i)] += gamma * penalty[i];
            }
            match gain_ratio(l_new, l_cur, &delta, &hessian, &bracket) {
                Ok(rho) if rho > 0.0 => {
                    theta = candidate;
                    l_cur = l_new;
                    loglik_trace.push(l_cur);
                    damping.update(rho);
                    score = obj.score(&theta);
                    hessian = obj.hessian(&theta);
                    true
                }
                _ => false,
            }
        } else {
            false
        };
        if !accepted {
            // Rejected candidates (non-positive gain, degenerate gain, or
            // out-of-domain) keep θ and double the damping.
            damping.escalate();
        }

        if iter >= opts.maxit {
            return finish(obj, theta, StopReason::MaxIter, iter, gamma_trace, loglik_trace);
        }
    }
}

/// Newton–Raphson (`fixed_gamma = None`) and fixed-damping LM iterations:
/// every step is applied unconditionally.
fn undamped_iteration(
    obj: &dyn Objective,
    theta0: &DVector<f64>,
    opts: &FitOptions,
    fixed_gamma: Option<f64>,
) -> FitResult {
    let mut theta = theta0.clone();
    let mut score = obj.score(&theta);
    let mut hessian = obj.hessian(&theta);
    let mut iter = 0usize;
    let mut gamma_trace = Vec::new();
    let mut loglik_trace = vec![obj.loglik(&theta)];

    loop {
        if score.norm() < opts.eps1 {
            return finish(obj, theta, StopReason::ScoreSmall, iter, gamma_trace, loglik_trace);
        }
        if iter >= opts.maxit {
            return finish(obj, theta, StopReason::MaxIter, iter, gamma_trace, loglik_trace);
        }

        let step = match fixed_gamma {
            Some(gamma) => {
                let penalty = match penalty_matrix(&hessian, opts.penalty) {
                    Ok(p) => p,
                    Err(_) => {
                        return finish(
                            obj,
                            theta,
                            StopReason::LinearAlgebraFailure,
                            iter,
                            gamma_trace,
                            loglik_trace,
                        );
                    }
                };
                gamma_trace.push(gamma);
                solve_penalized_step(&hessian, &penalty, gamma, &score)
            }
            None => newton_step(&hessian, &score),
        };
        let delta = match step {
            Ok(d) => d,
            Err(_) => {
                return finish(
                    obj,
                    theta,
                    StopReason::LinearAlgebraFailure,
                    iter,
                    gamma_trace,
                    loglik_trace,
                );
            }
        };
        iter += 1;

        let candidate = &theta + &delta;
        let step_small = delta.norm() < opts.eps2 * (theta.norm() + opts.eps2);
        if !obj.in_domain(&candidate) {
            return finish(obj, theta, StopReason::LeftDomain, iter, gamma_trace, loglik_trace);
        }
        theta = candidate;
        loglik_trace.push(obj.loglik(&theta));
        if step_small {
            return finish(obj, theta, StopReason::StepSmall, iter, gamma_trace, loglik_trace);
        }
        score = obj.score(&theta);
        hessian = obj.hessian(&theta);
    }
}

/// Newton step Δ = −H⁻¹ s via a Cholesky factorization of −H.
pub fn newton_step(hessian: &DMatrix<f64>, score: &DVector<f64>) -> Result<DVector<f64>> {
    let chol = (-hessian.clone())
        .cholesky()
        .ok_or(Error::LinearAlgebraFailure("Hessian is not negative definite"))?;
    Ok(chol.solve(score))
}

/// Iterates the raw fixed-γ penalized map for `steps` steps, recording each
/// iterate. Used for the numerical verification of the local linear
/// convergence rate; no stopping rules are applied.
pub fn penalized_orbit(
    obj: &dyn Objective,
    theta0: &DVector<f64>,
    gamma: f64,
    penalty: PenaltyKind,
    steps: usize,
) -> Result<Vec<DVector<f64>>> {
    let mut orbit = Vec::with_capacity(steps + 1);
    orbit.push(theta0.clone());
    let mut theta = theta0.clone();
    for _ in 0..steps {
        if !obj.in_domain(&theta) {
            return Err(Error::DomainError("orbit left the parameter space".into()));
        }
        let hessian = obj.hessian(&theta);
        let score = obj.score(&theta);
        let penalty_diag = penalty_matrix(&hessian, penalty)?;
        let delta = solve_penalized_step(&hessian, &penalty_diag, gamma, &score)?;
        theta += delta;
        orbit.push(theta.clone());
    }
    Ok(orbit)
}

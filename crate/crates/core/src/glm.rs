//! Multivariate generalized linear model with natural link: score, Fisher
//! information, IRLS working-variate step, and the fit wrapper over the
//! penalized Newton optimizer. Under the natural link θᵢ = Zᵢβ the Fisher
//! information equals the negated Hessian, so Newton–Raphson and Fisher
//! scoring coincide.
//!
//! Also houses the numerical side of the local-convergence theorem: the
//! spectral radius of I − (H + γP)⁻¹H, which bounds the per-iteration error
//! contraction of the fixed-γ penalized map near the maximum.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::optim::{maximize, FitOptions, FitResult, Objective};

/// Log-partition function b(θ) of a K-dimensional exponential family:
/// its gradient is the mean and its Hessian the (dispersion-free)
/// covariance of the sufficient statistic.
pub trait LogPartition {
    /// Response dimension K.
    fn dim(&self) -> usize;
    fn value(&self, theta: &DVector<f64>) -> f64;
    fn grad(&self, theta: &DVector<f64>) -> DVector<f64>;
    fn hess(&self, theta: &DVector<f64>) -> DMatrix<f64>;
    fn in_domain(&self, theta: &DVector<f64>) -> bool;
}

/// Independent Poisson components: b(θ) = Σ exp θ_r.
#[derive(Debug, Clone)]
pub struct PoissonPartition {
    pub dim: usize,
}

impl LogPartition for PoissonPartition {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, theta: &DVector<f64>) -> f64 {
        theta.iter().map(|&t| t.exp()).sum()
    }
    fn grad(&self, theta: &DVector<f64>) -> DVector<f64> {
        theta.map(|t| t.exp())
    }
    fn hess(&self, theta: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_diagonal(&theta.map(|t| t.exp()))
    }
    fn in_domain(&self, theta: &DVector<f64>) -> bool {
        theta.iter().all(|t| t.is_finite() && *t < 700.0)
    }
}

/// Unit-variance Gaussian components: b(θ) = ½‖θ‖².
#[derive(Debug, Clone)]
pub struct GaussianPartition {
    pub dim: usize,
}

impl LogPartition for GaussianPartition {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, theta: &DVector<f64>) -> f64 {
        0.5 * theta.dot(theta)
    }
    fn grad(&self, theta: &DVector<f64>) -> DVector<f64> {
        theta.clone()
    }
    fn hess(&self, _theta: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::identity(self.dim, self.dim)
    }
    fn in_domain(&self, theta: &DVector<f64>) -> bool {
        theta.iter().all(|t| t.is_finite())
    }
}

/// Dirichlet in natural coordinates θ = α − 1:
/// b(θ) = Σ lnΓ(θ_k + 1) − lnΓ(Σ(θ_k + 1)).
#[derive(Debug, Clone)]
pub struct DirichletPartition {
    pub dim: usize,
}

impl LogPartition for DirichletPartition {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, theta: &DVector<f64>) -> f64 {
        use crate::special::ln_gamma;
        let alphas = theta.map(|t| t + 1.0);
        alphas.iter().map(|&a| ln_gamma(a)).sum::<f64>() - ln_gamma(alphas.sum())
    }
    fn grad(&self, theta: &DVector<f64>) -> DVector<f64> {
        use crate::special::digamma;
        let alphas = theta.map(|t| t + 1.0);
        let d_total = digamma(alphas.sum());
        alphas.map(|a| digamma(a) - d_total)
    }
    fn hess(&self, theta: &DVector<f64>) -> DMatrix<f64> {
        use crate::special::trigamma;
        let alphas = theta.map(|t| t + 1.0);
        let c = trigamma(alphas.sum());
        let mut h = DMatrix::from_element(self.dim, self.dim, -c);
        for (i, &a) in alphas.iter().enumerate() {
            h[(i, i)] += trigamma(a);
        }
        h
    }
    fn in_domain(&self, theta: &DVector<f64>) -> bool {
        theta.iter().all(|&t| t.is_finite() && t > -1.0)
    }
}

/// Model data: per-observation design blocks Zᵢ (K×p), the stacked
/// observation vector (n·K), known positive weights ωᵢ and dispersion φ.
pub struct GlmModel<B: LogPartition> {
    z_blocks: Vec<DMatrix<f64>>,
    y: DVector<f64>,
    weights: Vec<f64>,
    phi: f64,
    partition: B,
}

impl<B: LogPartition> GlmModel<B> {
    pub fn new(
        z_blocks: Vec<DMatrix<f64>>,
        y: DVector<f64>,
        weights: Vec<f64>,
        phi: f64,
        partition: B,
    ) -> Result<Self> {
        let n = z_blocks.len();
        if n == 0 {
            return Err(Error::InvalidArgument("no observations".into()));
        }
        let k = partition.dim();
        let p = z_blocks[0].ncols();
        for (i, z) in z_blocks.iter().enumerate() {
            if z.nrows() != k || z.ncols() != p {
                return Err(Error::InvalidArgument(format!(
                    "design block {i} is {}×{}, expected {k}×{p}",
                    z.nrows(),
                    z.ncols()
                )));
            }
        }
        if y.len() != n * k {
            return Err(Error::InvalidArgument(format!(
                "stacked observations have length {}, expected {}",
                y.len(),
                n * k
            )));
        }
        if weights.len() != n || weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::InvalidArgument(
                "need one positive weight per observation".into(),
            ));
        }
        if !(phi > 0.0) {
            return Err(Error::InvalidArgument(format!("dispersion {phi} must be positive")));
        }
        Ok(Self {
            z_blocks,
            y,
            weights,
            phi,
            partition,
        })
    }

    pub fn n_obs(&self) -> usize {
        self.z_blocks.len()
    }

    pub fn n_params(&self) -> usize {
        self.z_blocks[0].ncols()
    }

    pub fn response_dim(&self) -> usize {
        self.partition.dim()
    }

    pub fn partition(&self) -> &B {
        &self.partition
    }

    fn y_block(&self, i: usize) -> DVector<f64> {
        let k = self.response_dim();
        self.y.rows(i * k, k).into_owned()
    }

    fn theta_i(&self, i: usize, beta: &DVector<f64>) -> DVector<f64> {
        &self.z_blocks[i] * beta
    }

    /// All natural parameters θᵢ = Zᵢβ inside the family's domain.
    pub fn in_domain(&self, beta: &DVector<f64>) -> bool {
        beta.iter().all(|v| v.is_finite())
            && (0..self.n_obs()).all(|i| self.partition.in_domain(&self.theta_i(i, beta)))
    }

    fn check_domain(&self, beta: &DVector<f64>) -> Result<()> {
        if self.in_domain(beta) {
            Ok(())
        } else {
            Err(Error::DomainError(
                "a linear predictor leaves the natural parameter space".into(),
            ))
        }
    }

    /// Log-likelihood Σᵢ (ωᵢ/φ)[yᵢ′θᵢ − b(θᵢ)].
    pub fn loglik(&self, beta: &DVector<f64>) -> Result<f64> {
        self.check_domain(beta)?;
        let mut l = 0.0;
        for i in 0..self.n_obs() {
            let theta = self.theta_i(i, beta);
            let yi = self.y_block(i);
            l += self.weights[i] / self.phi * (yi.dot(&theta) - self.partition.value(&theta));
        }
        Ok(l)
    }
}

/// Natural-link score: Σᵢ Zᵢ′(ωᵢ/φ)[yᵢ − ∇b(Zᵢβ)].
pub fn glm_score<B: LogPartition>(model: &GlmModel<B>, beta: &DVector<f64>) -> Result<DVector<f64>> {
    model.check_domain(beta)?;
    let mut s = DVector::zeros(model.n_params());
    for i in 0..model.n_obs() {
        let theta = model.theta_i(i, beta);
        let residual = model.y_block(i) - model.partition.grad(&theta);
        s += model.z_blocks[i].transpose() * residual * (model.weights[i] / model.phi);
    }
    Ok(s)
}

/// Fisher information Σᵢ Zᵢ′(ωᵢ/φ)∇²b(Zᵢβ)Zᵢ. Under the natural link this
/// equals the negated Hessian of the log-likelihood.
pub fn glm_fisher<B: LogPartition>(model: &GlmModel<B>, beta: &DVector<f64>) -> Result<DMatrix<f64>> {
    model.check_domain(beta)?;
    let p = model.n_params();
    let mut f = DMatrix::zeros(p, p);
    for i in 0..model.n_obs() {
        let theta = model.theta_i(i, beta);
        let w = model.weights[i] / model.phi;
        let zt = model.z_blocks[i].transpose();
        f += (&zt * model.partition.hess(&theta) * &model.z_blocks[i]) * w;
    }
    Ok((&f + f.transpose()) * 0.5)
}

/// One IRLS step through the working variate:
/// β⁺ = (Z′WZ)⁻¹ Z′W [Zβ + D⁻¹(y − μ)]. Algebraically identical to the
/// Fisher-scoring update β + F⁻¹s.
pub fn irls_step<B: LogPartition>(model: &GlmModel<B>, beta: &DVector<f64>) -> Result<DVector<f64>> {
    model.check_domain(beta)?;
    let p = model.n_params();
    let mut lhs = DMatrix::zeros(p, p);
    let mut rhs = DVector::zeros(p);
    for i in 0..model.n_obs() {
        let theta = model.theta_i(i, beta);
        let w = model.weights[i] / model.phi;
        let bi = model.partition.hess(&theta);
        // Working variate: θᵢ + Bᵢ⁻¹(yᵢ − μᵢ), with W = w·Bᵢ and D = Bᵢ.
        let residual = model.y_block(i) - model.partition.grad(&theta);
        let adj = bi
            .clone()
            .cholesky()
            .ok_or(Error::LinearAlgebraFailure(
                "response covariance is not positive definite",
            ))?
            .solve(&residual);
        let working = &theta + adj;
        let zt = model.z_blocks[i].transpose();
        lhs += (&zt * &bi * &model.z_blocks[i]) * w;
        rhs += (&zt * (&bi * working)) * w;
    }
    lhs.cholesky()
        .ok_or(Error::LinearAlgebraFailure("Fisher information is singular"))
        .map(|c| c.solve(&rhs))
}

/// The GLM log-likelihood as an optimizer objective over the coefficient
/// vector β; the Hessian handed to the optimizer is the negated Fisher
/// information. Valid β are those whose linear predictors all stay in the
/// family's natural parameter space.
pub struct GlmObjective<'a, B: LogPartition> {
    model: &'a GlmModel<B>,
}

impl<'a, B: LogPartition> GlmObjective<'a, B> {
    pub fn new(model: &'a GlmModel<B>) -> Self {
        Self { model }
    }
}

impl<B: LogPartition> Objective for GlmObjective<'_, B> {
    fn dim(&self) -> usize {
        self.model.n_params()
    }
    fn loglik(&self, beta: &DVector<f64>) -> f64 {
        self.model.loglik(beta).unwrap_or(f64::NEG_INFINITY)
    }
    fn score(&self, beta: &DVector<f64>) -> DVector<f64> {
        glm_score(self.model, beta)
            .unwrap_or_else(|_| DVector::from_element(self.model.n_params(), f64::NAN))
    }
    fn hessian(&self, beta: &DVector<f64>) -> DMatrix<f64> {
        match glm_fisher(self.model, beta) {
            Ok(f) => -f,
            Err(_) => {
                let p = self.model.n_params();
                DMatrix::from_element(p, p, f64::NAN)
            }
        }
    }
    fn in_domain(&self, beta: &DVector<f64>) -> bool {
        self.model.in_domain(beta)
    }
}

/// Maximizes the GLM log-likelihood with the configured algorithm; the
/// Hessian passed to the optimizer is the negated Fisher information.
pub fn glm_fit<B: LogPartition>(
    model: &GlmModel<B>,
    beta0: &DVector<f64>,
    opts: &FitOptions,
) -> FitResult {
    maximize(&GlmObjective::new(model), beta0, opts)
}

/// Spectral radius of I − (H + γP)⁻¹H, the local linear rate of the
/// fixed-γ penalized iteration. H must be negative definite and P a
/// negative-definite diagonal; the result lies strictly inside (0, 1).
pub fn iteration_map_rate(
    hessian: &DMatrix<f64>,
    penalty_diag: &DVector<f64>,
    gamma: f64,
) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidArgument(format!("gamma {gamma} must be positive")));
    }
    let d = hessian.nrows();
    if penalty_diag.len() != d || hessian.ncols() != d {
        return Err(Error::InvalidMatrix("dimension mismatch"));
    }
    if penalty_diag.iter().any(|&p| !(p < 0.0)) {
        return Err(Error::InvalidMatrix("penalty must be negative definite"));
    }
    // I − (H+γP)⁻¹H = (H+γP)⁻¹(γP) = S⁻¹T with S = −(H+γP), T = −γP, both
    // SPD, so the eigenvalues equal those of the symmetric L⁻¹TL⁻ᵀ.
    let mut s = -hessian.clone();
    for i in 0..d {
        s[(i, i)] -= gamma * penalty_diag[i];
    }
    let chol = s
        .cholesky()
        .ok_or(Error::InvalidMatrix("Hessian is not negative definite"))?;
    let l = chol.l();
    let t = DMatrix::from_diagonal(&penalty_diag.map(|p| -gamma * p));
    let linv_t = l
        .clone()
        .solve_lower_triangular(&t)
        .ok_or(Error::LinearAlgebraFailure("triangular solve failed"))?;
    let sym = l
        .solve_lower_triangular(&linv_t.transpose())
        .ok_or(Error::LinearAlgebraFailure("triangular solve failed"))?;
    let sym = (&sym + sym.transpose()) * 0.5;
    let radius = sym
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(0.0_f64, |acc, &l| acc.max(l.abs()));
    Ok(radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::{dirichlet_score, sample_dirichlet, DirichletSuffStats};
    use crate::numdiff;
    use crate::optim::Algorithm;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn poisson_model(designs: Vec<DMatrix<f64>>, y: Vec<f64>) -> GlmModel<PoissonPartition> {
        let k = designs[0].nrows();
        let n = designs.len();
        GlmModel::new(
            designs,
            DVector::from_vec(y),
            vec![1.0; n],
            1.0,
            PoissonPartition { dim: k },
        )
        .unwrap()
    }

    fn random_poisson_model(seed: u64, n: usize, k: usize, p: usize) -> GlmModel<PoissonPartition> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let designs: Vec<DMatrix<f64>> = (0..n)
            .map(|_| DMatrix::from_fn(k, p, |_, _| rng.gen::<f64>() - 0.5))
            .collect();
        let y: Vec<f64> = (0..n * k).map(|_| rng.gen_range(0.0..5.0)).collect();
        poisson_model(designs, y)
    }

    #[test]
    fn poisson_score_hand_example() {
        // Z = (1; 1), y = (1, 3), β = ln 2: score = (1 − 2) + (3 − 2) = 0.
        let model = poisson_model(
            vec![DMatrix::from_element(1, 1, 1.0), DMatrix::from_element(1, 1, 1.0)],
            vec![1.0, 3.0],
        );
        let beta = DVector::from_element(1, 2.0_f64.ln());
        let s = glm_score(&model, &beta).unwrap();
        assert!(s[0].abs() < 1e-14);
    }

    #[test]
    fn score_vanishes_when_residuals_vanish() {
        let model = random_poisson_model(3, 4, 2, 3);
        let beta = DVector::from_vec(vec![0.1, -0.2, 0.3]);
        // Rebuild the model with y = ∇b(Zᵢβ).
        let mut y = Vec::new();
        for i in 0..4 {
            let theta = &model.z_blocks[i] * &beta;
            y.extend(model.partition.grad(&theta).iter());
        }
        let exact = GlmModel::new(
            model.z_blocks.clone(),
            DVector::from_vec(y),
            vec![1.0; 4],
            1.0,
            PoissonPartition { dim: 2 },
        )
        .unwrap();
        assert!(glm_score(&exact, &beta).unwrap().norm() < 1e-12);
    }

    #[test]
    fn score_matches_finite_differences() {
        let model = random_poisson_model(11, 5, 2, 3);
        let beta = DVector::from_vec(vec![0.2, 0.0, -0.4]);
        let analytic = glm_score(&model, &beta).unwrap();
        let fd = numdiff::gradient(|b| model.loglik(b).unwrap(), &beta, 1e-6);
        assert!(numdiff::max_rel_diff(&analytic, &fd, 1e-6) < 1e-6);
    }

    #[test]
    fn fisher_matches_negated_fd_hessian() {
        let model = random_poisson_model(17, 6, 2, 3);
        let beta = DVector::from_vec(vec![0.3, -0.1, 0.2]);
        let fisher = glm_fisher(&model, &beta).unwrap();
        let fd = numdiff::jacobian(|b| glm_score(&model, b).unwrap(), &beta, 1e-5);
        assert!(numdiff::max_rel_diff_mat(&fisher, &(-fd), 1e-6) < 1e-5);
    }

    #[test]
    fn fisher_single_identity_block_is_hess_b() {
        let model = poisson_model(vec![DMatrix::identity(2, 2)], vec![1.0, 2.0]);
        let beta = DVector::from_vec(vec![0.4, -0.3]);
        let f = glm_fisher(&model, &beta).unwrap();
        let want = model.partition.hess(&beta);
        assert!(numdiff::max_rel_diff_mat(&f, &want, 1e-12) < 1e-12);
    }

    #[test]
    fn fisher_is_linear_in_weights() {
        let designs = vec![
            DMatrix::from_row_slice(2, 2, &[1.0, 0.2, -0.1, 0.9]),
            DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.3, -0.6]),
        ];
        let y = DVector::from_vec(vec![1.0, 0.0, 2.0, 1.0]);
        let beta = DVector::from_vec(vec![0.1, 0.2]);
        let single = GlmModel::new(
            designs.clone(),
            y.clone(),
            vec![1.0, 1.0],
            1.0,
            PoissonPartition { dim: 2 },
        )
        .unwrap();
        let doubled = GlmModel::new(designs, y, vec![2.0, 2.0], 1.0, PoissonPartition { dim: 2 })
            .unwrap();
        let f1 = glm_fisher(&single, &beta).unwrap();
        let f2 = glm_fisher(&doubled, &beta).unwrap();
        assert!(numdiff::max_rel_diff_mat(&(f1 * 2.0), &f2, 1e-12) < 1e-12);
    }

    #[test]
    fn irls_equals_fisher_scoring_update() {
        let model = random_poisson_model(23, 6, 2, 3);
        let beta = DVector::from_vec(vec![0.15, -0.25, 0.05]);
        let irls = irls_step(&model, &beta).unwrap();
        let s = glm_score(&model, &beta).unwrap();
        let f = glm_fisher(&model, &beta).unwrap();
        let scoring = &beta + f.cholesky().unwrap().solve(&s);
        assert!(
            (&irls - &scoring).norm() <= 1e-10 * scoring.norm().max(1.0),
            "irls {:?} vs scoring {:?}",
            irls.as_slice(),
            scoring.as_slice()
        );
    }

    #[test]
    fn irls_fixed_point_at_mle() {
        let model = poisson_model(
            vec![DMatrix::from_element(1, 1, 1.0), DMatrix::from_element(1, 1, 1.0)],
            vec![1.0, 3.0],
        );
        let beta = DVector::from_element(1, 2.0_f64.ln());
        let next = irls_step(&model, &beta).unwrap();
        assert!((next[0] - beta[0]).abs() < 1e-10);
    }

    #[test]
    fn irls_gaussian_solves_in_one_step() {
        // Identity link with Gaussian components: the working variate is y
        // itself, so one step lands on the weighted least-squares solution.
        let designs = vec![
            DMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
            DMatrix::from_row_slice(1, 2, &[1.0, 1.0]),
            DMatrix::from_row_slice(1, 2, &[1.0, 2.0]),
        ];
        let y = DVector::from_vec(vec![0.9, 2.1, 3.2]);
        let model = GlmModel::new(
            designs.clone(),
            y.clone(),
            vec![1.0; 3],
            1.0,
            GaussianPartition { dim: 1 },
        )
        .unwrap();
        let beta1 = irls_step(&model, &DVector::from_vec(vec![-5.0, 7.0])).unwrap();
        // Normal equations for the 3×2 stacked design.
        let z = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0]);
        let want = (z.transpose() * &z)
            .cholesky()
            .unwrap()
            .solve(&(z.transpose() * &y));
        assert!((&beta1 - &want).norm() < 1e-12);
        // And it is already the MLE: score vanishes.
        assert!(glm_score(&model, &beta1).unwrap().norm() < 1e-12);
    }

    #[test]
    fn glm_fit_poisson_closed_form() {
        let model = poisson_model(
            vec![DMatrix::from_element(1, 1, 1.0), DMatrix::from_element(1, 1, 1.0)],
            vec![1.0, 3.0],
        );
        let fit = glm_fit(&model, &DVector::zeros(1), &FitOptions::default());
        assert!(fit.converged);
        assert!((fit.theta_hat[0] - 2.0_f64.ln()).abs() < 1e-8);
    }

    #[test]
    fn glm_fit_identity_design_matches_bare_dirichlet() {
        // Identity design blocks with the Dirichlet log-partition reproduce
        // plain Dirichlet maximum likelihood in θ = α − 1.
        let alpha = DVector::from_vec(vec![2.0, 3.0, 4.0]);
        let data = sample_dirichlet(&alpha, 40, 2024).unwrap();
        let stats = DirichletSuffStats::from_data(&data);
        let k = 3;
        let designs: Vec<DMatrix<f64>> = (0..data.n()).map(|_| DMatrix::identity(k, k)).collect();
        let mut y = Vec::with_capacity(data.n() * k);
        for r in 0..data.n() {
            for c in 0..k {
                y.push(data.get(r, c).ln());
            }
        }
        let model = GlmModel::new(
            designs,
            DVector::from_vec(y),
            vec![1.0; data.n()],
            1.0,
            DirichletPartition { dim: k },
        )
        .unwrap();
        let beta0 = DVector::from_element(k, 0.0); // α = 1
        // Scores agree at the start.
        let glm_s = glm_score(&model, &beta0).unwrap();
        let dir_s = dirichlet_score(&beta0.map(|t| t + 1.0), &stats).unwrap();
        assert!(numdiff::max_rel_diff(&glm_s, &dir_s, 1e-9) < 1e-9);
        // And the fits land on the same maximizer.
        let glm = glm_fit(&model, &beta0, &FitOptions::default());
        assert!(glm.converged);
        let dir = maximize(
            &crate::dirichlet::DirichletObjective::new(stats),
            &DVector::from_element(k, 1.0),
            &FitOptions::default(),
        );
        assert!(dir.converged);
        let alpha_glm = glm.theta_hat.map(|t| t + 1.0);
        assert!((&alpha_glm - &dir.theta_hat).norm() < 1e-6 * dir.theta_hat.norm());
    }

    #[test]
    fn nr_and_lm_reach_identical_optimum() {
        let model = random_poisson_model(31, 8, 2, 3);
        let beta0 = DVector::zeros(3);
        let lm = glm_fit(&model, &beta0, &FitOptions::default());
        let nr = glm_fit(
            &model,
            &beta0,
            &FitOptions::with_algorithm(Algorithm::NewtonRaphson),
        );
        assert!(lm.converged && nr.converged);
        assert!((&lm.theta_hat - &nr.theta_hat).norm() < 1e-8 * (1.0 + nr.theta_hat.norm()));
    }

    #[test]
    fn observed_equals_expected_information_under_natural_link() {
        // Fi,obs = Fi − Ri with Ri ≡ 0 for the natural link: the negated FD
        // Hessian of the log-likelihood must equal the Fisher information
        // even far from the MLE and with rough residuals.
        let model = random_poisson_model(41, 5, 3, 2);
        let beta = DVector::from_vec(vec![0.6, -0.8]);
        let fisher = glm_fisher(&model, &beta).unwrap();
        let fd_hess = numdiff::jacobian(|b| glm_score(&model, b).unwrap(), &beta, 1e-5);
        assert!(numdiff::max_rel_diff_mat(&fisher, &(-fd_hess), 1e-6) < 1e-5);
    }

    #[test]
    fn rate_scalar_cases() {
        // P = H diagonal: rate = γ/(1+γ).
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![-3.0, -0.5]));
        let p = h.diagonal();
        let rate = iteration_map_rate(&h, &p, 1.0).unwrap();
        assert!((rate - 0.5).abs() < 1e-12);
        // γ → 0 drives the rate to 0.
        let rate_small = iteration_map_rate(&h, &p, 1e-12).unwrap();
        assert!(rate_small < 1e-11);
    }

    #[test]
    fn rate_eigenvalue_example() {
        // H = diag(−1, −4), P = −I, γ = 2: eigenvalues 2/3 and 1/3.
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, -4.0]));
        let p = DVector::from_element(2, -1.0);
        let rate = iteration_map_rate(&h, &p, 2.0).unwrap();
        assert!((rate - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn rate_rejects_indefinite_inputs() {
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -4.0]));
        let p = DVector::from_element(2, -1.0);
        assert!(iteration_map_rate(&h, &p, 1.0).is_err());
        let h2 = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, -4.0]));
        let p2 = DVector::from_vec(vec![-1.0, 0.0]);
        assert!(iteration_map_rate(&h2, &p2, 1.0).is_err());
    }
}

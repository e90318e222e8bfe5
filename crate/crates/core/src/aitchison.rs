//! The Aitchison distribution on the simplex: log-likelihood with a
//! numerically evaluated log-partition function, starting values from the
//! additive logistic normal, and a random-walk Metropolis sampler.
//!
//! The log-likelihood for n observations is
//!
//! ```text
//! l = −n log c(α, β) + Σ (αi − 1) Ui + Σ_{i<j} βij Vij
//! Ui  = Σ_r ln y_ri
//! Vij = −½ Σ_r (ln y_ri − ln y_rj)²
//! ```
//!
//! The normalizing factor c(α, β) has no closed form. It is evaluated in
//! additive log-ratio coordinates (reference = last component) by tensor
//! Gauss–Hermite quadrature centered at the mode of the integrand and scaled
//! by the local curvature. The same node pass yields E[T] and Cov[T] for the
//! packed sufficient statistic T, which are the score and Hessian
//! ingredients of the exponential family.

use std::cell::RefCell;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::composition::{alr, alr_inv_row, CompositionMatrix};
use crate::error::{Error, Result};
use crate::optim::Objective;
use crate::quadrature::{GaussHermite, QuadratureGrid};

/// Largest supported alr dimension (K − 1) for the tensor grid.
pub const MAX_QUAD_DIM: usize = 6;

/// Default nodes per dimension: 10 for K ≤ 4, 8 for larger K to keep the
/// tensor grid at or below 4096 nodes.
pub fn default_quad_order(k: usize) -> usize {
    if k <= 4 {
        10
    } else {
        8
    }
}

/// Aitchison parameters: α (length K) and the strictly-upper-triangular
/// interaction coefficients β_ij, i < j, stored row-major.
///
/// Unlike the Dirichlet, the α need not be positive: the parameters are
/// admissible exactly when the log-partition function is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct AitchisonParams {
    pub alpha: DVector<f64>,
    beta: Vec<f64>,
}

/// Number of packed parameters, K(K+1)/2.
pub fn packed_len(k: usize) -> usize {
    k * (k + 1) / 2
}

/// Index of the pair (i, j), i < j, in the row-major upper triangle.
fn pair_index(i: usize, j: usize, k: usize) -> usize {
    debug_assert!(i < j && j < k);
    i * k - i * (i + 1) / 2 + (j - i - 1)
}

impl AitchisonParams {
    pub fn new(alpha: DVector<f64>, beta: Vec<f64>) -> Result<Self> {
        let k = alpha.len();
        if k < 2 {
            return Err(Error::InvalidArgument(
                "Aitchison parameters need at least two components".into(),
            ));
        }
        if beta.len() != k * (k - 1) / 2 {
            return Err(Error::InvalidArgument(format!(
                "beta has {} entries, expected {}",
                beta.len(),
                k * (k - 1) / 2
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// A Dirichlet(α) member of the family: β ≡ 0.
    pub fn dirichlet(alpha: DVector<f64>) -> Self {
        let k = alpha.len();
        Self {
            alpha,
            beta: vec![0.0; k * (k - 1) / 2],
        }
    }

    pub fn k(&self) -> usize {
        self.alpha.len()
    }

    /// β_ij for i < j.
    pub fn beta(&self, i: usize, j: usize) -> f64 {
        self.beta[pair_index(i, j, self.k())]
    }

    pub fn beta_slice(&self) -> &[f64] {
        &self.beta
    }

    /// Packed vector (α₁…α_K, β₁₂, β₁₃, …, β_{K−1,K}).
    pub fn packed(&self) -> DVector<f64> {
        let mut v = DVector::zeros(packed_len(self.k()));
        v.rows_mut(0, self.k()).copy_from(&self.alpha);
        for (idx, &b) in self.beta.iter().enumerate() {
            v[self.k() + idx] = b;
        }
        v
    }

    /// Natural parameters (α − 1 alongside β), the coordinates the
    /// optimizer works in.
    pub fn natural_packed(&self) -> DVector<f64> {
        let mut v = self.packed();
        for i in 0..self.k() {
            v[i] -= 1.0;
        }
        v
    }

    pub fn from_packed(k: usize, packed: &DVector<f64>) -> Result<Self> {
        if packed.len() != packed_len(k) {
            return Err(Error::InvalidArgument(format!(
                "packed vector has {} entries, expected {}",
                packed.len(),
                packed_len(k)
            )));
        }
        let alpha = packed.rows(0, k).into_owned();
        let beta = packed.as_slice()[k..].to_vec();
        Self::new(alpha, beta)
    }

    pub fn from_natural_packed(k: usize, natural: &DVector<f64>) -> Result<Self> {
        let mut packed = natural.clone();
        for i in 0..k.min(packed.len()) {
            packed[i] += 1.0;
        }
        Self::from_packed(k, &packed)
    }
}

/// Sufficient statistics of a sample: n, U (length K) and the upper
/// triangle V (length K(K−1)/2, all entries ≤ 0).
#[derive(Debug, Clone)]
pub struct AitchisonSuffStats {
    pub n: usize,
    pub u: DVector<f64>,
    pub v: Vec<f64>,
}

impl AitchisonSuffStats {
    pub fn from_data(data: &CompositionMatrix) -> Self {
        let k = data.k();
        let n = data.n();
        let mut u = DVector::zeros(k);
        let mut v = vec![0.0; k * (k - 1) / 2];
        for r in 0..n {
            let logs: Vec<f64> = (0..k).map(|c| data.get(r, c).ln()).collect();
            for i in 0..k {
                u[i] += logs[i];
            }
            for i in 0..k - 1 {
                for j in i + 1..k {
                    let d = logs[i] - logs[j];
                    v[pair_index(i, j, k)] -= 0.5 * d * d;
                }
            }
        }
        Self { n, u, v }
    }

    pub fn k(&self) -> usize {
        self.u.len()
    }

    /// Stacked statistic (U, V) matching the parameter packing.
    pub fn packed(&self) -> DVector<f64> {
        let k = self.k();
        let mut t = DVector::zeros(packed_len(k));
        t.rows_mut(0, k).copy_from(&self.u);
        for (idx, &x) in self.v.iter().enumerate() {
            t[k + idx] = x;
        }
        t
    }
}

/// Log-partition value and the first two moments of the packed sufficient
/// statistic, all from one shared node pass.
#[derive(Debug, Clone)]
pub struct PartitionMoments {
    pub log_c: f64,
    pub mean_t: DVector<f64>,
    pub cov_t: DMatrix<f64>,
}

/// The log-integrand in alr coordinates (reference = last component):
/// g(z) = Σ a_i z_i − A₀·ln(1 + Σ e^{z_j}) − ½ z′Bz, where a holds the
/// first K−1 entries of α, A₀ = Σα and B encodes the β quadratic.
struct LogIntegrand {
    a: DVector<f64>,
    a0: f64,
    b: DMatrix<f64>,
}

impl LogIntegrand {
    fn new(params: &AitchisonParams) -> Self {
        let k = params.k();
        let d = k - 1;
        let a = params.alpha.rows(0, d).into_owned();
        let a0 = params.alpha.sum();
        let mut b = DMatrix::zeros(d, d);
        for i in 0..d {
            let mut diag = params.beta(i, k - 1);
            for j in 0..d {
                if j == i {
                    continue;
                }
                let (lo, hi) = if i < j { (i, j) } else { (j, i) };
                let beta = params.beta(lo, hi);
                diag += beta;
                b[(i, j)] = -beta;
            }
            b[(i, i)] = diag;
        }
        Self { a, a0, b }
    }

    /// ln(1 + Σ e^{z_j}) evaluated stably.
    fn log1p_sum_exp(z: &DVector<f64>) -> f64 {
        let m = z.iter().fold(0.0_f64, |acc, &v| acc.max(v));
        let mut s = (-m).exp();
        for &v in z.iter() {
            s += (v - m).exp();
        }
        m + s.ln()
    }

    fn value(&self, z: &DVector<f64>) -> f64 {
        self.a.dot(z) - self.a0 * Self::log1p_sum_exp(z) - 0.5 * (&self.b * z).dot(z)
    }

    /// Softmax probabilities p_i = e^{z_i}/(1 + Σ e^{z_j}).
    fn softmax(z: &DVector<f64>) -> DVector<f64> {
        let m = z.iter().fold(0.0_f64, |acc, &v| acc.max(v));
        let mut denom = (-m).exp();
        let mut p = DVector::zeros(z.len());
        for (i, &v) in z.iter().enumerate() {
            let e = (v - m).exp();
            p[i] = e;
            denom += e;
        }
        p / denom
    }

    fn grad(&self, z: &DVector<f64>) -> DVector<f64> {
        &self.a - self.a0 * Self::softmax(z) - &self.b * z
    }

    /// −∇²g = A₀(diag p − pp′) + B.
    fn neg_hessian(&self, z: &DVector<f64>) -> DMatrix<f64> {
        let p = Self::softmax(z);
        let mut m = self.b.clone();
        for i in 0..p.len() {
            m[(i, i)] += self.a0 * p[i];
        }
        m.ger(-self.a0, &p, &p, 1.0);
        m
    }
}

const MODE_GRAD_TOL: f64 = 1e-10;
const MODE_MAX_STEPS: usize = 100;

/// Ascends g by a ridge-stabilized Newton iteration with step halving.
fn find_mode(g: &LogIntegrand, z0: &DVector<f64>) -> Result<DVector<f64>> {
    let mut z = z0.clone();
    let mut value = g.value(&z);
    if !value.is_finite() {
        z = DVector::zeros(z.len());
        value = g.value(&z);
    }
    for _ in 0..MODE_MAX_STEPS {
        let grad = g.grad(&z);
        if !grad.iter().all(|v| v.is_finite()) {
            return Err(Error::ImproperDensity);
        }
        if grad.norm() <= MODE_GRAD_TOL {
            return Ok(z);
        }
        let neg_hess = g.neg_hessian(&z);
        let mut ridge = 0.0_f64;
        let direction = loop {
            let mut m = neg_hess.clone();
            if ridge > 0.0 {
                for i in 0..m.nrows() {
                    m[(i, i)] += ridge;
                }
            }
            match m.cholesky() {
                Some(chol) => break chol.solve(&grad),
                None => {
                    ridge = if ridge == 0.0 { 1e-8 } else { ridge * 10.0 };
                    if ridge > 1e12 {
                        return Err(Error::ImproperDensity);
                    }
                }
            }
        };
        let mut step = 1.0;
        let mut moved = false;
        for _ in 0..60 {
            let trial = &z + step * &direction;
            let trial_value = g.value(&trial);
            if trial_value.is_finite() && trial_value >= value {
                z = trial;
                value = trial_value;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            return Err(Error::ImproperDensity);
        }
    }
    Err(Error::ImproperDensity)
}

/// Packed sufficient statistic T(y(z)): (ln y₁ … ln y_K, −½(ln yᵢ − ln yⱼ)²).
fn suff_stat_at(z: &DVector<f64>, k: usize, out: &mut DVector<f64>) {
    let lse = LogIntegrand::log1p_sum_exp(z);
    for i in 0..k - 1 {
        out[i] = z[i] - lse;
    }
    out[k - 1] = -lse;
    let mut idx = k;
    for i in 0..k - 1 {
        for j in i + 1..k {
            // ln y_i − ln y_j = z_i − z_j, with z_K ≡ 0.
            let d = if j < k - 1 { z[i] - z[j] } else { z[i] };
            out[idx] = -0.5 * d * d;
            idx += 1;
        }
    }
}

fn validate_partition_inputs(params: &AitchisonParams, quad_order: usize) -> Result<()> {
    if quad_order < 3 {
        return Err(Error::InvalidArgument(format!(
            "quadrature order {quad_order} too small, need at least 3"
        )));
    }
    let dim = params.k() - 1;
    if dim > MAX_QUAD_DIM {
        return Err(Error::InvalidArgument(format!(
            "tensor quadrature supports at most {MAX_QUAD_DIM} alr dimensions, got {dim}"
        )));
    }
    Ok(())
}

/// Evaluates log c(α, β), E[T] and Cov[T] by mode-centered Gauss–Hermite
/// quadrature, starting the mode search at `z_start`. Also returns the grid
/// (mode and curvature factor) for reuse by samplers.
pub fn log_partition_from(
    params: &AitchisonParams,
    quad_order: usize,
    z_start: &DVector<f64>,
) -> Result<(PartitionMoments, QuadratureGrid)> {
    validate_partition_inputs(params, quad_order)?;
    let k = params.k();
    let dim = k - 1;
    if z_start.len() != dim {
        return Err(Error::InvalidArgument(format!(
            "mode-search start has length {}, expected {dim}",
            z_start.len()
        )));
    }
    let g = LogIntegrand::new(params);
    let mode = find_mode(&g, z_start)?;
    let neg_hess = g.neg_hessian(&mode);
    let curvature = neg_hess.cholesky().ok_or(Error::ImproperDensity)?;
    let inv_curvature = curvature.inverse();
    let scale = inv_curvature
        .cholesky()
        .ok_or(Error::ImproperDensity)?
        .l();
    let grid = QuadratureGrid::new(GaussHermite::new(quad_order)?, mode, scale)?;

    // Single shared node pass: exponents first (for the log-sum-exp shift),
    // then the weighted moments of T.
    let n_nodes = grid.len();
    let p = packed_len(k);
    let mut zs = DMatrix::zeros(dim, n_nodes);
    let mut exponents = Vec::with_capacity(n_nodes);
    let mut col = 0;
    grid.for_each_node(|z, log_w| {
        zs.set_column(col, z);
        exponents.push(log_w + g.value(z));
        col += 1;
    });
    let max_e = exponents.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max_e.is_finite() {
        return Err(Error::ImproperDensity);
    }
    let mut s0 = 0.0;
    let mut s1 = DVector::zeros(p);
    let mut s2 = DMatrix::zeros(p, p);
    let mut t = DVector::zeros(p);
    for (idx, &e) in exponents.iter().enumerate() {
        let w = (e - max_e).exp();
        if w == 0.0 {
            continue;
        }
        let z = zs.column(idx).into_owned();
        suff_stat_at(&z, k, &mut t);
        s0 += w;
        s1.axpy(w, &t, 1.0);
        s2.ger(w, &t, &t, 1.0);
    }
    let log_c = grid.log_jacobian() + max_e + s0.ln();
    if !log_c.is_finite() {
        return Err(Error::ImproperDensity);
    }
    let mean_t = &s1 / s0;
    let mut cov_t = s2 / s0;
    cov_t.ger(-1.0, &mean_t, &mean_t, 1.0);
    // Kill asymmetric rounding from the rank-one updates.
    let cov_t = (&cov_t + cov_t.transpose()) * 0.5;
    Ok((
        PartitionMoments {
            log_c,
            mean_t,
            cov_t,
        },
        grid,
    ))
}

/// [`log_partition_from`] with the mode search started at the origin (the
/// uniform composition).
pub fn log_partition(params: &AitchisonParams, quad_order: usize) -> Result<PartitionMoments> {
    let dim = params.k().saturating_sub(1);
    log_partition_from(params, quad_order, &DVector::zeros(dim)).map(|(m, _)| m)
}

/// Log-likelihood per the packed statistics: −n log c + (α−1, β)·(U, V).
pub fn aitchison_loglik(
    params: &AitchisonParams,
    stats: &AitchisonSuffStats,
    quad_order: usize,
) -> Result<f64> {
    let moments = log_partition(params, quad_order)?;
    Ok(loglik_given_moments(params, stats, moments.log_c))
}

fn loglik_given_moments(
    params: &AitchisonParams,
    stats: &AitchisonSuffStats,
    log_c: f64,
) -> f64 {
    -(stats.n as f64) * log_c + params.natural_packed().dot(&stats.packed())
}

/// Score in the packed natural coordinates: (U, V) − n·E[T].
pub fn aitchison_score(
    params: &AitchisonParams,
    stats: &AitchisonSuffStats,
    quad_order: usize,
) -> Result<DVector<f64>> {
    let moments = log_partition(params, quad_order)?;
    Ok(stats.packed() - (stats.n as f64) * moments.mean_t)
}

/// Hessian in the packed natural coordinates: −n·Cov[T].
pub fn aitchison_hessian(
    params: &AitchisonParams,
    stats: &AitchisonSuffStats,
    quad_order: usize,
) -> Result<DMatrix<f64>> {
    let moments = log_partition(params, quad_order)?;
    Ok(-(stats.n as f64) * moments.cov_t)
}

/// Maps the closed-form additive-logistic-normal estimates (alr sample mean
/// and covariance) into Aitchison parameters whose log-density differs from
/// the ALN log-density by a constant.
///
/// With A = Σ̂⁻¹ and b = A μ̂ in the alr space with the reference last:
/// β_ij = −A_ij (i < j < K), β_iK = Σ_j A_ij, α_i = b_i, α_K = −Σ b_i.
pub fn init_from_aln(data: &CompositionMatrix, ref_index: usize) -> Result<AitchisonParams> {
    let k = data.k();
    let n = data.n();
    if ref_index >= k {
        return Err(Error::InvalidArgument(format!(
            "reference index {ref_index} out of range for {k} components"
        )));
    }
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    if n < k {
        return Err(Error::InitFailure(format!(
            "alr sample covariance is rank deficient with n = {n} < K = {k}"
        )));
    }
    let z = alr(data, ref_index)?;
    let d = k - 1;
    let mean = DVector::from_iterator(d, z.column_iter().map(|c| c.sum() / n as f64));
    // Maximum-likelihood (1/n) covariance of the fitted normal.
    let mut sigma = DMatrix::zeros(d, d);
    for r in 0..n {
        let centered = z.row(r).transpose() - &mean;
        sigma.ger(1.0 / n as f64, &centered, &centered, 1.0);
    }
    let sigma = (&sigma + sigma.transpose()) * 0.5;
    let chol = sigma.cholesky().ok_or_else(|| {
        Error::InitFailure(format!(
            "alr sample covariance is not positive definite (n = {n}, K = {k})"
        ))
    })?;
    let a_mat = chol.inverse();
    let b_vec = &a_mat * &mean;

    // Permuted order: non-reference components in original order, then the
    // reference last. Map back to original component indices.
    let perm: Vec<usize> = (0..k).filter(|&c| c != ref_index).chain([ref_index]).collect();
    let mut alpha = DVector::zeros(k);
    for i in 0..d {
        alpha[perm[i]] = b_vec[i];
    }
    alpha[ref_index] = -b_vec.sum();
    let mut beta = vec![0.0; k * (k - 1) / 2];
    for i in 0..d {
        for j in i + 1..d {
            let (lo, hi) = ordered(perm[i], perm[j]);
            beta[pair_index(lo, hi, k)] = -a_mat[(i, j)];
        }
        let row_sum: f64 = (0..d).map(|j| a_mat[(i, j)]).sum();
        let (lo, hi) = ordered(perm[i], ref_index);
        beta[pair_index(lo, hi, k)] = row_sum;
    }
    AitchisonParams::new(alpha, beta)
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Unnormalized log-integrand of the normalizing constant in alr
/// coordinates (reference = last component), including the simplex→alr
/// Jacobian: log c = ln ∫ exp{log_integrand(z)} dz.
pub fn log_integrand(params: &AitchisonParams, z: &DVector<f64>) -> f64 {
    LogIntegrand::new(params).value(z)
}

/// Unnormalized Aitchison log-density at a single composition.
pub fn unnormalized_logdensity(params: &AitchisonParams, y: &DVector<f64>) -> f64 {
    let k = params.k();
    let logs: Vec<f64> = y.iter().map(|&v| v.ln()).collect();
    let mut l = 0.0;
    for i in 0..k {
        l += (params.alpha[i] - 1.0) * logs[i];
    }
    for i in 0..k - 1 {
        for j in i + 1..k {
            let d = logs[i] - logs[j];
            l -= 0.5 * params.beta(i, j) * d * d;
        }
    }
    l
}

/// Random-walk Metropolis sampler in alr coordinates targeting the
/// Aitchison density. The proposal is scaled by the curvature factor at the
/// mode; the realized acceptance rate is logged at debug level.
pub fn sample_aitchison(
    params: &AitchisonParams,
    n: usize,
    seed: u64,
    burn_in: usize,
    thin: usize,
) -> Result<CompositionMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let thin = thin.max(1);
    let k = params.k();
    let dim = k - 1;
    let quad_order = default_quad_order(k);
    let (_, grid) = log_partition_from(params, quad_order, &DVector::zeros(dim))?;
    let g = LogIntegrand::new(params);

    // Classic 2.38/√d random-walk scaling of the local covariance factor.
    let step_scale = 2.38 / (dim as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = grid.center().clone();
    let mut log_target = g.value(&z);
    let mut accepted = 0usize;
    let mut proposed = 0usize;
    let mut draw = |z: &mut DVector<f64>, log_target: &mut f64, rng: &mut ChaCha8Rng| {
        let xi = DVector::from_iterator(dim, (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let candidate = &*z + step_scale * (grid.scale() * xi);
        let cand_target = g.value(&candidate);
        proposed += 1;
        if cand_target.is_finite()
            && (cand_target >= *log_target
                || rng.gen::<f64>().ln() < cand_target - *log_target)
        {
            *z = candidate;
            *log_target = cand_target;
            accepted += 1;
        }
    };

    for _ in 0..burn_in {
        draw(&mut z, &mut log_target, &mut rng);
    }
    let mut data = DMatrix::zeros(n, k);
    for r in 0..n {
        for _ in 0..thin {
            draw(&mut z, &mut log_target, &mut rng);
        }
        // Keep advancing past states whose compositions underflow; rows
        // with a component below 1e−300 are rejected like in the gamma
        // sampler.
        let mut extra = 0;
        let y = loop {
            let y = alr_inv_row(&z, k - 1);
            if y.iter().all(|&v| v >= 1e-300) {
                break y;
            }
            extra += 1;
            if extra > 10_000 {
                return Err(Error::NumericalError(
                    "Metropolis chain is stuck in an underflowing region".into(),
                ));
            }
            draw(&mut z, &mut log_target, &mut rng);
        };
        for c in 0..k {
            data[(r, c)] = y[c];
        }
    }
    log::debug!(
        "sample_aitchison: acceptance rate {:.3} over {} proposals",
        accepted as f64 / proposed as f64,
        proposed
    );
    CompositionMatrix::from_closed(data)
}

/// The Aitchison log-likelihood as an optimizer objective over the packed
/// natural parameters (α − 1, β).
///
/// Keeps a one-slot cache of the last partition evaluation so that the
/// score, Hessian, domain check and log-likelihood at one point share a
/// single quadrature pass. The mode search is warm-started from the alr
/// sample mean of the data.
pub struct AitchisonObjective {
    stats: AitchisonSuffStats,
    quad_order: usize,
    z_start: DVector<f64>,
    cache: RefCell<Option<(DVector<f64>, PartitionMoments)>>,
}

impl AitchisonObjective {
    pub fn new(stats: AitchisonSuffStats, quad_order: usize, z_start: DVector<f64>) -> Self {
        Self {
            stats,
            quad_order,
            z_start,
            cache: RefCell::new(None),
        }
    }

    pub fn from_data(data: &CompositionMatrix, quad_order: usize) -> Result<Self> {
        let stats = AitchisonSuffStats::from_data(data);
        let z = alr(data, data.k() - 1)?;
        let n = data.n() as f64;
        let z_start = DVector::from_iterator(z.ncols(), z.column_iter().map(|c| c.sum() / n));
        Ok(Self::new(stats, quad_order, z_start))
    }

    pub fn stats(&self) -> &AitchisonSuffStats {
        &self.stats
    }

    fn moments_at(&self, natural: &DVector<f64>) -> Result<PartitionMoments> {
        if let Some((theta, moments)) = self.cache.borrow().as_ref() {
            if theta == natural {
                return Ok(moments.clone());
            }
        }
        let params = AitchisonParams::from_natural_packed(self.stats.k(), natural)?;
        let (moments, _) = log_partition_from(&params, self.quad_order, &self.z_start)?;
        *self.cache.borrow_mut() = Some((natural.clone(), moments.clone()));
        Ok(moments)
    }
}

impl Objective for AitchisonObjective {
    fn dim(&self) -> usize {
        packed_len(self.stats.k())
    }

    fn loglik(&self, theta: &DVector<f64>) -> f64 {
        match self.moments_at(theta) {
            Ok(moments) => -(self.stats.n as f64) * moments.log_c + theta.dot(&self.stats.packed()),
            Err(_) => f64::NEG_INFINITY,
        }
    }

    fn score(&self, theta: &DVector<f64>) -> DVector<f64> {
        match self.moments_at(theta) {
            Ok(moments) => self.stats.packed() - (self.stats.n as f64) * moments.mean_t,
            Err(_) => DVector::from_element(self.dim(), f64::NAN),
        }
    }

    fn hessian(&self, theta: &DVector<f64>) -> DMatrix<f64> {
        match self.moments_at(theta) {
            Ok(moments) => -(self.stats.n as f64) * moments.cov_t,
            Err(_) => DMatrix::from_element(self.dim(), self.dim(), f64::NAN),
        }
    }

    fn in_domain(&self, theta: &DVector<f64>) -> bool {
        theta.iter().all(|v| v.is_finite()) && self.moments_at(theta).is_ok()
    }
}

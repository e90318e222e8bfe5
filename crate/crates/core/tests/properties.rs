//! Property-level invariants of the optimizer and the Dirichlet objective.

use expfam::dirichlet::{
    dirichlet_hessian, dirichlet_loglik, dirichlet_score, sample_dirichlet, DirichletObjective,
    DirichletSuffStats,
};
use expfam::glm::iteration_map_rate;
use expfam::numdiff;
use expfam::optim::{
    maximize, newton_step, penalty_matrix, solve_penalized_step, update_damping, Algorithm,
    FitOptions, Objective, PenaltyKind,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn random_alpha(seed: u64, k: usize) -> DVector<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    DVector::from_iterator(k, (0..k).map(|_| rng.gen_range(0.5..5.0)))
}

proptest! {
    #[test]
    fn damping_update_stays_positive(gamma in 1e-12..1e6f64, rho in -10.0..10.0f64) {
        prop_assert!(update_damping(gamma, rho) > 0.0);
    }

    #[test]
    fn damping_update_is_continuous(gamma in 1e-3..1e3f64, rho in -1.0..2.0f64) {
        let h = 1e-6;
        let diff = (update_damping(gamma, rho + h) - update_damping(gamma, rho)).abs();
        // The cubic branch has slope ≤ 6|γ| on this range; doubling branch is flat.
        prop_assert!(diff <= 20.0 * gamma * h + 1e-12);
    }

    #[test]
    fn rate_lies_in_unit_interval(
        d1 in 0.05..50.0f64,
        d2 in 0.05..50.0f64,
        d3 in 0.05..50.0f64,
        p1 in 0.05..50.0f64,
        p2 in 0.05..50.0f64,
        p3 in 0.05..50.0f64,
        off in -0.04..0.04f64,
        gamma in 1e-3..1e3f64,
    ) {
        // Diagonally dominant negative-definite H and negative diagonal P.
        let h = DMatrix::from_row_slice(3, 3, &[
            -d1, off * d1, 0.0,
            off * d1, -d2, off * d2,
            0.0, off * d2, -d3,
        ]);
        let p = DVector::from_vec(vec![-p1, -p2, -p3]);
        let rate = iteration_map_rate(&h, &p, gamma).unwrap();
        prop_assert!(rate > 0.0 && rate < 1.0, "rate {rate}");
    }

    #[test]
    fn gain_denominator_positive_for_negative_definite_hessian(
        seed in 0u64..5000,
        scale in 0.01..10.0f64,
    ) {
        let alpha = random_alpha(seed, 4);
        let h = dirichlet_hessian(&alpha, 13).unwrap();
        let delta = random_alpha(seed.wrapping_add(1), 4) * scale;
        let den = -0.5 * (&h * &delta).dot(&delta);
        prop_assert!(den > 0.0);
    }
}

/// Newton reduction: the LM step with γ = 1e−12 matches the Newton step to
/// 1e−8 relative on random Dirichlet instances.
#[test]
fn lm_step_reduces_to_newton_as_gamma_vanishes() {
    for seed in 0..50u64 {
        let alpha_true = random_alpha(seed, 5);
        let data = sample_dirichlet(&alpha_true, 50, seed ^ 0xD15EA5E).unwrap();
        let stats = DirichletSuffStats::from_data(&data);
        let at = random_alpha(seed.wrapping_mul(31).wrapping_add(7), 5);
        let h = dirichlet_hessian(&at, stats.n).unwrap();
        let s = dirichlet_score(&at, &stats).unwrap();
        for kind in [PenaltyKind::DiagHessian, PenaltyKind::NegIdentity] {
            let p = penalty_matrix(&h, kind).unwrap();
            let lm = solve_penalized_step(&h, &p, 1e-12, &s).unwrap();
            let nr = newton_step(&h, &s).unwrap();
            let rel = (&lm - &nr).norm() / nr.norm().max(1e-300);
            assert!(rel < 1e-8, "seed {seed}, {kind:?}: relative gap {rel}");
        }
    }
}

/// Contract invariants of the Dirichlet objective: Hessian symmetry, negative
/// definiteness, and agreement of the analytic score with central finite
/// differences at random in-domain points.
#[test]
fn dirichlet_objective_contract() {
    for (seed, k) in [(1u64, 2usize), (2, 5), (3, 50)] {
        let alpha_true = random_alpha(seed, k);
        let data = sample_dirichlet(&alpha_true, 30, seed ^ 0xBEEF).unwrap();
        let stats = DirichletSuffStats::from_data(&data);
        for probe in 0..20u64 {
            let at = random_alpha(seed.wrapping_mul(1000).wrapping_add(probe), k);
            let h = dirichlet_hessian(&at, stats.n).unwrap();
            let sym_gap = (&h - h.transpose()).abs().max() / h.abs().max();
            assert!(sym_gap < 1e-12);
            let max_eig = h
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .fold(f64::NEG_INFINITY, |a, &b| a.max(b));
            assert!(max_eig < 0.0, "k {k} probe {probe}: max eigenvalue {max_eig}");
            let analytic = dirichlet_score(&at, &stats).unwrap();
            let fd = numdiff::gradient(|a| dirichlet_loglik(a, &stats).unwrap(), &at, 1e-5);
            let rel = numdiff::rel_diff_norm(&analytic, &fd);
            assert!(rel < 1e-6, "k {k} probe {probe}: score FD gap {rel}");
        }
    }
}

/// Monotone ascent, damping positivity, and stopping soundness across a
/// batch of adaptive fits.
#[test]
fn adaptive_fit_contract_over_random_instances() {
    let opts = FitOptions::default();
    for seed in 0..30u64 {
        let alpha_true = random_alpha(seed, 6);
        let data = sample_dirichlet(&alpha_true, 40, seed ^ 0xCAFE).unwrap();
        let obj = DirichletObjective::new(DirichletSuffStats::from_data(&data));
        let start = random_alpha(seed.wrapping_add(99), 6);
        let fit = maximize(&obj, &start, &opts);
        assert!(fit.gamma_trace.iter().all(|&g| g > 0.0));
        assert_eq!(fit.gamma_trace[0], 1.0);
        for w in fit.loglik_trace.windows(2) {
            assert!(w[1] >= w[0], "seed {seed}: ascent violated");
        }
        if fit.converged {
            assert!(obj.in_domain(&fit.theta_hat));
            let rel_step_ok = fit.n_iter > 0;
            assert!(
                fit.final_score_norm < opts.eps1 || rel_step_ok,
                "seed {seed}: converged without satisfying a stopping rule"
            );
        }
    }
}

/// LM-adaptive, Newton–Raphson and FPI land on the same maximizer.
#[test]
fn algorithms_agree_on_well_conditioned_instances() {
    use expfam::dirichlet::fpi_fit;
    let opts = FitOptions::default();
    for seed in 0..25u64 {
        let alpha_true = random_alpha(seed, 4);
        let data = sample_dirichlet(&alpha_true, 80, seed ^ 0xF00D).unwrap();
        let stats = DirichletSuffStats::from_data(&data);
        let obj = DirichletObjective::new(stats.clone());
        let start = expfam::dirichlet::init_ronning(&data).unwrap();
        let lm = maximize(&obj, &start, &opts);
        let nr = maximize(
            &obj,
            &start,
            &FitOptions::with_algorithm(Algorithm::NewtonRaphson),
        );
        let fpi = fpi_fit(&stats, &start, &opts);
        assert!(lm.converged && fpi.converged, "seed {seed}");
        let scale = 1.0 + lm.theta_hat.norm();
        assert!((&lm.theta_hat - &fpi.theta_hat).norm() < 1e-6 * scale, "seed {seed} fpi");
        if nr.converged {
            assert!((&lm.theta_hat - &nr.theta_hat).norm() < 1e-6 * scale, "seed {seed} nr");
        }
    }
}

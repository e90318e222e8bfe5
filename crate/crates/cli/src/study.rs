//! Simulation studies and dataset fits. Every study is a pure function of
//! (config, seed): replicates draw from seed substreams derived with a
//! splitmix64 mix, all algorithm×initializer cells within a replicate share
//! the same dataset, and replicates may run concurrently.

use std::path::Path;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use expfam::aitchison::{
    default_quad_order, init_from_aln, log_partition, sample_aitchison, AitchisonObjective,
    AitchisonParams,
};
use expfam::dirichlet::{
    draw_uniform_band_alpha, fpi_fit, init_dishon, init_moments, init_ronning, init_wicker,
    sample_dirichlet, DirichletObjective, DirichletSuffStats,
};
use expfam::optim::{maximize, Algorithm, FitOptions, FitResult};
use expfam::CompositionMatrix;

use crate::config::{AlgorithmKind, BenchConfig, InitializerKind, ModelKind, ParameterLaw};
use crate::ingest::{read_composition_csv, CsvOptions};
use crate::report::{BenchReport, ReplicateRecord};

/// splitmix64 finalizer over (master, stream); deterministic substream
/// derivation for replicate RNGs.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fit_options(config: &BenchConfig, algorithm: AlgorithmKind) -> FitOptions {
    FitOptions {
        maxit: config.maxit,
        algorithm: match algorithm {
            AlgorithmKind::LmAdaptive | AlgorithmKind::Fpi => Algorithm::LMAdaptive,
            AlgorithmKind::LmFixed => Algorithm::LMFixed(config.lm_fixed_gamma),
            AlgorithmKind::NewtonRaphson => Algorithm::NewtonRaphson,
        },
        ..FitOptions::default()
    }
}

fn record_from_fit(
    model: ModelKind,
    algorithm: AlgorithmKind,
    initializer: InitializerKind,
    dimension: usize,
    replicate: usize,
    seed: u64,
    fit: &FitResult,
) -> ReplicateRecord {
    let final_loglik = fit.loglik_trace.last().copied().filter(|l| l.is_finite());
    let final_score_norm = Some(fit.final_score_norm).filter(|s| s.is_finite());
    ReplicateRecord {
        model: model.to_string(),
        algorithm: algorithm.to_string(),
        initializer: initializer.to_string(),
        dimension,
        replicate,
        converged: fit.converged,
        n_iter: fit.n_iter,
        final_loglik,
        final_score_norm,
        stop_reason: fit.stop_reason.to_string(),
        seed,
    }
}

fn failure_record(
    model: ModelKind,
    algorithm: AlgorithmKind,
    initializer: InitializerKind,
    dimension: usize,
    replicate: usize,
    seed: u64,
    reason: &str,
) -> ReplicateRecord {
    ReplicateRecord {
        model: model.to_string(),
        algorithm: algorithm.to_string(),
        initializer: initializer.to_string(),
        dimension,
        replicate,
        converged: false,
        n_iter: 0,
        final_loglik: None,
        final_score_norm: None,
        stop_reason: reason.to_string(),
        seed,
    }
}

/// Dirichlet starting values for one initializer; failures are reported as
/// strings so the harness can record them without aborting the study.
pub fn dirichlet_initializer(
    kind: InitializerKind,
    data: &CompositionMatrix,
) -> Result<DVector<f64>, String> {
    let result = match kind {
        InitializerKind::Moments => init_moments(data),
        InitializerKind::Dishon => init_dishon(data),
        InitializerKind::Ronning => init_ronning(data),
        InitializerKind::Wicker => init_wicker(data),
        InitializerKind::Aln => {
            return Err("ALN initializer applies only to the Aitchison model".into())
        }
    };
    result.map_err(|e| e.to_string())
}

fn run_dirichlet_cell(
    config: &BenchConfig,
    algorithm: AlgorithmKind,
    stats: &DirichletSuffStats,
    objective: &DirichletObjective,
    alpha0: &DVector<f64>,
) -> FitResult {
    let opts = fit_options(config, algorithm);
    match algorithm {
        AlgorithmKind::Fpi => fpi_fit(stats, alpha0, &opts),
        _ => maximize(objective, alpha0, &opts),
    }
}

fn dirichlet_replicate(
    config: &BenchConfig,
    dimension: usize,
    replicate: usize,
    rep_seed: u64,
    totals: &[f64],
    half_width: f64,
) -> Vec<ReplicateRecord> {
    let model = config.model;
    let mut records = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(rep_seed);
    let total = totals[replicate % totals.len()];
    let alpha_true = match draw_uniform_band_alpha(&mut rng, dimension, total, half_width) {
        Ok(a) => a,
        Err(e) => {
            for &init in &config.initializers {
                for &alg in &config.algorithms {
                    records.push(failure_record(
                        model,
                        alg,
                        init,
                        dimension,
                        replicate,
                        rep_seed,
                        &format!("parameter-draw-failure: {e}"),
                    ));
                }
            }
            return records;
        }
    };
    let data = match sample_dirichlet(&alpha_true, config.n_samples, derive_seed(rep_seed, 1)) {
        Ok(d) => d,
        Err(e) => {
            for &init in &config.initializers {
                for &alg in &config.algorithms {
                    records.push(failure_record(
                        model,
                        alg,
                        init,
                        dimension,
                        replicate,
                        rep_seed,
                        &format!("sampling-failure: {e}"),
                    ));
                }
            }
            return records;
        }
    };
    let stats = DirichletSuffStats::from_data(&data);
    let objective = DirichletObjective::new(stats.clone());
    for &init in &config.initializers {
        match dirichlet_initializer(init, &data) {
            Ok(alpha0) => {
                for &alg in &config.algorithms {
                    let fit = run_dirichlet_cell(config, alg, &stats, &objective, &alpha0);
                    records.push(record_from_fit(
                        model, alg, init, dimension, replicate, rep_seed, &fit,
                    ));
                }
            }
            Err(e) => {
                for &alg in &config.algorithms {
                    records.push(failure_record(
                        model,
                        alg,
                        init,
                        dimension,
                        replicate,
                        rep_seed,
                        &format!("init-failure: {e}"),
                    ));
                }
            }
        }
    }
    records
}

/// The Fig. 1-style simulation: per replicate, draw a true α from the
/// uniform band, sample a shared dataset, then run every configured
/// algorithm × initializer cell on it.
pub fn run_dirichlet_study(config: &BenchConfig) -> Result<BenchReport, String> {
    config.validate()?;
    let (totals, half_width) = match &config.parameter_law {
        ParameterLaw::DirichletUniformBand { totals, half_width } => (totals.clone(), *half_width),
        _ => return Err("Dirichlet study needs a Dirichlet parameter law".into()),
    };
    if totals.is_empty() {
        return Err("empty totals grid".into());
    }
    let mut records = Vec::new();
    for (d_idx, &dimension) in config.dimensions.iter().enumerate() {
        let base = (d_idx * config.n_replicates) as u64;
        let per_rep: Vec<Vec<ReplicateRecord>> = (0..config.n_replicates)
            .into_par_iter()
            .map(|rep| {
                let rep_seed = derive_seed(config.seed, base + rep as u64);
                dirichlet_replicate(config, dimension, rep, rep_seed, &totals, half_width)
            })
            .collect();
        records.extend(per_rep.into_iter().flatten());
    }
    Ok(BenchReport::assemble(
        config.model.to_string(),
        config.seed,
        records,
    ))
}

fn draw_aitchison_params(
    rng: &mut ChaCha8Rng,
    k: usize,
    alpha_min: f64,
    alpha_max: f64,
    beta_min: f64,
    beta_max: f64,
) -> AitchisonParams {
    let alpha = DVector::from_iterator(k, (0..k).map(|_| rng.gen_range(alpha_min..alpha_max)));
    let beta: Vec<f64> = (0..k * (k - 1) / 2)
        .map(|_| rng.gen_range(beta_min..beta_max))
        .collect();
    AitchisonParams::new(alpha, beta).expect("structurally valid draw")
}

fn aitchison_replicate(
    config: &BenchConfig,
    dimension: usize,
    replicate: usize,
    rep_seed: u64,
    law: (f64, f64, f64, f64),
) -> Vec<ReplicateRecord> {
    let model = config.model;
    let (alpha_min, alpha_max, beta_min, beta_max) = law;
    let quad_order = if config.quad_order > 0 {
        config.quad_order
    } else {
        default_quad_order(dimension)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(rep_seed);
    let fail_all = |reason: &str| -> Vec<ReplicateRecord> {
        config
            .algorithms
            .iter()
            .map(|&alg| {
                failure_record(
                    model,
                    alg,
                    InitializerKind::Aln,
                    dimension,
                    replicate,
                    rep_seed,
                    reason,
                )
            })
            .collect()
    };

    // Admissible true parameters (finite log-partition).
    let mut params_true = None;
    for _ in 0..50 {
        let candidate =
            draw_aitchison_params(&mut rng, dimension, alpha_min, alpha_max, beta_min, beta_max);
        if log_partition(&candidate, quad_order).is_ok() {
            params_true = Some(candidate);
            break;
        }
    }
    let Some(params_true) = params_true else {
        return fail_all("parameter-draw-failure: no admissible draw in 50 tries");
    };

    // Keep only datasets whose alr sample covariance is positive
    // definite; redraw otherwise.
    let mut attempt = 0u64;
    let (data, init) = loop {
        let data_seed = derive_seed(rep_seed, 1 + attempt);
        let data = match sample_aitchison(
            &params_true,
            config.n_samples,
            data_seed,
            config.mh_burn_in,
            config.mh_thin,
        ) {
            Ok(d) => d,
            Err(e) => return fail_all(&format!("sampling-failure: {e}")),
        };
        match init_from_aln(&data, dimension - 1) {
            Ok(init) => break (data, init),
            Err(_) if attempt < 20 => attempt += 1,
            Err(e) => return fail_all(&format!("init-failure: {e}")),
        }
    };

    let objective = match AitchisonObjective::from_data(&data, quad_order) {
        Ok(o) => o,
        Err(e) => return fail_all(&format!("objective-failure: {e}")),
    };
    let theta0 = init.natural_packed();
    config
        .algorithms
        .iter()
        .map(|&alg| {
            let opts = fit_options(config, alg);
            let fit = maximize(&objective, &theta0, &opts);
            record_from_fit(
                model,
                alg,
                InitializerKind::Aln,
                dimension,
                replicate,
                rep_seed,
                &fit,
            )
        })
        .collect()
}

/// The Table 2-style simulation: Metropolis-sampled Aitchison datasets,
/// ALN starting values, configured algorithms on the shared data.
pub fn run_aitchison_study(config: &BenchConfig) -> Result<BenchReport, String> {
    config.validate()?;
    let law = match &config.parameter_law {
        ParameterLaw::AitchisonUniform {
            alpha_min,
            alpha_max,
            beta_min,
            beta_max,
        } => (*alpha_min, *alpha_max, *beta_min, *beta_max),
        _ => return Err("Aitchison study needs an Aitchison parameter law".into()),
    };
    let mut records = Vec::new();
    for (d_idx, &dimension) in config.dimensions.iter().enumerate() {
        let base = (d_idx * config.n_replicates) as u64;
        let per_rep: Vec<Vec<ReplicateRecord>> = (0..config.n_replicates)
            .into_par_iter()
            .map(|rep| {
                let rep_seed = derive_seed(config.seed, base + rep as u64);
                aitchison_replicate(config, dimension, rep, rep_seed, law)
            })
            .collect();
        records.extend(per_rep.into_iter().flatten());
    }
    Ok(BenchReport::assemble(
        config.model.to_string(),
        config.seed,
        records,
    ))
}

/// Fits a user-supplied dataset with every requested algorithm from one
/// initializer, Table 1/3 style. `ref_index` is zero-based.
pub fn fit_dataset(
    path: &Path,
    csv: &CsvOptions,
    model: ModelKind,
    initializer: InitializerKind,
    algorithms: &[AlgorithmKind],
    ref_index: usize,
    quad_order: usize,
    maxit: usize,
    lm_fixed_gamma: f64,
) -> Result<BenchReport, String> {
    let data = read_composition_csv(path, csv).map_err(|e| e.to_string())?;
    let mut config = match model {
        ModelKind::Dirichlet => BenchConfig::dirichlet_defaults(),
        ModelKind::Aitchison => BenchConfig::aitchison_defaults(),
    };
    config.algorithms = algorithms.to_vec();
    config.initializers = vec![initializer];
    config.dimensions = vec![data.k()];
    config.maxit = maxit;
    config.lm_fixed_gamma = lm_fixed_gamma;
    if quad_order > 0 {
        config.quad_order = quad_order;
    }
    config.validate()?;

    let dimension = data.k();
    let mut records = Vec::new();
    match model {
        ModelKind::Dirichlet => {
            let stats = DirichletSuffStats::from_data(&data);
            let objective = DirichletObjective::new(stats.clone());
            match dirichlet_initializer(initializer, &data) {
                Ok(alpha0) => {
                    for &alg in algorithms {
                        let fit = run_dirichlet_cell(&config, alg, &stats, &objective, &alpha0);
                        records.push(record_from_fit(model, alg, initializer, dimension, 0, 0, &fit));
                    }
                }
                Err(e) => {
                    for &alg in algorithms {
                        records.push(failure_record(
                            model,
                            alg,
                            initializer,
                            dimension,
                            0,
                            0,
                            &format!("init-failure: {e}"),
                        ));
                    }
                }
            }
        }
        ModelKind::Aitchison => {
            let order = if quad_order > 0 {
                quad_order
            } else {
                default_quad_order(dimension)
            };
            if ref_index >= dimension {
                return Err(format!(
                    "reference index {ref_index} out of range for {dimension} components"
                ));
            }
            match init_from_aln(&data, ref_index) {
                Ok(init) => {
                    let objective =
                        AitchisonObjective::from_data(&data, order).map_err(|e| e.to_string())?;
                    let theta0 = init.natural_packed();
                    for &alg in algorithms {
                        let opts = fit_options(&config, alg);
                        let fit = maximize(&objective, &theta0, &opts);
                        records.push(record_from_fit(model, alg, initializer, dimension, 0, 0, &fit));
                    }
                }
                Err(e) => {
                    for &alg in algorithms {
                        records.push(failure_record(
                            model,
                            alg,
                            initializer,
                            dimension,
                            0,
                            0,
                            &format!("init-failure: {e}"),
                        ));
                    }
                }
            }
        }
    }
    Ok(BenchReport::assemble(model.to_string(), 0, records))
}

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use nalgebra::DVector;

use expfam::aitchison::{log_partition, sample_aitchison, AitchisonObjective};
use expfam::dirichlet::{dirichlet_hessian, dirichlet_score, fpi_fit, DirichletObjective};
use expfam::optim::{
    maximize, newton_step, penalty_matrix, solve_penalized_step, Algorithm, FitOptions, PenaltyKind,
};

use expfam_bench::{aitchison_fixture, dirichlet_fixture};

fn bench_dirichlet_derivatives(c: &mut Criterion) {
    let mut group = c.benchmark_group("dirichlet_score_hessian");
    for k in [10usize, 100] {
        let (alpha, _, stats) = dirichlet_fixture(k, 20);
        group.bench_with_input(BenchmarkId::new("score", k), &k, |b, _| {
            b.iter(|| dirichlet_score(black_box(&alpha), &stats).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("hessian", k), &k, |b, _| {
            b.iter(|| dirichlet_hessian(black_box(&alpha), stats.n).unwrap())
        });
    }
    group.finish();
}

fn bench_penalized_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("penalized_step");
    for k in [10usize, 100] {
        let (alpha, _, stats) = dirichlet_fixture(k, 20);
        let h = dirichlet_hessian(&alpha, stats.n).unwrap();
        let s = dirichlet_score(&alpha, &stats).unwrap();
        let p = penalty_matrix(&h, PenaltyKind::DiagHessian).unwrap();
        group.bench_with_input(BenchmarkId::new("lm", k), &k, |b, _| {
            b.iter(|| solve_penalized_step(black_box(&h), &p, 1.0, &s).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("newton", k), &k, |b, _| {
            b.iter(|| newton_step(black_box(&h), &s).unwrap())
        });
    }
    group.finish();
}

fn bench_full_fits(c: &mut Criterion) {
    let mut group = c.benchmark_group("dirichlet_fit");
    group.sample_size(20);
    let (_, _, stats) = dirichlet_fixture(50, 20);
    let objective = DirichletObjective::new(stats.clone());
    let start = DVector::from_element(50, 1.0);
    group.bench_function("lm_adaptive_k50", |b| {
        b.iter(|| maximize(&objective, black_box(&start), &FitOptions::default()))
    });
    group.bench_function("newton_raphson_k50", |b| {
        b.iter(|| {
            maximize(
                &objective,
                black_box(&start),
                &FitOptions::with_algorithm(Algorithm::NewtonRaphson),
            )
        })
    });
    group.bench_function("fpi_k50", |b| {
        b.iter(|| fpi_fit(&stats, black_box(&start), &FitOptions::default()))
    });
    group.finish();
}

fn bench_log_partition(c: &mut Criterion) {
    let mut group = c.benchmark_group("aitchison_log_partition");
    group.sample_size(30);
    for (k, order) in [(3usize, 10usize), (5, 8)] {
        let params = aitchison_fixture(k);
        group.bench_with_input(
            BenchmarkId::new("order_per_dim", format!("k{k}_q{order}")),
            &order,
            |b, _| b.iter(|| log_partition(black_box(&params), order).unwrap()),
        );
    }
    group.finish();
}

fn bench_aitchison_fit(c: &mut Criterion) {
    let mut group = c.benchmark_group("aitchison_fit");
    group.sample_size(10);
    let params = aitchison_fixture(3);
    let data = sample_aitchison(&params, 20, 0xBE7C, 500, 10).unwrap();
    let objective = AitchisonObjective::from_data(&data, 10).unwrap();
    let start = expfam::aitchison::init_from_aln(&data, 2)
        .unwrap()
        .natural_packed();
    group.bench_function("lm_adaptive_k3", |b| {
        b.iter(|| maximize(&objective, black_box(&start), &FitOptions::default()))
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_dirichlet_derivatives,
    bench_penalized_solve,
    bench_full_fits,
    bench_log_partition,
    bench_aitchison_fit
);
criterion_main!(benches);

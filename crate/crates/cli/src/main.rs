//! `expfam` command line: dataset fits, the two simulation studies, and
//! report conversion.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use expfam_cli::config::{
    parse_list, resolve_seed, AlgorithmKind, BenchConfig, ConfigFile, InitializerKind, ModelKind,
    ParameterLaw,
};
use expfam_cli::ingest::{CsvOptions, ZeroPolicy};
use expfam_cli::report::{emit_report, BenchReport, ReportFormat};
use expfam_cli::study::{fit_dataset, run_aitchison_study, run_dirichlet_study};

#[derive(Parser)]
#[command(
    name = "expfam",
    about = "Maximum-likelihood benchmarks for exponential-family models of compositional data",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a compositional CSV dataset with the selected algorithms.
    Fit(FitArgs),
    /// Run the Dirichlet simulation study (convergence and iteration
    /// counts per algorithm × initializer).
    SimulateDirichlet(SimArgs),
    /// Run the Aitchison simulation study with ALN starting values.
    SimulateAitchison(SimArgs),
    /// Summarize an existing JSON report, optionally re-emitting it.
    Report(ReportArgs),
}

#[derive(Args)]
struct FitArgs {
    /// Path to the CSV file (one observation per row, numeric columns).
    #[arg(long)]
    data: PathBuf,
    /// Model to fit.
    #[arg(long)]
    model: ModelKind,
    /// Starting-value strategy (moments|dishon|ronning|wicker for the
    /// Dirichlet model, aln for the Aitchison model).
    #[arg(long)]
    initializer: Option<InitializerKind>,
    /// Comma-separated algorithms (lm|lm-fixed|nr|fpi).
    #[arg(long)]
    algorithms: Option<String>,
    /// 1-based reference component for the log-ratio transform
    /// (Aitchison model); defaults to the last component.
    #[arg(long)]
    ref_index: Option<usize>,
    /// Field delimiter.
    #[arg(long, default_value = ",")]
    delimiter: char,
    /// Treat the first row as a header.
    #[arg(long)]
    header: bool,
    /// Zero handling: reject or replace:<delta>.
    #[arg(long, default_value = "reject")]
    zero_policy: ZeroPolicy,
    /// Gauss–Hermite nodes per dimension (Aitchison model; 0 = automatic).
    #[arg(long, default_value_t = 0)]
    quad_order: usize,
    /// Iteration cap.
    #[arg(long, default_value_t = 1000)]
    maxit: usize,
    /// Damping value for the lm-fixed algorithm.
    #[arg(long, default_value_t = 1.0)]
    lm_fixed_gamma: f64,
    /// Write the full report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format for --out.
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct SimArgs {
    /// Plain-text key-value config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated compositional dimensions.
    #[arg(long)]
    dimensions: Option<String>,
    /// Observations per simulated dataset.
    #[arg(long)]
    n_samples: Option<usize>,
    /// Number of replicates per dimension.
    #[arg(long)]
    n_replicates: Option<usize>,
    /// Comma-separated algorithms (lm|lm-fixed|nr|fpi).
    #[arg(long)]
    algorithms: Option<String>,
    /// Comma-separated initializers (Dirichlet study only).
    #[arg(long)]
    initializers: Option<String>,
    /// Master seed; overrides the config file and EXPFAM_SEED.
    #[arg(long)]
    seed: Option<u64>,
    /// Iteration cap per fit.
    #[arg(long)]
    maxit: Option<usize>,
    /// Damping value for the lm-fixed algorithm.
    #[arg(long)]
    lm_fixed_gamma: Option<f64>,
    /// Gauss–Hermite nodes per dimension (Aitchison study).
    #[arg(long)]
    quad_order: Option<usize>,
    /// Comma-separated Σα grid (Dirichlet study).
    #[arg(long)]
    totals: Option<String>,
    /// Half-width of the uniform band around Σα/K (Dirichlet study).
    #[arg(long)]
    half_width: Option<f64>,
    /// α-draw bounds (Aitchison study).
    #[arg(long)]
    alpha_min: Option<f64>,
    #[arg(long)]
    alpha_max: Option<f64>,
    /// β-draw bounds (Aitchison study).
    #[arg(long)]
    beta_min: Option<f64>,
    #[arg(long)]
    beta_max: Option<f64>,
    /// Metropolis burn-in for data generation (Aitchison study).
    #[arg(long)]
    mh_burn_in: Option<usize>,
    /// Metropolis thinning for data generation (Aitchison study).
    #[arg(long)]
    mh_thin: Option<usize>,
    /// Write the full report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format for --out.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct ReportArgs {
    /// JSON report produced by a study or fit.
    #[arg(long)]
    input: PathBuf,
    /// Re-emit in this format.
    #[arg(long)]
    format: Option<String>,
    /// Destination for the re-emitted report.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Fit(args) => run_fit(args),
        Command::SimulateDirichlet(args) => run_simulation(args, ModelKind::Dirichlet),
        Command::SimulateAitchison(args) => run_simulation(args, ModelKind::Aitchison),
        Command::Report(args) => run_report(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn parse_format(raw: Option<&str>) -> Result<ReportFormat, String> {
    raw.unwrap_or("json").parse()
}

fn write_or_print(report: &BenchReport, out: Option<&Path>, format: ReportFormat) -> Result<(), String> {
    match out {
        Some(path) => {
            emit_report(report, format, path).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            eprintln!("report written to {}", path.display());
            Ok(())
        }
        None => {
            print!("{}", report.summary_table());
            Ok(())
        }
    }
}

fn run_fit(args: FitArgs) -> Result<(), String> {
    let csv = CsvOptions {
        delimiter: u8::try_from(args.delimiter).map_err(|_| "delimiter must be ASCII".to_string())?,
        header: args.header,
        zero_policy: args.zero_policy,
    };
    let initializer = args.initializer.unwrap_or(match args.model {
        ModelKind::Dirichlet => InitializerKind::Ronning,
        ModelKind::Aitchison => InitializerKind::Aln,
    });
    let algorithms: Vec<AlgorithmKind> = match &args.algorithms {
        Some(raw) => parse_list(raw)?,
        None => vec![AlgorithmKind::LmAdaptive, AlgorithmKind::NewtonRaphson],
    };
    // Probe the table width first so the default reference (last column)
    // can be resolved; ingestion errors surface here with row context.
    let data = expfam_cli::ingest::read_composition_csv(&args.data, &csv).map_err(|e| e.to_string())?;
    let ref_index = match args.ref_index {
        Some(r) => {
            if r < 1 || r > data.k() {
                return Err(format!("--ref-index {r} out of range 1..={}", data.k()));
            }
            r - 1
        }
        None => data.k() - 1,
    };
    let report = fit_dataset(
        &args.data,
        &csv,
        args.model,
        initializer,
        &algorithms,
        ref_index,
        args.quad_order,
        args.maxit,
        args.lm_fixed_gamma,
    )?;
    println!(
        "{:<10} {:>10} {:>8}  {}",
        "algorithm", "converged", "n iter", "stop reason"
    );
    for r in &report.records {
        println!(
            "{:<10} {:>10} {:>8}  {}",
            r.algorithm,
            if r.converged { "yes" } else { "no" },
            r.n_iter,
            r.stop_reason
        );
    }
    if let Some(out) = &args.out {
        let format = parse_format(Some(&args.format))?;
        emit_report(&report, format, out).map_err(|e| format!("cannot write {}: {e}", out.display()))?;
        eprintln!("report written to {}", out.display());
    }
    Ok(())
}

fn build_config(args: &SimArgs, model: ModelKind) -> Result<BenchConfig, String> {
    let file = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let mut config = match model {
        ModelKind::Dirichlet => BenchConfig::dirichlet_defaults(),
        ModelKind::Aitchison => BenchConfig::aitchison_defaults(),
    };

    if let Some(dims) = merge_list::<usize>(args.dimensions.as_deref(), &file, "dimensions")? {
        config.dimensions = dims;
    }
    if let Some(v) = args.n_samples.or(file.get_parsed("n_samples")?) {
        config.n_samples = v;
    }
    if let Some(v) = args.n_replicates.or(file.get_parsed("n_replicates")?) {
        config.n_replicates = v;
    }
    if let Some(algs) = merge_list::<AlgorithmKind>(args.algorithms.as_deref(), &file, "algorithms")? {
        config.algorithms = algs;
    }
    if let Some(inits) =
        merge_list::<InitializerKind>(args.initializers.as_deref(), &file, "initializers")?
    {
        config.initializers = inits;
    }
    if let Some(v) = args.maxit.or(file.get_parsed("maxit")?) {
        config.maxit = v;
    }
    if let Some(v) = args.lm_fixed_gamma.or(file.get_parsed("lm_fixed_gamma")?) {
        config.lm_fixed_gamma = v;
    }
    if let Some(v) = args.quad_order.or(file.get_parsed("quad_order")?) {
        config.quad_order = v;
    }
    if let Some(v) = args.mh_burn_in.or(file.get_parsed("mh_burn_in")?) {
        config.mh_burn_in = v;
    }
    if let Some(v) = args.mh_thin.or(file.get_parsed("mh_thin")?) {
        config.mh_thin = v;
    }
    config.seed = resolve_seed(args.seed, file.get_parsed("seed")?);

    match model {
        ModelKind::Dirichlet => {
            let mut totals = None;
            let mut half_width = None;
            if let ParameterLaw::DirichletUniformBand {
                totals: t,
                half_width: h,
            } = &config.parameter_law
            {
                totals = Some(t.clone());
                half_width = Some(*h);
            }
            let totals = merge_list::<f64>(args.totals.as_deref(), &file, "totals")?
                .or(totals)
                .ok_or("missing totals grid")?;
            let half_width = args
                .half_width
                .or(file.get_parsed("half_width")?)
                .or(half_width)
                .ok_or("missing half width")?;
            config.parameter_law = ParameterLaw::DirichletUniformBand { totals, half_width };
        }
        ModelKind::Aitchison => {
            let (mut amin, mut amax, mut bmin, mut bmax) = (1.0, 4.0, 0.0, 1.0);
            if let ParameterLaw::AitchisonUniform {
                alpha_min,
                alpha_max,
                beta_min,
                beta_max,
            } = &config.parameter_law
            {
                (amin, amax, bmin, bmax) = (*alpha_min, *alpha_max, *beta_min, *beta_max);
            }
            config.parameter_law = ParameterLaw::AitchisonUniform {
                alpha_min: args.alpha_min.or(file.get_parsed("alpha_min")?).unwrap_or(amin),
                alpha_max: args.alpha_max.or(file.get_parsed("alpha_max")?).unwrap_or(amax),
                beta_min: args.beta_min.or(file.get_parsed("beta_min")?).unwrap_or(bmin),
                beta_max: args.beta_max.or(file.get_parsed("beta_max")?).unwrap_or(bmax),
            };
        }
    }
    config.validate()?;
    Ok(config)
}

fn merge_list<T: std::str::FromStr>(
    flag: Option<&str>,
    file: &ConfigFile,
    key: &str,
) -> Result<Option<Vec<T>>, String>
where
    T::Err: std::fmt::Display,
{
    match flag {
        Some(raw) => parse_list(raw).map(Some).map_err(|e| format!("--{key}: {e}")),
        None => file.get_list(key),
    }
}

fn run_simulation(args: SimArgs, model: ModelKind) -> Result<(), String> {
    let config = build_config(&args, model)?;
    let started = std::time::Instant::now();
    let report = match model {
        ModelKind::Dirichlet => run_dirichlet_study(&config)?,
        ModelKind::Aitchison => run_aitchison_study(&config)?,
    };
    eprintln!(
        "{} study finished in {:.1}s ({} records)",
        config.model,
        started.elapsed().as_secs_f64(),
        report.records.len()
    );
    let format = parse_format(args.format.as_deref())?;
    write_or_print(&report, args.out.as_deref(), format)?;
    if args.out.is_some() {
        print!("{}", report.summary_table());
    }
    Ok(())
}

fn run_report(args: ReportArgs) -> Result<(), String> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| format!("cannot read {}: {e}", args.input.display()))?;
    let report = BenchReport::from_json(&text)?;
    print!("{}", report.summary_table());
    if let Some(out) = &args.out {
        let format = parse_format(args.format.as_deref())?;
        emit_report(&report, format, out).map_err(|e| format!("cannot write {}: {e}", out.display()))?;
        eprintln!("report written to {}", out.display());
    }
    Ok(())
}

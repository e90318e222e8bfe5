//! Benchmark configuration: models, algorithms, initializers, simulation
//! parameter laws, and the plain-text key-value config file format.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Environment variable that overrides the built-in default seed.
/// An explicit config-file value or `--seed` flag wins over it.
pub const SEED_ENV_VAR: &str = "EXPFAM_SEED";

/// Built-in default seed.
pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    Dirichlet,
    Aitchison,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::Dirichlet => f.write_str("dirichlet"),
            ModelKind::Aitchison => f.write_str("aitchison"),
        }
    }
}

impl FromStr for ModelKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dirichlet" => Ok(ModelKind::Dirichlet),
            "aitchison" => Ok(ModelKind::Aitchison),
            other => Err(format!("unknown model '{other}' (dirichlet|aitchison)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AlgorithmKind {
    LmAdaptive,
    LmFixed,
    NewtonRaphson,
    Fpi,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 4] = [
        AlgorithmKind::LmAdaptive,
        AlgorithmKind::LmFixed,
        AlgorithmKind::NewtonRaphson,
        AlgorithmKind::Fpi,
    ];

    pub fn label(self) -> &'static str {
        match self {
            AlgorithmKind::LmAdaptive => "lm",
            AlgorithmKind::LmFixed => "lm-fixed",
            AlgorithmKind::NewtonRaphson => "nr",
            AlgorithmKind::Fpi => "fpi",
        }
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for AlgorithmKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lm" | "lm-adaptive" | "lmadaptive" => Ok(AlgorithmKind::LmAdaptive),
            "lm-fixed" | "lmfixed" => Ok(AlgorithmKind::LmFixed),
            "nr" | "newton" | "newton-raphson" => Ok(AlgorithmKind::NewtonRaphson),
            "fpi" => Ok(AlgorithmKind::Fpi),
            other => Err(format!(
                "unknown algorithm '{other}' (lm|lm-fixed|nr|fpi)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InitializerKind {
    Moments,
    Dishon,
    Ronning,
    Wicker,
    Aln,
}

impl InitializerKind {
    pub const DIRICHLET: [InitializerKind; 4] = [
        InitializerKind::Moments,
        InitializerKind::Dishon,
        InitializerKind::Ronning,
        InitializerKind::Wicker,
    ];

    pub fn label(self) -> &'static str {
        match self {
            InitializerKind::Moments => "moments",
            InitializerKind::Dishon => "dishon",
            InitializerKind::Ronning => "ronning",
            InitializerKind::Wicker => "wicker",
            InitializerKind::Aln => "aln",
        }
    }
}

impl fmt::Display for InitializerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for InitializerKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "moments" => Ok(InitializerKind::Moments),
            "dishon" => Ok(InitializerKind::Dishon),
            "ronning" => Ok(InitializerKind::Ronning),
            "wicker" => Ok(InitializerKind::Wicker),
            "aln" => Ok(InitializerKind::Aln),
            other => Err(format!(
                "unknown initializer '{other}' (moments|dishon|ronning|wicker|aln)"
            )),
        }
    }
}

/// How true parameters are drawn for each simulation replicate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ParameterLaw {
    /// Dirichlet study: replicate r uses totals[r mod len] and draws each
    /// αk uniformly on [total/K − half_width, total/K + half_width].
    DirichletUniformBand { totals: Vec<f64>, half_width: f64 },
    /// Aitchison study: αi ~ U(alpha_min, alpha_max), βij ~ U(beta_min,
    /// beta_max), redrawn until the log-partition is finite.
    AitchisonUniform {
        alpha_min: f64,
        alpha_max: f64,
        beta_min: f64,
        beta_max: f64,
    },
}

impl ParameterLaw {
    /// Desk-scale concentration grid: Σα from 1000 to 5000 in
    /// steps of 400, half-width 2.
    pub fn default_dirichlet() -> Self {
        ParameterLaw::DirichletUniformBand {
            totals: (0..11).map(|i| 1000.0 + 400.0 * i as f64).collect(),
            half_width: 2.0,
        }
    }

    pub fn default_aitchison() -> Self {
        ParameterLaw::AitchisonUniform {
            alpha_min: 1.0,
            alpha_max: 4.0,
            beta_min: 0.0,
            beta_max: 1.0,
        }
    }
}

/// Full description of one benchmark study.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchConfig {
    pub model: ModelKind,
    pub algorithms: Vec<AlgorithmKind>,
    pub initializers: Vec<InitializerKind>,
    pub dimensions: Vec<usize>,
    pub n_samples: usize,
    pub n_replicates: usize,
    pub parameter_law: ParameterLaw,
    pub seed: u64,
    pub quad_order: usize,
    pub maxit: usize,
    pub lm_fixed_gamma: f64,
    /// Metropolis burn-in and thinning for Aitchison data generation.
    pub mh_burn_in: usize,
    pub mh_thin: usize,
}

impl BenchConfig {
    /// Desk-scale defaults for the Dirichlet simulation study.
    pub fn dirichlet_defaults() -> Self {
        Self {
            model: ModelKind::Dirichlet,
            algorithms: AlgorithmKind::ALL.to_vec(),
            initializers: InitializerKind::DIRICHLET.to_vec(),
            dimensions: vec![100],
            n_samples: 20,
            n_replicates: 20,
            parameter_law: ParameterLaw::default_dirichlet(),
            seed: DEFAULT_SEED,
            quad_order: 0,
            // Generous cap so the fixed-point baseline can finish its slow
            // fits at the top of the concentration grid.
            maxit: 4000,
            lm_fixed_gamma: 1.0,
            mh_burn_in: 0,
            mh_thin: 0,
        }
    }

    /// Desk-scale defaults for the Aitchison simulation study.
    pub fn aitchison_defaults() -> Self {
        Self {
            model: ModelKind::Aitchison,
            algorithms: vec![AlgorithmKind::LmAdaptive, AlgorithmKind::NewtonRaphson],
            initializers: vec![InitializerKind::Aln],
            dimensions: vec![3, 5],
            n_samples: 20,
            n_replicates: 100,
            parameter_law: ParameterLaw::default_aitchison(),
            seed: DEFAULT_SEED,
            quad_order: 8,
            maxit: 1000,
            lm_fixed_gamma: 1.0,
            mh_burn_in: 1000,
            mh_thin: 20,
        }
    }

    /// Structural invariants: nonempty algorithm and initializer sets, FPI
    /// only with the Dirichlet model, ALN only with the Aitchison model.
    pub fn validate(&self) -> Result<(), String> {
        if self.algorithms.is_empty() {
            return Err("no algorithms selected".into());
        }
        if self.initializers.is_empty() {
            return Err("no initializers selected".into());
        }
        if self.n_replicates == 0 || self.n_samples == 0 || self.dimensions.is_empty() {
            return Err("dimensions, n_samples and n_replicates must be nonzero".into());
        }
        match self.model {
            ModelKind::Dirichlet => {
                if self.initializers.contains(&InitializerKind::Aln) {
                    return Err("the ALN initializer applies only to the Aitchison model".into());
                }
                if !matches!(self.parameter_law, ParameterLaw::DirichletUniformBand { .. }) {
                    return Err("Dirichlet study needs a Dirichlet parameter law".into());
                }
            }
            ModelKind::Aitchison => {
                if self.algorithms.contains(&AlgorithmKind::Fpi) {
                    return Err("FPI applies only to the Dirichlet model".into());
                }
                if self.initializers.iter().any(|i| *i != InitializerKind::Aln) {
                    return Err("the Aitchison study supports only the ALN initializer".into());
                }
                if !matches!(self.parameter_law, ParameterLaw::AitchisonUniform { .. }) {
                    return Err("Aitchison study needs an Aitchison parameter law".into());
                }
                if self.dimensions.iter().any(|&k| k < 2 || k - 1 > expfam::aitchison::MAX_QUAD_DIM)
                {
                    return Err(format!(
                        "Aitchison dimensions must lie in 2..={}",
                        expfam::aitchison::MAX_QUAD_DIM + 1
                    ));
                }
            }
        }
        if !(self.lm_fixed_gamma > 0.0) {
            return Err("lm_fixed_gamma must be positive".into());
        }
        Ok(())
    }
}

/// A parsed plain-text key-value config file: `key = value` lines, `#`
/// comments. Values override the study defaults and are themselves
/// overridden by command-line flags.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key = value", lineno + 1))?;
            values.insert(
                key.trim().to_ascii_lowercase().replace('-', "_"),
                value.trim().to_string(),
            );
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get_parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>, String>
    where
        T::Err: fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| format!("config key '{key}': {e}")),
        }
    }

    pub fn get_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, String>
    where
        T::Err: fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => parse_list(raw).map(Some).map_err(|e| format!("config key '{key}': {e}")),
        }
    }
}

/// Parses a comma-separated list.
pub fn parse_list<T: FromStr>(raw: &str) -> Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| format!("'{s}': {e}")))
        .collect()
}

/// Seed resolution: explicit flag, then config file, then the environment
/// override, then the built-in default.
pub fn resolve_seed(flag: Option<u64>, file: Option<u64>) -> u64 {
    flag.or(file)
        .or_else(|| {
            std::env::var(SEED_ENV_VAR)
                .ok()
                .and_then(|v| v.parse::<u64>().ok())
        })
        .unwrap_or(DEFAULT_SEED)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_round_trip() {
        let file = ConfigFile::parse(
            "# study\nmodel = dirichlet\nn-replicates = 7\nalgorithms = lm, nr\n",
        )
        .unwrap();
        assert_eq!(file.get("model"), Some("dirichlet"));
        assert_eq!(file.get_parsed::<usize>("n_replicates").unwrap(), Some(7));
        let algs: Vec<AlgorithmKind> = file.get_list("algorithms").unwrap().unwrap();
        assert_eq!(algs, vec![AlgorithmKind::LmAdaptive, AlgorithmKind::NewtonRaphson]);
    }

    #[test]
    fn config_file_rejects_bad_lines() {
        assert!(ConfigFile::parse("model dirichlet").is_err());
    }

    #[test]
    fn validation_rejects_cross_model_choices() {
        let mut c = BenchConfig::dirichlet_defaults();
        c.initializers.push(InitializerKind::Aln);
        assert!(c.validate().is_err());

        let mut c = BenchConfig::aitchison_defaults();
        c.algorithms.push(AlgorithmKind::Fpi);
        assert!(c.validate().is_err());

        let mut c = BenchConfig::dirichlet_defaults();
        c.algorithms.clear();
        assert!(c.validate().is_err());
    }

    #[test]
    fn default_dirichlet_totals_match_grid() {
        match ParameterLaw::default_dirichlet() {
            ParameterLaw::DirichletUniformBand { totals, half_width } => {
                assert_eq!(totals.first(), Some(&1000.0));
                assert_eq!(totals.last(), Some(&5000.0));
                assert_eq!(totals.len(), 11);
                assert_eq!(half_width, 2.0);
            }
            _ => panic!("wrong law"),
        }
    }
}

//! JSON experiment plans: a plan names a list of experiments, each pairing a
//! test function and input marginals with either a replicated sampling-design
//! study or a Sobol-index estimate.
//!
//! Every design passes through [`validate_design`] before any sampling, so a
//! malformed plan fails fast with a message naming the violated invariant.

use pstrat_core::analysis::sobol::SobolTarget;
use pstrat_core::analysis::EstimatorKind;
use pstrat_core::design_spec::{validate_design, DesignSpec, Method, SubspaceSpec};
use pstrat_core::distributions::MarginalDistribution;
use pstrat_core::testbed::{plate_buckling_marginals, TestFunction};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Replication count used when a plan leaves it unspecified.
pub const DEFAULT_REPLICATIONS: usize = 2000;

/// Anything that stops a plan from resolving into runnable experiments.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    Invalid(String),
    #[error("experiment \"{name}\": {source}")]
    Experiment { name: String, source: pstrat_core::Error },
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed plan JSON: {0}")]
    Json(#[from] serde_json::Error),
}

type Result<T> = std::result::Result<T, ConfigError>;

/// One input marginal as written in a plan. Mirrors the library's marginal
/// types, with the addition that a lognormal may be given by `mean` and `cov`
/// instead of log-space parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MarginalSpec {
    Uniform {
        lower: f64,
        upper: f64,
    },
    Normal {
        mean: f64,
        std_dev: f64,
    },
    Lognormal {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mu_log: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sigma_log: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mean: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cov: Option<f64>,
    },
}

impl MarginalSpec {
    pub fn resolve(&self) -> Result<MarginalDistribution> {
        let dist = match *self {
            MarginalSpec::Uniform { lower, upper } => MarginalDistribution::uniform(lower, upper),
            MarginalSpec::Normal { mean, std_dev } => MarginalDistribution::normal(mean, std_dev),
            MarginalSpec::Lognormal { mu_log, sigma_log, mean, cov } => {
                match (mu_log, sigma_log, mean, cov) {
                    (Some(m), Some(s), None, None) => MarginalDistribution::lognormal(m, s),
                    (None, None, Some(m), Some(c)) => {
                        MarginalDistribution::lognormal_from_mean_cov(m, c)
                    }
                    _ => {
                        return Err(ConfigError::Invalid(
                            "lognormal takes either mu_log + sigma_log or mean + cov".into(),
                        ));
                    }
                }
            }
        };
        dist.map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn from_marginal(m: &MarginalDistribution) -> Self {
        match *m {
            MarginalDistribution::Uniform { lower, upper } => MarginalSpec::Uniform { lower, upper },
            MarginalDistribution::Normal { mean, std_dev } => MarginalSpec::Normal { mean, std_dev },
            MarginalDistribution::Lognormal { mu_log, sigma_log } => MarginalSpec::Lognormal {
                mu_log: Some(mu_log),
                sigma_log: Some(sigma_log),
                mean: None,
                cov: None,
            },
        }
    }
}

/// Input marginals: a single spec applied iid to every variable, or one spec
/// per variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MarginalsSpec {
    Iid(MarginalSpec),
    PerVariable(Vec<MarginalSpec>),
}

impl MarginalsSpec {
    pub fn resolve(&self, dim: usize) -> Result<Vec<MarginalDistribution>> {
        match self {
            MarginalsSpec::Iid(spec) => {
                let m = spec.resolve()?;
                Ok(vec![m; dim])
            }
            MarginalsSpec::PerVariable(specs) => {
                if specs.len() != dim {
                    return Err(ConfigError::Invalid(format!(
                        "{} marginals listed for {} variables",
                        specs.len(),
                        dim
                    )));
                }
                specs.iter().map(|s| s.resolve()).collect()
            }
        }
    }
}

/// Test function selector. `polynomial2` accepts either explicit coefficient
/// vectors or `squares`/`pairs`/`linear` term counts (all coefficients 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Additive {
        dim: usize,
    },
    Product {
        dim: usize,
    },
    QuadraticInteraction {
        c: f64,
    },
    Polynomial2 {
        dim: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        squares: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pairs: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        linear: Option<usize>,
    },
    Rosenbrock {
        dim: usize,
    },
    Schwefel12 {
        dim: usize,
    },
    PlateBuckling,
}

fn poly_terms(explicit: &Option<Vec<f64>>, count: Option<usize>, slot: &str) -> Result<Vec<f64>> {
    match (explicit, count) {
        (Some(_), Some(_)) => Err(ConfigError::Invalid(format!(
            "polynomial2 {slot} terms given both as coefficients and as a count"
        ))),
        (Some(v), None) => Ok(v.clone()),
        (None, Some(k)) => Ok(vec![1.0; k]),
        (None, None) => Ok(Vec::new()),
    }
}

impl FunctionSpec {
    pub fn resolve(&self) -> Result<TestFunction> {
        let f = match self {
            FunctionSpec::Additive { dim } => TestFunction::additive(*dim),
            FunctionSpec::Product { dim } => TestFunction::product(*dim),
            FunctionSpec::QuadraticInteraction { c } => TestFunction::quadratic_interaction(*c),
            FunctionSpec::Polynomial2 { dim, alpha, beta, gamma, squares, pairs, linear } => {
                TestFunction::polynomial2(
                    *dim,
                    poly_terms(alpha, *squares, "square")?,
                    poly_terms(beta, *pairs, "pair")?,
                    poly_terms(gamma, *linear, "linear")?,
                )
            }
            FunctionSpec::Rosenbrock { dim } => TestFunction::rosenbrock(*dim),
            FunctionSpec::Schwefel12 { dim } => TestFunction::schwefel12(*dim),
            FunctionSpec::PlateBuckling => Ok(TestFunction::PlateBuckling),
        };
        f.map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}

/// Subspace layout entry for designs written out longhand. The latinize flag
/// is not part of the plan surface; the method decides it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceConfig {
    pub variables: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub counts_per_dim: Vec<usize>,
}

/// Sampling design selector. At most one of `notation`, `counts`, and
/// `subspaces` may be given: `notation` is the compact layout text for
/// pss/lpss, `counts` is the per-dimension strata grid for ss/lss, and
/// `subspaces` spells the layout out variable by variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignConfig {
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspaces: Option<Vec<SubspaceConfig>>,
}

impl DesignConfig {
    pub fn method(method: Method) -> Self {
        DesignConfig { method, notation: None, counts: None, subspaces: None }
    }

    pub fn notation(method: Method, notation: &str) -> Self {
        DesignConfig { method, notation: Some(notation.into()), counts: None, subspaces: None }
    }

    pub fn counts(method: Method, counts: Vec<usize>) -> Self {
        DesignConfig { method, notation: None, counts: Some(counts), subspaces: None }
    }

    /// Build and validate the concrete design. The returned spec has default
    /// strata counts filled in.
    pub fn resolve(&self, dim: usize, n: usize, seed: u64) -> Result<DesignSpec> {
        let given = [self.notation.is_some(), self.counts.is_some(), self.subspaces.is_some()];
        if given.iter().filter(|&&g| g).count() > 1 {
            return Err(ConfigError::Invalid(
                "design takes at most one of notation, counts, and subspaces".into(),
            ));
        }
        let spec = if let Some(subs) = &self.subspaces {
            let subspaces = subs
                .iter()
                .map(|s| SubspaceSpec {
                    variables: s.variables.clone(),
                    counts_per_dim: s.counts_per_dim.clone(),
                    latinize: false,
                })
                .collect();
            DesignSpec { method: self.method, dim, n, subspaces, seed }
        } else if let Some(notation) = &self.notation {
            DesignSpec::from_notation(self.method, dim, n, notation, seed)
                .map_err(|e| ConfigError::Invalid(e.to_string()))?
        } else if let Some(counts) = &self.counts {
            let sub = SubspaceSpec {
                variables: (0..dim).collect(),
                counts_per_dim: counts.clone(),
                latinize: false,
            };
            DesignSpec { method: self.method, dim, n, subspaces: vec![sub], seed }
        } else {
            DesignSpec::simple(self.method, dim, n, seed)
        };
        validate_design(&spec).map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}

/// Sobol-index task: the conditioning target plus the evaluation budget per
/// conditional loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolConfig {
    #[serde(flatten)]
    pub target: SobolTargetConfig,
    pub budget: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "lowercase", deny_unknown_fields)]
pub enum SobolTargetConfig {
    First { index: usize },
    Pair { i: usize, j: usize },
}

impl SobolTargetConfig {
    fn resolve(&self, dim: usize) -> Result<SobolTarget> {
        match *self {
            SobolTargetConfig::First { index } => {
                if index >= dim {
                    return Err(ConfigError::Invalid(format!(
                        "sobol target index {index} out of range for {dim} variables"
                    )));
                }
                Ok(SobolTarget::First(index))
            }
            SobolTargetConfig::Pair { i, j } => {
                if i >= dim || j >= dim {
                    return Err(ConfigError::Invalid(format!(
                        "sobol target pair ({i}, {j}) out of range for {dim} variables"
                    )));
                }
                if i == j {
                    return Err(ConfigError::Invalid(format!(
                        "sobol target pair indices must differ, got ({i}, {j})"
                    )));
                }
                Ok(SobolTarget::Pair(i, j))
            }
        }
    }
}

/// One experiment. Omitted marginals default to uniform(0, 1) on every
/// variable, except for the plate function which defaults to its canonical
/// input set. A `sobol` block replaces the design/replication fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub function: FunctionSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marginals: Option<MarginalsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design: Option<DesignConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replications: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimator: Option<EstimatorKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sobol: Option<SobolConfig>,
}

/// A runnable plan document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub name: String,
    /// Base seed for every experiment that does not set its own.
    #[serde(default)]
    pub seed: u64,
    /// Also write every replication estimate, not just the summary.
    #[serde(default)]
    pub estimates: bool,
    pub experiments: Vec<ExperimentConfig>,
}

/// Command-line overrides applied during resolution.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub replications: Option<usize>,
}

/// What an experiment actually runs.
#[derive(Debug, Clone)]
pub enum Task {
    Replicate { spec: DesignSpec, replications: usize },
    Sobol { target: SobolTarget, budget: usize },
}

/// A fully validated experiment, ready for execution.
#[derive(Debug, Clone)]
pub struct ResolvedExperiment {
    pub name: String,
    pub function: TestFunction,
    pub marginals: Vec<MarginalDistribution>,
    pub estimator: EstimatorKind,
    pub seed: u64,
    pub task: Task,
}

impl ExperimentPlan {
    pub fn parse(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Validate every experiment and apply overrides. Errors name the first
    /// offending experiment and the invariant it violates.
    pub fn resolve(&self, overrides: &Overrides) -> Result<Vec<ResolvedExperiment>> {
        if self.experiments.is_empty() {
            return Err(ConfigError::Invalid(format!("plan \"{}\" has no experiments", self.name)));
        }
        self.experiments
            .iter()
            .enumerate()
            .map(|(idx, exp)| self.resolve_one(idx, exp, overrides))
            .collect()
    }

    fn resolve_one(
        &self,
        idx: usize,
        exp: &ExperimentConfig,
        overrides: &Overrides,
    ) -> Result<ResolvedExperiment> {
        let position = exp.name.clone().unwrap_or_else(|| format!("#{idx}"));
        let fail = |msg: String| ConfigError::Invalid(format!("experiment {position}: {msg}"));

        let function = exp.function.resolve().map_err(|e| fail(e.to_string()))?;
        let dim = function.dim();
        let marginals = match &exp.marginals {
            Some(spec) => spec.resolve(dim).map_err(|e| fail(e.to_string()))?,
            None if matches!(function, TestFunction::PlateBuckling) => plate_buckling_marginals(),
            None => vec![MarginalDistribution::uniform(0.0, 1.0).unwrap(); dim],
        };
        let seed = overrides.seed.or(exp.seed).unwrap_or(self.seed);
        let estimator = exp.estimator.clone().unwrap_or(EstimatorKind::Mean);

        let task = if let Some(sobol) = &exp.sobol {
            for (set, field) in [
                (exp.design.is_some(), "design"),
                (exp.n.is_some(), "n"),
                (exp.replications.is_some(), "replications"),
                (exp.estimator.is_some(), "estimator"),
            ] {
                if set {
                    return Err(fail(format!("sobol experiments do not take \"{field}\"")));
                }
            }
            if sobol.budget < 1000 {
                return Err(fail(format!("sobol budget must be at least 1000, got {}", sobol.budget)));
            }
            let target = sobol.target.resolve(dim).map_err(|e| fail(e.to_string()))?;
            Task::Sobol { target, budget: sobol.budget }
        } else {
            let design = exp
                .design
                .as_ref()
                .ok_or_else(|| fail("needs a design (or a sobol block)".into()))?;
            let n = exp.n.ok_or_else(|| fail("needs a sample count n".into()))?;
            let replications = overrides
                .replications
                .or(exp.replications)
                .unwrap_or(DEFAULT_REPLICATIONS);
            if replications < 2 {
                return Err(fail(format!("needs at least 2 replications, got {replications}")));
            }
            if estimator.arity() != 1 {
                return Err(fail(format!(
                    "replication studies need a scalar estimator; this one yields {} values",
                    estimator.arity()
                )));
            }
            let spec = design.resolve(dim, n, seed).map_err(|e| fail(e.to_string()))?;
            Task::Replicate { spec, replications }
        };

        let name = exp.name.clone().unwrap_or_else(|| {
            let what = match &task {
                Task::Replicate { spec, .. } => spec.label(),
                Task::Sobol { target, .. } => crate::io::sobol_label(target),
            };
            format!("{what} {}", crate::io::function_label(&function, &marginals))
        });
        Ok(ResolvedExperiment { name, function, marginals, estimator, seed, task })
    }
}

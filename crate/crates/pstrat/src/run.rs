//! Experiment execution: replicated design studies fan out over a thread
//! pool, Sobol tasks run their conditional loops, and both land in summary
//! rows.
//!
//! Replication `r` of an experiment depends only on (spec, marginals,
//! function, estimator, seed, r), and results are collected by replication
//! index, so the output is identical for any worker count.

use crate::config::{ResolvedExperiment, Task};
use crate::io::{function_label, sobol_label, SummaryRow};
use pstrat_core::analysis::sobol::{sobol_indices, GROUPS};
use pstrat_core::analysis::{replication_estimate, summarize, EstimatorKind, ReplicationSummary};
use pstrat_core::design_spec::DesignSpec;
use pstrat_core::distributions::MarginalDistribution;
use pstrat_core::testbed::TestFunction;
use rayon::prelude::*;

/// A failure while executing an already validated experiment: a numerical
/// contract tripped at run time.
#[derive(Debug, thiserror::Error)]
#[error("experiment \"{name}\": {source}")]
pub struct RunError {
    pub name: String,
    pub source: pstrat_core::Error,
}

/// Run `replications` independent replications on up to `jobs` worker
/// threads (0 means one per available CPU), collecting in replication order.
pub fn replicate_parallel(
    spec: &DesignSpec,
    marginals: &[MarginalDistribution],
    f: &TestFunction,
    kind: &EstimatorKind,
    replications: usize,
    base_seed: u64,
    jobs: usize,
) -> pstrat_core::Result<ReplicationSummary> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| pstrat_core::Error::Domain(format!("thread pool: {e}")))?;
    let estimates: pstrat_core::Result<Vec<f64>> = pool.install(|| {
        (0..replications)
            .into_par_iter()
            .map(|r| replication_estimate(spec, marginals, f, kind, base_seed, r as u64))
            .collect()
    });
    summarize(estimates?, base_seed)
}

/// Execute one experiment. Returns its summary row plus the raw replication
/// estimates when the task has them.
pub fn execute_one(
    exp: &ResolvedExperiment,
    jobs: usize,
) -> Result<(SummaryRow, Option<Vec<f64>>), RunError> {
    let wrap = |source| RunError { name: exp.name.clone(), source };
    let function = function_label(&exp.function, &exp.marginals);
    match &exp.task {
        Task::Replicate { spec, replications } => {
            let summary = replicate_parallel(
                spec,
                &exp.marginals,
                &exp.function,
                &exp.estimator,
                *replications,
                exp.seed,
                jobs,
            )
            .map_err(wrap)?;
            let row = SummaryRow {
                design: spec.label(),
                function,
                n: spec.n,
                replications: *replications,
                mean: summary.mean,
                variance: summary.variance,
                std_dev: summary.std_dev,
                seed: exp.seed,
            };
            Ok((row, Some(summary.estimates)))
        }
        Task::Sobol { target, budget } => {
            let est = sobol_indices(&exp.function, &exp.marginals, *target, *budget, exp.seed)
                .map_err(wrap)?;
            let row = SummaryRow {
                design: sobol_label(target),
                function,
                n: *budget,
                replications: GROUPS,
                mean: est.index,
                variance: est.std_error * est.std_error,
                std_dev: est.std_error,
                seed: exp.seed,
            };
            Ok((row, None))
        }
    }
}

/// Execute a resolved plan in order. `progress` sees each summary row as it
/// lands.
pub fn execute(
    experiments: &[ResolvedExperiment],
    jobs: usize,
    mut progress: impl FnMut(usize, &SummaryRow),
) -> Result<(Vec<SummaryRow>, Vec<(String, Vec<f64>)>), RunError> {
    let mut rows = Vec::with_capacity(experiments.len());
    let mut estimates = Vec::new();
    for (i, exp) in experiments.iter().enumerate() {
        let (row, est) = execute_one(exp, jobs)?;
        progress(i, &row);
        if let Some(est) = est {
            estimates.push((exp.name.clone(), est));
        }
        rows.push(row);
    }
    Ok((rows, estimates))
}

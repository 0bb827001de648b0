//! File formats: the summary CSV, the optional per-replication estimates CSV,
//! and sample-set CSV + metadata JSON dumps.
//!
//! Numbers are written with Rust's shortest round-trip float formatting, so a
//! rerun with the same plan and seed produces byte-identical files.

use pstrat_core::analysis::sobol::SobolTarget;
use pstrat_core::designs::SampleSet;
use pstrat_core::distributions::MarginalDistribution;
use pstrat_core::testbed::TestFunction;
use std::io::Write;
use std::path::Path;

/// Fixed header of `summary.csv`.
pub const SUMMARY_HEADER: &str =
    "design,function,n,R,mean_of_estimates,var_of_estimates,std_of_estimates,seed";

/// One summary line. For a replication study the columns carry the moments of
/// the estimate distribution; for a Sobol task `n` is the evaluation budget,
/// `R` the number of outer-loop groups behind the standard error, mean the
/// index, and var/std the squared/plain standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub design: String,
    pub function: String,
    pub n: usize,
    pub replications: usize,
    pub mean: f64,
    pub variance: f64,
    pub std_dev: f64,
    pub seed: u64,
}

impl SummaryRow {
    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.design,
            self.function,
            self.n,
            self.replications,
            self.mean,
            self.variance,
            self.std_dev,
            self.seed
        )
    }
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    out
}

pub fn write_summary_csv(rows: &[SummaryRow], path: &Path) -> std::io::Result<()> {
    write_atomic(path, summary_csv(rows).as_bytes())
}

/// Per-replication estimates for every experiment that produced them.
pub fn estimates_csv(entries: &[(String, Vec<f64>)]) -> String {
    let mut out = String::from("experiment,replication,estimate\n");
    for (name, estimates) in entries {
        for (r, e) in estimates.iter().enumerate() {
            out.push_str(&format!("{name},{r},{e}\n"));
        }
    }
    out
}

pub fn write_estimates_csv(entries: &[(String, Vec<f64>)], path: &Path) -> std::io::Result<()> {
    write_atomic(path, estimates_csv(entries).as_bytes())
}

/// Sample points as CSV: `sample_id,x1,..,xN,weight` with physical
/// coordinates and 0-based ids.
pub fn sample_csv(set: &SampleSet) -> String {
    let dim = set.points.cols();
    let mut out = String::from("sample_id");
    for d in 1..=dim {
        out.push_str(&format!(",x{d}"));
    }
    out.push_str(",weight\n");
    for i in 0..set.len() {
        out.push_str(&format!("{i}"));
        for &x in set.points.row(i) {
            out.push_str(&format!(",{x}"));
        }
        out.push_str(&format!(",{}\n", set.weights[i]));
    }
    out
}

pub fn write_sample_csv(set: &SampleSet, path: &Path) -> std::io::Result<()> {
    write_atomic(path, sample_csv(set).as_bytes())
}

/// Companion metadata for a sample CSV: the validated spec (with strata
/// counts filled in), the seed, the strata layout, and each sample's
/// per-subspace cell coordinates.
pub fn sample_metadata(set: &SampleSet) -> serde_json::Value {
    let strata: Vec<serde_json::Value> = set
        .spec
        .subspaces
        .iter()
        .map(|s| {
            serde_json::json!({
                "variables": s.variables,
                "counts_per_dim": s.counts_per_dim,
                "latinize": s.latinize,
            })
        })
        .collect();
    let cells: Vec<Vec<u32>> = (0..set.cell_coords.rows())
        .map(|i| set.cell_coords.row(i).to_vec())
        .collect();
    serde_json::json!({
        "spec": &set.spec,
        "seed": set.spec.seed,
        "strata": strata,
        "cells": cells,
    })
}

pub fn write_sample_metadata(set: &SampleSet, path: &Path) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(&sample_metadata(set)).expect("metadata is json");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(bytes)?;
    file.flush()
}

/// Compact single-token function label for CSV cells: the function id, its
/// shape parameters, and an `inputs` tag. Semicolons keep commas out of the
/// column.
pub fn function_label(f: &TestFunction, marginals: &[MarginalDistribution]) -> String {
    let core = match f {
        TestFunction::Additive { dim } => format!("additive(dim={dim}"),
        TestFunction::Product { dim } => format!("product(dim={dim}"),
        TestFunction::QuadraticInteraction { c } => format!("quadratic_interaction(c={c}"),
        TestFunction::Polynomial2 { dim, alpha, beta, gamma } => format!(
            "polynomial2(dim={dim};squares={};pairs={};linear={}",
            alpha.len(),
            beta.len(),
            gamma.len()
        ),
        TestFunction::Rosenbrock { dim } => format!("rosenbrock(dim={dim}"),
        TestFunction::Schwefel12 { dim } => format!("schwefel12(dim={dim}"),
        TestFunction::PlateBuckling => "plate_buckling(".into(),
    };
    let sep = if core.ends_with('(') { "" } else { ";" };
    format!("{core}{sep}inputs={})", inputs_token(marginals))
}

/// One token describing the input marginals: the common marginal when all
/// variables share one, `mixed` otherwise.
pub fn inputs_token(marginals: &[MarginalDistribution]) -> String {
    let first = match marginals.first() {
        Some(m) => m,
        None => return "none".into(),
    };
    if marginals.iter().all(|m| m == first) {
        marginal_token(first)
    } else {
        "mixed".into()
    }
}

fn marginal_token(m: &MarginalDistribution) -> String {
    match *m {
        MarginalDistribution::Uniform { lower, upper } => format!("u({lower};{upper})"),
        MarginalDistribution::Normal { mean, std_dev } => format!("n({mean};{std_dev})"),
        MarginalDistribution::Lognormal { mu_log, sigma_log } => {
            format!("ln({mu_log};{sigma_log})")
        }
    }
}

/// Label for the design column of Sobol rows.
pub fn sobol_label(target: &SobolTarget) -> String {
    match target {
        SobolTarget::First(i) => format!("sobol-first-{i}"),
        SobolTarget::Pair(i, j) => format!("sobol-pair-{i}-{j}"),
    }
}

//! Command-line runner. Exit codes: 0 on success, 2 for configuration
//! errors (unknown preset, malformed plan, invalid design), 3 when a
//! numerical contract is violated at run time.

use clap::{Parser, Subcommand};
use pstrat::config::{DesignConfig, ExperimentPlan, Overrides};
use pstrat::{io, presets, run};
use pstrat_core::design_spec::Method;
use pstrat_core::designs::generate;
use pstrat_core::distributions::MarginalDistribution;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "pstrat",
    version,
    about = "Sampling-design experiment runner: stratified, Latin hypercube, and partially stratified designs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset or a JSON plan file and write summary.csv
    Run {
        /// Preset name or path to a plan JSON file
        target: String,
        /// Base seed override applied to every experiment
        #[arg(long)]
        seed: Option<u64>,
        /// Replication-count override for every replicated experiment
        #[arg(long)]
        reps: Option<usize>,
        /// Output directory
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Worker threads for replications (0 = one per CPU)
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// List the built-in presets
    List,
    /// Generate one sample set and write a points CSV plus metadata JSON
    Sample {
        /// Sampling method: srs, ss, lhs, pss, lss, or lpss
        method: String,
        /// Number of variables; inputs are uniform(0, 1)
        #[arg(long)]
        dim: usize,
        /// Number of samples
        #[arg(long)]
        n: usize,
        /// Subspace layout notation, e.g. "2^2 1"
        #[arg(long)]
        notation: Option<String>,
        /// Comma-separated strata counts per dimension (ss/lss)
        #[arg(long, value_delimiter = ',')]
        counts: Option<Vec<usize>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::List => {
            for name in presets::NAMES {
                println!("{name:<22} {}", presets::describe(name).unwrap_or(""));
            }
            0
        }
        Command::Run { target, seed, reps, out, jobs } => {
            run_command(&target, Overrides { seed, replications: reps }, &out, jobs)
        }
        Command::Sample { method, dim, n, notation, counts, seed, out } => {
            sample_command(&method, dim, n, notation, counts, seed, &out)
        }
    };
    std::process::exit(code);
}

fn load_target(target: &str) -> Result<ExperimentPlan, String> {
    if let Some(plan) = presets::find(target) {
        return Ok(plan);
    }
    let path = Path::new(target);
    if !path.exists() {
        return Err(format!(
            "\"{target}\" is not a preset name or a plan file; presets: {}",
            presets::NAMES.join(", ")
        ));
    }
    ExperimentPlan::load(path).map_err(|e| e.to_string())
}

fn run_command(target: &str, overrides: Overrides, out: &Path, jobs: usize) -> i32 {
    let plan = match load_target(target) {
        Ok(plan) => plan,
        Err(e) => {
            eprintln!("config error: {e}");
            return 2;
        }
    };
    let resolved = match plan.resolve(&overrides) {
        Ok(resolved) => resolved,
        Err(e) => {
            eprintln!("config error: {e}");
            return 2;
        }
    };
    let total = resolved.len();
    println!("plan {}: {} experiments", plan.name, total);
    let outcome = run::execute(&resolved, jobs, |i, row| {
        println!(
            "[{}/{}] {} | {}: mean={} std={}",
            i + 1,
            total,
            row.design,
            row.function,
            row.mean,
            row.std_dev
        );
    });
    let (rows, estimates) = match outcome {
        Ok(done) => done,
        Err(e) => {
            eprintln!("numerical contract violation: {e}");
            return 3;
        }
    };
    let summary_path = out.join("summary.csv");
    if let Err(e) = io::write_summary_csv(&rows, &summary_path) {
        eprintln!("cannot write {}: {e}", summary_path.display());
        return 1;
    }
    println!("wrote {}", summary_path.display());
    if plan.estimates {
        let estimates_path = out.join("estimates.csv");
        if let Err(e) = io::write_estimates_csv(&estimates, &estimates_path) {
            eprintln!("cannot write {}: {e}", estimates_path.display());
            return 1;
        }
        println!("wrote {}", estimates_path.display());
    }
    0
}

fn sample_command(
    method: &str,
    dim: usize,
    n: usize,
    notation: Option<String>,
    counts: Option<Vec<usize>>,
    seed: u64,
    out: &Path,
) -> i32 {
    let method: Method = match method.parse() {
        Ok(m) => m,
        Err(e) => {
            eprintln!("config error: {e}");
            return 2;
        }
    };
    let design = DesignConfig { method, notation, counts, subspaces: None };
    let spec = match design.resolve(dim, n, seed) {
        Ok(spec) => spec,
        Err(e) => {
            eprintln!("config error: {e}");
            return 2;
        }
    };
    let marginals = vec![MarginalDistribution::uniform(0.0, 1.0).unwrap(); dim];
    let set = match generate(&spec, &marginals) {
        Ok(set) => set,
        Err(e) => {
            eprintln!("numerical contract violation: {e}");
            return 3;
        }
    };
    let csv_path = out.join("samples.csv");
    let meta_path = out.join("samples.json");
    if let Err(e) = io::write_sample_csv(&set, &csv_path) {
        eprintln!("cannot write {}: {e}", csv_path.display());
        return 1;
    }
    if let Err(e) = io::write_sample_metadata(&set, &meta_path) {
        eprintln!("cannot write {}: {e}", meta_path.display());
        return 1;
    }
    println!("wrote {} and {}", csv_path.display(), meta_path.display());
    0
}

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cacm::bench::io::{load_instance, write_instance, ReferenceTable};
use cacm::bench::manifest::BatchManifest;
use cacm::bench::oracle::brute_force_optimum;
use cacm::bench::report::{solve_record, BatchError};
use cacm::bench::{gap, generate_instance, run_batch, GeneratorConfig, Structure};
use cacm::solver::{default_params, SizeClass, SolverError};
use cacm::{Money, Variant, VotingRule};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cacm", version, about = "Collaborative ant colony solver for distributed multi-level lot sizing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print the run record as JSON.
    Solve {
        instance: PathBuf,
        #[arg(long, default_value = "cacm")]
        variant: Variant,
        #[arg(long, default_value = "approval")]
        rule: VotingRule,
        #[arg(long, default_value_t = 1)]
        ballot: usize,
        /// Size class supplying defaults for budget and tau-max.
        #[arg(long, default_value = "s")]
        class: SizeClass,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        tau_min: Option<f64>,
        #[arg(long)]
        tau_max: Option<f64>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Reference file with `<instance-name> <cost>` lines.
        #[arg(long = "ref")]
        reference: Option<PathBuf>,
        /// Include per-agent costs in the output.
        #[arg(long)]
        audit: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate every encoding of a small instance.
    Oracle { instance: PathBuf },
    /// Percentage gap of a cost over a reference cost.
    Gap { cost: Money, reference: Money },
    /// Write a random instance in the text format.
    Generate {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        agents: usize,
        #[arg(long)]
        structure: Structure,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Give each agent a contiguous block of items.
        #[arg(long)]
        equal_split: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a batch described by a TOML manifest and print the report.
    Batch {
        manifest: PathBuf,
        /// Override the worker count from the manifest.
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Exit status 1 for bad input, 2 for failures inside the program.
enum Failure {
    Input(String),
    Internal(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) | Failure::Internal(m) => f.write_str(m),
        }
    }
}

fn input(e: impl fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

fn solver_failure(e: SolverError) -> Failure {
    match e {
        SolverError::PanelMismatch { .. } => Failure::Internal(e.to_string()),
        other => Failure::Input(other.to_string()),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Internal(format!("{}: {e}", path.display()))),
        None => {
            println!("{}", text.trim_end());
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map_err(|e| Failure::Internal(e.to_string()))
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Solve {
            instance,
            variant,
            rule,
            ballot,
            class,
            budget,
            tau_min,
            tau_max,
            rho,
            sigma,
            seed,
            reference,
            audit,
            out,
        } => {
            let inst = load_instance(&instance).map_err(input)?;
            let reference = match reference {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
                    let table =
                        ReferenceTable::parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
                    table.get(inst.name())
                }
                None => None,
            };
            let mut params = default_params(class);
            params.variant = variant;
            params.rule = rule;
            params.ballot_size = ballot;
            params.seed = seed;
            params.budget = budget.unwrap_or(params.budget);
            let p = &mut params.pheromone;
            p.tau_min = tau_min.unwrap_or(p.tau_min);
            p.tau_max = tau_max.unwrap_or(p.tau_max);
            p.rho = rho.unwrap_or(p.rho);
            p.sigma = sigma.unwrap_or(p.sigma);
            let (record, _) = solve_record(&inst, &params, reference, audit).map_err(solver_failure)?;
            emit(&to_json(&record)?, out.as_deref())
        }
        Command::Oracle { instance } => {
            let inst = load_instance(&instance).map_err(input)?;
            let (cost, encoding) = brute_force_optimum(&inst).map_err(input)?;
            let doc = serde_json::json!({
                "instance": inst.name(),
                "cost": cost,
                "encoding": encoding,
            });
            emit(&to_json(&doc)?, None)
        }
        Command::Gap { cost, reference } => {
            let g = gap(cost, reference).map_err(input)?;
            println!("{g}");
            Ok(())
        }
        Command::Generate { m, n, agents, structure, seed, equal_split, out } => {
            let cfg = GeneratorConfig { m, n, agents, structure, seed, equal_split };
            let inst = generate_instance(&cfg).map_err(input)?;
            emit(&write_instance(&inst), out.as_deref())
        }
        Command::Batch { manifest, workers, out } => {
            let parsed = BatchManifest::load(&manifest).map_err(input)?;
            let base = manifest.parent().unwrap_or(Path::new("."));
            let batch = parsed.resolve(base).map_err(input)?;
            let report = run_batch(
                &batch.instances,
                &batch.configs,
                &batch.seeds,
                batch.reference.as_ref(),
                workers.unwrap_or(batch.workers),
                batch.audit,
            )
            .map_err(|e| match e {
                BatchError::Run { ref source, .. } if !matches!(source, SolverError::PanelMismatch { .. }) => input(e),
                other => Failure::Internal(other.to_string()),
            })?;
            emit(&to_json(&report)?, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}

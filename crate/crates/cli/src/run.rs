//! The fit and bench commands.

use std::path::Path;

use partls::solver::{fit_alt, fit_bnb, fit_opt};
use partls::{Dataset, FitConfig, Partition};

use crate::dataset::load_dataset;
use crate::failure::Failure;
use crate::main_args::{BenchArgs, FitArgs, SolverChoice};
use crate::output::{write_trace, ConfigEcho, RunResult, TraceRow};
use crate::partition_spec::PartitionSpec;

pub struct PreparedProblem {
    pub dataset: Dataset,
    pub partition: Partition,
    pub feature_names: Vec<String>,
    pub group_names: Vec<String>,
}

/// Loads the CSV and partition spec, binds them, and applies the optional
/// homogeneous-coordinate extension.
pub fn prepare(
    data: &Path,
    target: &str,
    partition_path: &Path,
    intercept: bool,
) -> Result<PreparedProblem, Failure> {
    let loaded = load_dataset(data, target)?;
    let spec = PartitionSpec::load(partition_path)?;
    let bound = spec.bind(&loaded.feature_names)?;

    let mut feature_names = loaded.feature_names;
    let mut group_names = bound.group_names;
    let (dataset, partition) = if intercept {
        let (d, p) = loaded.dataset.to_homogeneous(&bound.partition)?;
        feature_names.push("(intercept)".to_owned());
        group_names.push("(intercept)".to_owned());
        (d, p)
    } else {
        (loaded.dataset, bound.partition)
    };
    Ok(PreparedProblem { dataset, partition, feature_names, group_names })
}

fn fit_config(args: &FitArgs, iterations: usize) -> FitConfig {
    FitConfig {
        eta: args.eta,
        iterations,
        restarts: args.restarts,
        seed: args.seed,
        tol: args.tolerance,
        node_limit: args.node_limit,
        enumeration_cap: args.enumeration_cap,
        threads: args.threads,
    }
}

fn config_echo(args: &FitArgs, iterations: Vec<usize>) -> ConfigEcho {
    ConfigEcho {
        eta: args.eta,
        iterations,
        restarts: args.restarts,
        seed: args.seed,
        tolerance: args.tolerance,
        node_limit: args.node_limit,
        enumeration_cap: args.enumeration_cap,
        threads: args.threads,
        intercept: args.intercept,
    }
}

pub fn run_fit(args: &FitArgs) -> Result<(), Failure> {
    let problem = prepare(&args.data, &args.target, &args.partition, args.intercept)?;
    let config = fit_config(args, args.iterations);

    let report = match args.solver {
        SolverChoice::Alt => fit_alt(&problem.dataset, &problem.partition, &config)?.0,
        SolverChoice::Opt => fit_opt(&problem.dataset, &problem.partition, &config)?,
        SolverChoice::Bnb => fit_bnb(&problem.dataset, &problem.partition, &config)?,
    };

    let result = RunResult::from_report(
        &report,
        &problem.partition,
        &problem.feature_names,
        &problem.group_names,
        config_echo(args, vec![args.iterations]),
    );
    result.emit(args.out.as_ref())
}

pub fn run_bench(args: &BenchArgs) -> Result<(), Failure> {
    let problem = prepare(&args.fit.data, &args.fit.target, &args.fit.partition, args.fit.intercept)?;
    let mut rows: Vec<TraceRow> = Vec::new();

    for solver in &args.solvers {
        match solver {
            SolverChoice::Alt => {
                for &iterations in &args.alt_iterations {
                    let config = fit_config(&args.fit, iterations);
                    let (_, trace) = fit_alt(&problem.dataset, &problem.partition, &config)?;
                    let best = trace.best_so_far();
                    for (i, (&seconds, &objective)) in
                        trace.cumulative_seconds.iter().zip(best.iter()).enumerate()
                    {
                        rows.push(TraceRow {
                            solver: format!("alt-t{iterations}"),
                            restart_index: i,
                            cumulative_seconds: seconds,
                            best_objective: objective,
                        });
                    }
                }
            }
            SolverChoice::Opt | SolverChoice::Bnb => {
                let config = fit_config(&args.fit, args.fit.iterations);
                let report = match solver {
                    SolverChoice::Opt => fit_opt(&problem.dataset, &problem.partition, &config)?,
                    _ => fit_bnb(&problem.dataset, &problem.partition, &config)?,
                };
                rows.push(TraceRow {
                    solver: report.diagnostics.solver.name().to_owned(),
                    restart_index: 0,
                    cumulative_seconds: report.diagnostics.wall_seconds,
                    best_objective: report.objective,
                });
            }
        }
    }
    write_trace(&rows, args.trace_out.as_deref())
}

//! Result JSON and benchmark trace CSV emission.

use std::io::Write;
use std::path::{Path, PathBuf};

use partls::solver::{Diagnostics, FitReport};
use partls::Partition;
use serde::Serialize;

use crate::failure::Failure;

#[derive(Serialize)]
pub struct AlphaEntry {
    pub feature: String,
    pub group: String,
    pub weight: f64,
}

#[derive(Serialize)]
pub struct BetaEntry {
    pub group: String,
    pub weight: f64,
}

#[derive(Serialize)]
pub struct DiagnosticsOut {
    pub restarts: usize,
    pub iterations: usize,
    pub subproblems: usize,
    pub degenerate_restarts: usize,
    pub nodes_visited: usize,
    pub nodes_pruned: usize,
    pub proven_optimal: bool,
}

#[derive(Serialize, Clone)]
pub struct ConfigEcho {
    pub eta: f64,
    pub iterations: Vec<usize>,
    pub restarts: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub node_limit: usize,
    pub enumeration_cap: usize,
    pub threads: usize,
    pub intercept: bool,
}

/// The fit result document. `wall_seconds` is the only field excluded from
/// reproducibility guarantees.
#[derive(Serialize)]
pub struct RunResult {
    pub solver: String,
    pub objective: f64,
    pub alpha: Vec<AlphaEntry>,
    pub beta: Vec<BetaEntry>,
    pub wall_seconds: f64,
    pub diagnostics: DiagnosticsOut,
    pub config: ConfigEcho,
}

impl RunResult {
    pub fn from_report(
        report: &FitReport,
        partition: &Partition,
        feature_names: &[String],
        group_names: &[String],
        config: ConfigEcho,
    ) -> RunResult {
        let d: &Diagnostics = &report.diagnostics;
        let alpha = feature_names
            .iter()
            .enumerate()
            .map(|(m, feature)| AlphaEntry {
                feature: feature.clone(),
                group: group_names[partition.group_of(m)].clone(),
                weight: report.model.alpha_hat[m],
            })
            .collect();
        let beta = group_names
            .iter()
            .enumerate()
            .map(|(k, group)| BetaEntry { group: group.clone(), weight: report.model.beta_hat[k] })
            .collect();
        RunResult {
            solver: d.solver.name().to_owned(),
            objective: report.objective,
            alpha,
            beta,
            wall_seconds: d.wall_seconds,
            diagnostics: DiagnosticsOut {
                restarts: d.restarts,
                iterations: d.iterations,
                subproblems: d.subproblems,
                degenerate_restarts: d.degenerate_restarts,
                nodes_visited: d.nodes_visited,
                nodes_pruned: d.nodes_pruned,
                proven_optimal: d.proven_optimal,
            },
            config,
        }
    }

    /// Pretty JSON to the given file or stdout.
    pub fn emit(&self, out: Option<&PathBuf>) -> Result<(), Failure> {
        let text = serde_json::to_string_pretty(self)?;
        match out {
            Some(path) => {
                std::fs::write(path, text + "\n")
                    .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
            }
            None => println!("{text}"),
        }
        Ok(())
    }
}

/// One row of the benchmark trace: per restart for the alternating solver,
/// a single row for the exact solvers.
pub struct TraceRow {
    pub solver: String,
    pub restart_index: usize,
    pub cumulative_seconds: f64,
    pub best_objective: f64,
}

pub fn write_trace(rows: &[TraceRow], out: Option<&Path>) -> Result<(), Failure> {
    let mut buffer = Vec::new();
    writeln!(buffer, "solver,restart_index,cumulative_seconds,best_objective")
        .expect("in-memory write");
    for row in rows {
        writeln!(
            buffer,
            "{},{},{},{}",
            row.solver, row.restart_index, row.cumulative_seconds, row.best_objective
        )
        .expect("in-memory write");
    }
    match out {
        Some(path) => std::fs::write(path, buffer)
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?,
        None => {
            std::io::stdout().write_all(&buffer)?;
        }
    }
    Ok(())
}

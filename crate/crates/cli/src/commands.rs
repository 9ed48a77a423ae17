//! Command implementations.

use std::path::{Path, PathBuf};

use mwcontrol_core::bounds::{self, BoundCertificate};
use mwcontrol_core::controllability;
use mwcontrol_core::graph::MatrixWeightedGraph;
use mwcontrol_core::partition::{self, AepViolation, NodePartition};
use mwcontrol_core::Tolerances;
use rayon::prelude::*;
use serde::Serialize;

use crate::cli::{Cli, Command, PartitionCommand};
use crate::config::{AnalysisConfig, OutputFormat};
use crate::error::{CliError, Result};
use crate::examples::{self, ExampleCheck, LaplacianBuilder};
use crate::format::{load_graph, parse_cells, rows};
use crate::report::{label_list, labels, AnalysisReport, NodeLabel};
use crate::{dot, Outcome};

pub fn run(cli: &Cli) -> Outcome {
    let config = cli.config();
    let result = match &cli.command {
        Command::Analyze { graphs, leaders } => return analyze(graphs, leaders, cli.jobs, &config),
        Command::Partition { action } => partition_command(action, &config),
        Command::UncontrollableB {
            graph,
            cells,
            c,
            leaders,
        } => uncontrollable_b(graph, cells, *c, leaders.as_deref(), &config),
        Command::Examples { json } => {
            let mut config = config;
            if *json {
                config.output = OutputFormat::Json;
            }
            examples_command(&config, MatrixWeightedGraph::laplacian)
        }
    };
    result.unwrap_or_else(|e| Outcome::error(&e))
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports always serialize");
    s.push('\n');
    s
}

fn no_dot(config: &AnalysisConfig, command: &str) -> Result<()> {
    if config.output == OutputFormat::Dot {
        return Err(CliError::Invalid(format!(
            "dot output is only available for `partition quotient`, not `{command}`"
        )));
    }
    Ok(())
}

/// Full analysis of one graph file.
pub fn analyze_graph(path: &Path, leaders: &[usize], tols: &Tolerances) -> Result<AnalysisReport> {
    let g = load_graph(path, tols)?;
    analyze_loaded(&g, leaders, tols)
}

pub fn analyze_loaded(g: &MatrixWeightedGraph, leaders: &[usize], tols: &Tolerances) -> Result<AnalysisReport> {
    let mut report = controllability::is_controllable(g, leaders, tols)?;
    report.certificates = bounds::applicable_certificates(g, leaders, tols)?;
    Ok(AnalysisReport::new(report, leaders))
}

/// Analyzes every graph with the same leaders, `jobs` at a time. Exit status
/// is 2 if any file fails, else 1 if any network is uncontrollable.
pub fn analyze(graphs: &[PathBuf], leaders: &[usize], jobs: usize, config: &AnalysisConfig) -> Outcome {
    let prepared = no_dot(config, "analyze").and_then(|()| config.tolerances());
    let tols = match prepared {
        Ok(t) => t,
        Err(e) => return Outcome::error(&e),
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
        Ok(p) => p,
        Err(e) => return Outcome::error(&CliError::Invalid(format!("cannot start {jobs} workers: {e}"))),
    };
    let results: Vec<Result<AnalysisReport>> =
        pool.install(|| graphs.par_iter().map(|p| analyze_graph(p, leaders, &tols)).collect());

    let mut stderr = String::new();
    let mut reports = Vec::new();
    for (path, result) in graphs.iter().zip(results) {
        match result {
            Ok(r) => reports.push((path, r)),
            Err(e) => stderr.push_str(&format!("error: {}: {e}\n", path.display())),
        }
    }
    let stdout = match (config.output, reports.as_slice()) {
        (OutputFormat::Json, [(_, single)]) if graphs.len() == 1 => json(single),
        (OutputFormat::Json, many) => json(&many.iter().map(|(_, r)| r).collect::<Vec<_>>()),
        (_, [(_, single)]) if graphs.len() == 1 => single.to_text(),
        (_, many) => many
            .iter()
            .map(|(p, r)| format!("== {} ==\n{}", p.display(), r.to_text()))
            .collect(),
    };
    let code = if !stderr.is_empty() {
        2
    } else if reports.iter().all(|(_, r)| r.controllable) {
        0
    } else {
        1
    };
    Outcome { stdout, stderr, code }
}

#[derive(Serialize)]
struct CellsReport {
    cells: Vec<Vec<usize>>,
}

/// One line per cell with 1-based node labels; cell `k` is named
/// `{prefix}{k + first}`.
fn cells_text(cells: &[Vec<usize>], prefix: &str, first: usize) -> String {
    cells
        .iter()
        .enumerate()
        .map(|(k, c)| format!("{prefix}{}: {}\n", k + first, label_list(c)))
        .collect()
}

#[derive(Serialize)]
struct AepReport {
    aep: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<AepViolation>,
}

#[derive(Serialize)]
struct QuotientEdgeReport {
    from: usize,
    to: usize,
    weight: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct QuotientReport {
    cells: Vec<Vec<usize>>,
    d: usize,
    edges: Vec<QuotientEdgeReport>,
    laplacian: Vec<Vec<f64>>,
}

fn graph_and_partition(graph: &Path, cells: &str, tols: &Tolerances) -> Result<(MatrixWeightedGraph, NodePartition)> {
    let g = load_graph(graph, tols)?;
    let partition = NodePartition::new(g.n(), parse_cells(cells)?)?;
    Ok((g, partition))
}

pub fn partition_command(action: &PartitionCommand, config: &AnalysisConfig) -> Result<Outcome> {
    let tols = config.tolerances()?;
    match action {
        PartitionCommand::Distance { graph, leader } => {
            no_dot(config, "partition distance")?;
            let g = load_graph(graph, &tols)?;
            let cells = partition::distance_partition(&g, *leader)?.into_cells();
            Ok(Outcome::ok(
                match config.output {
                    OutputFormat::Json => json(&CellsReport { cells }),
                    _ => cells_text(&cells, "distance ", 0),
                },
                true,
            ))
        }
        PartitionCommand::AepCheck { graph, cells } => {
            no_dot(config, "partition aep-check")?;
            let (g, pi) = graph_and_partition(graph, cells, &tols)?;
            let verdict = partition::is_aep(&g, &pi, tols.aep)?;
            let report = AepReport {
                aep: verdict.is_ok(),
                witness: verdict.err(),
            };
            let text = match &report.witness {
                None => "almost equitable: true\n".to_string(),
                Some(w) => format!(
                    "almost equitable: false\nnodes {} and {} of cell {} differ in degree toward cell {} by {:e}\n",
                    w.v + 1,
                    w.w + 1,
                    w.cell_i + 1,
                    w.cell_j + 1,
                    w.difference
                ),
            };
            let out = if config.output == OutputFormat::Json { json(&report) } else { text };
            Ok(Outcome::ok(out, report.aep))
        }
        PartitionCommand::AepRefine { graph, cells } => {
            no_dot(config, "partition aep-refine")?;
            let (g, pi) = graph_and_partition(graph, cells, &tols)?;
            let cells = partition::coarsest_aep_refinement(&g, &pi, tols.aep)?.into_cells();
            Ok(Outcome::ok(
                match config.output {
                    OutputFormat::Json => json(&CellsReport { cells }),
                    _ => cells_text(&cells, "V", 1),
                },
                true,
            ))
        }
        PartitionCommand::Quotient { graph, cells } => {
            let (g, pi) = graph_and_partition(graph, cells, &tols)?;
            let q = partition::quotient(&g, &pi, &tols)?;
            let out = match config.output {
                OutputFormat::Dot => dot::quotient_to_dot(&q, &pi),
                OutputFormat::Json => json(&QuotientReport {
                    cells: pi.cells().to_vec(),
                    d: q.d(),
                    edges: q
                        .edges()
                        .iter()
                        .map(|e| QuotientEdgeReport {
                            from: e.from,
                            to: e.to,
                            weight: rows(&e.weight),
                        })
                        .collect(),
                    laplacian: rows(q.laplacian()),
                }),
                OutputFormat::Text => {
                    let mut s = cells_text(pi.cells(), "V", 1);
                    for e in q.edges() {
                        s.push_str(&format!("D(V{}, V{}) = {:?}\n", e.from + 1, e.to + 1, rows(&e.weight)));
                    }
                    s
                }
            };
            Ok(Outcome::ok(out, true))
        }
    }
}

#[derive(Serialize)]
struct UncontrollableReport {
    leaders: Vec<NodeLabel>,
    gcd: usize,
    q: Vec<usize>,
    c: usize,
    input: Vec<Vec<f64>>,
    bound: usize,
    dim: usize,
    total: usize,
    uncontrollable: bool,
    certificate: BoundCertificate,
}

/// Exit status 0 when the built input is verified uncontrollable, 1 if the
/// verification fails.
pub fn uncontrollable_b(
    graph: &Path,
    cells: &str,
    c: usize,
    leaders: Option<&[usize]>,
    config: &AnalysisConfig,
) -> Result<Outcome> {
    no_dot(config, "uncontrollable-b")?;
    let tols = config.tolerances()?;
    let (g, pi) = graph_and_partition(graph, cells, &tols)?;
    let built = match leaders {
        Some(l) => bounds::uncontrollable_input_with_leaders(&g, &pi, c, l, &tols)?,
        None => bounds::construct_uncontrollable_input(&g, &pi, c, &tols)?,
    };
    let certificate = bounds::uncontrollable_input_certificate(&g, &pi, &built, &tols)?;
    let dim = controllability::report_for(&g.laplacian(), built.input.matrix(), tols.rank)?.dim;
    let total = g.state_dim();
    let report = UncontrollableReport {
        leaders: labels(&built.leaders),
        gcd: built.gcd,
        q: built.q.clone(),
        c,
        input: rows(built.input.matrix()),
        bound: total - 1,
        dim,
        total,
        uncontrollable: dim < total,
        certificate,
    };
    let out = match config.output {
        OutputFormat::Json => json(&report),
        _ => format!(
            "leaders: {}\ngcd {}, q {:?}, c {}\nbound dim ≤ {}; dim {} of {}, {}\n",
            label_list(&built.leaders),
            report.gcd,
            report.q,
            c,
            report.bound,
            dim,
            total,
            if report.uncontrollable { "uncontrollable" } else { "controllable" }
        ),
    };
    Ok(Outcome::ok(out, report.uncontrollable))
}

/// Exit status 0 iff every check matches.
pub fn examples_command(config: &AnalysisConfig, laplacian: LaplacianBuilder) -> Result<Outcome> {
    no_dot(config, "examples")?;
    let checks: Vec<ExampleCheck> = examples::run_examples(laplacian, &config.tolerances()?)?;
    let all = checks.iter().all(|c| c.passed);
    let out = match config.output {
        OutputFormat::Json => json(&checks),
        _ => checks
            .iter()
            .map(|c| {
                format!(
                    "{} {}: expected {}, got {}\n",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.expected,
                    c.got
                )
            })
            .collect(),
    };
    Ok(Outcome::ok(out, all))
}

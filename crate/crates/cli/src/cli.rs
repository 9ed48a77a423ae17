use std::path::PathBuf;

use clap::{Parser, Subcommand};
use mwcontrol_core::Tolerances;

use crate::config::{AnalysisConfig, OutputFormat};

/// Controllability analysis for consensus networks with matrix-valued edge
/// weights. Node indices are 0-based on input; text output also shows
/// 1-based labels.
#[derive(Debug, Parser)]
#[command(name = "mwcontrol", version)]
pub struct Cli {
    /// Rank tolerance, relative to the largest singular value involved.
    #[arg(long, global = true, default_value_t = Tolerances::DEFAULT_RANK)]
    pub tol: f64,
    /// Eigenvalue tolerance for classifying edge weights.
    #[arg(long = "class-tol", global = true, default_value_t = Tolerances::DEFAULT_CLASS)]
    pub class_tol: f64,
    /// Degree-equality tolerance for almost equitable partitions.
    #[arg(long = "aep-tol", global = true, default_value_t = Tolerances::DEFAULT_AEP)]
    pub aep_tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub output: OutputFormat,
    /// Worker threads for analyzing several graphs at once.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Controllable subspace dimension and every applicable bound.
    /// Exit status: 0 controllable, 1 uncontrollable, 2 input error.
    Analyze {
        #[arg(required = true)]
        graphs: Vec<PathBuf>,
        /// Comma-separated leader nodes.
        #[arg(long, required = true, value_delimiter = ',')]
        leaders: Vec<usize>,
    },
    /// Distance partitions, almost equitable partitions and quotients.
    Partition {
        #[command(subcommand)]
        action: PartitionCommand,
    },
    /// Build an input matrix that leaves the network uncontrollable.
    UncontrollableB {
        graph: PathBuf,
        /// Cells as JSON (`[[0,1],[2,3]]`) or a partition file.
        #[arg(long)]
        cells: String,
        #[arg(long, default_value_t = 1)]
        c: usize,
        /// Explicit leader nodes instead of the lowest indices per cell.
        #[arg(long, value_delimiter = ',')]
        leaders: Option<Vec<usize>>,
    },
    /// Check the bundled reference networks against their known results.
    Examples {
        /// Same as `--output json`.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum PartitionCommand {
    /// Cells by hop distance from a leader.
    Distance {
        graph: PathBuf,
        #[arg(long)]
        leader: usize,
    },
    /// Test whether the cells form an almost equitable partition.
    /// Exit status 1 when they do not.
    AepCheck {
        graph: PathBuf,
        #[arg(long)]
        cells: String,
    },
    /// Coarsest almost equitable partition refining the cells.
    AepRefine {
        graph: PathBuf,
        #[arg(long)]
        cells: String,
    },
    /// Quotient graph of an almost equitable partition.
    Quotient {
        graph: PathBuf,
        #[arg(long)]
        cells: String,
    },
}

impl Cli {
    pub fn config(&self) -> AnalysisConfig {
        AnalysisConfig {
            tol: self.tol,
            class_tol: self.class_tol,
            aep_tol: self.aep_tol,
            output: self.output,
        }
    }
}

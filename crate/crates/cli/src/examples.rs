//! The two reference networks, bundled, and an end-to-end self-check.

use mwcontrol_core::controllability::{self, GeneralInputMatrix};
use mwcontrol_core::graph::{BlockLaplacian, MatrixWeightedGraph};
use mwcontrol_core::partition::{self, NodePartition};
use mwcontrol_core::{DMatrix, Tolerances};
use serde::Serialize;

use crate::error::Result;
use crate::format::GraphFile;

/// Five-node path, `d = 2`, every weight positive definite.
pub const EXAMPLE1: &str = include_str!("../data/example1.json");
/// [`EXAMPLE1`] with the weight between the second and third node replaced
/// by `[[1, 1], [1, 1]]`.
pub const EXAMPLE1_PSD: &str = include_str!("../data/example1_psd.json");
/// Six nodes, `d = 2`, with the almost equitable partition
/// `{{0, 1}, {2, 3, 4, 5}}`.
pub const EXAMPLE2: &str = include_str!("../data/example2.json");

/// The block Laplacian of [`EXAMPLE1`] as printed alongside the network.
pub const EXAMPLE1_LAPLACIAN: [[i32; 10]; 10] = [
    [1, 1, -1, -1, 0, 0, 0, 0, 0, 0],
    [1, 2, -1, -2, 0, 0, 0, 0, 0, 0],
    [-1, -1, 2, 1, -1, 0, 0, 0, 0, 0],
    [-1, -2, 1, 4, 0, -2, 0, 0, 0, 0],
    [0, 0, -1, 0, 3, 1, -2, -1, 0, 0],
    [0, 0, 0, -2, 1, 4, -1, -2, 0, 0],
    [0, 0, 0, 0, -2, -1, 3, 3, -1, -2],
    [0, 0, 0, 0, -1, -2, 3, 7, -2, -5],
    [0, 0, 0, 0, 0, 0, -1, -2, 1, 2],
    [0, 0, 0, 0, 0, 0, -2, -5, 2, 5],
];

pub type LaplacianBuilder = fn(&MatrixWeightedGraph) -> BlockLaplacian;

pub fn bundled(text: &str) -> MatrixWeightedGraph {
    GraphFile::parse(text)
        .and_then(|f| f.to_graph(&Tolerances::default()))
        .expect("bundled examples are valid")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExampleCheck {
    pub name: &'static str,
    pub expected: String,
    pub got: String,
    pub passed: bool,
}

fn check(name: &'static str, expected: impl ToString, got: impl ToString) -> ExampleCheck {
    let (expected, got) = (expected.to_string(), got.to_string());
    ExampleCheck {
        name,
        passed: expected == got,
        expected,
        got,
    }
}

fn dim(laplacian: &BlockLaplacian, b: &DMatrix<f64>, tols: &Tolerances) -> Result<usize> {
    Ok(controllability::report_for(laplacian, b, tols.rank)?.dim)
}

/// Runs both reference networks end to end. `laplacian` is injectable so a
/// deliberately broken builder can be shown to fail the checks.
pub fn run_examples(laplacian: LaplacianBuilder, tols: &Tolerances) -> Result<Vec<ExampleCheck>> {
    let ex1 = bundled(EXAMPLE1);
    let ex1_psd = bundled(EXAMPLE1_PSD);
    let ex2 = bundled(EXAMPLE2);
    let l1 = laplacian(&ex1);
    let printed = DMatrix::from_fn(10, 10, |i, j| f64::from(EXAMPLE1_LAPLACIAN[i][j]));
    let leader = GeneralInputMatrix::block_selector(5, 2, &[0])?;
    let pi = NodePartition::new(6, vec![vec![0, 1], vec![2, 3, 4, 5]])?;
    let b2 = GeneralInputMatrix::block_selector(6, 2, &[0, 2, 5])?;
    Ok(vec![
        check(
            "example1_laplacian",
            "printed matrix",
            if l1.matrix() == &printed { "printed matrix" } else { "different matrix" },
        ),
        check("example1_dim", 10, dim(&l1, leader.matrix(), tols)?),
        check("example1_psd_dim", 9, dim(&laplacian(&ex1_psd), leader.matrix(), tols)?),
        check("example2_aep", true, partition::is_aep(&ex2, &pi, tols.aep)?.is_ok()),
        check("example2_rank", 9, dim(&laplacian(&ex2), b2.matrix(), tols)?),
    ])
}

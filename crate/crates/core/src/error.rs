use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("weight on edge ({i}, {j}) is not symmetric (max deviation {deviation:e})")]
    AsymmetricWeight { i: usize, j: usize, deviation: f64 },
    #[error("weight on edge ({i}, {j}) is indefinite (smallest eigenvalue {min_eigenvalue:e})")]
    IndefiniteWeight {
        i: usize,
        j: usize,
        min_eigenvalue: f64,
    },
    #[error("weight on edge ({i}, {j}) is the zero matrix; omit the edge instead")]
    ZeroWeight { i: usize, j: usize },
    #[error("self-loop at node {node}")]
    SelfLoop { node: usize },
    #[error("duplicate edge ({i}, {j})")]
    DuplicateEdge { i: usize, j: usize },
    #[error("node {node} out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("dimension mismatch: {what} (expected {expected}, found {found})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("matrix is not symmetric (max deviation {deviation:e})")]
    NotSymmetric { deviation: f64 },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("node {to} is unreachable from node {from}")]
    Unreachable { from: usize, to: usize },
    #[error("nodes {from} and {to} are consecutive in the sequence but not adjacent")]
    NotAPath { from: usize, to: usize },
    #[error("subspaces live in different ambient spaces ({left} vs {right})")]
    AmbientMismatch { left: usize, right: usize },
    #[error("invalid partition: {reason} (node {node})")]
    InvalidPartition { reason: &'static str, node: usize },
    #[error("partition is not almost equitable (cells {cell_i}/{cell_j}, nodes {v}/{w})")]
    NotAep {
        cell_i: usize,
        cell_j: usize,
        v: usize,
        w: usize,
    },
    #[error("partition has {cells} cells for {n} nodes; a nontrivial partition is required")]
    TrivialPartition { cells: usize, n: usize },
    #[error("graph is not a tree")]
    NotATree,
    #[error("graph is not a path graph")]
    NotAPathGraph,
    #[error("node {node} is not an endpoint of the path graph")]
    NotAnEndpoint { node: usize },
    #[error("graph is not a cycle")]
    NotACycle,
    #[error("graph is not complete")]
    NotComplete,
    #[error("partition is not reducible (gcd of cell sizes is {gcd})")]
    NotReducible { gcd: usize },
    #[error("c = {c} outside 1..={max}")]
    COutOfRange { c: usize, max: usize },
    #[error("leader {node} listed more than once")]
    DuplicateLeader { node: usize },
    #[error("cell {cell} holds {found} leaders, expected {expected}")]
    LeaderCount {
        cell: usize,
        expected: usize,
        found: usize,
    },
    #[error("input matrix is empty")]
    EmptyInput,
}

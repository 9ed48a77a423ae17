//! Graph and partition files.

use std::path::Path;

use mwcontrol_core::graph::MatrixWeightedGraph;
use mwcontrol_core::{DMatrix, Tolerances};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// `{"n": 5, "d": 2, "edges": [{"i": 0, "j": 1, "w": [[1, 1], [1, 2]]}]}`
/// with 0-based node indices and row-major weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub n: usize,
    pub d: usize,
    pub edges: Vec<EdgeEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub i: usize,
    pub j: usize,
    pub w: Vec<Vec<f64>>,
}

/// `{"cells": [[0, 1], [2, 3, 4, 5]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionFile {
    pub cells: Vec<Vec<usize>>,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

/// Row-major nested vectors, the layout used by every file and report.
pub fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

impl GraphFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| CliError::Json {
            what: "graph file".into(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read(path)?).map_err(|e| match e {
            CliError::Json { source, .. } => CliError::Json {
                what: format!("graph file {}", path.display()),
                source,
            },
            other => other,
        })
    }

    pub fn from_graph(g: &MatrixWeightedGraph) -> Self {
        Self {
            n: g.n(),
            d: g.d(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeEntry {
                    i: e.i,
                    j: e.j,
                    w: rows(e.weight.entries()),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph files always serialize")
    }

    fn weight(&self, index: usize) -> Result<DMatrix<f64>> {
        let e = &self.edges[index];
        let shape_error = |found: String| {
            CliError::Invalid(format!(
                "edges[{index}] ({}, {}): w must be {d}×{d}, found {found}",
                e.i,
                e.j,
                d = self.d
            ))
        };
        if e.w.len() != self.d {
            return Err(shape_error(format!("{} rows", e.w.len())));
        }
        if let Some(row) = e.w.iter().find(|r| r.len() != self.d) {
            return Err(shape_error(format!("a row of length {}", row.len())));
        }
        Ok(DMatrix::from_fn(self.d, self.d, |a, b| e.w[a][b]))
    }

    /// Builds the validated graph. Failures name the offending entry of
    /// `edges`.
    pub fn to_graph(&self, tols: &Tolerances) -> Result<MatrixWeightedGraph> {
        if self.d == 0 {
            return Err(CliError::Invalid("d must be at least 1".into()));
        }
        let weights = (0..self.edges.len())
            .map(|k| self.weight(k))
            .collect::<Result<Vec<_>>>()?;
        let triples = |upto: usize| {
            self.edges[..upto]
                .iter()
                .zip(&weights)
                .map(|(e, w)| (e.i, e.j, w.clone()))
                .collect::<Vec<_>>()
        };
        match MatrixWeightedGraph::new(self.n, self.d, triples(self.edges.len()), tols) {
            Ok(g) => Ok(g),
            Err(source) => {
                // Rebuild prefixes to find the first entry that breaks it.
                let index = (1..=self.edges.len())
                    .find(|&k| MatrixWeightedGraph::new(self.n, self.d, triples(k), tols).is_err())
                    .map_or(0, |k| k - 1);
                let e = &self.edges[index];
                Err(CliError::Edge {
                    index,
                    i: e.i,
                    j: e.j,
                    source,
                })
            }
        }
    }
}

pub fn load_graph(path: &Path, tols: &Tolerances) -> Result<MatrixWeightedGraph> {
    GraphFile::load(path)?.to_graph(tols)
}

/// Accepts inline JSON (`[[0,1],[2]]` or `{"cells": …}`) or a path to a
/// partition file.
pub fn parse_cells(arg: &str) -> Result<Vec<Vec<usize>>> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('[') || trimmed.starts_with('{') {
        arg.to_string()
    } else {
        read(Path::new(arg))?
    };
    let json = |source| CliError::Json {
        what: "cells".into(),
        source,
    };
    if text.trim_start().starts_with('{') {
        Ok(serde_json::from_str::<PartitionFile>(&text).map_err(json)?.cells)
    } else {
        serde_json::from_str(&text).map_err(json)
    }
}

//! Graphviz export of quotient graphs.

use std::fmt::Write;

use mwcontrol_core::partition::{NodePartition, QuotientGraph};
use mwcontrol_core::DMatrix;

use crate::report::label_list;

fn matrix_label(m: &DMatrix<f64>) -> String {
    let rows: Vec<String> = m
        .row_iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
        .map(|r| format!("[{r}]"))
        .collect();
    format!("[{}]", rows.join(", "))
}

/// A `digraph` with one node per cell and the relative degree matrix
/// `D(V_i, V_j)` as the label of every edge `V_i → V_j`.
pub fn quotient_to_dot(q: &QuotientGraph, partition: &NodePartition) -> String {
    let mut out = String::from("digraph quotient {\n");
    for (k, cell) in partition.cells().iter().enumerate() {
        let _ = writeln!(out, "  V{} [label=\"V{} = {{{}}}\"];", k + 1, k + 1, label_list(cell));
    }
    for e in q.edges() {
        let _ = writeln!(
            out,
            "  V{} -> V{} [label=\"{}\"];",
            e.from + 1,
            e.to + 1,
            matrix_label(&e.weight)
        );
    }
    out.push_str("}\n");
    out
}

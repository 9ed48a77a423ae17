//! Serializable reports and their text renderings.

use mwcontrol_core::bounds::{BoundCertificate, Sense};
use mwcontrol_core::controllability::ControllabilityReport;
use serde::Serialize;

/// A node as both its 0-based index and its 1-based label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NodeLabel {
    pub index: usize,
    pub label: usize,
}

impl NodeLabel {
    pub fn new(index: usize) -> Self {
        Self {
            index,
            label: index + 1,
        }
    }
}

pub fn labels(nodes: &[usize]) -> Vec<NodeLabel> {
    nodes.iter().map(|&v| NodeLabel::new(v)).collect()
}

pub fn label_list(nodes: &[usize]) -> String {
    nodes
        .iter()
        .map(|v| (v + 1).to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub dim: usize,
    pub total: usize,
    pub controllable: bool,
    /// Smallest retained over largest discarded singular value.
    pub gap: f64,
    pub leaders: Vec<NodeLabel>,
    pub certificates: Vec<BoundCertificate>,
}

impl AnalysisReport {
    pub fn new(report: ControllabilityReport, leaders: &[usize]) -> Self {
        Self {
            dim: report.dim,
            total: report.total,
            controllable: report.controllable,
            gap: report.singular_value_gap,
            leaders: labels(leaders),
            certificates: report.certificates,
        }
    }

    pub fn verdict(&self) -> String {
        format!(
            "dim {}/{}, {}",
            self.dim,
            self.total,
            if self.controllable { "controllable" } else { "uncontrollable" }
        )
    }

    pub fn to_text(&self) -> String {
        let leaders: Vec<usize> = self.leaders.iter().map(|l| l.index).collect();
        let mut out = format!("{}\nleaders: {}\ngap: {:e}\n", self.verdict(), label_list(&leaders), self.gap);
        for c in &self.certificates {
            out.push_str(&certificate_line(c));
            out.push('\n');
        }
        out
    }
}

fn sense_symbol(sense: Sense) -> &'static str {
    match sense {
        Sense::AtLeast => "≥",
        Sense::AtMost => "≤",
        Sense::Exactly => "=",
    }
}

pub fn certificate_line(c: &BoundCertificate) -> String {
    let kind = serde_json::to_value(c.kind()).expect("kinds serialize");
    let kind = kind.as_str().unwrap_or_default();
    let value = match c.value() {
        Some(v) => format!("dim {} {v}", sense_symbol(c.sense())),
        None => "no bound".to_string(),
    };
    let hypotheses: Vec<String> = c
        .hypotheses()
        .iter()
        .map(|h| format!("{} {} ({})", if h.passed { "+" } else { "-" }, h.name, h.detail))
        .collect();
    format!("{kind}: {value}; {}", hypotheses.join("; "))
}

use clap::ValueEnum;
use mwcontrol_core::Tolerances;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
    Dot,
}

/// Settings shared by every command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisConfig {
    pub tol: f64,
    pub class_tol: f64,
    pub aep_tol: f64,
    pub output: OutputFormat,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            tol: Tolerances::DEFAULT_RANK,
            class_tol: Tolerances::DEFAULT_CLASS,
            aep_tol: Tolerances::DEFAULT_AEP,
            output: OutputFormat::Text,
        }
    }
}

impl AnalysisConfig {
    pub fn tolerances(&self) -> Result<Tolerances> {
        let tols = Tolerances {
            rank: self.tol,
            class: self.class_tol,
            aep: self.aep_tol,
            ..Tolerances::default()
        };
        if tols.is_valid() {
            Ok(tols)
        } else {
            Err(CliError::Invalid(format!(
                "tolerances must be finite and positive (tol {}, class-tol {}, aep-tol {})",
                self.tol, self.class_tol, self.aep_tol
            )))
        }
    }
}

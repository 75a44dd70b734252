//! JSON inputs: sweep configurations and single states.

use std::path::Path;

use ergocap::capacitance::{OptimizerConfig, DEFAULT_GRID_SIZE};
use ergocap::channels::ChannelSpec;
use ergocap::qops::{Complex64, DensityMatrix, Matrix};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// `file:line:col: message`, without serde's own position suffix.
fn json_error(source: &str, e: &serde_json::Error) -> CliError {
    let msg = e.to_string();
    let suffix = format!(" at line {} column {}", e.line(), e.column());
    let msg = msg.strip_suffix(&suffix).unwrap_or(&msg);
    CliError::Invalid(format!("{source}:{}:{}: {msg}", e.line(), e.column()))
}

/// Columns a sweep can emit, in CSV order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    E1,
    E1Tot,
    Chi,
    ChiTot,
    Gap,
}

impl Output {
    pub const ALL: [Output; 5] = [
        Output::E1,
        Output::E1Tot,
        Output::Chi,
        Output::ChiTot,
        Output::Gap,
    ];

    pub fn column(self) -> &'static str {
        match self {
            Output::E1 => "e1",
            Output::E1Tot => "e1_tot",
            Output::Chi => "chi",
            Output::ChiTot => "chi_tot",
            Output::Gap => "gap",
        }
    }

    /// Whether the column needs the total-ergotropy search.
    pub fn needs_total(self) -> bool {
        matches!(self, Output::E1Tot | Output::ChiTot | Output::Gap)
    }
}

fn default_hamiltonian() -> Vec<f64> {
    vec![0.0, 1.0, 2.0]
}

fn default_grid_size() -> usize {
    DEFAULT_GRID_SIZE
}

fn default_outputs() -> Vec<Output> {
    Output::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub channel: ChannelSpec,
    #[serde(default = "default_hamiltonian")]
    pub hamiltonian: Vec<f64>,
    #[serde(default = "default_grid_size")]
    pub grid_size: usize,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<Output>,
}

impl SweepConfig {
    pub fn from_json(text: &str, source: &str) -> Result<Self, CliError> {
        let cfg: SweepConfig = serde_json::from_str(text).map_err(|e| json_error(source, &e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let field = |name: &str, msg: String| CliError::Invalid(format!("field `{name}`: {msg}"));
        let ch = self
            .channel
            .build()
            .map_err(|e| field("channel", e.to_string()))?;
        let h = &self.hamiltonian;
        if h.is_empty() {
            return Err(field(
                "hamiltonian",
                "must list at least one eigenvalue".into(),
            ));
        }
        if h.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(field(
                "hamiltonian",
                "eigenvalues must be finite and non-negative".into(),
            ));
        }
        if h.iter().all(|&v| v != 0.0) {
            return Err(field(
                "hamiltonian",
                "the smallest eigenvalue must be 0".into(),
            ));
        }
        if h.len() != ch.dim_in() {
            return Err(field(
                "hamiltonian",
                format!(
                    "{} eigenvalues for a channel of dimension {}",
                    h.len(),
                    ch.dim_in()
                ),
            ));
        }
        if self.grid_size < 2 {
            return Err(field("grid_size", format!("{} is below 2", self.grid_size)));
        }
        self.optimizer
            .validate()
            .map_err(|e| field("optimizer", e.to_string()))?;
        if self.outputs.is_empty() {
            return Err(field("outputs", "must request at least one column".into()));
        }
        let mut seen = self.outputs.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.outputs.len() {
            return Err(field("outputs", "duplicate column".into()));
        }
        Ok(())
    }

    /// Requested columns in canonical order.
    pub fn columns(&self) -> Vec<Output> {
        let mut cols = self.outputs.clone();
        cols.sort();
        cols
    }
}

/// A density matrix as JSON: either full `entries` of `[re, im]` pairs or a
/// real `diagonal`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    entries: Option<Vec<Vec<[f64; 2]>>>,
    diagonal: Option<Vec<f64>>,
}

pub fn parse_state(text: &str, source: &str) -> Result<DensityMatrix, CliError> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| json_error(source, &e))?;
    let rho = match (file.entries, file.diagonal) {
        (Some(rows), None) => {
            let n = rows.len();
            if n == 0 || rows.iter().any(|r| r.len() != n) {
                return Err(CliError::Invalid(format!(
                    "{source}: `entries` must be a square matrix"
                )));
            }
            let rows: Vec<Vec<Complex64>> = rows
                .iter()
                .map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
                .collect();
            DensityMatrix::new(Matrix::from_rows(&rows))
        }
        (None, Some(diag)) => DensityMatrix::from_diagonal(&diag),
        _ => {
            return Err(CliError::Invalid(format!(
                "{source}: give exactly one of `entries` or `diagonal`"
            )))
        }
    };
    rho.map_err(|e| CliError::Invalid(format!("{source}: {e}")))
}

/// Parses `0,1,2` into eigenvalues.
pub fn parse_levels(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect()
}

//! The exported classical policy: network layout, weights, and provenance.
//!
//! Loading and using an export touches only the dense-network and
//! environment code; no circuit simulation is involved.

use std::fs;
use std::path::Path;

use qtrl_core::{DenseNetSpec, EnvKind, FlatWeights, Mode, Policy};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::io::write_atomic;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub env: EnvKind,
    pub mode: Mode,
    /// Circuit blocks (qtrl only).
    pub depth: Option<usize>,
    /// Qubit count (qtrl only).
    pub qubits: Option<usize>,
    pub seed: u64,
    pub training_episodes: usize,
    pub final_last_10_average: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportedPolicy {
    pub format_version: u32,
    pub policy_spec: DenseNetSpec,
    pub theta: Vec<f64>,
    pub provenance: Provenance,
}

impl ExportedPolicy {
    pub fn new(policy: &Policy, provenance: Provenance) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            policy_spec: policy.spec().clone(),
            theta: policy.weights().as_slice().to_vec(),
            provenance,
        }
    }

    /// Pretty JSON; floats use the shortest representation that parses back
    /// to the same bits.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("plain data serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str, path: &Path) -> CliResult<Self> {
        let export: Self = serde_json::from_str(text)
            .map_err(|e| CliError::invalid(path, format!("not a policy export: {e}")))?;
        export.validate(path)?;
        Ok(export)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text, path)
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        write_atomic(path, self.to_json().as_bytes())
    }

    fn validate(&self, path: &Path) -> CliResult<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(CliError::invalid(
                path,
                format!("unsupported format version {}", self.format_version),
            ));
        }
        self.policy_spec
            .validate()
            .map_err(|e| CliError::invalid(path, e.to_string()))?;
        let expected = self.policy_spec.param_count();
        if self.theta.len() != expected {
            return Err(CliError::invalid(
                path,
                format!(
                    "theta has {} values but layers {:?} need {expected}",
                    self.theta.len(),
                    self.policy_spec.layer_sizes
                ),
            ));
        }
        if let Some(i) = self.theta.iter().position(|v| !v.is_finite()) {
            return Err(CliError::invalid(path, format!("theta[{i}] is not finite")));
        }
        let env = self.provenance.env;
        if self.policy_spec.input_size() != env.observation_size()
            || self.policy_spec.output_size() != env.num_actions()
        {
            return Err(CliError::invalid(
                path,
                format!("layers {:?} do not fit {env}", self.policy_spec.layer_sizes),
            ));
        }
        Ok(())
    }

    pub fn policy(&self) -> CliResult<Policy> {
        Ok(Policy::new(
            self.policy_spec.clone(),
            FlatWeights(self.theta.clone()),
        )?)
    }
}

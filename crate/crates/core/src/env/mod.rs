//! Dependency-free CartPole-v1 and MiniGrid-Empty-5x5 environments.

pub mod cartpole;
pub mod minigrid;

use serde::{Deserialize, Serialize};

pub use cartpole::{CartPole, CartPoleState};
pub use minigrid::{Direction, MiniGrid, MiniGridState};

use crate::error::Result;
use crate::nn::{DenseNetSpec, OutputHead};

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub observation: Vec<f64>,
    pub reward: f64,
    pub done: bool,
}

pub trait Environment {
    fn observation_size(&self) -> usize;
    fn num_actions(&self) -> usize;
    /// Starts a new episode and returns its first observation.
    fn reset(&mut self) -> Vec<f64>;
    /// Errors with [`crate::Error::Usage`] once the episode is done.
    fn step(&mut self, action: usize) -> Result<StepResult>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvKind {
    Cartpole,
    Minigrid,
}

impl EnvKind {
    pub fn name(self) -> &'static str {
        match self {
            EnvKind::Cartpole => "cartpole",
            EnvKind::Minigrid => "minigrid",
        }
    }

    /// A fresh environment whose reset randomness comes from `seed`.
    pub fn make(self, seed: u64) -> Box<dyn Environment + Send> {
        match self {
            EnvKind::Cartpole => Box::new(CartPole::new(seed)),
            EnvKind::Minigrid => Box::new(MiniGrid::new(seed)),
        }
    }

    pub fn observation_size(self) -> usize {
        match self {
            EnvKind::Cartpole => cartpole::OBSERVATION_SIZE,
            EnvKind::Minigrid => minigrid::OBSERVATION_SIZE,
        }
    }

    pub fn num_actions(self) -> usize {
        match self {
            EnvKind::Cartpole => 2,
            EnvKind::Minigrid => 3,
        }
    }

    /// Policy network used for this environment: 4-128-2 for CartPole and
    /// 147-32-3 for MiniGrid, ReLU hidden layer, softmax head.
    pub fn default_policy(self) -> DenseNetSpec {
        let hidden = match self {
            EnvKind::Cartpole => 128,
            EnvKind::Minigrid => 32,
        };
        DenseNetSpec::new(
            vec![self.observation_size(), hidden, self.num_actions()],
            OutputHead::Softmax,
        )
        .expect("static layer sizes are valid")
    }
}

impl std::fmt::Display for EnvKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for EnvKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cartpole" => Ok(EnvKind::Cartpole),
            "minigrid" => Ok(EnvKind::Minigrid),
            other => Err(crate::Error::Usage(format!(
                "unknown environment '{other}'"
            ))),
        }
    }
}

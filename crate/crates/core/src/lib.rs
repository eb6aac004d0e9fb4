//! Quantum-trained policy networks.
//!
//! A layered U3/CU3 circuit and a small mapping network generate every
//! weight of a classical softmax policy, which is trained with REINFORCE.
//! The trained policy is an ordinary dense network: evaluating it needs
//! nothing from the [`quantum`] or [`generator`] modules, and the crate
//! builds without them when the `quantum` feature is disabled.

pub mod env;
mod error;
#[cfg(feature = "quantum")]
pub mod generator;
pub mod nn;
pub mod policy;
#[cfg(feature = "quantum")]
pub mod quantum;
pub mod trainer;

pub use env::{EnvKind, Environment, StepResult};
pub use error::{Error, Result};
#[cfg(feature = "quantum")]
pub use generator::{GeneratedTheta, QtConfig, QtGenerator};
pub use nn::{DenseNetSpec, FlatWeights, OutputHead};
pub use policy::{evaluate, EvalSummary, Policy};
#[cfg(feature = "quantum")]
pub use quantum::{CircuitParams, StateVector};
pub use trainer::{
    train, train_with_observer, EpisodeRecord, Mode, TrainConfig, TrainLog, TrainOutcome,
};

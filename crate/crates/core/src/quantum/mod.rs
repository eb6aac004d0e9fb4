//! Statevector simulation of the U3/CU3 ring ansatz.

mod circuit;
pub mod gates;
mod state;

pub use circuit::{
    backprop_probabilities, circuit_probabilities, run_circuit, simulator_invocations,
    CircuitParams, ANGLES_PER_QUBIT,
};
pub use state::{ProbabilityVector, StateVector, MAX_QUBITS};

//! The layered U3/CU3 ansatz and its exact reverse-mode gradient.
//!
//! Each block applies U3 to every qubit in ascending order, then a ring of
//! CU3 gates with control `q` and target `(q + 1) mod n`, again ascending.
//! Per block and qubit, angles `[0..3]` parameterize the U3 rotation and
//! angles `[3..6]` the CU3 that qubit controls.

use std::cell::Cell;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gates::{self, Mat2};
use super::state::{ProbabilityVector, StateVector, MAX_QUBITS};
use crate::error::{check_finite, check_len, Error, Result};

/// Angles per (block, qubit): three for U3, three for the ring CU3.
pub const ANGLES_PER_QUBIT: usize = 6;

thread_local! {
    static SIM_CALLS: Cell<u64> = const { Cell::new(0) };
}

/// Number of circuit simulations (forward or backward) started on the
/// current thread. Used to check that pure-classical code paths never touch
/// the simulator.
pub fn simulator_invocations() -> u64 {
    SIM_CALLS.with(Cell::get)
}

fn count_invocation() {
    SIM_CALLS.with(|c| c.set(c.get() + 1));
}

/// The full angle tensor φ of shape `[depth][n][6]`, stored flat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    n: usize,
    depth: usize,
    angles: Vec<f64>,
}

impl CircuitParams {
    pub fn new(n: usize, depth: usize, angles: Vec<f64>) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n) {
            return Err(Error::Config(format!(
                "qubit count {n} outside 1..={MAX_QUBITS}"
            )));
        }
        if depth == 0 {
            return Err(Error::Config("circuit depth must be at least 1".into()));
        }
        check_len("circuit angles", Self::angle_count(n, depth), angles.len())?;
        check_finite("circuit angles", &angles)?;
        Ok(Self { n, depth, angles })
    }

    pub fn zeros(n: usize, depth: usize) -> Result<Self> {
        Self::new(n, depth, vec![0.0; Self::angle_count(n, depth)])
    }

    /// Angles drawn uniformly from [0, 2π).
    pub fn random<R: Rng + ?Sized>(n: usize, depth: usize, rng: &mut R) -> Result<Self> {
        let angles = (0..Self::angle_count(n, depth))
            .map(|_| rng.gen_range(0.0..TAU))
            .collect();
        Self::new(n, depth, angles)
    }

    pub fn angle_count(n: usize, depth: usize) -> usize {
        ANGLES_PER_QUBIT * n * depth
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// Mutable flat view for optimizers; callers must keep entries finite.
    pub fn angles_mut(&mut self) -> &mut [f64] {
        &mut self.angles
    }

    #[inline]
    pub fn index(&self, block: usize, qubit: usize, k: usize) -> usize {
        (block * self.n + qubit) * ANGLES_PER_QUBIT + k
    }

    pub fn get(&self, block: usize, qubit: usize, k: usize) -> f64 {
        self.angles[self.index(block, qubit, k)]
    }

    fn gates(&self) -> impl DoubleEndedIterator<Item = Gate> + '_ {
        (0..self.depth).flat_map(move |b| {
            let rotations = (0..self.n).map(move |q| Gate {
                target: q,
                control: None,
                offset: self.index(b, q, 0),
            });
            let ring = (0..self.n).map(move |q| Gate {
                target: (q + 1) % self.n,
                control: Some(q),
                offset: self.index(b, q, 3),
            });
            rotations.chain(ring)
        })
    }
}

/// One gate of the ansatz; `offset` points at its (μ, ϕ, λ) triple.
#[derive(Debug, Clone, Copy)]
struct Gate {
    target: usize,
    control: Option<usize>,
    offset: usize,
}

impl Gate {
    fn angles(&self, params: &CircuitParams) -> (f64, f64, f64) {
        let a = &params.angles[self.offset..self.offset + 3];
        (a[0], a[1], a[2])
    }

    fn matrix(&self, params: &CircuitParams) -> Mat2 {
        let (mu, phi, lam) = self.angles(params);
        gates::u3_matrix(mu, phi, lam)
    }

    fn masks(&self, n: usize) -> (usize, usize) {
        let tmask = gates::qubit_mask(n, self.target);
        let cmask = self.control.map_or(0, |c| gates::qubit_mask(n, c));
        (tmask, cmask)
    }
}

/// Runs the ansatz on |0…0⟩. A single-qubit register has no ring: the CU3
/// would target its own control, so it is skipped.
pub fn run_circuit(params: &CircuitParams) -> StateVector {
    count_invocation();
    forward(params)
}

fn forward(params: &CircuitParams) -> StateVector {
    let n = params.n;
    let mut state = StateVector::zero(n).expect("qubit count validated by CircuitParams");
    for gate in params.gates().filter(|g| g.control != Some(g.target)) {
        let (tmask, cmask) = gate.masks(n);
        gates::apply_mat2(state.amplitudes_mut(), tmask, cmask, &gate.matrix(params));
    }
    state
}

/// Gradient of `Σᵢ upstream[i] · pᵢ(φ)` with respect to every circuit angle,
/// laid out like [`CircuitParams::angles`].
///
/// Adjoint method: with `λ = diag(upstream)·ψ`, walk the gates backwards,
/// un-applying each from both `ψ` and `λ`; each angle's derivative is
/// `2·Re⟨λ|∂U|ψ⟩` evaluated between the states on either side of its gate.
pub fn backprop_probabilities(params: &CircuitParams, upstream: &[f64]) -> Result<Vec<f64>> {
    let n = params.n;
    check_len("probability gradient", 1 << n, upstream.len())?;
    check_finite("probability gradient", upstream)?;
    count_invocation();

    let mut grad = vec![0.0; params.angles.len()];
    if upstream.iter().all(|&g| g == 0.0) {
        return Ok(grad);
    }

    let mut psi = forward(params);
    let mut lam: Vec<Complex64> = psi
        .amplitudes()
        .iter()
        .zip(upstream)
        .map(|(a, &g)| a * g)
        .collect();

    for gate in params.gates().rev().filter(|g| g.control != Some(g.target)) {
        let (tmask, cmask) = gate.masks(n);
        let (mu, phi, lam_angle) = gate.angles(params);
        let u_dag = gates::adjoint(&gates::u3_matrix(mu, phi, lam_angle));

        gates::apply_mat2(psi.amplitudes_mut(), tmask, cmask, &u_dag);
        let overlaps = gates::pair_overlaps(&lam, psi.amplitudes(), tmask, cmask);
        for (k, d) in gates::u3_derivatives(mu, phi, lam_angle).iter().enumerate() {
            grad[gate.offset + k] = 2.0 * gates::contract(d, &overlaps).re;
        }
        gates::apply_mat2(&mut lam, tmask, cmask, &u_dag);
    }
    Ok(grad)
}

/// Convenience: run the circuit and return its basis probabilities.
pub fn circuit_probabilities(params: &CircuitParams) -> ProbabilityVector {
    run_circuit(params).probabilities()
}

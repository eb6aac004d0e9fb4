use num_complex::Complex64;

use super::gates::{self, Mat2};
use crate::error::{Error, Result};

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 24;

/// The 2ⁿ complex amplitudes of an n-qubit register. Basis index `i` encodes
/// |i⟩ with qubit 0 as the most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0…0⟩ on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n) {
            return Err(Error::Config(format!(
                "qubit count {n} outside 1..={MAX_QUBITS}"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// Wraps raw amplitudes. The length must be a power of two; no
    /// normalization is performed.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() || len > 1 << MAX_QUBITS {
            return Err(Error::Config(format!(
                "amplitude count {len} is not 2^n for 1 <= n <= {MAX_QUBITS}"
            )));
        }
        Ok(Self {
            n: len.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, what: &'static str, q: usize) -> Result<()> {
        if q < self.n {
            Ok(())
        } else {
            Err(Error::Index {
                what,
                index: q,
                limit: self.n,
            })
        }
    }

    pub fn apply_u3(&mut self, qubit: usize, mu: f64, phi: f64, lam: f64) -> Result<()> {
        self.check_qubit("qubit", qubit)?;
        self.apply_matrix(qubit, None, &gates::u3_matrix(mu, phi, lam));
        Ok(())
    }

    /// U3 on `target` conditioned on `control` being |1⟩.
    pub fn apply_cu3(
        &mut self,
        control: usize,
        target: usize,
        mu: f64,
        phi: f64,
        lam: f64,
    ) -> Result<()> {
        self.check_qubit("control", control)?;
        self.check_qubit("target", target)?;
        if control == target {
            return Err(Error::Config(format!(
                "control and target are both qubit {control}"
            )));
        }
        self.apply_matrix(target, Some(control), &gates::u3_matrix(mu, phi, lam));
        Ok(())
    }

    /// Unchecked kernel entry point; indices are validated by the callers.
    pub(crate) fn apply_matrix(&mut self, target: usize, control: Option<usize>, m: &Mat2) {
        let tmask = gates::qubit_mask(self.n, target);
        let cmask = control.map_or(0, |c| gates::qubit_mask(self.n, c));
        gates::apply_mat2(&mut self.amps, tmask, cmask, m);
    }

    pub fn probabilities(&self) -> ProbabilityVector {
        ProbabilityVector(self.amps.iter().map(|a| a.norm_sqr()).collect())
    }
}

/// Basis-measurement probabilities |⟨i|ψ⟩|².
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl std::ops::Index<usize> for ProbabilityVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

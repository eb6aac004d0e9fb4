//! Circuit-driven weight generation.
//!
//! The first `k` basis probabilities of an `n = ⌈log₂ k⌉` qubit ansatz are
//! each passed, together with the bit string of their basis index, through
//! a small mapping network `(n+1) → 10 → 10 → 1` with a linear output. The
//! `k` outputs are the weights of the target policy network. Gradients with
//! respect to those weights are routed back to both the mapping weights and
//! the circuit angles.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, check_len, Error, Result};
use crate::nn::{self, DenseNetSpec, FlatWeights, OutputHead};
use crate::quantum::{self, CircuitParams, MAX_QUBITS};

/// Hidden widths of the mapping network.
pub const MAPPING_HIDDEN: [usize; 2] = [10, 10];

/// How basis-index bits are fed to the mapping network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BitEncoding {
    /// 0.0 / 1.0
    #[default]
    ZeroOne,
    /// −1.0 / +1.0
    PlusMinusOne,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QtConfig {
    /// Number of generated weights.
    pub k: usize,
    /// Qubit count, `⌈log₂ k⌉`.
    pub n: usize,
    pub depth: usize,
    pub mapping_spec: DenseNetSpec,
    pub bit_encoding: BitEncoding,
}

/// Smallest `n` with `2ⁿ ≥ k`.
pub fn qubits_for(k: usize) -> usize {
    k.next_power_of_two().trailing_zeros() as usize
}

impl QtConfig {
    pub fn new(k: usize, depth: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::Config(format!(
                "generated parameter count must be at least 2, got {k}"
            )));
        }
        let n = qubits_for(k);
        if n > MAX_QUBITS {
            return Err(Error::Config(format!(
                "{k} parameters need {n} qubits (limit {MAX_QUBITS})"
            )));
        }
        if depth == 0 {
            return Err(Error::Config("circuit depth must be at least 1".into()));
        }
        let mut sizes = vec![n + 1];
        sizes.extend(MAPPING_HIDDEN);
        sizes.push(1);
        Ok(Self {
            k,
            n,
            depth,
            mapping_spec: DenseNetSpec::new(sizes, OutputHead::Linear)?,
            bit_encoding: BitEncoding::default(),
        })
    }

    pub fn for_policy(policy: &DenseNetSpec, depth: usize) -> Result<Self> {
        Self::new(policy.param_count(), depth)
    }

    /// Trainable parameters: circuit angles plus mapping weights.
    pub fn param_count(&self) -> usize {
        CircuitParams::angle_count(self.n, self.depth) + self.mapping_spec.param_count()
    }

    /// Mapping-network input for basis `i`: its bits (most significant
    /// first) followed by the probability.
    pub fn features(&self, i: usize, prob: f64) -> Vec<f64> {
        let mut x = encode_bits(i, self.n, self.bit_encoding);
        x.push(prob);
        x
    }
}

/// Free-function form of [`QtConfig::param_count`].
pub fn qt_param_count(cfg: &QtConfig) -> usize {
    cfg.param_count()
}

/// Binary expansion of `i` on `n` bits, most significant first, as 0.0/1.0.
pub fn bitstring_features(i: usize, n: usize) -> Result<Vec<f64>> {
    if n >= usize::BITS as usize || i >= 1 << n {
        return Err(Error::Index {
            what: "basis index",
            index: i,
            limit: 1usize.checked_shl(n as u32).unwrap_or(usize::MAX),
        });
    }
    Ok(encode_bits(i, n, BitEncoding::ZeroOne))
}

fn encode_bits(i: usize, n: usize, encoding: BitEncoding) -> Vec<f64> {
    let (off, on) = match encoding {
        BitEncoding::ZeroOne => (0.0, 1.0),
        BitEncoding::PlusMinusOne => (-1.0, 1.0),
    };
    (0..n)
        .map(|b| if (i >> (n - 1 - b)) & 1 == 1 { on } else { off })
        .collect()
}

/// The `k` generated policy weights.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedTheta {
    pub values: Vec<f64>,
    /// Target network, when the generator was built for one.
    pub policy_spec: Option<DenseNetSpec>,
}

impl GeneratedTheta {
    /// The weights as a [`FlatWeights`] for `spec`.
    pub fn to_weights(&self, spec: &DenseNetSpec) -> Result<FlatWeights> {
        FlatWeights::for_spec(spec, self.values.clone())
    }
}

fn check_inputs(circuit: &CircuitParams, mapping: &FlatWeights, cfg: &QtConfig) -> Result<()> {
    check_len("circuit qubits", cfg.n, circuit.num_qubits())?;
    check_len(
        "mapping weights",
        cfg.mapping_spec.param_count(),
        mapping.len(),
    )
}

pub fn generate_theta(
    circuit: &CircuitParams,
    mapping: &FlatWeights,
    cfg: &QtConfig,
) -> Result<GeneratedTheta> {
    check_inputs(circuit, mapping, cfg)?;
    let probs = quantum::circuit_probabilities(circuit);
    let values = probs.values()[..cfg.k]
        .iter()
        .enumerate()
        .map(|(i, &p)| nn::forward(&cfg.mapping_spec, mapping, &cfg.features(i, p)).map(|o| o[0]))
        .collect::<Result<Vec<_>>>()?;
    Ok(GeneratedTheta {
        values,
        policy_spec: None,
    })
}

/// Gradients of a loss with respect to the generator's trainable parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct QtGradients {
    /// Laid out like [`CircuitParams::angles`].
    pub circuit: Vec<f64>,
    pub mapping: Vec<f64>,
}

/// Chain rule from `∂L/∂θ` to `(∂L/∂φ, ∂L/∂β)`.
pub fn qt_backward(
    circuit: &CircuitParams,
    mapping: &FlatWeights,
    cfg: &QtConfig,
    grad_theta: &[f64],
) -> Result<QtGradients> {
    check_inputs(circuit, mapping, cfg)?;
    check_len("theta gradient", cfg.k, grad_theta.len())?;
    check_finite("theta gradient", grad_theta)?;

    let probs = quantum::circuit_probabilities(circuit);
    let mut grad_mapping = vec![0.0; mapping.len()];
    let mut grad_probs = vec![0.0; probs.values().len()];
    for (i, &g) in grad_theta.iter().enumerate() {
        if g == 0.0 {
            continue;
        }
        let trace = nn::forward_trace(&cfg.mapping_spec, mapping, &cfg.features(i, probs[i]))?;
        let grad_input =
            nn::accumulate_backward(&cfg.mapping_spec, mapping, &trace, &[g], &mut grad_mapping)?;
        grad_probs[i] = grad_input[cfg.n];
    }
    let grad_circuit = quantum::backprop_probabilities(circuit, &grad_probs)?;
    Ok(QtGradients {
        circuit: grad_circuit,
        mapping: grad_mapping,
    })
}

/// Trainable state of a generator: circuit angles φ and mapping weights β.
#[derive(Debug, Clone, PartialEq)]
pub struct QtGenerator {
    pub config: QtConfig,
    pub circuit: CircuitParams,
    pub mapping: FlatWeights,
    pub policy_spec: Option<DenseNetSpec>,
}

impl QtGenerator {
    /// φ uniform in [0, 2π), β by the dense-net default init; φ is drawn first.
    pub fn init<R: Rng + ?Sized>(config: QtConfig, rng: &mut R) -> Result<Self> {
        let circuit = CircuitParams::random(config.n, config.depth, rng)?;
        let mapping = config.mapping_spec.init_weights(rng);
        Ok(Self {
            config,
            circuit,
            mapping,
            policy_spec: None,
        })
    }

    pub fn for_policy<R: Rng + ?Sized>(
        policy: &DenseNetSpec,
        depth: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let mut generator = Self::init(QtConfig::for_policy(policy, depth)?, rng)?;
        generator.policy_spec = Some(policy.clone());
        Ok(generator)
    }

    pub fn generate(&self) -> Result<GeneratedTheta> {
        let mut theta = generate_theta(&self.circuit, &self.mapping, &self.config)?;
        theta.policy_spec = self.policy_spec.clone();
        Ok(theta)
    }

    pub fn backward(&self, grad_theta: &[f64]) -> Result<QtGradients> {
        qt_backward(&self.circuit, &self.mapping, &self.config, grad_theta)
    }
}

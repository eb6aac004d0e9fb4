//! Dense networks with hand-written forward/backward passes, plus Adam.
//!
//! Weights live in one flat vector. Layers are stored in order; each layer
//! is its `out × in` weight matrix in row-major order followed by its `out`
//! biases.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, check_len, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputHead {
    Linear,
    Softmax,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenseNetSpec {
    pub layer_sizes: Vec<usize>,
    pub hidden_activation: Activation,
    pub output_head: OutputHead,
}

impl DenseNetSpec {
    pub fn new(layer_sizes: Vec<usize>, output_head: OutputHead) -> Result<Self> {
        let spec = Self {
            layer_sizes,
            hidden_activation: Activation::Relu,
            output_head,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.layer_sizes.len() < 2 {
            return Err(Error::Config(format!(
                "a dense net needs at least 2 layer sizes, got {:?}",
                self.layer_sizes
            )));
        }
        if self.layer_sizes.contains(&0) {
            return Err(Error::Config(format!(
                "layer sizes must be positive: {:?}",
                self.layer_sizes
            )));
        }
        Ok(())
    }

    pub fn input_size(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_size(&self) -> usize {
        *self.layer_sizes.last().expect("validated spec")
    }

    pub fn num_layers(&self) -> usize {
        self.layer_sizes.len() - 1
    }

    /// Σ (in·out + out) over consecutive layer pairs.
    pub fn param_count(&self) -> usize {
        self.layer_sizes
            .windows(2)
            .map(|w| w[0] * w[1] + w[1])
            .sum()
    }

    /// `(weight_offset, bias_offset, in, out)` for each layer.
    fn layers(&self) -> impl Iterator<Item = (usize, usize, usize, usize)> + '_ {
        let mut offset = 0;
        self.layer_sizes.windows(2).map(move |w| {
            let (fan_in, fan_out) = (w[0], w[1]);
            let weights = offset;
            let bias = weights + fan_in * fan_out;
            offset = bias + fan_out;
            (weights, bias, fan_in, fan_out)
        })
    }

    /// Uniform `[-1/√fan_in, 1/√fan_in]` init for every weight and bias.
    pub fn init_weights<R: Rng + ?Sized>(&self, rng: &mut R) -> FlatWeights {
        let mut values = Vec::with_capacity(self.param_count());
        for (_, _, fan_in, fan_out) in self.layers() {
            let bound = 1.0 / (fan_in as f64).sqrt();
            for _ in 0..fan_in * fan_out + fan_out {
                values.push(rng.gen_range(-bound..=bound));
            }
        }
        FlatWeights(values)
    }
}

/// Flat parameter vector for a [`DenseNetSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FlatWeights(pub Vec<f64>);

impl FlatWeights {
    pub fn zeros(spec: &DenseNetSpec) -> Self {
        Self(vec![0.0; spec.param_count()])
    }

    pub fn for_spec(spec: &DenseNetSpec, values: Vec<f64>) -> Result<Self> {
        check_len("flat weights", spec.param_count(), values.len())?;
        check_finite("flat weights", &values)?;
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Intermediate values of one forward pass, kept for the backward pass.
#[derive(Debug, Clone)]
pub struct Trace {
    /// Input to each layer; `inputs[0]` is the network input.
    inputs: Vec<Vec<f64>>,
    /// Pre-activation of the last layer (logits for a softmax head).
    logits: Vec<f64>,
    output: Vec<f64>,
}

impl Trace {
    pub fn output(&self) -> &[f64] {
        &self.output
    }

    pub fn logits(&self) -> &[f64] {
        &self.logits
    }

    pub fn into_output(self) -> Vec<f64> {
        self.output
    }
}

fn check_weights(spec: &DenseNetSpec, weights: &FlatWeights) -> Result<()> {
    check_len("flat weights", spec.param_count(), weights.len())
}

pub fn forward_trace(spec: &DenseNetSpec, weights: &FlatWeights, input: &[f64]) -> Result<Trace> {
    check_weights(spec, weights)?;
    check_len("network input", spec.input_size(), input.len())?;
    let w = weights.as_slice();
    let last = spec.num_layers() - 1;
    let mut inputs = Vec::with_capacity(spec.num_layers());
    let mut current = input.to_vec();
    let mut logits = Vec::new();
    for (l, (wo, bo, fan_in, fan_out)) in spec.layers().enumerate() {
        let mut z = w[bo..bo + fan_out].to_vec();
        for (o, zo) in z.iter_mut().enumerate() {
            let row = &w[wo + o * fan_in..wo + (o + 1) * fan_in];
            *zo += row.iter().zip(&current).map(|(a, b)| a * b).sum::<f64>();
        }
        inputs.push(current);
        if l == last {
            logits = z;
            break;
        }
        match spec.hidden_activation {
            Activation::Relu => z.iter_mut().for_each(|v| *v = v.max(0.0)),
        }
        current = z;
    }
    let output = match spec.output_head {
        OutputHead::Linear => logits.clone(),
        OutputHead::Softmax => softmax(&logits),
    };
    Ok(Trace {
        inputs,
        logits,
        output,
    })
}

pub fn forward(spec: &DenseNetSpec, weights: &FlatWeights, input: &[f64]) -> Result<Vec<f64>> {
    forward_trace(spec, weights, input).map(Trace::into_output)
}

/// Gradients from a backward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<f64>,
    pub input: Vec<f64>,
}

/// Backward pass given `∂L/∂output` (the head's output, i.e. probabilities
/// for a softmax head).
pub fn backward(
    spec: &DenseNetSpec,
    weights: &FlatWeights,
    input: &[f64],
    upstream: &[f64],
) -> Result<Gradients> {
    let trace = forward_trace(spec, weights, input)?;
    check_len("output gradient", spec.output_size(), upstream.len())?;
    let grad_logits = match spec.output_head {
        OutputHead::Linear => upstream.to_vec(),
        OutputHead::Softmax => {
            // ∂L/∂z = p ⊙ (g − ⟨g, p⟩)
            let p = trace.output();
            let dot: f64 = p.iter().zip(upstream).map(|(a, b)| a * b).sum();
            p.iter()
                .zip(upstream)
                .map(|(pi, gi)| pi * (gi - dot))
                .collect()
        }
    };
    backward_from_logits(spec, weights, &trace, &grad_logits)
}

/// Backward pass given `∂L/∂logits` directly, skipping the output head. Used
/// for the fused softmax + log-likelihood gradient `(p − onehot)·w`.
pub fn backward_from_logits(
    spec: &DenseNetSpec,
    weights: &FlatWeights,
    trace: &Trace,
    grad_logits: &[f64],
) -> Result<Gradients> {
    let mut grad_w = vec![0.0; spec.param_count()];
    accumulate_backward(spec, weights, trace, grad_logits, &mut grad_w).map(|input| Gradients {
        weights: grad_w,
        input,
    })
}

/// Like [`backward_from_logits`] but adds the weight gradient into `grad_w`
/// and returns the input gradient.
pub fn accumulate_backward(
    spec: &DenseNetSpec,
    weights: &FlatWeights,
    trace: &Trace,
    grad_logits: &[f64],
    grad_w: &mut [f64],
) -> Result<Vec<f64>> {
    check_weights(spec, weights)?;
    check_len("logit gradient", spec.output_size(), grad_logits.len())?;
    check_len("weight gradient", spec.param_count(), grad_w.len())?;
    let w = weights.as_slice();
    let layers: Vec<_> = spec.layers().collect();
    let mut delta = grad_logits.to_vec();
    for (l, &(wo, bo, fan_in, fan_out)) in layers.iter().enumerate().rev() {
        let x = &trace.inputs[l];
        for o in 0..fan_out {
            let d = delta[o];
            grad_w[bo + o] += d;
            if d != 0.0 {
                let row = &mut grad_w[wo + o * fan_in..wo + (o + 1) * fan_in];
                row.iter_mut().zip(x).for_each(|(g, xi)| *g += d * xi);
            }
        }
        let mut prev = vec![0.0; fan_in];
        for (o, &d) in delta.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            let row = &w[wo + o * fan_in..wo + (o + 1) * fan_in];
            prev.iter_mut().zip(row).for_each(|(p, wi)| *p += d * wi);
        }
        if l > 0 {
            // x is the ReLU output of the previous layer; x > 0 ⇔ z > 0.
            match spec.hidden_activation {
                Activation::Relu => prev.iter_mut().zip(x).for_each(|(p, &xi)| {
                    if xi <= 0.0 {
                        *p = 0.0;
                    }
                }),
            }
        }
        delta = prev;
    }
    Ok(delta)
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// `log softmax(logits)[k]` via log-sum-exp.
pub fn log_softmax_at(logits: &[f64], k: usize) -> f64 {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + logits.iter().map(|z| (z - max).exp()).sum::<f64>().ln();
    logits[k] - lse
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Adam moments for one parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam {
    pub config: AdamConfig,
    m: Vec<f64>,
    v: Vec<f64>,
    step: u64,
}

impl Adam {
    pub fn new(config: AdamConfig, len: usize) -> Self {
        Self {
            config,
            m: vec![0.0; len],
            v: vec![0.0; len],
            step: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn first_moment(&self) -> &[f64] {
        &self.m
    }

    pub fn second_moment(&self) -> &[f64] {
        &self.v
    }

    /// One bias-corrected descent step: `params -= lr · m̂ / (√v̂ + ε)`.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) -> Result<()> {
        check_len("adam parameters", self.m.len(), params.len())?;
        check_len("adam gradients", self.m.len(), grads.len())?;
        check_finite("gradient", grads)?;
        let AdamConfig {
            lr,
            beta1,
            beta2,
            eps,
        } = self.config;
        self.step += 1;
        let t = self.step as i32;
        let c1 = 1.0 - beta1.powi(t);
        let c2 = 1.0 - beta2.powi(t);
        for (((p, &g), m), v) in params
            .iter_mut()
            .zip(grads)
            .zip(&mut self.m)
            .zip(&mut self.v)
        {
            *m = beta1 * *m + (1.0 - beta1) * g;
            *v = beta2 * *v + (1.0 - beta2) * g * g;
            *p -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
        }
        Ok(())
    }
}

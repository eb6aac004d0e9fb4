//! Classical inference: a dense softmax policy and greedy evaluation.
//!
//! Nothing here depends on the quantum simulator, so a trained policy can be
//! loaded and run with the `quantum` feature disabled.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::env::EnvKind;
use crate::error::{Error, Result};
use crate::nn::{self, DenseNetSpec, FlatWeights, OutputHead};

#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    spec: DenseNetSpec,
    weights: FlatWeights,
}

impl Policy {
    pub fn new(spec: DenseNetSpec, weights: FlatWeights) -> Result<Self> {
        spec.validate()?;
        if spec.output_head != OutputHead::Softmax {
            return Err(Error::Config("policy networks need a softmax head".into()));
        }
        let weights = FlatWeights::for_spec(&spec, weights.0)?;
        Ok(Self { spec, weights })
    }

    pub fn spec(&self) -> &DenseNetSpec {
        &self.spec
    }

    pub fn weights(&self) -> &FlatWeights {
        &self.weights
    }

    /// π(·|s)
    pub fn action_probabilities(&self, observation: &[f64]) -> Result<Vec<f64>> {
        nn::forward(&self.spec, &self.weights, observation)
    }

    /// Argmax action, ties going to the lowest index.
    pub fn greedy_action(&self, observation: &[f64]) -> Result<usize> {
        let probs = self.action_probabilities(observation)?;
        Ok(argmax(&probs))
    }

    pub fn sample_action<R: Rng + ?Sized>(
        &self,
        observation: &[f64],
        rng: &mut R,
    ) -> Result<usize> {
        let probs = self.action_probabilities(observation)?;
        Ok(sample_categorical(&probs, rng))
    }
}

pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Inverse-CDF draw with one uniform variate.
pub fn sample_categorical<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // Rounding left the CDF short of 1; fall back to the last non-zero entry.
    probs
        .iter()
        .rposition(|&p| p > 0.0)
        .unwrap_or(probs.len() - 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub totals: Vec<f64>,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl EvalSummary {
    fn from_totals(totals: Vec<f64>) -> Self {
        let mean = totals.iter().sum::<f64>() / totals.len() as f64;
        let min = totals.iter().copied().fold(f64::INFINITY, f64::min);
        let max = totals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self {
            totals,
            mean,
            min,
            max,
        }
    }
}

/// Runs `episodes` greedy episodes on a fresh environment seeded with `seed`.
pub fn evaluate(policy: &Policy, env: EnvKind, episodes: usize, seed: u64) -> Result<EvalSummary> {
    if episodes == 0 {
        return Err(Error::Usage("evaluation needs at least one episode".into()));
    }
    if policy.spec().input_size() != env.observation_size()
        || policy.spec().output_size() != env.num_actions()
    {
        return Err(Error::Config(format!(
            "policy {:?} does not fit {env} ({} inputs, {} actions)",
            policy.spec().layer_sizes,
            env.observation_size(),
            env.num_actions()
        )));
    }
    let mut environment = env.make(seed);
    let mut totals = Vec::with_capacity(episodes);
    for _ in 0..episodes {
        let mut obs = environment.reset();
        let mut total = 0.0;
        loop {
            let step = environment.step(policy.greedy_action(&obs)?)?;
            total += step.reward;
            if step.done {
                break;
            }
            obs = step.observation;
        }
        totals.push(total);
    }
    Ok(EvalSummary::from_totals(totals))
}

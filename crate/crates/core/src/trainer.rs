//! REINFORCE with per-episode return normalization, in two modes: optimize
//! the policy weights directly (classical) or optimize the circuit angles
//! and mapping weights that generate them (qtrl).

use std::ops::ControlFlow;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::env::EnvKind;
use crate::error::{check_len, Error, Result};
#[cfg(feature = "quantum")]
use crate::generator::{BitEncoding, QtConfig, QtGenerator};
use crate::nn::{self, Adam, AdamConfig, DenseNetSpec, FlatWeights};
use crate::policy::{sample_categorical, Policy};

pub const DEFAULT_GAMMA: f64 = 0.99;
pub const DEFAULT_LR: f64 = 1e-3;
pub const DEFAULT_NORM_EPS: f64 = 1e-8;

/// RNG stream ids derived from the run seed.
const STREAM_INIT: u64 = 0;
const STREAM_ACTIONS: u64 = 1;

/// `R_t = Σ_{u≥t} γ^{u−t} r_u`, by backward recursion.
pub fn compute_returns(rewards: &[f64], gamma: f64) -> Vec<f64> {
    let mut returns = vec![0.0; rewards.len()];
    let mut acc = 0.0;
    for (r, out) in rewards.iter().zip(returns.iter_mut()).rev() {
        acc = r + gamma * acc;
        *out = acc;
    }
    returns
}

/// `(R_t − μ) / (σ + ε)` with the population standard deviation.
pub fn normalize_returns(returns: &[f64], eps: f64) -> Vec<f64> {
    if returns.is_empty() {
        return Vec::new();
    }
    let len = returns.len() as f64;
    let mean = returns.iter().sum::<f64>() / len;
    let var = returns.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / len;
    let denom = var.sqrt() + eps;
    returns.iter().map(|r| (r - mean) / denom).collect()
}

/// One finished episode.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub observations: Vec<Vec<f64>>,
    pub actions: Vec<usize>,
    pub rewards: Vec<f64>,
    pub returns: Vec<f64>,
    pub normalized_returns: Vec<f64>,
}

impl Trajectory {
    pub fn push(&mut self, observation: Vec<f64>, action: usize, reward: f64) {
        self.observations.push(observation);
        self.actions.push(action);
        self.rewards.push(reward);
    }

    /// Fills `returns` and `normalized_returns` from `rewards`.
    pub fn finish(&mut self, gamma: f64, eps: f64) {
        self.returns = compute_returns(&self.rewards, gamma);
        self.normalized_returns = normalize_returns(&self.returns, eps);
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn total_reward(&self) -> f64 {
        self.rewards.iter().sum()
    }
}

/// `L = −Σ_t log π(a_t|s_t; θ) · R′_t` and `∂L/∂θ`, summed over steps.
pub fn episode_loss_and_grad_theta(
    policy_spec: &DenseNetSpec,
    theta: &FlatWeights,
    trajectory: &Trajectory,
) -> Result<(f64, Vec<f64>)> {
    let steps = trajectory.len();
    check_len(
        "trajectory observations",
        steps,
        trajectory.observations.len(),
    )?;
    check_len(
        "normalized returns",
        steps,
        trajectory.normalized_returns.len(),
    )?;
    let mut loss = 0.0;
    let mut grad = vec![0.0; policy_spec.param_count()];
    for ((obs, &action), &weight) in trajectory
        .observations
        .iter()
        .zip(&trajectory.actions)
        .zip(&trajectory.normalized_returns)
    {
        if weight == 0.0 {
            continue;
        }
        let trace = nn::forward_trace(policy_spec, theta, obs)?;
        let logits = trace.logits();
        if action >= logits.len() {
            return Err(Error::Index {
                what: "action",
                index: action,
                limit: logits.len(),
            });
        }
        let log_prob = nn::log_softmax_at(logits, action);
        if !log_prob.is_finite() {
            return Err(Error::Numerical(format!("log π(a={action}) is {log_prob}")));
        }
        loss -= log_prob * weight;
        // ∂(−w·log p_a)/∂z = w·(p − onehot(a))
        let grad_logits: Vec<f64> = trace
            .output()
            .iter()
            .enumerate()
            .map(|(k, &p)| weight * (p - if k == action { 1.0 } else { 0.0 }))
            .collect();
        nn::accumulate_backward(policy_spec, theta, &trace, &grad_logits, &mut grad)?;
    }
    Ok((loss, grad))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Classical,
    Qtrl,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(Mode::Classical),
            "qtrl" => Ok(Mode::Qtrl),
            other => Err(Error::Usage(format!("unknown mode '{other}'"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Classical => "classical",
            Mode::Qtrl => "qtrl",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub env: EnvKind,
    pub mode: Mode,
    /// Circuit blocks; ignored in classical mode.
    pub depth: usize,
    pub episodes: usize,
    pub gamma: f64,
    pub lr: f64,
    pub seed: u64,
    pub norm_eps: f64,
    /// Overrides the environment's default policy network.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy_spec: Option<DenseNetSpec>,
    /// Store wall-clock time in each record. Off by default so that logs are
    /// reproducible byte for byte.
    #[serde(default)]
    pub record_wall_clock: bool,
    /// Bit features fed to the mapping network (qtrl only).
    #[cfg(feature = "quantum")]
    #[serde(default)]
    pub bit_encoding: BitEncoding,
}

impl TrainConfig {
    pub fn new(env: EnvKind, mode: Mode) -> Self {
        Self {
            env,
            mode,
            depth: 1,
            episodes: match env {
                EnvKind::Cartpole => 2000,
                EnvKind::Minigrid => 4000,
            },
            gamma: DEFAULT_GAMMA,
            lr: DEFAULT_LR,
            seed: 0,
            norm_eps: DEFAULT_NORM_EPS,
            policy_spec: None,
            record_wall_clock: false,
            #[cfg(feature = "quantum")]
            bit_encoding: BitEncoding::default(),
        }
    }

    pub fn policy_spec(&self) -> DenseNetSpec {
        self.policy_spec
            .clone()
            .unwrap_or_else(|| self.env.default_policy())
    }

    pub fn validate(&self) -> Result<()> {
        if self.episodes == 0 {
            return Err(Error::Usage("episodes must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::Usage(format!("gamma {} outside [0, 1]", self.gamma)));
        }
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return Err(Error::Usage(format!(
                "learning rate {} must be positive",
                self.lr
            )));
        }
        if !(self.norm_eps.is_finite() && self.norm_eps >= 0.0) {
            return Err(Error::Usage(format!(
                "normalization epsilon {} invalid",
                self.norm_eps
            )));
        }
        if self.mode == Mode::Qtrl && self.depth == 0 {
            return Err(Error::Usage("qtrl needs depth >= 1".into()));
        }
        let spec = self.policy_spec();
        spec.validate()?;
        if spec.input_size() != self.env.observation_size()
            || spec.output_size() != self.env.num_actions()
        {
            return Err(Error::Usage(format!(
                "policy {:?} does not fit {} ({} inputs, {} actions)",
                spec.layer_sizes,
                self.env,
                self.env.observation_size(),
                self.env.num_actions()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode: usize,
    pub total_reward: f64,
    pub loss: f64,
    /// Σ‖θ_e − θ_{e−1}‖² over episodes so far.
    pub delta_theta_sq_cum: f64,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainLog {
    pub records: Vec<EpisodeRecord>,
}

impl TrainLog {
    /// Mean total reward over the last `n` episodes (fewer if the log is shorter).
    pub fn last_average(&self, n: usize) -> f64 {
        let tail = &self.records[self.records.len().saturating_sub(n)..];
        if tail.is_empty() {
            return 0.0;
        }
        tail.iter().map(|r| r.total_reward).sum::<f64>() / tail.len() as f64
    }

    pub fn last_10_average(&self) -> f64 {
        self.last_average(10)
    }

    pub fn last_100_average(&self) -> f64 {
        self.last_average(100)
    }

    /// Best last-`window` average reached at any point of training.
    pub fn best_running_average(&self, window: usize) -> f64 {
        if self.records.len() < window || window == 0 {
            return self.last_average(window);
        }
        let mut sum: f64 = self.records[..window].iter().map(|r| r.total_reward).sum();
        let mut best = sum;
        for i in window..self.records.len() {
            sum += self.records[i].total_reward - self.records[i - window].total_reward;
            best = best.max(sum);
        }
        best / window as f64
    }
}

/// What a run produced.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub log: TrainLog,
    /// Policy weights after the last update.
    pub policy: Policy,
    #[cfg(feature = "quantum")]
    pub generator: Option<QtGenerator>,
}

#[allow(clippy::large_enum_variant)]
enum Learner {
    Classical {
        theta: FlatWeights,
        adam: Adam,
    },
    #[cfg(feature = "quantum")]
    Qtrl {
        generator: QtGenerator,
        adam_circuit: Adam,
        adam_mapping: Adam,
    },
}

impl Learner {
    fn new(cfg: &TrainConfig, spec: &DenseNetSpec) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(STREAM_INIT);
        let adam = AdamConfig {
            lr: cfg.lr,
            ..AdamConfig::default()
        };
        match cfg.mode {
            Mode::Classical => {
                let theta = spec.init_weights(&mut rng);
                Ok(Learner::Classical {
                    adam: Adam::new(adam, theta.len()),
                    theta,
                })
            }
            #[cfg(feature = "quantum")]
            Mode::Qtrl => {
                let mut qt = QtConfig::for_policy(spec, cfg.depth)?;
                qt.bit_encoding = cfg.bit_encoding;
                let mut generator = QtGenerator::init(qt, &mut rng)?;
                generator.policy_spec = Some(spec.clone());
                Ok(Learner::Qtrl {
                    adam_circuit: Adam::new(adam, generator.circuit.angles().len()),
                    adam_mapping: Adam::new(adam, generator.mapping.len()),
                    generator,
                })
            }
            #[cfg(not(feature = "quantum"))]
            Mode::Qtrl => Err(Error::Config(
                "qtrl mode needs the `quantum` feature".into(),
            )),
        }
    }

    #[cfg_attr(not(feature = "quantum"), allow(unused_variables))]
    fn theta(&self, spec: &DenseNetSpec) -> Result<FlatWeights> {
        match self {
            Learner::Classical { theta, .. } => Ok(theta.clone()),
            #[cfg(feature = "quantum")]
            Learner::Qtrl { generator, .. } => generator.generate()?.to_weights(spec),
        }
    }

    fn update(&mut self, grad_theta: &[f64]) -> Result<()> {
        match self {
            Learner::Classical { theta, adam } => adam.step(theta.as_mut_slice(), grad_theta),
            #[cfg(feature = "quantum")]
            Learner::Qtrl {
                generator,
                adam_circuit,
                adam_mapping,
            } => {
                let grads = generator.backward(grad_theta)?;
                adam_circuit.step(generator.circuit.angles_mut(), &grads.circuit)?;
                adam_mapping.step(generator.mapping.as_mut_slice(), &grads.mapping)
            }
        }
    }
}

/// Samples one episode from the policy.
pub fn rollout(
    policy_spec: &DenseNetSpec,
    theta: &FlatWeights,
    env: &mut dyn crate::env::Environment,
    rng: &mut ChaCha8Rng,
) -> Result<Trajectory> {
    let mut trajectory = Trajectory::default();
    let mut obs = env.reset();
    loop {
        let probs = nn::forward(policy_spec, theta, &obs)?;
        let action = sample_categorical(&probs, rng);
        let step = env.step(action)?;
        trajectory.push(obs, action, step.reward);
        if step.done {
            return Ok(trajectory);
        }
        obs = step.observation;
    }
}

pub fn train(cfg: &TrainConfig) -> Result<TrainOutcome> {
    train_with_observer(cfg, |_| ControlFlow::Continue(()))
}

/// Runs training, handing every finished episode's record to `observer`.
/// Returning `Break` ends training after that episode's update.
pub fn train_with_observer(
    cfg: &TrainConfig,
    mut observer: impl FnMut(&EpisodeRecord) -> ControlFlow<()>,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    let spec = cfg.policy_spec();
    let mut learner = Learner::new(cfg, &spec)?;
    let mut env = cfg.env.make(cfg.seed);
    let mut action_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    action_rng.set_stream(STREAM_ACTIONS);

    let started = Instant::now();
    let mut log = TrainLog::default();
    let mut previous: Option<FlatWeights> = None;
    let mut delta_cum = 0.0;

    for episode in 0..cfg.episodes {
        let abort = |source: Error| Error::Aborted {
            episode,
            source: Box::new(source),
        };
        let theta = learner.theta(&spec).map_err(abort)?;
        if let Some(prev) = &previous {
            delta_cum += squared_distance(prev.as_slice(), theta.as_slice());
        }

        let mut trajectory =
            rollout(&spec, &theta, env.as_mut(), &mut action_rng).map_err(abort)?;
        trajectory.finish(cfg.gamma, cfg.norm_eps);
        let (loss, grad) =
            episode_loss_and_grad_theta(&spec, &theta, &trajectory).map_err(abort)?;
        learner.update(&grad).map_err(abort)?;

        let record = EpisodeRecord {
            episode,
            total_reward: trajectory.total_reward(),
            loss,
            delta_theta_sq_cum: delta_cum,
            elapsed_ms: if cfg.record_wall_clock {
                started.elapsed().as_millis() as u64
            } else {
                0
            },
        };
        let flow = observer(&record);
        log.records.push(record);
        previous = Some(theta);
        if flow.is_break() {
            break;
        }
    }

    let abort = |source: Error| Error::Aborted {
        episode: log.records.len(),
        source: Box::new(source),
    };
    let policy = Policy::new(spec.clone(), learner.theta(&spec).map_err(abort)?)?;
    Ok(TrainOutcome {
        log,
        policy,
        #[cfg(feature = "quantum")]
        generator: match learner {
            Learner::Qtrl { generator, .. } => Some(generator),
            Learner::Classical { .. } => None,
        },
    })
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

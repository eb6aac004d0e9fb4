mod common;

use common::*;
use proptest::prelude::*;
use qtrl_core::generator::QtGenerator;
use qtrl_core::nn::{DenseNetSpec, FlatWeights, OutputHead};
use qtrl_core::trainer::{
    compute_returns, episode_loss_and_grad_theta, normalize_returns, Trajectory,
};
use qtrl_core::{evaluate, train, EnvKind, Mode, Policy, TrainConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn synthetic_trajectory(spec: &DenseNetSpec, steps: usize, seed: u64) -> Trajectory {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Trajectory::default();
    for _ in 0..steps {
        let obs = (0..spec.input_size())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        let action = rng.gen_range(0..spec.output_size());
        t.push(obs, action, rng.gen_range(0.0..2.0));
    }
    t.finish(0.99, 1e-8);
    t
}

/// −Σ log π(a_t|s_t) R′_t from the straight-line network.
fn oracle_loss(spec: &DenseNetSpec, theta: &[f64], t: &Trajectory) -> f64 {
    (0..t.len())
        .map(|i| {
            let p = softmax(&mlp_linear(&spec.layer_sizes, theta, &t.observations[i]));
            -p[t.actions[i]].ln() * t.normalized_returns[i]
        })
        .sum()
}

#[test]
fn policy_loss_gradient_matches_finite_differences() {
    let spec = DenseNetSpec::new(vec![4, 5, 2], OutputHead::Softmax).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let theta = spec.init_weights(&mut rng);
    let traj = synthetic_trajectory(&spec, 3, 11);
    let (loss, grad) = episode_loss_and_grad_theta(&spec, &theta, &traj).unwrap();
    assert!((loss - oracle_loss(&spec, theta.as_slice(), &traj)).abs() < 1e-12);
    let fd = central_diff(|w| oracle_loss(&spec, w, &traj), theta.as_slice(), 1e-5);
    assert_gradients_match(&grad, &fd, "∂L/∂θ");
}

#[test]
fn qtrl_gradient_plumbing() {
    // 4-2-2 policy: k = 16 weights on 4 qubits.
    let spec = DenseNetSpec::new(vec![4, 2, 2], OutputHead::Softmax).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let gen = QtGenerator::for_policy(&spec, 2, &mut rng).unwrap();
    assert_eq!((gen.config.k, gen.config.n), (16, 4));
    let traj = synthetic_trajectory(&spec, 4, 5);

    let theta = gen.generate().unwrap().to_weights(&spec).unwrap();
    let (_, grad_theta) = episode_loss_and_grad_theta(&spec, &theta, &traj).unwrap();
    let grads = gen.backward(&grad_theta).unwrap();

    let loss_of = |angles: &[f64], mapping: &[f64]| {
        let state = dense_circuit_state(4, &nest_angles(4, 2, angles));
        let theta: Vec<f64> = (0..16)
            .map(|i| {
                let mut x: Vec<f64> = (0..4).map(|b| ((i >> (3 - b)) & 1) as f64).collect();
                x.push(state[i].norm_sqr());
                mlp_linear(&[5, 10, 10, 1], mapping, &x)[0]
            })
            .collect();
        oracle_loss(&spec, &theta, &traj)
    };
    let angles = gen.circuit.angles().to_vec();
    let mapping = gen.mapping.as_slice().to_vec();
    let fd_phi = central_diff(|a| loss_of(a, &mapping), &angles, 1e-5);
    let fd_beta = central_diff(|m| loss_of(&angles, m), &mapping, 1e-5);
    assert_gradients_match(&grads.circuit, &fd_phi, "∂L/∂φ");
    assert_gradients_match(&grads.mapping, &fd_beta, "∂L/∂β");
}

#[test]
fn both_modes_score_the_same_theta_identically() {
    let spec = EnvKind::Cartpole.default_policy();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let gen = QtGenerator::for_policy(&spec, 1, &mut rng).unwrap();
    let generated = gen.generate().unwrap().to_weights(&spec).unwrap();
    let direct = FlatWeights::for_spec(&spec, generated.as_slice().to_vec()).unwrap();
    let traj = synthetic_trajectory(&spec, 6, 1);
    let a = episode_loss_and_grad_theta(&spec, &generated, &traj).unwrap();
    let b = episode_loss_and_grad_theta(&spec, &direct, &traj).unwrap();
    assert_eq!(a, b);
}

fn short_config(env: EnvKind, mode: Mode, episodes: usize, seed: u64) -> TrainConfig {
    let mut cfg = TrainConfig::new(env, mode);
    cfg.episodes = episodes;
    cfg.seed = seed;
    cfg.depth = 2;
    cfg
}

#[test]
fn training_is_seed_deterministic() {
    for mode in [Mode::Classical, Mode::Qtrl] {
        let cfg = short_config(EnvKind::Cartpole, mode, 30, 9);
        let a = train(&cfg).unwrap();
        let b = train(&cfg).unwrap();
        assert_eq!(a.log, b.log, "{mode}");
        assert_eq!(a.policy, b.policy);
        let other = train(&short_config(EnvKind::Cartpole, mode, 30, 10)).unwrap();
        assert_ne!(a.log, other.log);
    }
}

#[test]
fn delta_theta_diagnostic_is_monotone() {
    for mode in [Mode::Classical, Mode::Qtrl] {
        let out = train(&short_config(EnvKind::Cartpole, mode, 40, 2)).unwrap();
        let cum: Vec<f64> = out
            .log
            .records
            .iter()
            .map(|r| r.delta_theta_sq_cum)
            .collect();
        assert_eq!(cum[0], 0.0);
        assert!(cum.windows(2).all(|w| w[1] >= w[0]));
        assert!(*cum.last().unwrap() > 0.0);
        assert_eq!(out.log.records.len(), 40);
    }
}

#[test]
fn qtrl_outcome_carries_generator_for_final_policy() {
    let out = train(&short_config(EnvKind::Minigrid, Mode::Qtrl, 3, 1)).unwrap();
    let gen = out.generator.expect("qtrl run keeps its generator");
    assert_eq!(gen.config.n, 13);
    assert_eq!(
        gen.generate().unwrap().values,
        out.policy.weights().as_slice()
    );
}

#[test]
fn converged_classical_policy_evaluates_within_training_regime() {
    let mut cfg = TrainConfig::new(EnvKind::Cartpole, Mode::Classical);
    cfg.seed = 0;
    let out = train(&cfg).unwrap();
    let tail = out.log.last_100_average();
    let eval = evaluate(&out.policy, EnvKind::Cartpole, 20, 123).unwrap();
    assert!(
        eval.mean >= 0.8 * tail,
        "greedy {} vs training tail {tail}",
        eval.mean
    );
    assert_eq!(
        eval,
        evaluate(&out.policy, EnvKind::Cartpole, 20, 123).unwrap()
    );
}

#[test]
fn untrained_zero_policy_is_poor() {
    let spec = EnvKind::Cartpole.default_policy();
    let policy = Policy::new(spec.clone(), FlatWeights::zeros(&spec)).unwrap();
    assert!(evaluate(&policy, EnvKind::Cartpole, 10, 0).unwrap().mean < 50.0);
}

proptest! {
    #[test]
    fn normalized_returns_are_standardized(rewards in prop::collection::vec(-5.0f64..5.0, 1..200), gamma in 0.0f64..=1.0) {
        let z = normalize_returns(&compute_returns(&rewards, gamma), 1e-8);
        let mean = z.iter().sum::<f64>() / z.len() as f64;
        let sd = (z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / z.len() as f64).sqrt();
        prop_assert!(mean.abs() < 1e-10);
        prop_assert!(sd <= 1.0 + 1e-6);
    }

    #[test]
    fn returns_satisfy_the_recursion(rewards in prop::collection::vec(-5.0f64..5.0, 1..50), gamma in 0.0f64..=1.0) {
        let r = compute_returns(&rewards, gamma);
        prop_assert_eq!(*r.last().unwrap(), *rewards.last().unwrap());
        for t in 0..rewards.len() - 1 {
            prop_assert!((r[t] - (rewards[t] + gamma * r[t + 1])).abs() < 1e-9);
        }
    }
}

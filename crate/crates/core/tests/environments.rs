use proptest::prelude::*;
use qtrl_core::env::{CartPole, Environment, MiniGrid};
use qtrl_core::EnvKind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn run_random(env: &mut dyn Environment, rng: &mut ChaCha8Rng) -> (usize, f64, Vec<Vec<f64>>) {
    let mut observations = vec![env.reset()];
    let mut total = 0.0;
    let mut steps = 0;
    loop {
        let step = env.step(rng.gen_range(0..env.num_actions())).unwrap();
        steps += 1;
        total += step.reward;
        assert_eq!(step.observation.len(), env.observation_size());
        observations.push(step.observation);
        if step.done {
            return (steps, total, observations);
        }
    }
}

#[test]
fn cartpole_random_policy_terminates() {
    for seed in 0..100 {
        let mut env = CartPole::new(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (steps, total, _) = run_random(&mut env, &mut rng);
        assert!(steps <= 500);
        assert_eq!(total, steps as f64);
    }
}

#[test]
fn minigrid_random_rewards_are_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut env = MiniGrid::new(0);
    let mut successes = 0;
    for _ in 0..300 {
        let (steps, total, _) = run_random(&mut env, &mut rng);
        assert!(steps <= 100);
        if total > 0.0 {
            successes += 1;
            // A goal reached on the final step pays exactly 1 − 0.9 = 0.1.
            assert!(total > 0.1 - 1e-12 && total < 1.0, "{total}");
            let expected = 1.0 - 0.9 * steps as f64 / 100.0;
            assert!((total - expected).abs() < 1e-12);
        } else {
            assert_eq!(steps, 100);
        }
    }
    assert!(successes > 0);
}

#[test]
fn minigrid_reward_decreases_with_path_length() {
    // Spin in place `extra` times, then take the shortest path.
    let reward_after = |extra: usize| {
        let mut env = MiniGrid::new(0);
        env.reset();
        for _ in 0..extra {
            env.step(1).unwrap();
            env.step(0).unwrap();
        }
        let mut last = 0.0;
        for a in [2, 2, 1, 2, 2] {
            last = env.step(a).unwrap().reward;
        }
        last
    };
    let rewards: Vec<f64> = (0..10).map(reward_after).collect();
    assert!((rewards[0] - 0.955).abs() < 1e-12);
    assert!(rewards.windows(2).all(|w| w[1] < w[0]));
}

proptest! {
    #[test]
    fn trajectories_are_determined_by_seed_and_actions(
        seed in any::<u64>(),
        actions in prop::collection::vec(0usize..3, 1..60),
        minigrid in any::<bool>(),
    ) {
        let kind = if minigrid { EnvKind::Minigrid } else { EnvKind::Cartpole };
        let play = || {
            let mut env = kind.make(seed);
            let mut trace = vec![env.reset()];
            for &a in &actions {
                match env.step(a % kind.num_actions()) {
                    Ok(s) => {
                        trace.push(s.observation);
                        if s.done { break; }
                    }
                    Err(_) => break,
                }
            }
            trace
        };
        let (a, b) = (play(), play());
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.len(), kind.observation_size());
            prop_assert!(x.iter().zip(y).all(|(p, q)| p.to_bits() == q.to_bits()));
        }
    }
}

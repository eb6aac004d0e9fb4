mod common;

use common::*;
use proptest::prelude::*;
use qtrl_core::generator::{generate_theta, qt_backward, QtConfig, QtGenerator};
use qtrl_core::nn::{DenseNetSpec, OutputHead};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn shape(cfg: &QtConfig) -> GenShape<'_> {
    GenShape {
        n: cfg.n,
        depth: cfg.depth,
        k: cfg.k,
        mapping: &cfg.mapping_spec.layer_sizes,
    }
}

fn generator(k: usize, depth: usize, seed: u64) -> QtGenerator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    QtGenerator::init(QtConfig::new(k, depth).unwrap(), &mut rng).unwrap()
}

#[test]
fn generation_matches_composition_oracle() {
    for seed in 0..5 {
        let g = generator(3, 1 + seed as usize % 2, seed);
        let theta = generate_theta(&g.circuit, &g.mapping, &g.config).unwrap();
        let want = oracle_theta(&shape(&g.config), g.circuit.angles(), g.mapping.as_slice());
        assert_eq!(theta.values.len(), 3);
        for (a, b) in theta.values.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12, "seed {seed}: {a} vs {b}");
        }
    }
}

#[test]
fn generation_is_deterministic() {
    let g = generator(100, 2, 8);
    assert_eq!(g.generate().unwrap(), g.generate().unwrap());
}

/// F(θ) = Σ cᵢθᵢ + ½Σθᵢ², so ∂F/∂θ = c + θ.
fn functional(coeffs: &[f64], theta: &[f64]) -> f64 {
    theta
        .iter()
        .zip(coeffs)
        .map(|(t, c)| c * t + 0.5 * t * t)
        .sum()
}

fn check_end_to_end(k: usize, depth: usize, seed: u64) {
    let g = generator(k, depth, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
    let coeffs: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let theta = g.generate().unwrap().values;
    let grad_theta: Vec<f64> = theta.iter().zip(&coeffs).map(|(t, c)| c + t).collect();
    let grads = qt_backward(&g.circuit, &g.mapping, &g.config, &grad_theta).unwrap();

    let angles = g.circuit.angles().to_vec();
    let mapping = g.mapping.as_slice().to_vec();
    let fd_circuit = central_diff(
        |a| functional(&coeffs, &oracle_theta(&shape(&g.config), a, &mapping)),
        &angles,
        1e-5,
    );
    let fd_mapping = central_diff(
        |m| functional(&coeffs, &oracle_theta(&shape(&g.config), &angles, m)),
        &mapping,
        1e-5,
    );
    let what = format!("k={k} L={depth} seed={seed}");
    assert_gradients_match(&grads.circuit, &fd_circuit, &format!("φ {what}"));
    assert_gradients_match(&grads.mapping, &fd_mapping, &format!("β {what}"));
}

#[test]
fn sum_of_squares_gradient_two_qubits() {
    // Σθᵢ² corresponds to zero linear coefficients.
    let g = generator(3, 1, 77);
    let theta = g.generate().unwrap().values;
    let grad_theta: Vec<f64> = theta.iter().map(|t| 2.0 * t).collect();
    let grads = g.backward(&grad_theta).unwrap();
    let mapping = g.mapping.as_slice().to_vec();
    let sq = |t: Vec<f64>| t.iter().map(|v| v * v).sum::<f64>();
    let fd_circuit = central_diff(
        |a| sq(oracle_theta(&shape(&g.config), a, &mapping)),
        g.circuit.angles(),
        1e-5,
    );
    let fd_mapping = central_diff(
        |m| sq(oracle_theta(&shape(&g.config), g.circuit.angles(), m)),
        &mapping,
        1e-5,
    );
    assert_gradients_match(&grads.circuit, &fd_circuit, "φ");
    assert_gradients_match(&grads.mapping, &fd_mapping, "β");
}

#[test]
fn end_to_end_four_qubits() {
    check_end_to_end(13, 3, 42);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn end_to_end_gradients(n in 2usize..=4, depth in 1usize..=3, seed in any::<u64>()) {
        let k = (1 << (n - 1)) + 1 + (seed as usize % (1 << (n - 1)));
        let g = generator(k, depth, seed);
        // Central differences are meaningless across a ReLU kink.
        prop_assume!(kink_distance(&shape(&g.config), g.circuit.angles(), g.mapping.as_slice()) > 1e-4);
        check_end_to_end(k, depth, seed);
    }
}

#[test]
fn compression_holds_for_reported_configurations() {
    let cartpole = DenseNetSpec::new(vec![4, 128, 2], OutputHead::Softmax).unwrap();
    let minigrid = DenseNetSpec::new(vec![147, 32, 3], OutputHead::Softmax).unwrap();
    for (spec, depths) in [(&cartpole, [1, 3, 5]), (&minigrid, [3, 7, 13])] {
        for depth in depths {
            let cfg = QtConfig::for_policy(spec, depth).unwrap();
            assert!(
                cfg.param_count() < spec.param_count(),
                "{:?} L={depth}",
                spec.layer_sizes
            );
        }
    }
}

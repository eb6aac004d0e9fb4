//! Seeded fixtures shared by the benchmarks.

use qtrl_core::{CircuitParams, DenseNetSpec, EnvKind, FlatWeights, Policy, QtGenerator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 7;

pub fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED)
}

pub fn circuit(n: usize, depth: usize) -> CircuitParams {
    CircuitParams::random(n, depth, &mut rng()).expect("valid circuit size")
}

pub fn upstream(len: usize) -> Vec<f64> {
    let mut r = rng();
    (0..len).map(|_| r.gen_range(-1.0..1.0)).collect()
}

pub fn generator(env: EnvKind, depth: usize) -> QtGenerator {
    QtGenerator::for_policy(&env.default_policy(), depth, &mut rng()).expect("valid generator")
}

pub fn policy(env: EnvKind) -> Policy {
    let spec: DenseNetSpec = env.default_policy();
    let weights: FlatWeights = spec.init_weights(&mut rng());
    Policy::new(spec, weights).expect("softmax head")
}

pub fn observation(env: EnvKind) -> Vec<f64> {
    let mut r = rng();
    (0..env.observation_size())
        .map(|_| r.gen_range(-1.0..1.0))
        .collect()
}

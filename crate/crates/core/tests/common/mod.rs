//! Independent reference implementations used by the integration tests.
//! Nothing here calls into the kernels it is used to check.

#![allow(dead_code)]

use num_complex::Complex64;

pub type Matrix = Vec<Vec<Complex64>>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// U3 written out entry by entry.
pub fn u3(mu: f64, phi: f64, lam: f64) -> Matrix {
    let (ch, sh) = ((mu / 2.0).cos(), (mu / 2.0).sin());
    vec![
        vec![c(ch, 0.0), -c(lam.cos(), lam.sin()) * sh],
        vec![
            c(phi.cos(), phi.sin()) * sh,
            c((phi + lam).cos(), (phi + lam).sin()) * ch,
        ],
    ]
}

pub fn identity(dim: usize) -> Matrix {
    (0..dim)
        .map(|r| {
            (0..dim)
                .map(|k| c(if r == k { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect()
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn kron_all(factors: &[Matrix]) -> Matrix {
    factors[1..]
        .iter()
        .fold(factors[0].clone(), |acc, f| kron(&acc, f))
}

pub fn add(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn matvec(m: &Matrix, v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// Full 2ⁿ×2ⁿ operator for a single-qubit gate; qubit 0 is the leftmost
/// (most significant) tensor factor.
pub fn single_qubit_operator(n: usize, q: usize, u: &Matrix) -> Matrix {
    let factors: Vec<Matrix> = (0..n)
        .map(|i| if i == q { u.clone() } else { identity(2) })
        .collect();
    kron_all(&factors)
}

/// `|0⟩⟨0|_c ⊗ I + |1⟩⟨1|_c ⊗ U_t`.
pub fn controlled_operator(n: usize, control: usize, target: usize, u: &Matrix) -> Matrix {
    let p0 = vec![
        vec![c(1.0, 0.0), c(0.0, 0.0)],
        vec![c(0.0, 0.0), c(0.0, 0.0)],
    ];
    let p1 = vec![
        vec![c(0.0, 0.0), c(0.0, 0.0)],
        vec![c(0.0, 0.0), c(1.0, 0.0)],
    ];
    let off: Vec<Matrix> = (0..n)
        .map(|i| {
            if i == control {
                p0.clone()
            } else {
                identity(2)
            }
        })
        .collect();
    let on: Vec<Matrix> = (0..n)
        .map(|i| {
            if i == control {
                p1.clone()
            } else if i == target {
                u.clone()
            } else {
                identity(2)
            }
        })
        .collect();
    add(&kron_all(&off), &kron_all(&on))
}

/// Ansatz state from explicit operator products. `angles[b][q]` holds the
/// six angles for block `b`, qubit `q`.
pub fn dense_circuit_state(n: usize, angles: &[Vec<[f64; 6]>]) -> Vec<Complex64> {
    let dim = 1 << n;
    let mut state = vec![c(0.0, 0.0); dim];
    state[0] = c(1.0, 0.0);
    for block in angles {
        for (q, a) in block.iter().enumerate() {
            state = matvec(&single_qubit_operator(n, q, &u3(a[0], a[1], a[2])), &state);
        }
        if n > 1 {
            for (q, a) in block.iter().enumerate() {
                let op = controlled_operator(n, q, (q + 1) % n, &u3(a[3], a[4], a[5]));
                state = matvec(&op, &state);
            }
        }
    }
    state
}

/// Reshape a flat `[L][n][6]` angle vector.
pub fn nest_angles(n: usize, depth: usize, flat: &[f64]) -> Vec<Vec<[f64; 6]>> {
    (0..depth)
        .map(|b| {
            (0..n)
                .map(|q| {
                    let i = (b * n + q) * 6;
                    flat[i..i + 6].try_into().unwrap()
                })
                .collect()
        })
        .collect()
}

/// Straight-line ReLU MLP with a linear output; `weights` uses the
/// row-major-then-bias layout.
pub fn mlp_linear(sizes: &[usize], weights: &[f64], input: &[f64]) -> Vec<f64> {
    let mut x = input.to_vec();
    let mut at = 0;
    let layers = sizes.len() - 1;
    for l in 0..layers {
        let (fan_in, fan_out) = (sizes[l], sizes[l + 1]);
        let w = &weights[at..at + fan_in * fan_out];
        let b = &weights[at + fan_in * fan_out..at + fan_in * fan_out + fan_out];
        at += fan_in * fan_out + fan_out;
        let mut y = Vec::with_capacity(fan_out);
        for o in 0..fan_out {
            let mut z = b[o];
            for i in 0..fan_in {
                z += w[o * fan_in + i] * x[i];
            }
            y.push(if l + 1 < layers { z.max(0.0) } else { z });
        }
        x = y;
    }
    x
}

/// Smallest |pre-activation| over the hidden ReLU units of `mlp_linear`.
/// Finite differences are only meaningful away from the kinks.
pub fn min_hidden_preactivation(sizes: &[usize], weights: &[f64], input: &[f64]) -> f64 {
    let mut x = input.to_vec();
    let mut at = 0;
    let mut closest = f64::INFINITY;
    for l in 0..sizes.len() - 2 {
        let (fan_in, fan_out) = (sizes[l], sizes[l + 1]);
        let w = &weights[at..at + fan_in * fan_out];
        let b = &weights[at + fan_in * fan_out..at + fan_in * fan_out + fan_out];
        at += fan_in * fan_out + fan_out;
        x = (0..fan_out)
            .map(|o| {
                let z = b[o] + (0..fan_in).map(|i| w[o * fan_in + i] * x[i]).sum::<f64>();
                closest = closest.min(z.abs());
                z.max(0.0)
            })
            .collect();
    }
    closest
}

pub fn softmax(z: &[f64]) -> Vec<f64> {
    let m = z.iter().cloned().fold(f64::MIN, f64::max);
    let e: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|v| v / s).collect()
}

/// Central differences of `f` at `x` with step `h`.
pub fn central_diff(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut p = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = p[i];
            p[i] = orig + h;
            let up = f(&p);
            p[i] = orig - h;
            let down = f(&p);
            p[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Worst gradient disagreement. Entries whose magnitudes are both below
/// 1e-6 are compared absolutely (must be within 1e-8); all others relative
/// to the larger magnitude. Returns `(max_relative, max_absolute_small)`.
pub fn gradient_error(analytic: &[f64], numeric: &[f64]) -> (f64, f64) {
    assert_eq!(analytic.len(), numeric.len());
    let mut rel: f64 = 0.0;
    let mut abs_small: f64 = 0.0;
    for (&a, &n) in analytic.iter().zip(numeric) {
        let scale = a.abs().max(n.abs());
        if scale < 1e-6 {
            abs_small = abs_small.max((a - n).abs());
        } else {
            rel = rel.max((a - n).abs() / scale);
        }
    }
    (rel, abs_small)
}

pub fn assert_gradients_match(analytic: &[f64], numeric: &[f64], what: &str) {
    let (rel, abs_small) = gradient_error(analytic, numeric);
    assert!(
        rel < 1e-5 && abs_small < 1e-8,
        "{what}: max relative error {rel:e}, max small-entry absolute error {abs_small:e}"
    );
}

/// Generator layout: qubits, blocks, weights produced, mapping layer sizes.
pub struct GenShape<'a> {
    pub n: usize,
    pub depth: usize,
    pub k: usize,
    pub mapping: &'a [usize],
}

/// Mapping-network inputs (0/1 bits, then pᵢ) for the first k basis states.
fn mapping_inputs(shape: &GenShape, angles: &[f64]) -> Vec<Vec<f64>> {
    let n = shape.n;
    let state = dense_circuit_state(n, &nest_angles(n, shape.depth, angles));
    (0..shape.k)
        .map(|i| {
            let mut x: Vec<f64> = (0..n).map(|b| ((i >> (n - 1 - b)) & 1) as f64).collect();
            x.push(state[i].norm_sqr());
            x
        })
        .collect()
}

/// θ from the dense circuit oracle and the straight-line mapping network.
pub fn oracle_theta(shape: &GenShape, angles: &[f64], mapping: &[f64]) -> Vec<f64> {
    mapping_inputs(shape, angles)
        .iter()
        .map(|x| mlp_linear(shape.mapping, mapping, x)[0])
        .collect()
}

/// How close any hidden unit of the mapping network sits to its ReLU kink,
/// over all k inputs.
pub fn kink_distance(shape: &GenShape, angles: &[f64], mapping: &[f64]) -> f64 {
    mapping_inputs(shape, angles)
        .iter()
        .map(|x| min_hidden_preactivation(shape.mapping, mapping, x))
        .fold(f64::INFINITY, f64::min)
}

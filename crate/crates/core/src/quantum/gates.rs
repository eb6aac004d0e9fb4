//! 2×2 gate matrices and the in-place amplitude kernels that apply them.

use num_complex::Complex64;

pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// The U3 rotation
///
/// ```text
/// [ cos(μ/2)            -e^{iλ} sin(μ/2)     ]
/// [ e^{iϕ} sin(μ/2)      e^{i(ϕ+λ)} cos(μ/2) ]
/// ```
pub fn u3_matrix(mu: f64, phi: f64, lam: f64) -> Mat2 {
    let (s, c) = (mu / 2.0).sin_cos();
    let e_phi = Complex64::from_polar(1.0, phi);
    let e_lam = Complex64::from_polar(1.0, lam);
    let e_both = Complex64::from_polar(1.0, phi + lam);
    [
        [Complex64::new(c, 0.0), -e_lam * s],
        [e_phi * s, e_both * c],
    ]
}

/// Partial derivatives of [`u3_matrix`] with respect to (μ, ϕ, λ).
pub fn u3_derivatives(mu: f64, phi: f64, lam: f64) -> [Mat2; 3] {
    let (s, c) = (mu / 2.0).sin_cos();
    let i = Complex64::i();
    let e_phi = Complex64::from_polar(1.0, phi);
    let e_lam = Complex64::from_polar(1.0, lam);
    let e_both = Complex64::from_polar(1.0, phi + lam);
    let d_mu = [
        [Complex64::new(-0.5 * s, 0.0), -e_lam * (0.5 * c)],
        [e_phi * (0.5 * c), -e_both * (0.5 * s)],
    ];
    let d_phi = [[ZERO, ZERO], [i * e_phi * s, i * e_both * c]];
    let d_lam = [[ZERO, -i * e_lam * s], [ZERO, i * e_both * c]];
    [d_mu, d_phi, d_lam]
}

pub fn adjoint(m: &Mat2) -> Mat2 {
    [
        [m[0][0].conj(), m[1][0].conj()],
        [m[0][1].conj(), m[1][1].conj()],
    ]
}

/// Bit mask of `qubit` inside a basis index; qubit 0 is the most significant bit.
#[inline]
pub(crate) fn qubit_mask(n: usize, qubit: usize) -> usize {
    1 << (n - 1 - qubit)
}

/// Visits every amplitude pair `(i0, i1)` that differs only in the target bit
/// (`i0` has it clear) and has all bits of `control_mask` set.
#[inline]
fn for_each_pair(
    len: usize,
    target_mask: usize,
    control_mask: usize,
    mut f: impl FnMut(usize, usize),
) {
    let stride = target_mask << 1;
    let mut base = 0;
    while base < len {
        for i0 in base..base + target_mask {
            if i0 & control_mask == control_mask {
                f(i0, i0 | target_mask);
            }
        }
        base += stride;
    }
}

/// Applies `m` to the target qubit, restricted to the subspace where every
/// bit in `control_mask` is 1 (`control_mask == 0` means uncontrolled).
pub(crate) fn apply_mat2(
    amps: &mut [Complex64],
    target_mask: usize,
    control_mask: usize,
    m: &Mat2,
) {
    for_each_pair(amps.len(), target_mask, control_mask, |i0, i1| {
        let a0 = amps[i0];
        let a1 = amps[i1];
        amps[i0] = m[0][0] * a0 + m[0][1] * a1;
        amps[i1] = m[1][0] * a0 + m[1][1] * a1;
    });
}

/// Returns `S[a][b] = Σ conj(bra[i_a]) · ket[i_b]` over the gate's active pairs,
/// so that `⟨bra| D |ket⟩ = Σ_ab D[a][b] · S[a][b]` for any 2×2 `D` acting on
/// the same qubits.
pub(crate) fn pair_overlaps(
    bra: &[Complex64],
    ket: &[Complex64],
    target_mask: usize,
    control_mask: usize,
) -> Mat2 {
    let mut s = [[ZERO; 2]; 2];
    for_each_pair(ket.len(), target_mask, control_mask, |i0, i1| {
        let b0 = bra[i0].conj();
        let b1 = bra[i1].conj();
        let k0 = ket[i0];
        let k1 = ket[i1];
        s[0][0] += b0 * k0;
        s[0][1] += b0 * k1;
        s[1][0] += b1 * k0;
        s[1][1] += b1 * k1;
    });
    s
}

pub(crate) fn contract(d: &Mat2, s: &Mat2) -> Complex64 {
    d[0][0] * s[0][0] + d[0][1] * s[0][1] + d[1][0] * s[1][0] + d[1][1] * s[1][1]
}

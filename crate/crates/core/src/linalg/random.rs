//! Haar-ish random states and unitaries from any `RngCore`.

use alloc::vec::Vec;

use rand_core::RngCore;

use super::matrix::{gram_schmidt, Matrix, C64};
use super::state::StateVector;

fn uniform(rng: &mut impl RngCore) -> f64 {
    // 53 random bits in (0, 1].
    ((rng.next_u64() >> 11) as f64 + 1.0) / (1u64 << 53) as f64
}

/// Standard complex Gaussian sample (Box-Muller).
pub fn complex_gaussian(rng: &mut impl RngCore) -> C64 {
    let r = libm::sqrt(-2.0 * libm::log(uniform(rng)));
    let t = 2.0 * core::f64::consts::PI * uniform(rng);
    C64::new(r * libm::cos(t), r * libm::sin(t)) * core::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_vector(rng: &mut impl RngCore, dim: usize) -> Vec<C64> {
    (0..dim).map(|_| complex_gaussian(rng)).collect()
}

/// Uniformly random unit vector in `C^dim`.
pub fn random_state(rng: &mut impl RngCore, dim: usize) -> StateVector {
    loop {
        let v = StateVector::from_amps(gaussian_vector(rng, dim));
        if let Ok(n) = v.normalized() {
            return n;
        }
    }
}

/// Random unitary from orthonormalised Gaussian columns.
pub fn random_unitary(rng: &mut impl RngCore, dim: usize) -> Matrix {
    loop {
        let cols: Vec<Vec<C64>> = (0..dim).map(|_| gaussian_vector(rng, dim)).collect();
        let q = gram_schmidt(&cols, 1e-8);
        if q.len() == dim {
            return Matrix::from_columns(dim, &q);
        }
    }
}

/// Uniform draw from `[lo, hi)`.
pub fn uniform_range(rng: &mut impl RngCore, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * (uniform(rng) - f64::EPSILON).max(0.0)
}

#![allow(dead_code)]

use cluster4::qcore::{CMatrix, C64};
use cluster4::{DensityMatrix, StateVector};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn gaussian_c64(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state on `n` qubits.
pub fn random_pure(n: usize, rng: &mut impl Rng) -> StateVector {
    let amps = (0..1usize << n).map(|_| gaussian_c64(rng)).collect();
    StateVector::normalized(amps).unwrap()
}

/// Random full-rank density matrix `G G† / Tr` from a Ginibre matrix.
pub fn random_density(n: usize, rng: &mut impl Rng) -> DensityMatrix {
    let d = 1usize << n;
    let g = CMatrix::from_fn(d, d, |_, _| gaussian_c64(rng));
    let m = &g * g.adjoint();
    let tr = m.trace();
    let mut m = m / tr;
    // symmetrize away rounding
    let herm = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    m.copy_from(&herm);
    DensityMatrix::new(m).unwrap()
}

/// Random single-qubit pure states tensored together (slot order q1..q4).
pub fn random_product(rng: &mut impl Rng) -> StateVector {
    let mut state = random_pure(1, rng);
    for _ in 1..4 {
        state = state.tensor(&random_pure(1, rng));
    }
    state
}

//! Shared fixtures for the benchmarks.

use qgate_core::algorithms::H2TwoQubitModel;
use qgate_core::compiler::{PauliTermList, SparseHamiltonian};
use qgate_core::{PauliString, StateVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_state(n: usize, seed: u64) -> StateVector {
    StateVector::random(n, &mut rng(seed))
}

/// `XYZXYZ…` over `n` qubits.
pub fn dense_string(n: usize) -> PauliString {
    "XYZ".chars().cycle().take(n).collect::<String>().parse().expect("valid letters")
}

pub fn h2_terms() -> PauliTermList {
    H2TwoQubitModel::default().terms()
}

pub fn random_sparse(n: usize, seed: u64) -> SparseHamiltonian {
    SparseHamiltonian::random_real(n, 0.5, &mut rng(seed)).expect("valid fill")
}

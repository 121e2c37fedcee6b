//! Lowering of Hamiltonians and gates to QGATE programs.
//!
//! Angle convention: a rotation of angle φ about `P` is `exp(iφP/2)`, so
//! evolving under `c·P` for time Δ uses φ = −2cΔ.

pub mod controlled;
pub mod cost;
pub mod diagonal;
pub mod direct;
pub mod hamiltonian;
pub mod jw;
pub mod projector;
pub mod trotter;

pub use controlled::{
    add_control, compile_cnot, compile_controlled_phase_exponential, compile_controlled_zrotation_exponential,
    compile_toffoli, controlled_phase_rotations, controlled_zrotation_rotations, RotationSet,
};
pub use cost::{cost, CostReport};
pub use diagonal::{compile_diagonal, emit_diagonal, walsh_coefficients};
pub use direct::{
    compile_direct_term, compile_fanout, compile_ncontrolled_rotation, compile_sparse, plan_direct_term, DirectTermPlan,
};
pub use hamiltonian::{PauliTermList, SparseHamiltonian};
pub use jw::{dense_annihilation, dense_fermion_term, jordan_wigner, jordan_wigner_sum, FermionTerm};
pub use projector::{expand_projector_pauli, label_coefficients, TermLabels};
pub use trotter::{
    compile_pauli_rotation, compile_trotter, trotter_schedule, trotter_sequence, TermOrdering, TrotterOrder, SUZUKI_S,
};

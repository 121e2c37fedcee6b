//! End-to-end studies built on the compiler and the statevector oracle.

pub mod h2;
pub mod qpe;
pub mod scaling;

pub use h2::{h2_fidelity_curve, H2TwoQubitModel};
pub use qpe::{
    compiled_evolution_error, energy_from_phase, exact_phase, inverse_qft_program, phase_drift_bound, qpe, qpe_sweep,
    wrap_phase, Evolution, HamiltonianInput, PhaseEstimate, QpeConfig, SweepRow, C3, C4,
};
pub use scaling::{fit_loglog_slope, trotter_scaling_study, ScalingRow};

//! QGATE compilation and exact statevector verification.
//!
//! Programs are built from gate ancillas that are entangled with logical
//! qubits through controlled Paulis and then measured after a single-qubit
//! rotation. Everything here is checked against dense matrix oracles.

pub mod algorithms;
pub mod compiler;
mod error;
pub mod io;
pub mod ir;
pub mod pauli;
pub mod stabilizer;
pub mod statevector;

pub use error::{QgateError, Result};
pub use ir::{
    execute, execute_one, execute_with, program_unitary, validate, ByProduct, CliffordGate, Control, Diagnostic,
    DiagnosticKind, ExecMode, ExecOptions, ExecutionResult, FramePolicy, Instruction, ProgramBuilder, QGateProgram,
    QubitKind, QubitRef, TeleportPolicy,
};
pub use pauli::{DenseMatrix, Letter, PauliString, WeightedPauli};
pub use stabilizer::{Clifford, StabilizerTableau};
pub use statevector::{fidelity, frobenius_distance, hermitian_exponential_oracle, DenseUnitary, Gate, StateVector};

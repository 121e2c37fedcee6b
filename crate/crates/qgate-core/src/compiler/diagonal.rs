use crate::error::{QgateError, Result};
use crate::ir::{ProgramBuilder, QGateProgram, QubitRef};
use crate::pauli::Letter;

const PRUNE: f64 = 1e-14;

/// Coefficients `c_s` with `diag = Σ_s c_s Z^s`, where bit `k` of `s`
/// (qubit 0 most significant) puts a Z on qubit k. Fast Walsh–Hadamard transform.
pub fn walsh_coefficients(diag: &[f64]) -> Result<Vec<f64>> {
    let len = diag.len();
    if len == 0 || !len.is_power_of_two() {
        return Err(QgateError::Dimension(format!("diagonal of length {len}")));
    }
    let mut c = diag.to_vec();
    let mut h = 1;
    while h < len {
        for block in (0..len).step_by(2 * h) {
            for k in block..block + h {
                let (a, b) = (c[k], c[k + h]);
                c[k] = a + b;
                c[k + h] = a - b;
            }
        }
        h *= 2;
    }
    for v in &mut c {
        *v /= len as f64;
    }
    Ok(c)
}

/// Emit `exp(−iΔ·diag)` on `qubits` (qubit k of the diagonal ↦ `qubits[k]`).
/// The identity coefficient goes into the global phase.
pub fn emit_diagonal(b: &mut ProgramBuilder, qubits: &[QubitRef], diag: &[f64], delta: f64) -> Result<usize> {
    let n = qubits.len();
    if diag.len() != 1usize << n {
        return Err(QgateError::Dimension(format!("diagonal of length {} on {n} qubits", diag.len())));
    }
    let c = walsh_coefficients(diag)?;
    b.add_global_phase(-delta * c[0]);
    let mut emitted = 0;
    for (s, &cs) in c.iter().enumerate().skip(1) {
        if cs.abs() < PRUNE {
            continue;
        }
        let ops: Vec<_> = (0..n).filter(|&k| (s >> (n - 1 - k)) & 1 == 1).map(|k| (qubits[k], Letter::Z)).collect();
        b.rotation_on(&ops, false, -2.0 * delta * cs)?;
        emitted += 1;
    }
    Ok(emitted)
}

/// Commuting Z-string rotations realizing `exp(−iΔ·diag(H))` exactly.
pub fn compile_diagonal(diag: &[f64], delta: f64) -> Result<QGateProgram> {
    let len = diag.len();
    if len == 0 || !len.is_power_of_two() {
        return Err(QgateError::Dimension(format!("diagonal of length {len}")));
    }
    let n = len.trailing_zeros() as usize;
    let mut b = ProgramBuilder::new(n).named("diagonal", "sparse");
    let qubits: Vec<_> = (0..n).map(QubitRef::logical).collect();
    emit_diagonal(&mut b, &qubits, diag, delta)?;
    b.build()
}

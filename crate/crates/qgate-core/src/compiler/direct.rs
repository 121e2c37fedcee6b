use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QgateError, Result};
use crate::ir::{CliffordGate, Control, Instruction, ProgramBuilder, QGateProgram, QubitRef};
use crate::pauli::Letter;

use super::diagonal::emit_diagonal;
use super::hamiltonian::SparseHamiltonian;
use super::projector::{basis_bit, label_coefficients, TermLabels};
use super::trotter::{trotter_schedule, TermOrdering, TrotterOrder};

fn x_on(q: QubitRef) -> Vec<Instruction> {
    vec![Instruction::SingleClifford { qubit: q, gate: CliffordGate::X }]
}

/// CNOT from `control` to `target` as a native controlled block.
pub fn emit_cnot(b: &mut ProgramBuilder, control: QubitRef, target: QubitRef) -> Result<()> {
    b.controlled_block(vec![Control { qubit: control, key: 1 }], x_on(target))
}

/// Toffoli onto `target` (typically a work qubit).
pub fn emit_toffoli(b: &mut ProgramBuilder, c1: QubitRef, c2: QubitRef, target: QubitRef) -> Result<()> {
    b.controlled_block(vec![Control { qubit: c1, key: 1 }, Control { qubit: c2, key: 1 }], x_on(target))
}

/// CNOT cascade with common control `designated` onto every other qubit in
/// `qubits`. Self-inverse. Returns the number of CNOTs.
pub fn emit_fanout(b: &mut ProgramBuilder, qubits: &[QubitRef], designated: QubitRef) -> Result<usize> {
    if qubits.is_empty() {
        return Err(QgateError::InvalidArgument("fan-out over no qubits".into()));
    }
    if !qubits.contains(&designated) {
        return Err(QgateError::InvalidArgument(format!("designated qubit {designated} not in the fan-out set")));
    }
    let mut count = 0;
    for &q in qubits {
        if q != designated {
            emit_cnot(b, designated, q)?;
            count += 1;
        }
    }
    Ok(count)
}

/// Fan-out fragment over logical qubits of an `n`-qubit register.
pub fn compile_fanout(n: usize, qubits: &[usize], designated: usize) -> Result<QGateProgram> {
    let mut b = ProgramBuilder::new(n).named("fan-out", "direct");
    let refs: Vec<_> = qubits.iter().map(|&q| QubitRef::logical(q)).collect();
    emit_fanout(&mut b, &refs, QubitRef::logical(designated))?;
    b.build()
}

/// Controlled `R_X(angle) = exp(−i·angle·X/2)` on `target`, conditioned on every
/// control matching its key. Key-0 controls are bracketed by X gates; two or
/// more controls are reduced with a Toffoli ladder into work qubits that are
/// uncomputed and released afterwards. Returns the Toffoli count.
pub fn emit_ncontrolled_rotation(
    b: &mut ProgramBuilder,
    controls: &[(QubitRef, u8)],
    target: QubitRef,
    angle: f64,
) -> Result<usize> {
    if controls.iter().any(|(q, _)| *q == target) {
        return Err(QgateError::InvalidArgument(format!("target {target} is also a control")));
    }
    for (i, (q, k)) in controls.iter().enumerate() {
        if *k > 1 {
            return Err(QgateError::InvalidArgument(format!("control key {k}")));
        }
        if controls[..i].iter().any(|(p, _)| p == q) {
            return Err(QgateError::InvalidArgument(format!("control {q} repeated")));
        }
    }
    let rotation = |b: &mut ProgramBuilder| b.rotation_on(&[(target, Letter::X)], false, -angle);
    if controls.is_empty() {
        rotation(b)?;
        return Ok(0);
    }
    let flip_zero_keys = |b: &mut ProgramBuilder| -> Result<()> {
        for &(q, k) in controls {
            if k == 0 {
                b.clifford(q, CliffordGate::X)?;
            }
        }
        Ok(())
    };
    flip_zero_keys(b)?;
    let mut work = Vec::new();
    let mut last = controls[0].0;
    for &(q, _) in &controls[1..] {
        let w = b.alloc_work()?;
        emit_toffoli(b, last, q, w)?;
        work.push((last, q, w));
        last = w;
    }
    let body = b.capture(rotation)?;
    b.controlled_block(vec![Control { qubit: last, key: 1 }], body)?;
    for &(c1, c2, w) in work.iter().rev() {
        emit_toffoli(b, c1, c2, w)?;
        b.release_work(w)?;
    }
    flip_zero_keys(b)?;
    Ok(2 * work.len())
}

/// Stand-alone multi-controlled `R_X` over logical qubits of an `n`-qubit register.
pub fn compile_ncontrolled_rotation(
    n: usize,
    controls: &[(usize, u8)],
    target: usize,
    angle: f64,
) -> Result<QGateProgram> {
    if controls.is_empty() {
        return Err(QgateError::InvalidArgument("at least one control is required".into()));
    }
    let mut b = ProgramBuilder::new(n).named("controlled rotation", "direct");
    let cs: Vec<_> = controls.iter().map(|&(q, k)| (QubitRef::logical(q), k)).collect();
    emit_ncontrolled_rotation(&mut b, &cs, QubitRef::logical(target), angle)?;
    b.build()
}

/// Resolved layout of one off-diagonal term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectTermPlan {
    pub labels: TermLabels,
    /// Lowest-index flip qubit; carries the single-qubit transition.
    pub designated: usize,
    /// Other flip qubits, targets of the fan-out.
    pub fanout_targets: Vec<usize>,
    /// `(qubit, key)` for the controlled rotation, ascending by qubit.
    pub controls: Vec<(usize, u8)>,
    /// `θ = Δh`; the rotation is `exp(−iθX)` on the designated qubit.
    pub theta: f64,
}

/// Labels, designated qubit, fan-out targets and control keys for
/// `exp(−iΔh(|ψ_i⟩⟨ψ_j| + |ψ_j⟩⟨ψ_i|))`.
pub fn plan_direct_term(i: usize, j: usize, h: f64, delta: f64, n: usize) -> Result<DirectTermPlan> {
    if i == j {
        return Err(QgateError::InvalidArgument("diagonal term; use the diagonal compiler".into()));
    }
    if !h.is_finite() || !delta.is_finite() {
        return Err(QgateError::NonFinite("direct term coefficient".into()));
    }
    let labels = label_coefficients(i, j, n)?;
    let flips = labels.flip_set();
    let designated = flips[0];
    let fanout_targets = flips[1..].to_vec();
    let mut controls = labels.number_keys();
    // after the cascade, flip qubit q holds ψ_i[q] ⊕ ψ_i[designated] on both states
    for &q in &fanout_targets {
        controls.push((q, u8::from(basis_bit(i, q, n) ^ basis_bit(i, designated, n))));
    }
    controls.sort();
    Ok(DirectTermPlan { labels, designated, fanout_targets, controls, theta: delta * h })
}

/// Emit one direct term on `qubits` (qubit k of the term ↦ `qubits[k]`).
pub fn emit_direct_term(
    b: &mut ProgramBuilder,
    qubits: &[QubitRef],
    i: usize,
    j: usize,
    h: f64,
    delta: f64,
) -> Result<DirectTermPlan> {
    let plan = plan_direct_term(i, j, h, delta, qubits.len())?;
    let d = qubits[plan.designated];
    let flips: Vec<_> = plan.labels.flip_set().into_iter().map(|k| qubits[k]).collect();
    emit_fanout(b, &flips, d)?;
    let controls: Vec<_> = plan.controls.iter().map(|&(k, key)| (qubits[k], key)).collect();
    emit_ncontrolled_rotation(b, &controls, d, 2.0 * plan.theta)?;
    emit_fanout(b, &flips, d)?;
    Ok(plan)
}

/// Exact program for `exp(−iΔh(|ψ_i⟩⟨ψ_j| + |ψ_j⟩⟨ψ_i|))` with real `h`.
pub fn compile_direct_term(i: usize, j: usize, h: f64, delta: f64, n: usize) -> Result<QGateProgram> {
    let mut b = ProgramBuilder::new(n).named(format!("direct term ({i}, {j})"), "direct");
    let qubits: Vec<_> = (0..n).map(QubitRef::logical).collect();
    emit_direct_term(&mut b, &qubits, i, j, h, delta)?;
    b.build()
}

fn real_offdiagonal(v: Complex64, i: usize, j: usize) -> Result<f64> {
    if v.im.abs() > 1e-12 {
        return Err(QgateError::Unsupported(format!("complex off-diagonal entry ({i}, {j})")));
    }
    Ok(v.re)
}

/// Trotterized `exp(−iΔH)` with the diagonal as one block and each Hermitian
/// off-diagonal pair as one direct term.
pub fn compile_sparse(
    h: &SparseHamiltonian,
    delta: f64,
    order: TrotterOrder,
    steps: usize,
    ordering: TermOrdering,
) -> Result<QGateProgram> {
    let n = h.n_qubits();
    let mut b = ProgramBuilder::new(n).named(format!("sparse order {} steps {steps}", order.number()), "direct");
    let qubits: Vec<_> = (0..n).map(QubitRef::logical).collect();
    enum Block {
        Diagonal(Vec<f64>),
        Pair(usize, usize, f64),
    }
    let mut blocks = Vec::new();
    if h.has_diagonal() {
        blocks.push(Block::Diagonal(h.diagonal()));
    }
    for (i, j, v) in h.off_diagonal_pairs() {
        blocks.push(Block::Pair(i, j, real_offdiagonal(v, i, j)?));
    }
    if blocks.is_empty() {
        b.warn("zero Hamiltonian");
        return b.build();
    }
    for (m, w) in trotter_schedule(blocks.len(), order, steps, ordering)? {
        match &blocks[m] {
            Block::Diagonal(d) => {
                emit_diagonal(&mut b, &qubits, d, delta * w)?;
            }
            Block::Pair(i, j, v) => {
                emit_direct_term(&mut b, &qubits, *i, *j, *v, delta * w)?;
            }
        }
    }
    b.build()
}

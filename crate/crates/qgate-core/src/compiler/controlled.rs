use std::collections::BTreeSet;

use crate::error::{QgateError, Result};
use crate::ir::{program_unitary, CliffordGate, Control, Instruction, ProgramBuilder, QGateProgram, QubitRef};
use crate::pauli::{Letter, PauliString};

/// Z-string rotations `(P, φ)` meaning `∏ exp(iφP/2)` (all commute), plus the
/// global phase carried by the identity term.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationSet {
    pub rotations: Vec<(PauliString, f64)>,
    pub global_phase: f64,
}

impl RotationSet {
    /// Angle of the rotation about `p`, if present.
    pub fn angle_of(&self, p: &str) -> Option<f64> {
        let p: PauliString = p.parse().ok()?;
        self.rotations.iter().find(|(s, _)| *s == p).map(|(_, a)| *a)
    }

    /// Program applying every rotation on logical qubits.
    pub fn to_program(&self, n: usize, name: &str) -> Result<QGateProgram> {
        let mut b = ProgramBuilder::new(n).named(name, "controlled");
        for (p, phi) in &self.rotations {
            b.pauli_rotation(p, *phi)?;
        }
        b.add_global_phase(self.global_phase);
        b.build()
    }
}

fn check_disjoint(n: usize, controls: &[(usize, u8)], targets: &[usize]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for &q in controls.iter().map(|(q, _)| q).chain(targets) {
        if q >= n {
            return Err(QgateError::InvalidIndex(format!("qubit {q} on {n} qubits")));
        }
        if !seen.insert(q) {
            return Err(QgateError::InvalidArgument(format!("qubit {q} appears twice among controls and targets")));
        }
    }
    for &(_, k) in controls {
        if k > 1 {
            return Err(QgateError::InvalidArgument(format!("control key {k}")));
        }
    }
    Ok(())
}

/// Expand `exp(i·scale·∏_c(I + (−1)^{k_c} Z_c) ⊗ T)` where `T` is either
/// `∏_t (I − Z_t)` (`product_targets`) or `Σ_t Z_t`.
fn expand(n: usize, controls: &[(usize, u8)], targets: &[usize], scale: f64, product_targets: bool) -> RotationSet {
    let mut rotations = Vec::new();
    let mut global_phase = 0.0;
    let nc = controls.len();
    let mut push = |s: PauliString, coeff: f64, rotations: &mut Vec<(PauliString, f64)>| {
        if coeff == 0.0 {
            return;
        }
        if s.is_identity_letters() {
            global_phase += coeff;
        } else {
            rotations.push((s, 2.0 * coeff));
        }
    };
    for cmask in 0..(1usize << nc) {
        let mut base = PauliString::identity(n);
        let mut sign = 1.0;
        for (bit, &(q, k)) in controls.iter().enumerate() {
            if (cmask >> bit) & 1 == 1 {
                base.set_letter(q, Letter::Z);
                if k == 1 {
                    sign = -sign;
                }
            }
        }
        if product_targets {
            for tmask in 0..(1usize << targets.len()) {
                let mut s = base.clone();
                let mut tsign = sign;
                for (bit, &q) in targets.iter().enumerate() {
                    if (tmask >> bit) & 1 == 1 {
                        s.set_letter(q, Letter::Z);
                        tsign = -tsign;
                    }
                }
                push(s, scale * tsign, &mut rotations);
            }
        } else {
            for &q in targets {
                let mut s = base.clone();
                s.set_letter(q, Letter::Z);
                push(s, scale * sign, &mut rotations);
            }
        }
    }
    RotationSet { rotations, global_phase }
}

/// Multi-controlled multi-target phase gate `C^nP^m(φ)`: phase `e^{iφ}` on the
/// subspace where every control matches its key and every target is 1.
pub fn controlled_phase_rotations(
    n: usize,
    controls: &[(usize, u8)],
    targets: &[usize],
    phi: f64,
) -> Result<RotationSet> {
    check_disjoint(n, controls, targets)?;
    if targets.is_empty() {
        return Err(QgateError::InvalidArgument("at least one target is required".into()));
    }
    let denom = (1u64 << (controls.len() + targets.len())) as f64;
    Ok(expand(n, controls, targets, phi / denom, true))
}

/// Multi-controlled `R_Z(φ) = exp(−iφZ/2)` on each target.
pub fn controlled_zrotation_rotations(
    n: usize,
    controls: &[(usize, u8)],
    targets: &[usize],
    phi: f64,
) -> Result<RotationSet> {
    check_disjoint(n, controls, targets)?;
    if targets.is_empty() {
        return Err(QgateError::InvalidArgument("at least one target is required".into()));
    }
    if phi == 0.0 {
        return Ok(RotationSet { rotations: Vec::new(), global_phase: 0.0 });
    }
    let denom = (1u64 << (controls.len() + 1)) as f64;
    Ok(expand(n, controls, targets, -phi / denom, false))
}

pub fn compile_controlled_phase_exponential(
    n: usize,
    controls: &[(usize, u8)],
    targets: &[usize],
    phi: f64,
) -> Result<(RotationSet, QGateProgram)> {
    let set = controlled_phase_rotations(n, controls, targets, phi)?;
    let prog = set.to_program(n, "controlled phase")?;
    Ok((set, prog))
}

pub fn compile_controlled_zrotation_exponential(
    n: usize,
    controls: &[(usize, u8)],
    targets: &[usize],
    phi: f64,
) -> Result<(RotationSet, QGateProgram)> {
    let set = controlled_zrotation_rotations(n, controls, targets, phi)?;
    let prog = set.to_program(n, "controlled z rotation")?;
    Ok((set, prog))
}

/// CNOT as `H_t · CZ · H_t` with the CZ from its three-rotation set.
pub fn compile_cnot(n: usize, control: usize, target: usize) -> Result<QGateProgram> {
    let set = controlled_phase_rotations(n, &[(control, 1)], &[target], std::f64::consts::PI)?;
    let t = QubitRef::logical(target);
    let mut b = ProgramBuilder::new(n).named("cnot", "controlled");
    b.clifford(t, CliffordGate::H)?;
    for (p, phi) in &set.rotations {
        b.pauli_rotation(p, *phi)?;
    }
    b.clifford(t, CliffordGate::H)?;
    b.add_global_phase(set.global_phase);
    b.build()
}

/// Toffoli as `H_t · CCZ · H_t`. The weight-3 string is not entangled directly:
/// its ancilla receives the patterns of the `Z_{c1}Z_{c2}` and `Z_t` ancillas
/// by entanglement transfer.
pub fn compile_toffoli(n: usize, c1: usize, c2: usize, target: usize) -> Result<QGateProgram> {
    let set = controlled_phase_rotations(n, &[(c1, 1), (c2, 1)], &[target], std::f64::consts::PI)?;
    let t = QubitRef::logical(target);
    let mut b = ProgramBuilder::new(n).named("toffoli", "controlled");
    b.clifford(t, CliffordGate::H)?;
    let mut pending = Vec::new();
    let mut pair = None;
    let mut single_t = None;
    let mut triple = None;
    for (p, phi) in &set.rotations {
        if p.weight() == 3 {
            triple = Some(*phi);
            continue;
        }
        let a = b.alloc_ancilla()?;
        for q in p.support() {
            b.cpauli(a, QubitRef::logical(q), Letter::Z)?;
        }
        let sup = p.support();
        if sup == vec![c1.min(c2), c1.max(c2)] {
            pair = Some(a);
        }
        if sup == vec![target] {
            single_t = Some(a);
        }
        pending.push((a, *phi));
    }
    let (pair, single_t, phi3) = match (pair, single_t, triple) {
        (Some(p), Some(s), Some(t)) => (p, s, t),
        _ => return Err(QgateError::InternalConsistency("unexpected CCZ rotation set".into())),
    };
    let a3 = b.alloc_ancilla()?;
    b.transfer_entanglement(pair, a3)?;
    b.transfer_entanglement(single_t, a3)?;
    pending.push((a3, phi3));
    for (a, phi) in pending {
        b.measure_rotated(a, phi)?;
    }
    b.clifford(t, CliffordGate::H)?;
    b.add_global_phase(set.global_phase);
    b.build()
}

/// Whether a top-level instruction run is a self-contained rotation fragment.
fn is_rotation_op(i: &Instruction) -> bool {
    match i {
        Instruction::AllocAncilla { .. }
        | Instruction::AllocMagic { .. }
        | Instruction::CPauli { .. }
        | Instruction::AncillaCx { .. }
        | Instruction::MeasureRotated { .. }
        | Instruction::MeasureX { .. } => true,
        Instruction::SingleClifford { qubit, .. } => qubit.kind.is_ancilla(),
        _ => false,
    }
}

fn body_rotates(body: &[Instruction]) -> bool {
    body.iter().any(|i| match i {
        Instruction::MeasureRotated { .. } => true,
        Instruction::Controlled { body, .. } => body_rotates(body),
        _ => false,
    })
}

/// Controlled version of `program` with `control` (key 1) added to every
/// rotation. The non-rotation skeleton (Cliffords, fan-outs, Toffoli ladders)
/// must compose to the identity; it is left uncontrolled. The global phase
/// becomes a Z rotation on the control.
pub fn add_control(program: &QGateProgram, control: usize) -> Result<QGateProgram> {
    let c = QubitRef::logical(control);
    if control >= program.n_logical {
        return Err(QgateError::InvalidIndex(format!("control {control} on {} qubits", program.n_logical)));
    }
    let mut refs = BTreeSet::new();
    for i in &program.instructions {
        i.refs(&mut refs);
    }
    if refs.contains(&c) {
        return Err(QgateError::InvalidArgument(format!("control {c} is used by the program")));
    }
    let mut skeleton = QGateProgram::empty(program.n_logical);
    let mut out = vec![Instruction::AllocLogical { count: program.n_logical }];
    let mut group: Vec<Instruction> = Vec::new();
    let mut live = 0i64;
    for ins in program.instructions.iter().skip(1) {
        if is_rotation_op(ins) {
            match ins {
                Instruction::AllocAncilla { .. } | Instruction::AllocMagic { .. } => live += 1,
                Instruction::MeasureRotated { .. } | Instruction::MeasureX { .. } => live -= 1,
                _ => {}
            }
            group.push(ins.clone());
            if live == 0 {
                out.push(Instruction::Controlled {
                    controls: vec![Control { qubit: c, key: 1 }],
                    body: std::mem::take(&mut group),
                });
            }
            continue;
        }
        if !group.is_empty() {
            return Err(QgateError::Unsupported("instruction interleaved with an open rotation fragment".into()));
        }
        match ins {
            Instruction::Controlled { controls, body } if body_rotates(body) => {
                let mut controls = controls.clone();
                controls.push(Control { qubit: c, key: 1 });
                out.push(Instruction::Controlled { controls, body: body.clone() });
            }
            other => {
                out.push(other.clone());
                skeleton.instructions.push(other.clone());
            }
        }
    }
    if !group.is_empty() {
        return Err(QgateError::MalformedProgram("unterminated rotation fragment".into()));
    }
    if skeleton.n_logical <= crate::pauli::DEFAULT_DENSE_LIMIT && skeleton.instructions.len() > 1 {
        let u = program_unitary(&skeleton)?;
        let dim = u.dim();
        let dev = (u.matrix() - crate::pauli::DenseMatrix::identity(dim, dim)).norm();
        if dev > 1e-9 {
            return Err(QgateError::Unsupported("non-rotation part of the program is not self-cancelling".into()));
        }
    }
    let mut b =
        ProgramBuilder::new(program.n_logical).named(format!("controlled {}", program.name), program.source.clone());
    for ins in out.into_iter().skip(1) {
        b.push_tracked(ins)?;
    }
    if program.global_phase != 0.0 {
        b.rotation_on(&[(c, Letter::Z)], false, -program.global_phase)?;
        b.add_global_phase(program.global_phase / 2.0);
    }
    b.build()
}

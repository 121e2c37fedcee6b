use crate::error::{QgateError, Result};
use crate::pauli::{Letter, PauliString};
use crate::stabilizer::Clifford;

use super::{CliffordGate, Control, Instruction, QGateProgram, QubitKind, QubitRef, RegisterTracker, PROGRAM_VERSION};

/// Incremental program construction with on-the-fly stabilizer tracking.
///
/// Every emitted instruction is replayed on a [`RegisterTracker`], so
/// by-products are read off the live rows rather than supplied by hand.
#[derive(Clone, Debug)]
pub struct ProgramBuilder {
    n_logical: usize,
    name: String,
    source: String,
    global_phase: f64,
    warnings: Vec<String>,
    stack: Vec<Vec<Instruction>>,
    tracker: RegisterTracker,
    next: [u32; 3],
}

impl ProgramBuilder {
    pub fn new(n_logical: usize) -> Self {
        ProgramBuilder {
            n_logical,
            name: String::new(),
            source: String::new(),
            global_phase: 0.0,
            warnings: Vec::new(),
            stack: vec![vec![Instruction::AllocLogical { count: n_logical }]],
            tracker: RegisterTracker::new(n_logical),
            next: [0; 3],
        }
    }

    pub fn named(mut self, name: impl Into<String>, source: impl Into<String>) -> Self {
        self.name = name.into();
        self.source = source.into();
        self
    }

    pub fn n_logical(&self) -> usize {
        self.n_logical
    }

    pub fn logical(&self, i: usize) -> QubitRef {
        QubitRef::logical(i)
    }

    pub fn tracker(&self) -> &RegisterTracker {
        &self.tracker
    }

    pub fn global_phase(&self) -> f64 {
        self.global_phase
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    pub fn add_global_phase(&mut self, gamma: f64) {
        self.global_phase += gamma;
    }

    fn emit(&mut self, i: Instruction) {
        self.stack.last_mut().expect("builder stack never empty").push(i);
    }

    fn fresh(&mut self, kind: QubitKind) -> QubitRef {
        let slot = match kind {
            QubitKind::GateAncilla => 0,
            QubitKind::MagicAncilla => 1,
            QubitKind::Work => 2,
            QubitKind::Logical => unreachable!("logical qubits are fixed"),
        };
        let index = self.next[slot];
        self.next[slot] += 1;
        QubitRef { kind, index }
    }

    fn pos(&self, r: QubitRef) -> Result<usize> {
        self.tracker.position(r)
    }

    pub fn alloc_ancilla(&mut self) -> Result<QubitRef> {
        let r = self.fresh(QubitKind::GateAncilla);
        self.tracker.alloc_ancilla(r)?;
        self.emit(Instruction::AllocAncilla { qubit: r });
        Ok(r)
    }

    pub fn alloc_magic(&mut self, angle: f64) -> Result<QubitRef> {
        let r = self.fresh(QubitKind::MagicAncilla);
        self.tracker.alloc_magic(r, angle)?;
        self.emit(Instruction::AllocMagic { qubit: r, angle });
        Ok(r)
    }

    pub fn alloc_work(&mut self) -> Result<QubitRef> {
        let r = self.fresh(QubitKind::Work);
        self.tracker.alloc_work(r)?;
        self.emit(Instruction::AllocWork { qubit: r });
        Ok(r)
    }

    pub fn release_work(&mut self, r: QubitRef) -> Result<()> {
        self.tracker.release_work(r)?;
        self.emit(Instruction::ReleaseWork { qubit: r });
        Ok(())
    }

    /// Controlled Pauli from a gate ancilla onto a logical or work qubit.
    pub fn cpauli(&mut self, ancilla: QubitRef, target: QubitRef, letter: Letter) -> Result<()> {
        if !ancilla.kind.is_ancilla() || target.kind.is_ancilla() {
            return Err(QgateError::MalformedProgram(format!("cpauli {ancilla} -> {target}")));
        }
        let g = Clifford::controlled(letter, self.pos(ancilla)?, self.pos(target)?)
            .ok_or_else(|| QgateError::InvalidArgument("controlled identity".into()))?;
        self.tracker.apply_clifford(g)?;
        self.emit(Instruction::CPauli { control: ancilla, target, letter });
        Ok(())
    }

    /// CNOT between two ancillas.
    pub fn ancilla_cx(&mut self, control: QubitRef, target: QubitRef) -> Result<()> {
        if !control.kind.is_ancilla() || !target.kind.is_ancilla() {
            return Err(QgateError::MalformedProgram(format!("ancilla_cx {control} -> {target}")));
        }
        self.tracker.apply_clifford(Clifford::CX(self.pos(control)?, self.pos(target)?))?;
        self.emit(Instruction::AncillaCx { control, target });
        Ok(())
    }

    pub fn clifford(&mut self, qubit: QubitRef, gate: CliffordGate) -> Result<()> {
        self.tracker.apply_clifford(gate.clifford(self.pos(qubit)?))?;
        self.emit(Instruction::SingleClifford { qubit, gate });
        Ok(())
    }

    /// Rotated measurement; the by-product comes from the ancilla's current row.
    pub fn measure_rotated(&mut self, ancilla: QubitRef, angle: f64) -> Result<()> {
        if !angle.is_finite() {
            return Err(QgateError::NonFinite(format!("rotation angle {angle}")));
        }
        let (_, byproduct, _) = self.tracker.measure_rotated(ancilla)?;
        self.emit(Instruction::MeasureRotated { qubit: ancilla, angle, byproduct });
        Ok(())
    }

    /// X measurement that hands the ancilla's row to its magic partner.
    pub fn measure_x(&mut self, ancilla: QubitRef) -> Result<QubitRef> {
        let (_, m) = self.tracker.measure_x(ancilla, 0)?;
        self.emit(Instruction::MeasureX { qubit: ancilla });
        Ok(m)
    }

    /// Move the entanglement of `from` onto `to`: afterwards the row of `to` is
    /// `X_to P_to P_from`. The two logical parts must commute.
    pub fn transfer_entanglement(&mut self, from: QubitRef, to: QubitRef) -> Result<()> {
        let strip = |b: &Self, r: QubitRef| -> Result<PauliString> {
            let row = b.tracker.row(r).ok_or_else(|| QgateError::InvalidTransfer(format!("{r} owns no row")))?;
            let mut s = row.clone();
            for (p, q) in b.tracker.live().iter().enumerate() {
                if q.kind.is_ancilla() {
                    s.set_letter(p, Letter::I);
                }
            }
            Ok(s)
        };
        let (pf, pt) = (strip(self, from)?, strip(self, to)?);
        if !pf.commutes(&pt)? {
            return Err(QgateError::InvalidTransfer(format!("logical parts of {from} and {to} anticommute")));
        }
        self.ancilla_cx(to, from)
    }

    /// Single-ancilla rotation `exp(iφP/2)` for `P` a Hermitian string over
    /// (ref, letter) pairs on logical or work qubits. A negative sign flips φ.
    pub fn rotation_on(&mut self, ops: &[(QubitRef, Letter)], negative: bool, angle: f64) -> Result<()> {
        let ops: Vec<_> = ops.iter().copied().filter(|(_, l)| *l != Letter::I).collect();
        if ops.is_empty() {
            return Err(QgateError::InvalidArgument("rotation about the identity".into()));
        }
        let a = self.alloc_ancilla()?;
        for (q, l) in ops {
            self.cpauli(a, q, l)?;
        }
        self.measure_rotated(a, if negative { -angle } else { angle })
    }

    /// `exp(iφP/2)` on the logical register. Identity strings become a global phase.
    pub fn pauli_rotation(&mut self, p: &PauliString, angle: f64) -> Result<()> {
        if p.n_qubits() != self.n_logical {
            return Err(QgateError::Dimension(format!(
                "{}-qubit string on {} logical qubits",
                p.n_qubits(),
                self.n_logical
            )));
        }
        if !p.is_hermitian() {
            return Err(QgateError::InvalidArgument(format!("{p} is not Hermitian")));
        }
        let negative = p.phase_exponent() == 2;
        if p.is_identity_letters() {
            self.global_phase += if negative { -angle } else { angle } / 2.0;
            return Ok(());
        }
        let ops: Vec<_> = p.support().into_iter().map(|q| (QubitRef::logical(q), p.letter(q))).collect();
        self.rotation_on(&ops, negative, angle)
    }

    /// Magic-state variant of a prepared ancilla: entangle `A` with a magic qubit
    /// holding angle θ, then hand off with an X measurement. The caller still
    /// owes the rotated measurement of the returned magic qubit.
    pub fn teleport_rotation(&mut self, ancilla: QubitRef, theta: f64) -> Result<QubitRef> {
        let m = self.alloc_magic(theta)?;
        self.ancilla_cx(ancilla, m)?;
        let got = self.measure_x(ancilla)?;
        debug_assert_eq!(got, m);
        Ok(m)
    }

    /// Run `f` with emission redirected into a fresh body and return it.
    /// Tracking inside `f` is discarded; `controlled_block` replays the body.
    pub fn capture(&mut self, f: impl FnOnce(&mut Self) -> Result<()>) -> Result<Vec<Instruction>> {
        let saved = self.tracker.clone();
        self.stack.push(Vec::new());
        let res = f(self);
        let body = self.stack.pop().expect("pushed above");
        self.tracker = saved;
        res.map(|_| body)
    }

    /// Emit a controlled block whose body must not touch the controls.
    pub fn controlled_block(&mut self, controls: Vec<Control>, body: Vec<Instruction>) -> Result<()> {
        let i = Instruction::Controlled { controls, body };
        self.tracker.apply_instruction(&i)?;
        self.emit(i);
        Ok(())
    }

    /// Append another program on the same logical register, relabeling its ancillas.
    pub fn append_program(&mut self, other: &QGateProgram) -> Result<()> {
        if other.n_logical != self.n_logical {
            return Err(QgateError::Dimension(format!("{} vs {} logical qubits", other.n_logical, self.n_logical)));
        }
        let shifted = QGateProgram {
            version: PROGRAM_VERSION,
            name: String::new(),
            source: String::new(),
            n_logical: self.n_logical,
            global_phase: 0.0,
            warnings: Vec::new(),
            instructions: self.stack[0].clone(),
        }
        .relabeled_for_append(other);
        let mut touched = std::collections::BTreeSet::new();
        for i in &shifted {
            i.allocations(&mut touched);
        }
        for r in &touched {
            let slot = match r.kind {
                QubitKind::GateAncilla => 0,
                QubitKind::MagicAncilla => 1,
                QubitKind::Work => 2,
                QubitKind::Logical => continue,
            };
            self.next[slot] = self.next[slot].max(r.index + 1);
        }
        for i in shifted {
            self.tracker.apply_instruction(&i)?;
            self.emit(i);
        }
        self.global_phase += other.global_phase;
        self.warnings.extend(other.warnings.iter().cloned());
        Ok(())
    }

    /// Emit an already-formed instruction after replaying it on the tracker.
    /// Refs must not collide with ones this builder hands out later.
    pub fn push_tracked(&mut self, i: Instruction) -> Result<()> {
        self.tracker.apply_instruction(&i)?;
        let mut born = std::collections::BTreeSet::new();
        i.allocations(&mut born);
        for r in born {
            let slot = match r.kind {
                QubitKind::GateAncilla => 0,
                QubitKind::MagicAncilla => 1,
                QubitKind::Work => 2,
                QubitKind::Logical => continue,
            };
            self.next[slot] = self.next[slot].max(r.index + 1);
        }
        self.emit(i);
        Ok(())
    }

    /// Finish; every ancilla must be measured and every work qubit released.
    pub fn build(self) -> Result<QGateProgram> {
        if self.stack.len() != 1 {
            return Err(QgateError::InternalConsistency("unclosed capture".into()));
        }
        self.tracker.finish()?;
        if !self.global_phase.is_finite() {
            return Err(QgateError::NonFinite("global phase".into()));
        }
        Ok(QGateProgram {
            version: PROGRAM_VERSION,
            name: self.name,
            source: self.source,
            n_logical: self.n_logical,
            global_phase: self.global_phase,
            warnings: self.warnings,
            instructions: self.stack.into_iter().next().expect("one level"),
        })
    }
}

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{QgateError, Result};
use crate::pauli::{Letter, PauliString};
use crate::stabilizer::{Clifford, StabilizerTableau};

use super::{ByProduct, Instruction, QubitKind, QubitRef};

/// Live register layout plus the stabilizer rows owned by live ancillas.
///
/// Positions are assigned in allocation order: logical qubits first, every
/// later allocation is appended. Measurement or release removes the column.
/// Rows are kept canonical: no row has an X component on another row's owner.
#[derive(Clone, Debug)]
pub struct RegisterTracker {
    n_logical: usize,
    live: Vec<QubitRef>,
    tableau: StabilizerTableau,
    owners: Vec<QubitRef>,
    magic: BTreeMap<QubitRef, f64>,
    seen: BTreeSet<QubitRef>,
    retired: BTreeSet<QubitRef>,
}

impl RegisterTracker {
    pub fn new(n_logical: usize) -> Self {
        let live: Vec<QubitRef> = (0..n_logical).map(QubitRef::logical).collect();
        RegisterTracker {
            n_logical,
            seen: live.iter().copied().collect(),
            live,
            tableau: StabilizerTableau::empty(n_logical),
            owners: Vec::new(),
            magic: BTreeMap::new(),
            retired: BTreeSet::new(),
        }
    }

    pub fn n_logical(&self) -> usize {
        self.n_logical
    }

    /// Refs in position order.
    pub fn live(&self) -> &[QubitRef] {
        &self.live
    }

    pub fn tableau(&self) -> &StabilizerTableau {
        &self.tableau
    }

    pub fn labels(&self) -> Vec<String> {
        self.live.iter().map(|r| r.to_string()).collect()
    }

    pub fn is_live(&self, r: QubitRef) -> bool {
        self.live.contains(&r)
    }

    pub fn was_allocated(&self, r: QubitRef) -> bool {
        self.seen.contains(&r)
    }

    pub fn is_retired(&self, r: QubitRef) -> bool {
        self.retired.contains(&r)
    }

    pub fn position(&self, r: QubitRef) -> Result<usize> {
        if let Some(p) = self.live.iter().position(|&q| q == r) {
            return Ok(p);
        }
        if self.retired.contains(&r) {
            Err(QgateError::MalformedProgram(format!("{r} used after it was measured or released")))
        } else {
            Err(QgateError::MalformedProgram(format!("{r} used before allocation")))
        }
    }

    pub fn row_of(&self, r: QubitRef) -> Option<usize> {
        self.owners.iter().position(|&o| o == r)
    }

    /// Row owned by `r`, if any.
    pub fn row(&self, r: QubitRef) -> Option<&PauliString> {
        self.row_of(r).map(|i| self.tableau.generator(i))
    }

    pub fn magic_angle(&self, r: QubitRef) -> Option<f64> {
        self.magic.get(&r).copied()
    }

    fn push_column(&mut self, r: QubitRef, expected: QubitKind) -> Result<usize> {
        if r.kind != expected {
            return Err(QgateError::MalformedProgram(format!("{r} allocated as {expected:?}")));
        }
        if !self.seen.insert(r) {
            return Err(QgateError::MalformedProgram(format!("{r} allocated twice")));
        }
        self.live.push(r);
        self.tableau.add_qubit();
        Ok(self.live.len() - 1)
    }

    /// Gate ancilla in |+⟩ with row `X_A`.
    pub fn alloc_ancilla(&mut self, r: QubitRef) -> Result<usize> {
        let pos = self.push_column(r, QubitKind::GateAncilla)?;
        self.tableau.push(PauliString::single(self.live.len(), pos, Letter::X))?;
        self.owners.push(r);
        Ok(pos)
    }

    /// Magic ancilla; carries no row until a handoff.
    pub fn alloc_magic(&mut self, r: QubitRef, angle: f64) -> Result<usize> {
        if !angle.is_finite() {
            return Err(QgateError::NonFinite(format!("magic angle {angle}")));
        }
        let pos = self.push_column(r, QubitKind::MagicAncilla)?;
        self.magic.insert(r, angle);
        Ok(pos)
    }

    pub fn alloc_work(&mut self, r: QubitRef) -> Result<usize> {
        self.push_column(r, QubitKind::Work)
    }

    fn drop_column(&mut self, r: QubitRef, pos: usize) -> Result<()> {
        self.tableau.remove_qubit(pos)?;
        self.live.remove(pos);
        self.retired.insert(r);
        Ok(())
    }

    fn touches(&self, pos: usize, skip: Option<usize>) -> Option<usize> {
        (0..self.tableau.len()).find(|&i| Some(i) != skip && self.tableau.generator(i).letter(pos) != Letter::I)
    }

    /// Release a work qubit; no row may still act on it.
    pub fn release_work(&mut self, r: QubitRef) -> Result<usize> {
        if r.kind != QubitKind::Work {
            return Err(QgateError::MalformedProgram(format!("release of non-work qubit {r}")));
        }
        let pos = self.position(r)?;
        if let Some(i) = self.touches(pos, None) {
            return Err(QgateError::FrameMismatch(format!("row of {} still acts on {r}", self.owners[i])));
        }
        self.drop_column(r, pos)?;
        Ok(pos)
    }

    /// Conjugate rows by a Clifford given in positions, then re-canonicalize.
    pub fn apply_clifford(&mut self, gate: Clifford) -> Result<()> {
        self.tableau.conjugate_in_place(gate)?;
        self.canonicalize()
    }

    fn canonicalize(&mut self) -> Result<()> {
        for i in 0..self.owners.len() {
            let pi = self.position(self.owners[i])?;
            if !self.tableau.generator(i).x_bit(pi) {
                continue;
            }
            for j in 0..self.owners.len() {
                if j != i && self.tableau.generator(j).x_bit(pi) {
                    self.tableau.recombine_in_place(j, i)?;
                }
            }
        }
        Ok(())
    }

    /// Row of `r` validated for measurement: `X_r ⊗ rest`, no other row acting on `r`.
    fn measurable_row(&self, r: QubitRef) -> Result<(usize, usize, PauliString)> {
        let pos = self.position(r)?;
        let i = self.row_of(r).ok_or_else(|| QgateError::FrameMismatch(format!("{r} owns no stabilizer row")))?;
        let row = self.tableau.generator(i);
        if row.letter(pos) != Letter::X {
            return Err(QgateError::FrameMismatch(format!("row of {r} has {} on its own qubit", row.letter(pos))));
        }
        if let Some(j) = self.touches(pos, Some(i)) {
            return Err(QgateError::FrameMismatch(format!("row of {} acts on {r}", self.owners[j])));
        }
        let mut rest = row.clone();
        rest.set_letter(pos, Letter::I);
        Ok((i, pos, rest))
    }

    fn to_byproduct(&self, rest: &PauliString) -> Result<ByProduct> {
        let mut ops = BTreeMap::new();
        for q in rest.support() {
            ops.insert(self.live[q], rest.letter(q));
        }
        ByProduct::from_ops(self.n_logical, rest.phase_exponent(), &ops)
    }

    /// By-product a rotated measurement of `r` would carry right now.
    pub fn byproduct(&self, r: QubitRef) -> Result<ByProduct> {
        let (_, _, rest) = self.measurable_row(r)?;
        self.to_byproduct(&rest)
    }

    /// Remove `r` after a rotated measurement. Returns its position, the by-product,
    /// and the by-product as a string over the remaining positions.
    pub fn measure_rotated(&mut self, r: QubitRef) -> Result<(usize, ByProduct, PauliString)> {
        let (i, pos, rest) = self.measurable_row(r)?;
        let bp = self.to_byproduct(&rest)?;
        self.tableau.remove(i);
        self.owners.remove(i);
        self.drop_column(r, pos)?;
        let (rest, _) = rest.remove_qubit(pos);
        Ok((pos, bp, rest))
    }

    /// The magic qubit the row of `r` would hand off to.
    pub fn handoff_target(&self, r: QubitRef) -> Result<QubitRef> {
        let (_, _, rest) = self.measurable_row(r)?;
        let magics: Vec<usize> =
            rest.support().into_iter().filter(|&q| self.live[q].kind == QubitKind::MagicAncilla).collect();
        match magics.as_slice() {
            [m] if rest.letter(*m) == Letter::X && self.row_of(self.live[*m]).is_none() => Ok(self.live[*m]),
            _ => Err(QgateError::FrameMismatch(format!("row of {r} is not of the form X_{r} X_M L"))),
        }
    }

    /// X-basis measurement of `r` with ideal outcome `mu`: the row becomes `(−1)^μ X_M L`
    /// owned by the magic qubit. Returns `(position of r, magic ref)`.
    pub fn measure_x(&mut self, r: QubitRef, mu: u8) -> Result<(usize, QubitRef)> {
        let m = self.handoff_target(r)?;
        let (i, pos, rest) = self.measurable_row(r)?;
        let rest = if mu == 1 { rest.negated() } else { rest };
        self.tableau.set(i, rest);
        self.owners[i] = m;
        self.drop_column(r, pos)?;
        self.canonicalize()?;
        Ok((pos, m))
    }

    pub fn negate_row(&mut self, r: QubitRef) -> Result<()> {
        let i = self.row_of(r).ok_or_else(|| QgateError::InternalConsistency(format!("{r} owns no row")))?;
        let g = self.tableau.generator(i).negated();
        self.tableau.set(i, g);
        Ok(())
    }

    /// Whether any row acts on one of `positions`.
    pub fn rows_touch(&self, positions: &[usize]) -> bool {
        positions.iter().any(|&p| self.touches(p, None).is_some())
    }

    /// Replay one instruction's effect on the layout and rows (ideal outcomes).
    pub fn apply_instruction(&mut self, i: &Instruction) -> Result<()> {
        match i {
            Instruction::AllocLogical { count } => {
                if *count == self.n_logical {
                    Ok(())
                } else {
                    Err(QgateError::MalformedProgram(format!(
                        "alloc_logical {count} in a {}-qubit program",
                        self.n_logical
                    )))
                }
            }
            Instruction::AllocAncilla { qubit } => self.alloc_ancilla(*qubit).map(|_| ()),
            Instruction::AllocMagic { qubit, angle } => self.alloc_magic(*qubit, *angle).map(|_| ()),
            Instruction::AllocWork { qubit } => self.alloc_work(*qubit).map(|_| ()),
            Instruction::ReleaseWork { qubit } => self.release_work(*qubit).map(|_| ()),
            Instruction::CPauli { control, target, letter } => {
                if !control.kind.is_ancilla() || target.kind.is_ancilla() {
                    return Err(QgateError::MalformedProgram(format!("cpauli {control} -> {target}")));
                }
                let g = Clifford::controlled(*letter, self.position(*control)?, self.position(*target)?)
                    .ok_or_else(|| QgateError::MalformedProgram("controlled identity".into()))?;
                self.apply_clifford(g)
            }
            Instruction::AncillaCx { control, target } => {
                if !control.kind.is_ancilla() || !target.kind.is_ancilla() {
                    return Err(QgateError::MalformedProgram(format!("ancilla_cx {control} -> {target}")));
                }
                self.apply_clifford(Clifford::CX(self.position(*control)?, self.position(*target)?))
            }
            Instruction::SingleClifford { qubit, gate } => self.apply_clifford(gate.clifford(self.position(*qubit)?)),
            Instruction::MeasureRotated { qubit, angle, byproduct } => {
                if !angle.is_finite() {
                    return Err(QgateError::NonFinite(format!("rotation angle {angle}")));
                }
                let bp = self.byproduct(*qubit)?;
                if &bp != byproduct {
                    return Err(QgateError::FrameMismatch(format!(
                        "{qubit}: recorded by-product {byproduct}, tracked {bp}"
                    )));
                }
                self.measure_rotated(*qubit).map(|_| ())
            }
            Instruction::MeasureX { qubit } => self.measure_x(*qubit, 0).map(|_| ()),
            Instruction::Controlled { controls, body } => {
                let mut positions = Vec::new();
                for c in controls {
                    if c.key > 1 {
                        return Err(QgateError::MalformedProgram(format!("control key {}", c.key)));
                    }
                    positions.push(self.position(c.qubit)?);
                }
                let mut used = BTreeSet::new();
                let mut born = BTreeSet::new();
                for b in body {
                    b.refs(&mut used);
                    b.allocations(&mut born);
                }
                for c in controls {
                    if used.contains(&c.qubit) {
                        return Err(QgateError::MalformedProgram(format!(
                            "control {} used inside its own block",
                            c.qubit
                        )));
                    }
                }
                if let Some(g) = controlled_clifford(controls, body) {
                    let pc = positions[0];
                    let (letter, target) = g;
                    let g = Clifford::controlled(letter, pc, self.position(target)?).expect("non-identity");
                    if controls[0].key == 0 {
                        self.apply_clifford(Clifford::X(pc))?;
                    }
                    self.apply_clifford(g)?;
                    if controls[0].key == 0 {
                        self.apply_clifford(Clifford::X(pc))?;
                    }
                    return Ok(());
                }
                for r in used.difference(&born) {
                    positions.push(self.position(*r)?);
                }
                if self.rows_touch(&positions) {
                    return Err(QgateError::MalformedProgram(
                        "non-Clifford controlled block acts on qubits entangled with a live ancilla".into(),
                    ));
                }
                for b in body {
                    self.apply_instruction(b)?;
                }
                Ok(())
            }
        }
    }

    /// Error unless only logical qubits remain live.
    pub fn finish(&self) -> Result<()> {
        let leftover: Vec<String> = self.live[self.n_logical..].iter().map(|r| r.to_string()).collect();
        if leftover.is_empty() {
            Ok(())
        } else {
            Err(QgateError::MalformedProgram(format!("qubits never measured or released: {}", leftover.join(", "))))
        }
    }
}

/// `(letter, target)` when a block is a singly-controlled Pauli gate.
pub(crate) fn controlled_clifford(controls: &[super::Control], body: &[Instruction]) -> Option<(Letter, QubitRef)> {
    match (controls, body) {
        ([_], [Instruction::SingleClifford { qubit, gate }]) => gate.as_letter().map(|l| (l, *qubit)),
        _ => None,
    }
}

//! QGATE program representation, builder, validator and executor.

mod builder;
mod execute;
mod register;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{QgateError, Result};
use crate::pauli::{Letter, PauliString};
use crate::stabilizer::Clifford;
use crate::statevector::Gate;

pub use builder::ProgramBuilder;
pub use execute::{
    execute, execute_one, execute_with, max_branch_deviation, program_unitary, ExecMode, ExecOptions, ExecutionResult,
    FramePolicy, OutcomeRecord, TeleportPolicy,
};
pub use register::RegisterTracker;
pub use validate::{validate, Diagnostic, DiagnosticKind};

/// Current JSON schema version.
pub const PROGRAM_VERSION: u32 = 1;

/// Role of a qubit inside a program.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QubitKind {
    Logical,
    GateAncilla,
    MagicAncilla,
    Work,
}

impl QubitKind {
    fn prefix(self) -> char {
        match self {
            QubitKind::Logical => 'L',
            QubitKind::GateAncilla => 'A',
            QubitKind::MagicAncilla => 'M',
            QubitKind::Work => 'W',
        }
    }

    /// Gate or magic ancilla.
    pub fn is_ancilla(self) -> bool {
        matches!(self, QubitKind::GateAncilla | QubitKind::MagicAncilla)
    }
}

/// Program-scoped qubit name, printed as `L0`, `A3`, `M1`, `W0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitRef {
    pub kind: QubitKind,
    pub index: u32,
}

impl QubitRef {
    pub fn logical(i: usize) -> Self {
        QubitRef { kind: QubitKind::Logical, index: i as u32 }
    }
    pub fn ancilla(i: u32) -> Self {
        QubitRef { kind: QubitKind::GateAncilla, index: i }
    }
    pub fn magic(i: u32) -> Self {
        QubitRef { kind: QubitKind::MagicAncilla, index: i }
    }
    pub fn work(i: u32) -> Self {
        QubitRef { kind: QubitKind::Work, index: i }
    }
}

impl fmt::Display for QubitRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.prefix(), self.index)
    }
}

impl FromStr for QubitRef {
    type Err = QgateError;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || QgateError::Parse { line: 0, message: format!("bad qubit reference {s:?}") };
        let mut chars = s.chars();
        let kind = match chars.next().ok_or_else(bad)? {
            'L' => QubitKind::Logical,
            'A' => QubitKind::GateAncilla,
            'M' => QubitKind::MagicAncilla,
            'W' => QubitKind::Work,
            _ => return Err(bad()),
        };
        let index = chars.as_str().parse::<u32>().map_err(|_| bad())?;
        Ok(QubitRef { kind, index })
    }
}

impl Serialize for QubitRef {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for QubitRef {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Single-qubit Clifford gates available as instructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CliffordGate {
    H,
    S,
    Sdg,
    X,
    Y,
    Z,
}

impl CliffordGate {
    pub fn gate(self) -> Gate {
        match self {
            CliffordGate::H => Gate::H,
            CliffordGate::S => Gate::S,
            CliffordGate::Sdg => Gate::Sdg,
            CliffordGate::X => Gate::X,
            CliffordGate::Y => Gate::Y,
            CliffordGate::Z => Gate::Z,
        }
    }

    pub fn clifford(self, q: usize) -> Clifford {
        match self {
            CliffordGate::H => Clifford::H(q),
            CliffordGate::S => Clifford::S(q),
            CliffordGate::Sdg => Clifford::Sdg(q),
            CliffordGate::X => Clifford::X(q),
            CliffordGate::Y => Clifford::Y(q),
            CliffordGate::Z => Clifford::Z(q),
        }
    }

    pub fn from_letter(l: Letter) -> Option<CliffordGate> {
        match l {
            Letter::X => Some(CliffordGate::X),
            Letter::Y => Some(CliffordGate::Y),
            Letter::Z => Some(CliffordGate::Z),
            Letter::I => None,
        }
    }

    pub fn as_letter(self) -> Option<Letter> {
        match self {
            CliffordGate::X => Some(Letter::X),
            CliffordGate::Y => Some(Letter::Y),
            CliffordGate::Z => Some(Letter::Z),
            _ => None,
        }
    }
}

/// By-product operator of a rotated measurement: a signed Pauli string over the
/// logical register plus optional letters on work qubits.
///
/// Text form: `ZIXZX`, `-ZIXZX`, or `IZ;W0=X,W2=Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ByProduct {
    pub logical: PauliString,
    pub work: Vec<(u32, Letter)>,
}

impl ByProduct {
    pub fn logical_only(p: PauliString) -> Self {
        ByProduct { logical: p, work: Vec::new() }
    }

    /// Sparse (ref, letter) view and the sign (phase exponent).
    pub fn ops(&self) -> (u8, BTreeMap<QubitRef, Letter>) {
        let mut m = BTreeMap::new();
        for q in self.logical.support() {
            m.insert(QubitRef::logical(q), self.logical.letter(q));
        }
        for &(w, l) in &self.work {
            if l != Letter::I {
                m.insert(QubitRef::work(w), l);
            }
        }
        (self.logical.phase_exponent(), m)
    }

    /// Build from a sparse view over `n_logical` logical qubits.
    pub fn from_ops(n_logical: usize, phase: u8, ops: &BTreeMap<QubitRef, Letter>) -> Result<Self> {
        let mut logical = PauliString::identity(n_logical).with_phase(phase);
        let mut work = Vec::new();
        for (r, &l) in ops {
            match r.kind {
                QubitKind::Logical if (r.index as usize) < n_logical => logical.set_letter(r.index as usize, l),
                QubitKind::Work => work.push((r.index, l)),
                _ => return Err(QgateError::FrameMismatch(format!("by-product acts on {r}"))),
            }
        }
        work.sort();
        Ok(ByProduct { logical, work })
    }
}

impl fmt::Display for ByProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.logical)?;
        if !self.work.is_empty() {
            let parts: Vec<String> = self.work.iter().map(|(w, l)| format!("W{w}={l}")).collect();
            write!(f, ";{}", parts.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for ByProduct {
    type Err = QgateError;
    fn from_str(s: &str) -> Result<Self> {
        let (head, tail) = match s.split_once(';') {
            Some((h, t)) => (h, Some(t)),
            None => (s, None),
        };
        let logical: PauliString = head.parse()?;
        let mut work = Vec::new();
        if let Some(t) = tail {
            for part in t.split(',') {
                let (r, l) = part
                    .split_once('=')
                    .ok_or_else(|| QgateError::Parse { line: 0, message: format!("bad work letter {part:?}") })?;
                let r: QubitRef = r.trim().parse()?;
                if r.kind != QubitKind::Work {
                    return Err(QgateError::Parse { line: 0, message: format!("{r} is not a work qubit") });
                }
                let l = l
                    .trim()
                    .chars()
                    .next()
                    .and_then(Letter::from_char)
                    .ok_or_else(|| QgateError::Parse { line: 0, message: format!("bad letter in {part:?}") })?;
                work.push((r.index, l));
            }
        }
        work.sort();
        Ok(ByProduct { logical, work })
    }
}

impl Serialize for ByProduct {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ByProduct {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Control of a `Controlled` block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Control {
    pub qubit: QubitRef,
    pub key: u8,
}

/// One program instruction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Instruction {
    AllocLogical {
        count: usize,
    },
    /// Gate ancilla prepared in |+⟩.
    AllocAncilla {
        qubit: QubitRef,
    },
    /// Magic ancilla prepared in `cos(θ/2)|0⟩ + i sin(θ/2)|1⟩`.
    AllocMagic {
        qubit: QubitRef,
        angle: f64,
    },
    /// Work qubit prepared in |0⟩; must be returned to |0⟩ before release.
    AllocWork {
        qubit: QubitRef,
    },
    ReleaseWork {
        qubit: QubitRef,
    },
    #[serde(rename = "cpauli")]
    CPauli {
        control: QubitRef,
        target: QubitRef,
        letter: Letter,
    },
    #[serde(rename = "ancilla_cx")]
    AncillaCx {
        control: QubitRef,
        target: QubitRef,
    },
    SingleClifford {
        qubit: QubitRef,
        gate: CliffordGate,
    },
    /// Rotate the ancilla by `exp(iφX/2)`, measure Z, correct with `byproduct^μ`.
    MeasureRotated {
        qubit: QubitRef,
        angle: f64,
        byproduct: ByProduct,
    },
    /// X-basis measurement handing the ancilla's stabilizer over to a magic qubit.
    MeasureX {
        qubit: QubitRef,
    },
    /// Body applied iff every control matches its key.
    Controlled {
        controls: Vec<Control>,
        body: Vec<Instruction>,
    },
}

impl Instruction {
    /// Refs referenced by this instruction (including nested bodies).
    pub fn refs(&self, out: &mut BTreeSet<QubitRef>) {
        match self {
            Instruction::AllocLogical { .. } => {}
            Instruction::AllocAncilla { qubit }
            | Instruction::AllocMagic { qubit, .. }
            | Instruction::AllocWork { qubit }
            | Instruction::ReleaseWork { qubit }
            | Instruction::SingleClifford { qubit, .. }
            | Instruction::MeasureX { qubit } => {
                out.insert(*qubit);
            }
            Instruction::MeasureRotated { qubit, byproduct, .. } => {
                out.insert(*qubit);
                out.extend(byproduct.ops().1.into_keys());
            }
            Instruction::CPauli { control, target, .. } | Instruction::AncillaCx { control, target } => {
                out.insert(*control);
                out.insert(*target);
            }
            Instruction::Controlled { controls, body } => {
                out.extend(controls.iter().map(|c| c.qubit));
                for i in body {
                    i.refs(out);
                }
            }
        }
    }

    /// Refs allocated by this instruction (including nested bodies).
    pub fn allocations(&self, out: &mut BTreeSet<QubitRef>) {
        match self {
            Instruction::AllocAncilla { qubit }
            | Instruction::AllocMagic { qubit, .. }
            | Instruction::AllocWork { qubit } => {
                out.insert(*qubit);
            }
            Instruction::Controlled { body, .. } => {
                for i in body {
                    i.allocations(out);
                }
            }
            _ => {}
        }
    }

    fn map_refs(&self, f: &mut impl FnMut(QubitRef) -> QubitRef) -> Instruction {
        let bp = |b: &ByProduct, f: &mut dyn FnMut(QubitRef) -> QubitRef| {
            let work = b.work.iter().map(|&(w, l)| (f(QubitRef::work(w)).index, l)).collect();
            ByProduct { logical: b.logical.clone(), work }
        };
        match self {
            Instruction::AllocLogical { count } => Instruction::AllocLogical { count: *count },
            Instruction::AllocAncilla { qubit } => Instruction::AllocAncilla { qubit: f(*qubit) },
            Instruction::AllocMagic { qubit, angle } => Instruction::AllocMagic { qubit: f(*qubit), angle: *angle },
            Instruction::AllocWork { qubit } => Instruction::AllocWork { qubit: f(*qubit) },
            Instruction::ReleaseWork { qubit } => Instruction::ReleaseWork { qubit: f(*qubit) },
            Instruction::CPauli { control, target, letter } => {
                Instruction::CPauli { control: f(*control), target: f(*target), letter: *letter }
            }
            Instruction::AncillaCx { control, target } => {
                Instruction::AncillaCx { control: f(*control), target: f(*target) }
            }
            Instruction::SingleClifford { qubit, gate } => {
                Instruction::SingleClifford { qubit: f(*qubit), gate: *gate }
            }
            Instruction::MeasureRotated { qubit, angle, byproduct } => {
                let q = f(*qubit);
                Instruction::MeasureRotated { qubit: q, angle: *angle, byproduct: bp(byproduct, f) }
            }
            Instruction::MeasureX { qubit } => Instruction::MeasureX { qubit: f(*qubit) },
            Instruction::Controlled { controls, body } => Instruction::Controlled {
                controls: controls.iter().map(|c| Control { qubit: f(c.qubit), key: c.key }).collect(),
                body: body.iter().map(|i| i.map_refs(f)).collect(),
            },
        }
    }
}

/// A compiled QGATE program.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QGateProgram {
    pub version: u32,
    pub name: String,
    pub source: String,
    pub n_logical: usize,
    /// Accumulated global phase `e^{iγ}` from identity terms, in radians.
    #[serde(default)]
    pub global_phase: f64,
    /// Non-fatal notes emitted during compilation.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub instructions: Vec<Instruction>,
}

impl QGateProgram {
    /// Program that does nothing on `n_logical` qubits.
    pub fn empty(n_logical: usize) -> Self {
        QGateProgram {
            version: PROGRAM_VERSION,
            name: String::new(),
            source: String::new(),
            n_logical,
            global_phase: 0.0,
            warnings: Vec::new(),
            instructions: vec![Instruction::AllocLogical { count: n_logical }],
        }
    }

    pub fn with_metadata(mut self, name: impl Into<String>, source: impl Into<String>) -> Self {
        self.name = name.into();
        self.source = source.into();
        self
    }

    /// All instructions in execution order, bodies flattened after their header.
    pub fn walk(&self) -> Vec<&Instruction> {
        fn rec<'a>(is: &'a [Instruction], out: &mut Vec<&'a Instruction>) {
            for i in is {
                out.push(i);
                if let Instruction::Controlled { body, .. } = i {
                    rec(body, out);
                }
            }
        }
        let mut out = Vec::new();
        rec(&self.instructions, &mut out);
        out
    }

    /// Serialize to pretty JSON.
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| QgateError::Io(e.to_string()))
    }

    /// Parse from JSON.
    pub fn from_json(s: &str) -> Result<Self> {
        let p: QGateProgram =
            serde_json::from_str(s).map_err(|e| QgateError::Parse { line: e.line(), message: e.to_string() })?;
        if p.version != PROGRAM_VERSION {
            return Err(QgateError::Parse { line: 0, message: format!("unsupported program version {}", p.version) });
        }
        Ok(p)
    }

    /// Largest index used per non-logical kind.
    fn next_indices(&self) -> BTreeMap<QubitKind, u32> {
        let mut refs = BTreeSet::new();
        for i in &self.instructions {
            i.refs(&mut refs);
        }
        let mut m = BTreeMap::new();
        for r in refs {
            let e = m.entry(r.kind).or_insert(0);
            *e = (*e).max(r.index + 1);
        }
        m
    }

    /// Instructions of `other` with every non-logical ref shifted past those used here.
    pub fn relabeled_for_append(&self, other: &QGateProgram) -> Vec<Instruction> {
        let offsets = self.next_indices();
        let mut f = |r: QubitRef| {
            if r.kind == QubitKind::Logical {
                r
            } else {
                QubitRef { kind: r.kind, index: r.index + offsets.get(&r.kind).copied().unwrap_or(0) }
            }
        };
        other
            .instructions
            .iter()
            .filter(|i| !matches!(i, Instruction::AllocLogical { .. }))
            .map(|i| i.map_refs(&mut f))
            .collect()
    }

    /// Sequential composition `other ∘ self` on the same logical register.
    pub fn append(&mut self, other: &QGateProgram) -> Result<()> {
        if other.n_logical != self.n_logical {
            return Err(QgateError::Dimension(format!(
                "appending {}-qubit program to {}",
                other.n_logical, self.n_logical
            )));
        }
        let instrs = self.relabeled_for_append(other);
        self.instructions.extend(instrs);
        self.global_phase += other.global_phase;
        self.warnings.extend(other.warnings.iter().cloned());
        Ok(())
    }

    /// Map logical qubit i to `layout[i]` in a register of `n_logical` qubits.
    pub fn embed(&self, n_logical: usize, layout: &[usize]) -> Result<QGateProgram> {
        if layout.len() != self.n_logical || layout.iter().any(|&q| q >= n_logical) {
            return Err(QgateError::InvalidArgument("embedding layout does not fit".into()));
        }
        let distinct: BTreeSet<_> = layout.iter().collect();
        if distinct.len() != layout.len() {
            return Err(QgateError::InvalidArgument("embedding layout repeats a qubit".into()));
        }
        fn remap_bp(b: &ByProduct, n: usize, layout: &[usize]) -> ByProduct {
            let mut logical = PauliString::identity(n).with_phase(b.logical.phase_exponent());
            for q in b.logical.support() {
                logical.set_letter(layout[q], b.logical.letter(q));
            }
            ByProduct { logical, work: b.work.clone() }
        }
        fn rec(is: &[Instruction], n: usize, layout: &[usize]) -> Vec<Instruction> {
            let f = |r: QubitRef| {
                if r.kind == QubitKind::Logical {
                    QubitRef::logical(layout[r.index as usize])
                } else {
                    r
                }
            };
            is.iter()
                .map(|i| match i {
                    Instruction::AllocLogical { .. } => Instruction::AllocLogical { count: n },
                    Instruction::MeasureRotated { qubit, angle, byproduct } => Instruction::MeasureRotated {
                        qubit: *qubit,
                        angle: *angle,
                        byproduct: remap_bp(byproduct, n, layout),
                    },
                    Instruction::Controlled { controls, body } => Instruction::Controlled {
                        controls: controls.iter().map(|c| Control { qubit: f(c.qubit), key: c.key }).collect(),
                        body: rec(body, n, layout),
                    },
                    other => other.map_refs(&mut |r| f(r)),
                })
                .collect()
        }
        Ok(QGateProgram {
            version: self.version,
            name: self.name.clone(),
            source: self.source.clone(),
            n_logical,
            global_phase: self.global_phase,
            warnings: self.warnings.clone(),
            instructions: rec(&self.instructions, n_logical, layout),
        })
    }
}

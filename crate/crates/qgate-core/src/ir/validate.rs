use std::fmt;

use serde::Serialize;

use crate::error::QgateError;

use super::{Instruction, QGateProgram, RegisterTracker};

/// Category of a validation finding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnosticKind {
    UseBeforeAlloc,
    UseAfterMeasure,
    DoubleAllocation,
    UnmeasuredAncilla,
    FrameMismatch,
    BadLogicalCount,
    NonFinite,
    Malformed,
}

impl DiagnosticKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticKind::UseBeforeAlloc => "use-before-alloc",
            DiagnosticKind::UseAfterMeasure => "double-measurement",
            DiagnosticKind::DoubleAllocation => "double-allocation",
            DiagnosticKind::UnmeasuredAncilla => "unmeasured-ancilla",
            DiagnosticKind::FrameMismatch => "frame-mismatch",
            DiagnosticKind::BadLogicalCount => "bad-logical-count",
            DiagnosticKind::NonFinite => "non-finite",
            DiagnosticKind::Malformed => "malformed",
        }
    }
}

/// One problem found by [`validate`], located by top-level instruction index.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostic {
    pub index: Option<usize>,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "[{}] instruction {i}: {}", self.kind.as_str(), self.message),
            None => write!(f, "[{}] {}", self.kind.as_str(), self.message),
        }
    }
}

fn classify(e: &QgateError) -> DiagnosticKind {
    match e {
        QgateError::FrameMismatch(_) => DiagnosticKind::FrameMismatch,
        QgateError::NonFinite(_) => DiagnosticKind::NonFinite,
        QgateError::MalformedProgram(m) if m.contains("before allocation") => DiagnosticKind::UseBeforeAlloc,
        QgateError::MalformedProgram(m) if m.contains("after it was measured") => DiagnosticKind::UseAfterMeasure,
        QgateError::MalformedProgram(m) if m.contains("allocated twice") => DiagnosticKind::DoubleAllocation,
        QgateError::MalformedProgram(m) if m.contains("alloc_logical") => DiagnosticKind::BadLogicalCount,
        _ => DiagnosticKind::Malformed,
    }
}

/// Static check of a program: allocation discipline, by-product consistency
/// with the tracked stabilizer rows, and that every ancilla is consumed.
/// Returns an empty list for a valid program.
pub fn validate(program: &QGateProgram) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if !program.global_phase.is_finite() {
        out.push(Diagnostic { index: None, kind: DiagnosticKind::NonFinite, message: "global phase".into() });
    }
    match program.instructions.first() {
        Some(Instruction::AllocLogical { count }) if *count == program.n_logical => {}
        _ => out.push(Diagnostic {
            index: Some(0),
            kind: DiagnosticKind::BadLogicalCount,
            message: format!("program must start with alloc_logical({})", program.n_logical),
        }),
    }
    let mut reg = RegisterTracker::new(program.n_logical);
    for (idx, ins) in program.instructions.iter().enumerate().skip(1) {
        if matches!(ins, Instruction::AllocLogical { .. }) {
            out.push(Diagnostic {
                index: Some(idx),
                kind: DiagnosticKind::BadLogicalCount,
                message: "repeated alloc_logical".into(),
            });
            continue;
        }
        // keep going after an error so later findings are reported too
        let mut trial = reg.clone();
        match trial.apply_instruction(ins) {
            Ok(()) => reg = trial,
            Err(e) => out.push(Diagnostic { index: Some(idx), kind: classify(&e), message: e.to_string() }),
        }
    }
    let leftover: Vec<String> = reg.live()[program.n_logical..].iter().map(|r| r.to_string()).collect();
    if !leftover.is_empty() {
        out.push(Diagnostic {
            index: None,
            kind: DiagnosticKind::UnmeasuredAncilla,
            message: format!("never measured or released: {}", leftover.join(", ")),
        });
    }
    out
}

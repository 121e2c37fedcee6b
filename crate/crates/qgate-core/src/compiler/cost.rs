use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{QgateError, Result};
use crate::ir::{validate, CliffordGate, Instruction, QGateProgram};

/// Resource counts of a program.
///
/// `entangling_gates` is `ancilla_logical_gates + ancilla_ancilla_gates`.
/// Controlled Cliffords on the logical register (fan-out CNOTs, ladder
/// Toffolis) are counted separately and not realized as ancilla graphs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub gate_ancillas: usize,
    pub magic_states: usize,
    pub entangling_gates: usize,
    pub ancilla_logical_gates: usize,
    pub ancilla_ancilla_gates: usize,
    pub work_qubits: usize,
    pub rotations: usize,
    pub toffoli_count: usize,
    pub cnot_count: usize,
    pub controlled_blocks: usize,
    pub single_cliffords: usize,
}

impl CostReport {
    pub const CSV_HEADER: &'static str = "gate_ancillas,magic_states,entangling_gates,ancilla_logical_gates,ancilla_ancilla_gates,work_qubits,rotations,toffoli_count,cnot_count,controlled_blocks,single_cliffords";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.gate_ancillas,
            self.magic_states,
            self.entangling_gates,
            self.ancilla_logical_gates,
            self.ancilla_ancilla_gates,
            self.work_qubits,
            self.rotations,
            self.toffoli_count,
            self.cnot_count,
            self.controlled_blocks,
            self.single_cliffords
        )
    }

    fn walk(&mut self, body: &[Instruction]) {
        for ins in body {
            match ins {
                Instruction::AllocLogical { .. } | Instruction::ReleaseWork { .. } | Instruction::MeasureX { .. } => {}
                Instruction::AllocAncilla { .. } => self.gate_ancillas += 1,
                Instruction::AllocMagic { .. } => self.magic_states += 1,
                Instruction::AllocWork { .. } => self.work_qubits += 1,
                Instruction::CPauli { .. } => self.ancilla_logical_gates += 1,
                Instruction::AncillaCx { .. } => self.ancilla_ancilla_gates += 1,
                Instruction::SingleClifford { .. } => self.single_cliffords += 1,
                Instruction::MeasureRotated { .. } => self.rotations += 1,
                Instruction::Controlled { controls, body } => {
                    let x_only = matches!(body.as_slice(), [Instruction::SingleClifford { gate: CliffordGate::X, .. }]);
                    match (x_only, controls.len()) {
                        (true, 1) => self.cnot_count += 1,
                        (true, 2) => self.toffoli_count += 1,
                        _ => {
                            self.controlled_blocks += 1;
                            self.walk(body);
                        }
                    }
                }
            }
        }
    }
}

impl fmt::Display for CostReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "gate ancillas          {}", self.gate_ancillas)?;
        writeln!(f, "magic states           {}", self.magic_states)?;
        writeln!(f, "entangling gates       {}", self.entangling_gates)?;
        writeln!(f, "  ancilla-logical      {}", self.ancilla_logical_gates)?;
        writeln!(f, "  ancilla-ancilla      {}", self.ancilla_ancilla_gates)?;
        writeln!(f, "rotations              {}", self.rotations)?;
        writeln!(f, "work qubits            {}", self.work_qubits)?;
        writeln!(f, "toffolis               {}", self.toffoli_count)?;
        writeln!(f, "cnots                  {}", self.cnot_count)?;
        writeln!(f, "controlled blocks      {}", self.controlled_blocks)?;
        write!(f, "single cliffords       {}", self.single_cliffords)
    }
}

/// Count resources of a valid program.
pub fn cost(program: &QGateProgram) -> Result<CostReport> {
    if let Some(d) = validate(program).into_iter().next() {
        return Err(QgateError::MalformedProgram(d.to_string()));
    }
    let mut r = CostReport::default();
    r.walk(&program.instructions);
    r.entangling_gates = r.ancilla_logical_gates + r.ancilla_ancilla_gates;
    Ok(r)
}

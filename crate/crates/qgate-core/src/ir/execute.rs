use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{QgateError, Result};
use crate::pauli::{Letter, PauliString};
use crate::statevector::{DenseUnitary, Gate, RecordMode, StateVector, POSTSELECTION_FLOOR};

use super::register::controlled_clifford;
use super::{Instruction, QGateProgram, QubitRef, RegisterTracker};

/// How measurement outcomes are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExecMode {
    /// Force every physical outcome to 0.
    PostselectZero,
    /// Draw outcomes from the Born rule with a seeded generator.
    Sampled(u64),
    /// Enumerate every outcome sequence with nonzero probability.
    AllBranches,
}

/// When by-product corrections reach the state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FramePolicy {
    /// Apply each correction right after its measurement.
    ApplyImmediately,
    /// Accumulate corrections in a Pauli frame, conjugate it through later
    /// Cliffords, and fold it into later rotation angles and outcomes.
    TrackToEnd,
}

/// Correction after a teleport handoff with outcome 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TeleportPolicy {
    /// `Z` on the magic qubit followed by `exp(iθX)`; exact.
    Compensate,
    /// `Z` only; leaves the rotation with the wrong sign on that branch.
    SignOnly,
}

#[derive(Clone, Debug)]
pub struct ExecOptions {
    pub mode: ExecMode,
    pub frame_policy: FramePolicy,
    pub teleport: TeleportPolicy,
    /// Check after every instruction that the tracked rows stabilize the state.
    pub debug_tableau: bool,
    /// Apply the residual frame at the end (only meaningful for `TrackToEnd`).
    pub apply_final_frame: bool,
    pub max_branches: usize,
}

impl ExecOptions {
    pub fn new(mode: ExecMode, frame_policy: FramePolicy) -> Self {
        ExecOptions {
            mode,
            frame_policy,
            teleport: TeleportPolicy::Compensate,
            debug_tableau: false,
            apply_final_frame: true,
            max_branches: 1 << 14,
        }
    }

    pub fn debug(mut self) -> Self {
        self.debug_tableau = true;
        self
    }
}

/// One measurement as it happened.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutcomeRecord {
    pub qubit: QubitRef,
    pub physical: u8,
    /// Outcome with the Pauli frame removed.
    pub ideal: u8,
    pub probability: f64,
    pub forced: bool,
}

#[derive(Clone, Debug)]
pub struct ExecutionResult {
    pub final_state: StateVector,
    pub records: Vec<OutcomeRecord>,
    /// Product of outcome probabilities along this branch.
    pub weight: f64,
    /// Frame left unapplied when `apply_final_frame` is false.
    pub residual_frame: Option<PauliString>,
}

fn inverse(p: &PauliString) -> PauliString {
    p.clone().with_phase((4 - p.phase_exponent()) % 4)
}

fn is_identity(p: &PauliString) -> bool {
    p.is_identity_letters() && p.phase_exponent() == 0
}

struct Ctx<'a> {
    opts: &'a ExecOptions,
    rng: Option<ChaCha8Rng>,
}

#[derive(Clone)]
struct Machine {
    state: StateVector,
    reg: RegisterTracker,
    /// Physical state = frame · ideal state.
    frame: PauliString,
    records: Vec<OutcomeRecord>,
    weight: f64,
}

impl Machine {
    fn measure(&mut self, r: QubitRef, pos: usize, ctx: &mut Ctx, forced: Option<u8>, fork: &mut bool) -> Result<u8> {
        let p1 = self.state.probability_one(pos)?;
        let (bit, was_forced) = match forced {
            Some(b) => (b, true),
            None => match ctx.opts.mode {
                ExecMode::PostselectZero => (0, true),
                ExecMode::Sampled(_) => {
                    let u: f64 = ctx.rng.as_mut().expect("sampled mode has a generator").random();
                    (u8::from(u < p1), false)
                }
                ExecMode::AllBranches => {
                    if 1.0 - p1 > POSTSELECTION_FLOOR {
                        *fork = p1 > POSTSELECTION_FLOOR;
                        (0, false)
                    } else {
                        (1, false)
                    }
                }
            },
        };
        let mode = if was_forced { RecordMode::Forced } else { RecordMode::Sampled };
        let (s, rec) = self.state.measure_outcome(pos, bit, mode)?;
        self.state = s;
        self.weight *= rec.probability;
        self.records.push(OutcomeRecord {
            qubit: r,
            physical: bit,
            ideal: bit,
            probability: rec.probability,
            forced: was_forced,
        });
        Ok(bit)
    }

    fn set_last_ideal(&mut self, ideal: u8) {
        if let Some(r) = self.records.last_mut() {
            r.ideal = ideal;
        }
    }

    fn push_column(&mut self, a0: Complex64, a1: Complex64) {
        self.state.append_qubit(a0, a1);
        self.frame = self.frame.insert_qubit(self.frame.n_qubits(), Letter::I);
    }

    fn conjugate_frame(&mut self, gate: crate::stabilizer::Clifford) -> Result<()> {
        self.frame = crate::stabilizer::conjugate_pauli(&self.frame, gate)?;
        Ok(())
    }

    /// Remove the frame column of a qubit just measured with ideal outcome `mu`,
    /// keeping the phase the dropped letter picks up on |μ⟩.
    fn drop_frame_column(&mut self, pos: usize, mu: u8) {
        let (rest, l) = self.frame.remove_qubit(pos);
        let extra = match l {
            Letter::I | Letter::X => 0,
            Letter::Z => 2 * mu,
            // Y|μ⟩ = i(−1)^μ |μ⊕1⟩
            Letter::Y => 1 + 2 * mu,
        };
        self.frame = rest.clone().with_phase((rest.phase_exponent() + extra) % 4);
    }

    fn flush_frame(&mut self) -> Result<()> {
        if !is_identity(&self.frame) {
            self.state.apply_pauli(&inverse(&self.frame))?;
            self.frame = PauliString::identity(self.frame.n_qubits());
        }
        Ok(())
    }

    fn step(&mut self, ins: &Instruction, ctx: &mut Ctx, forced: Option<u8>, fork: &mut bool) -> Result<()> {
        let policy = ctx.opts.frame_policy;
        match ins {
            Instruction::AllocLogical { .. } => {
                return Err(QgateError::MalformedProgram("alloc_logical must be the first instruction".into()))
            }
            Instruction::AllocAncilla { qubit } => {
                self.reg.alloc_ancilla(*qubit)?;
                let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                self.push_column(h, h);
            }
            Instruction::AllocMagic { qubit, angle } => {
                self.reg.alloc_magic(*qubit, *angle)?;
                self.push_column(Complex64::new((angle / 2.0).cos(), 0.0), Complex64::new(0.0, (angle / 2.0).sin()));
            }
            Instruction::AllocWork { qubit } => {
                self.reg.alloc_work(*qubit)?;
                self.push_column(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
            }
            Instruction::ReleaseWork { qubit } => {
                let pos = self.reg.position(*qubit)?;
                let expect_one = self.frame.x_bit(pos);
                let p1 = self.state.probability_one(pos)?;
                let p_ok = if expect_one { p1 } else { 1.0 - p1 };
                if p_ok < 1.0 - 1e-9 {
                    return Err(QgateError::InternalConsistency(format!(
                        "{qubit} released with |1⟩ weight {:.3e}",
                        1.0 - p_ok
                    )));
                }
                self.reg.release_work(*qubit)?;
                let (s, _) = self.state.measure_outcome(pos, u8::from(expect_one), RecordMode::Forced)?;
                self.state = s;
                self.drop_frame_column(pos, 0);
            }
            Instruction::CPauli { control, target, letter } => {
                let (pc, pt) = (self.reg.position(*control)?, self.reg.position(*target)?);
                self.reg.apply_instruction(ins)?;
                self.state.apply_controlled_pauli(pc, pt, *letter)?;
                let g = crate::stabilizer::Clifford::controlled(*letter, pc, pt).expect("checked by tracker");
                self.conjugate_frame(g)?;
            }
            Instruction::AncillaCx { control, target } => {
                let (pc, pt) = (self.reg.position(*control)?, self.reg.position(*target)?);
                self.reg.apply_instruction(ins)?;
                self.state.apply_controlled_pauli(pc, pt, Letter::X)?;
                self.conjugate_frame(crate::stabilizer::Clifford::CX(pc, pt))?;
            }
            Instruction::SingleClifford { qubit, gate } => {
                let pos = self.reg.position(*qubit)?;
                self.reg.apply_instruction(ins)?;
                self.state.apply_single(pos, gate.gate())?;
                self.conjugate_frame(gate.clifford(pos))?;
            }
            Instruction::MeasureRotated { qubit, angle, byproduct } => {
                let tracked = self.reg.byproduct(*qubit)?;
                if &tracked != byproduct {
                    return Err(QgateError::FrameMismatch(format!(
                        "{qubit}: recorded by-product {byproduct}, tracked {tracked}"
                    )));
                }
                let pos = self.reg.position(*qubit)?;
                let phys = if self.frame.z_bit(pos) { -angle } else { *angle };
                // exp(iφX/2) = R_X(−φ)
                self.state.apply_single(pos, Gate::Rx(-phys))?;
                let bit = self.measure(*qubit, pos, ctx, forced, fork)?;
                let ideal = bit ^ u8::from(self.frame.x_bit(pos));
                self.set_last_ideal(ideal);
                let (_, _, rest) = self.reg.measure_rotated(*qubit)?;
                self.drop_frame_column(pos, ideal);
                if ideal == 1 {
                    match policy {
                        FramePolicy::ApplyImmediately => self.state.apply_pauli(&rest)?,
                        FramePolicy::TrackToEnd => self.frame = self.frame.multiply(&rest)?,
                    }
                }
            }
            Instruction::MeasureX { qubit } => {
                let m = self.reg.handoff_target(*qubit)?;
                let pos = self.reg.position(*qubit)?;
                self.state.apply_single(pos, Gate::H)?;
                self.conjugate_frame(crate::stabilizer::Clifford::H(pos))?;
                let bit = self.measure(*qubit, pos, ctx, forced, fork)?;
                let ideal = bit ^ u8::from(self.frame.x_bit(pos));
                self.set_last_ideal(ideal);
                self.drop_frame_column(pos, ideal);
                self.reg.measure_x(*qubit, ideal)?;
                if ideal == 1 {
                    self.reg.negate_row(m)?;
                    let pm = self.reg.position(m)?;
                    let theta = self.reg.magic_angle(m).expect("magic qubit has an angle");
                    let z = PauliString::single(self.frame.n_qubits(), pm, Letter::Z);
                    match policy {
                        FramePolicy::ApplyImmediately => self.state.apply_pauli(&z)?,
                        FramePolicy::TrackToEnd => self.frame = self.frame.multiply(&z)?,
                    }
                    if ctx.opts.teleport == TeleportPolicy::Compensate {
                        let t = if self.frame.z_bit(pm) { -theta } else { theta };
                        // exp(iθX) = R_X(−2θ)
                        self.state.apply_single(pm, Gate::Rx(-2.0 * t))?;
                    }
                }
            }
            Instruction::Controlled { controls, body } => {
                self.flush_frame()?;
                let mut ctl = Vec::with_capacity(controls.len());
                for c in controls {
                    ctl.push((self.reg.position(c.qubit)?, c.key));
                }
                if let Some((letter, target)) = controlled_clifford(controls, body) {
                    let pt = self.reg.position(target)?;
                    self.reg.apply_instruction(ins)?;
                    let gate = match letter {
                        Letter::X => Gate::X,
                        Letter::Y => Gate::Y,
                        _ => Gate::Z,
                    };
                    self.state.apply_arbitrary_controlled(&ctl, pt, gate)?;
                    return Ok(());
                }
                if let [Instruction::SingleClifford { qubit, gate }] = body.as_slice() {
                    let pt = self.reg.position(*qubit)?;
                    self.reg.apply_instruction(ins)?;
                    self.state.apply_arbitrary_controlled(&ctl, pt, gate.gate())?;
                    return Ok(());
                }
                let mut after = self.reg.clone();
                after.apply_instruction(ins)?;
                let (cmask, cval) = self.state.control_masks(&ctl, None)?;
                let inner_opts = ExecOptions {
                    mode: ExecMode::PostselectZero,
                    frame_policy: FramePolicy::ApplyImmediately,
                    teleport: ctx.opts.teleport,
                    debug_tableau: ctx.opts.debug_tableau,
                    apply_final_frame: true,
                    max_branches: 1,
                };
                let mut inner_ctx = Ctx { opts: &inner_opts, rng: None };
                let mut sub = self.clone();
                sub.records.clear();
                sub.weight = 1.0;
                for b in body {
                    let mut f = false;
                    sub.step(b, &mut inner_ctx, None, &mut f)?;
                    if inner_opts.debug_tableau {
                        sub.check_tableau()?;
                    }
                }
                if sub.reg.live() != after.live() {
                    return Err(QgateError::MalformedProgram("controlled body leaves qubits allocated".into()));
                }
                let mut amps = self.state.amplitudes().to_vec();
                for (i, (a, s)) in amps.iter_mut().zip(sub.state.amplitudes()).enumerate() {
                    if i & cmask == cval {
                        *a = *s;
                    }
                }
                self.state = StateVector::normalized(amps)?;
                self.reg = after;
                self.records.extend(sub.records);
            }
        }
        Ok(())
    }

    /// Every tracked row, corrected for the frame, stabilizes the physical state.
    fn check_tableau(&self) -> Result<()> {
        for g in self.reg.tableau().generators() {
            let g = if g.commutes(&self.frame)? { g.clone() } else { g.negated() };
            let mut t = self.state.clone();
            t.apply_pauli(&g)?;
            let dev = t.max_abs_diff(&self.state)?;
            if dev > 1e-9 {
                let labels = self.reg.labels();
                return Err(QgateError::InternalConsistency(format!(
                    "row {} not stabilized (deviation {dev:.3e})",
                    crate::stabilizer::format_generator(&g, &labels)
                )));
            }
        }
        Ok(())
    }

    fn finish(mut self, program: &QGateProgram, opts: &ExecOptions) -> Result<ExecutionResult> {
        self.reg.finish()?;
        let residual = if opts.apply_final_frame {
            self.flush_frame()?;
            None
        } else {
            Some(self.frame.clone())
        };
        self.state.scale(Complex64::from_polar(1.0, program.global_phase));
        Ok(ExecutionResult {
            final_state: self.state,
            records: self.records,
            weight: self.weight,
            residual_frame: residual,
        })
    }
}

fn measures(i: &Instruction) -> bool {
    matches!(i, Instruction::MeasureRotated { .. } | Instruction::MeasureX { .. })
}

/// Run `program` on `initial` with the given options. Non-branching modes return one result.
pub fn execute_with(program: &QGateProgram, initial: &StateVector, opts: &ExecOptions) -> Result<Vec<ExecutionResult>> {
    if initial.n_qubits() != program.n_logical {
        return Err(QgateError::Dimension(format!(
            "{}-qubit state for a {}-qubit program",
            initial.n_qubits(),
            program.n_logical
        )));
    }
    let instrs = &program.instructions;
    match instrs.first() {
        Some(Instruction::AllocLogical { count }) if *count == program.n_logical => {}
        _ => return Err(QgateError::MalformedProgram("program must start with alloc_logical(n_logical)".into())),
    }
    let rng = match opts.mode {
        ExecMode::Sampled(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut ctx = Ctx { opts, rng };
    let start = Machine {
        state: initial.clone(),
        reg: RegisterTracker::new(program.n_logical),
        frame: PauliString::identity(program.n_logical),
        records: Vec::new(),
        weight: 1.0,
    };
    let mut stack = vec![(start, 1usize, None::<u8>)];
    let mut out = Vec::new();
    while let Some((mut m, mut pc, mut forced)) = stack.pop() {
        while pc < instrs.len() {
            let ins = &instrs[pc];
            let snapshot = (opts.mode == ExecMode::AllBranches && forced.is_none() && measures(ins)).then(|| m.clone());
            let mut fork = false;
            m.step(ins, &mut ctx, forced.take(), &mut fork)?;
            if fork {
                if out.len() + stack.len() + 2 > opts.max_branches {
                    return Err(QgateError::Resource(format!("more than {} measurement branches", opts.max_branches)));
                }
                stack.push((snapshot.expect("snapshot taken before measuring"), pc, Some(1)));
            }
            if opts.debug_tableau {
                m.check_tableau()?;
            }
            pc += 1;
        }
        out.push(m.finish(program, opts)?);
    }
    Ok(out)
}

/// Run with default teleport policy and no debug checks.
pub fn execute(
    program: &QGateProgram,
    initial: &StateVector,
    mode: ExecMode,
    frame_policy: FramePolicy,
) -> Result<Vec<ExecutionResult>> {
    execute_with(program, initial, &ExecOptions::new(mode, frame_policy))
}

/// Single-branch execution; `AllBranches` is rejected.
pub fn execute_one(program: &QGateProgram, initial: &StateVector, opts: &ExecOptions) -> Result<ExecutionResult> {
    if opts.mode == ExecMode::AllBranches {
        return Err(QgateError::InvalidArgument("execute_one cannot enumerate branches".into()));
    }
    Ok(execute_with(program, initial, opts)?.remove(0))
}

/// Enumerate every branch and return the worst amplitude deviation from
/// `expected` together with the branch count and the total branch weight.
pub fn max_branch_deviation(
    program: &QGateProgram,
    initial: &StateVector,
    expected: &StateVector,
    frame_policy: FramePolicy,
) -> Result<(f64, usize, f64)> {
    let results = execute(program, initial, ExecMode::AllBranches, frame_policy)?;
    let mut worst: f64 = 0.0;
    let mut weight = 0.0;
    for r in &results {
        worst = worst.max(r.final_state.max_abs_diff(expected)?);
        weight += r.weight;
    }
    Ok((worst, results.len(), weight))
}

/// Dense unitary realized by the postselected program, column by column.
pub fn program_unitary(program: &QGateProgram) -> Result<DenseUnitary> {
    let n = program.n_logical;
    if n > crate::pauli::DEFAULT_DENSE_LIMIT {
        return Err(QgateError::Resource(format!("{n} qubits exceeds the dense cap")));
    }
    let dim = 1usize << n;
    let opts = ExecOptions::new(ExecMode::PostselectZero, FramePolicy::ApplyImmediately);
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for col in 0..dim {
        let r = execute_one(program, &StateVector::init_basis(n, col)?, &opts)?;
        for (row, a) in r.final_state.amplitudes().iter().enumerate() {
            m[(row, col)] = *a;
        }
    }
    DenseUnitary::new(m, false)
}

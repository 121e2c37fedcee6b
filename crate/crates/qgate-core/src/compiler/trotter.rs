use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QgateError, Result};
use crate::ir::{ProgramBuilder, QGateProgram};
use crate::pauli::PauliString;

use super::hamiltonian::PauliTermList;

/// Suzuki fourth-order recursion constant `s = 1/(2 − 2^{1/3})`.
pub const SUZUKI_S: f64 = 1.351207191959657;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrotterOrder {
    First,
    Second,
    Fourth,
}

impl TrotterOrder {
    pub fn from_number(k: u32) -> Result<Self> {
        match k {
            1 => Ok(TrotterOrder::First),
            2 => Ok(TrotterOrder::Second),
            4 => Ok(TrotterOrder::Fourth),
            _ => Err(QgateError::InvalidArgument(format!("Trotter order {k} (expected 1, 2 or 4)"))),
        }
    }

    pub fn number(self) -> u32 {
        match self {
            TrotterOrder::First => 1,
            TrotterOrder::Second => 2,
            TrotterOrder::Fourth => 4,
        }
    }
}

/// Term order inside each Trotter step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TermOrdering {
    AsGiven,
    /// Fresh permutation per step drawn from a seeded generator.
    Random(u64),
}

fn second_order(perm: &[usize], w: f64, out: &mut Vec<(usize, f64)>) {
    let (last, head) = perm.split_last().expect("nonempty term list");
    for &m in head {
        out.push((m, w / 2.0));
    }
    out.push((*last, w));
    for &m in head.iter().rev() {
        out.push((m, w / 2.0));
    }
}

/// Product-formula schedule as `(term index, weight)` pairs; a term with
/// coefficient c contributes `exp(−i c Δ weight)`. Weights over one full
/// expansion sum to 1 per term.
pub fn trotter_schedule(
    n_terms: usize,
    order: TrotterOrder,
    steps: usize,
    ordering: TermOrdering,
) -> Result<Vec<(usize, f64)>> {
    if n_terms == 0 {
        return Err(QgateError::InvalidArgument("empty term list".into()));
    }
    if steps == 0 {
        return Err(QgateError::InvalidArgument("Trotter steps must be at least 1".into()));
    }
    let mut rng = match ordering {
        TermOrdering::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        TermOrdering::AsGiven => None,
    };
    let w = 1.0 / steps as f64;
    let mut out = Vec::new();
    for _ in 0..steps {
        let mut perm: Vec<usize> = (0..n_terms).collect();
        if let Some(r) = rng.as_mut() {
            perm.shuffle(r);
        }
        match order {
            TrotterOrder::First => out.extend(perm.iter().map(|&m| (m, w))),
            TrotterOrder::Second => second_order(&perm, w, &mut out),
            TrotterOrder::Fourth => {
                second_order(&perm, SUZUKI_S * w, &mut out);
                second_order(&perm, (1.0 - 2.0 * SUZUKI_S) * w, &mut out);
                second_order(&perm, SUZUKI_S * w, &mut out);
            }
        }
    }
    Ok(out)
}

/// Rotation list `(P, φ)` with `φ = −2 c Δ · weight`, each meaning `exp(iφP/2)`.
/// Identity strings are kept; the compiler turns them into a global phase.
pub fn trotter_sequence(
    terms: &PauliTermList,
    order: TrotterOrder,
    steps: usize,
    ordering: TermOrdering,
    delta: f64,
) -> Result<Vec<(PauliString, f64)>> {
    let real = terms.real_terms()?;
    let sched = trotter_schedule(real.len(), order, steps, ordering)?;
    Ok(sched.into_iter().map(|(m, w)| (real[m].0.clone(), -2.0 * real[m].1 * delta * w)).collect())
}

/// Single-ancilla program for `exp(iφP/2)`. An identity string gives an empty
/// program whose global phase is `φ/2`, with a warning.
pub fn compile_pauli_rotation(p: &PauliString, phi: f64) -> Result<QGateProgram> {
    let mut b = ProgramBuilder::new(p.n_qubits()).named(format!("rotation {p}"), "pauli");
    if p.is_identity_letters() {
        b.warn(format!("identity string {p}: rotation reduced to a global phase"));
    }
    b.pauli_rotation(p, phi)?;
    b.build()
}

/// Emit the Trotterized evolution `exp(−iΔ Σ c_m P_m)` into a builder.
pub fn emit_trotter(
    b: &mut ProgramBuilder,
    terms: &PauliTermList,
    order: TrotterOrder,
    steps: usize,
    ordering: TermOrdering,
    delta: f64,
) -> Result<()> {
    if terms.n_qubits != b.n_logical() {
        return Err(QgateError::Dimension(format!(
            "{}-qubit terms on {} logical qubits",
            terms.n_qubits,
            b.n_logical()
        )));
    }
    for (p, phi) in trotter_sequence(terms, order, steps, ordering, delta)? {
        if phi != 0.0 {
            b.pauli_rotation(&p, phi)?;
        }
    }
    Ok(())
}

/// Trotterized `exp(−iΔH)` for `H = Σ c_m P_m`, fresh ancilla per rotation.
pub fn compile_trotter(
    terms: &PauliTermList,
    order: TrotterOrder,
    steps: usize,
    ordering: TermOrdering,
    delta: f64,
) -> Result<QGateProgram> {
    let mut b =
        ProgramBuilder::new(terms.n_qubits).named(format!("trotter order {} steps {steps}", order.number()), "pauli");
    emit_trotter(&mut b, terms, order, steps, ordering, delta)?;
    b.build()
}

//! Generator-only stabilizer tableaus.
//!
//! Only the rows a compilation tracks are kept (typically one per live
//! ancilla). Signs live in the string phase and must stay in {0, 2}.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{QgateError, Result};
use crate::pauli::{Letter, PauliString};
use crate::statevector::StateVector;

/// Clifford gates supported by conjugation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Clifford {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    CX(usize, usize),
    CZ(usize, usize),
    CY(usize, usize),
}

impl Clifford {
    /// Qubits the gate acts on (control first).
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Clifford::H(q) | Clifford::S(q) | Clifford::Sdg(q) | Clifford::X(q) | Clifford::Y(q) | Clifford::Z(q) => {
                vec![q]
            }
            Clifford::CX(c, t) | Clifford::CZ(c, t) | Clifford::CY(c, t) => vec![c, t],
        }
    }

    /// Controlled version of a Pauli letter.
    pub fn controlled(letter: Letter, c: usize, t: usize) -> Option<Clifford> {
        match letter {
            Letter::X => Some(Clifford::CX(c, t)),
            Letter::Y => Some(Clifford::CY(c, t)),
            Letter::Z => Some(Clifford::CZ(c, t)),
            Letter::I => None,
        }
    }

    /// Images (C X_k C†, C Z_k C†) for each acted-on qubit, as strings over the local support.
    fn local_images(&self) -> Vec<(PauliString, PauliString)> {
        let p = |s: &str| s.parse::<PauliString>().expect("static pauli literal");
        match self {
            Clifford::H(_) => vec![(p("Z"), p("X"))],
            Clifford::S(_) => vec![(p("Y"), p("Z"))],
            Clifford::Sdg(_) => vec![(p("-Y"), p("Z"))],
            Clifford::X(_) => vec![(p("X"), p("-Z"))],
            Clifford::Y(_) => vec![(p("-X"), p("-Z"))],
            Clifford::Z(_) => vec![(p("-X"), p("Z"))],
            Clifford::CX(..) => vec![(p("XX"), p("ZI")), (p("IX"), p("ZZ"))],
            Clifford::CZ(..) => vec![(p("XZ"), p("ZI")), (p("ZX"), p("IZ"))],
            Clifford::CY(..) => vec![(p("XY"), p("ZI")), (p("ZX"), p("ZZ"))],
        }
    }
}

/// `C g C†` for a single Pauli string. Works for any phase.
pub fn conjugate_pauli(g: &PauliString, gate: Clifford) -> Result<PauliString> {
    let qs = gate.qubits();
    let n = g.n_qubits();
    if qs.iter().any(|&q| q >= n) || (qs.len() == 2 && qs[0] == qs[1]) {
        return Err(QgateError::InvalidIndex(format!("{gate:?} on {n} qubits")));
    }
    let images = gate.local_images();
    let k = qs.len();
    // σ(x,z) = i^{xz} X^x Z^z on each acted-on qubit
    let mut local = PauliString::identity(k);
    let mut extra_phase = 0u8;
    for (slot, &q) in qs.iter().enumerate() {
        let (xb, zb) = (g.x_bit(q), g.z_bit(q));
        if xb {
            local = local.multiply(&images[slot].0)?;
        }
        if zb {
            local = local.multiply(&images[slot].1)?;
        }
        if xb && zb {
            extra_phase += 1;
        }
    }
    let mut out = g.clone();
    for (slot, &q) in qs.iter().enumerate() {
        out.set_letter(q, local.letter(slot));
    }
    // σ = i^{xz} X^x Z^z, so each Y site contributes one extra factor of i.
    out.set_phase(g.phase_exponent() + extra_phase + local.phase_exponent());
    Ok(out)
}

/// List of commuting, independent, Hermitian generators.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilizerTableau {
    n: usize,
    generators: Vec<PauliString>,
}

impl StabilizerTableau {
    /// Empty tableau over `n` qubits.
    pub fn empty(n: usize) -> Self {
        StabilizerTableau { n, generators: Vec::new() }
    }

    /// Validating constructor.
    pub fn new(n: usize, generators: Vec<PauliString>) -> Result<Self> {
        let t = StabilizerTableau { n, generators };
        t.check()?;
        Ok(t)
    }

    /// Check the structural invariants.
    pub fn check(&self) -> Result<()> {
        for (i, g) in self.generators.iter().enumerate() {
            if g.n_qubits() != self.n {
                return Err(QgateError::Dimension(format!(
                    "generator {i} has {} qubits, tableau {}",
                    g.n_qubits(),
                    self.n
                )));
            }
            if !g.is_hermitian() {
                return Err(QgateError::InternalConsistency(format!("generator {i} has odd phase")));
            }
        }
        for i in 0..self.generators.len() {
            for j in i + 1..self.generators.len() {
                if !self.generators[i].commutes(&self.generators[j])? {
                    return Err(QgateError::InternalConsistency(format!("generators {i} and {j} anticommute")));
                }
            }
        }
        if self.rank() != self.generators.len() {
            return Err(QgateError::InternalConsistency("generators are dependent".into()));
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generator(&self, i: usize) -> &PauliString {
        &self.generators[i]
    }

    /// Symplectic rank over GF(2).
    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<bool>> = self
            .generators
            .iter()
            .map(|g| (0..self.n).map(|q| g.x_bit(q)).chain((0..self.n).map(|q| g.z_bit(q))).collect())
            .collect();
        let cols = 2 * self.n;
        let mut rank = 0;
        for c in 0..cols {
            let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][c]) else { continue };
            rows.swap(rank, pivot);
            for r in 0..rows.len() {
                if r != rank && rows[r][c] {
                    let src = rows[rank].clone();
                    for (a, b) in rows[r].iter_mut().zip(src) {
                        *a ^= b;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Conjugate every generator by `gate`.
    pub fn conjugate(&self, gate: Clifford) -> Result<StabilizerTableau> {
        let mut out = self.clone();
        out.conjugate_in_place(gate)?;
        Ok(out)
    }

    pub fn conjugate_in_place(&mut self, gate: Clifford) -> Result<()> {
        for g in &mut self.generators {
            let img = conjugate_pauli(g, gate)?;
            if !img.is_hermitian() {
                return Err(QgateError::InternalConsistency(format!("conjugation by {gate:?} produced odd phase")));
            }
            *g = img;
        }
        Ok(())
    }

    /// Replace generator `target` by `target · factor`.
    pub fn recombine(&self, target: usize, factor: usize) -> Result<StabilizerTableau> {
        let mut out = self.clone();
        out.recombine_in_place(target, factor)?;
        Ok(out)
    }

    pub fn recombine_in_place(&mut self, target: usize, factor: usize) -> Result<()> {
        let len = self.generators.len();
        if target == factor || target >= len || factor >= len {
            return Err(QgateError::InvalidIndex(format!("recombine({target}, {factor}) on {len} generators")));
        }
        let prod = self.generators[target].multiply(&self.generators[factor])?;
        if !prod.is_hermitian() {
            return Err(QgateError::InternalConsistency("recombination produced odd phase".into()));
        }
        self.generators[target] = prod;
        Ok(())
    }

    /// Append a generator (invariants are the caller's responsibility; see `check`).
    pub fn push(&mut self, g: PauliString) -> Result<usize> {
        if g.n_qubits() != self.n {
            return Err(QgateError::Dimension(format!("generator on {} qubits, tableau {}", g.n_qubits(), self.n)));
        }
        self.generators.push(g);
        Ok(self.generators.len() - 1)
    }

    pub fn remove(&mut self, i: usize) -> PauliString {
        self.generators.remove(i)
    }

    pub fn set(&mut self, i: usize, g: PauliString) {
        self.generators[i] = g;
    }

    /// Append an identity column as the new last qubit.
    pub fn add_qubit(&mut self) {
        self.n += 1;
        for g in &mut self.generators {
            *g = g.insert_qubit(g.n_qubits(), Letter::I);
        }
    }

    /// Delete column `q`; every generator must be the identity there.
    pub fn remove_qubit(&mut self, q: usize) -> Result<()> {
        for (i, g) in self.generators.iter_mut().enumerate() {
            let (rest, l) = g.remove_qubit(q);
            if l != Letter::I {
                return Err(QgateError::InternalConsistency(format!("generator {i} still acts on removed qubit {q}")));
            }
            *g = rest;
        }
        self.n -= 1;
        Ok(())
    }

    /// Every generator maps `sv` to itself within 1e-9 per amplitude.
    pub fn stabilizes(&self, sv: &StateVector) -> Result<bool> {
        if sv.n_qubits() != self.n {
            return Err(QgateError::Dimension(format!("tableau on {} qubits, state on {}", self.n, sv.n_qubits())));
        }
        for g in &self.generators {
            let mut t = sv.clone();
            t.apply_pauli(g)?;
            if t.max_abs_diff(sv)? > 1e-9 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Render generators with per-qubit labels, e.g. `X_A Z1 X3`.
    pub fn display_with(&self, labels: &[String]) -> String {
        self.generators.iter().map(|g| format_generator(g, labels)).collect::<Vec<_>>().join("\n")
    }
}

/// One generator as `±L<label> ...` with identities omitted.
pub fn format_generator(g: &PauliString, labels: &[String]) -> String {
    let sign = match g.phase_exponent() {
        0 => "",
        1 => "i ",
        2 => "-",
        _ => "-i ",
    };
    let body: Vec<String> = g
        .support()
        .into_iter()
        .map(|q| format!("{}{}", g.letter(q), labels.get(q).cloned().unwrap_or_else(|| q.to_string())))
        .collect();
    if body.is_empty() {
        format!("{sign}I")
    } else {
        format!("{sign}{}", body.join(" "))
    }
}

impl fmt::Display for StabilizerTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = (0..self.n).map(|q| q.to_string()).collect();
        write!(f, "{}", self.display_with(&labels))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn cz_on_ancilla_row() {
        let t = StabilizerTableau::new(2, vec![p("XI")]).unwrap();
        assert_eq!(t.conjugate(Clifford::CZ(0, 1)).unwrap().generator(0), &p("XZ"));
        assert_eq!(t.conjugate(Clifford::CX(0, 1)).unwrap().generator(0), &p("XX"));
        assert_eq!(t.conjugate(Clifford::CY(0, 1)).unwrap().generator(0), &p("XY"));
    }

    #[test]
    fn cx_target_spreads_x_to_control() {
        // X on the target of CX(c=1 -> t=0)... here ancilla 2 controls ancilla 1
        let t = StabilizerTableau::new(2, vec![p("IX")]).unwrap();
        assert_eq!(t.conjugate(Clifford::CX(1, 0)).unwrap().generator(0), &p("XX"));
    }

    #[test]
    fn recombine_example() {
        // rows X1·Pm and X1X2 with Pm = Z on a third qubit
        let t = StabilizerTableau::new(3, vec![p("XIZ"), p("XXI")]).unwrap();
        let r = t.recombine(1, 0).unwrap();
        assert_eq!(r.generator(1), &p("IXZ"));
        let back = r.recombine(1, 0).unwrap();
        assert_eq!(back, t);
        assert!(t.recombine(0, 0).is_err());
    }

    #[test]
    fn stabilizes_plus() {
        let plus = StateVector::plus_state(1);
        assert!(StabilizerTableau::new(1, vec![p("X")]).unwrap().stabilizes(&plus).unwrap());
        assert!(!StabilizerTableau::new(1, vec![p("Z")]).unwrap().stabilizes(&plus).unwrap());
    }

    #[test]
    fn invariants_rejected() {
        assert!(StabilizerTableau::new(1, vec![p("X"), p("Z")]).is_err());
        assert!(StabilizerTableau::new(2, vec![p("XX"), p("XX")]).is_err());
        assert!(StabilizerTableau::new(1, vec![p("iX")]).is_err());
    }

    #[test]
    fn pretty_print() {
        let t = StabilizerTableau::new(4, vec![p("XZIX")]).unwrap();
        let labels = vec!["_A".to_string(), "1".into(), "2".into(), "3".into()];
        assert_eq!(t.display_with(&labels), "X_A Z1 X3");
    }

    #[test]
    fn column_add_remove() {
        let mut t = StabilizerTableau::new(1, vec![p("X")]).unwrap();
        t.add_qubit();
        assert_eq!(t.generator(0), &p("XI"));
        t.remove_qubit(1).unwrap();
        assert_eq!(t.generator(0), &p("X"));
        assert!(t.remove_qubit(0).is_err());
    }
}

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QgateError, Result};
use crate::pauli::{Letter, PauliString, WeightedPauli};

use super::hamiltonian::PauliTermList;

/// Per-qubit role of `|ψ_i⟩⟨ψ_j|`: `f` (ket 1, bra 0), `b` (ket 0, bra 1),
/// `t` (both 1), `d` (both 0). Exactly one label is set at each position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermLabels {
    pub f: Vec<bool>,
    pub b: Vec<bool>,
    pub t: Vec<bool>,
    pub d: Vec<bool>,
}

/// Bit of qubit `k` (qubit 0 most significant) in basis index `i` of an `n`-qubit register.
pub fn basis_bit(i: usize, k: usize, n: usize) -> bool {
    (i >> (n - 1 - k)) & 1 == 1
}

impl TermLabels {
    pub fn n_qubits(&self) -> usize {
        self.f.len()
    }

    /// Qubits whose value flips between ket and bra, ascending.
    pub fn flip_set(&self) -> Vec<usize> {
        (0..self.n_qubits()).filter(|&k| self.f[k] || self.b[k]).collect()
    }

    /// Qubits with a number-operator role, ascending.
    pub fn number_set(&self) -> Vec<usize> {
        (0..self.n_qubits()).filter(|&k| self.t[k] || self.d[k]).collect()
    }

    /// Number-set control keys: 1 for `t`, 0 for `d`.
    pub fn number_keys(&self) -> Vec<(usize, u8)> {
        self.number_set().into_iter().map(|k| (k, u8::from(self.t[k]))).collect()
    }
}

/// Label each qubit of `|ψ_i⟩⟨ψ_j|` from the ket bit `a` and bra bit `c`:
/// `f = a∧¬c`, `b = ¬a∧c`, `t = a∧c`, `d = ¬a∧¬c`.
pub fn label_coefficients(i: usize, j: usize, n: usize) -> Result<TermLabels> {
    if n == 0 || n >= usize::BITS as usize - 1 || i >> n != 0 || j >> n != 0 {
        return Err(QgateError::InvalidIndex(format!("basis indices ({i}, {j}) for {n} qubits")));
    }
    let mut out = TermLabels { f: vec![false; n], b: vec![false; n], t: vec![false; n], d: vec![false; n] };
    for k in 0..n {
        let a = basis_bit(i, k, n);
        let c = basis_bit(j, k, n);
        out.f[k] = a && !c;
        out.b[k] = !a && c;
        out.t[k] = a && c;
        out.d[k] = !a && !c;
    }
    Ok(out)
}

/// Single-qubit `|a⟩⟨c|` as letter coefficients.
fn local_expansion(a: bool, c: bool) -> [(Letter, Complex64); 2] {
    let half = Complex64::new(0.5, 0.0);
    let ihalf = Complex64::new(0.0, 0.5);
    match (a, c) {
        (false, false) => [(Letter::I, half), (Letter::Z, half)],
        (true, true) => [(Letter::I, half), (Letter::Z, -half)],
        (false, true) => [(Letter::X, half), (Letter::Y, ihalf)],
        (true, false) => [(Letter::X, half), (Letter::Y, -ihalf)],
    }
}

fn expand_outer(i: usize, j: usize, n: usize, h: Complex64, acc: &mut BTreeMap<Vec<Letter>, Complex64>) {
    let mut partial: Vec<(Vec<Letter>, Complex64)> = vec![(Vec::with_capacity(n), h)];
    for k in 0..n {
        let local = local_expansion(basis_bit(i, k, n), basis_bit(j, k, n));
        let mut next = Vec::with_capacity(partial.len() * 2);
        for (letters, c) in &partial {
            for (l, lc) in local {
                let mut ls = letters.clone();
                ls.push(l);
                next.push((ls, c * lc));
            }
        }
        partial = next;
    }
    for (ls, c) in partial {
        *acc.entry(ls).or_default() += c;
    }
}

/// Pauli expansion of `h|ψ_i⟩⟨ψ_j| + h*|ψ_j⟩⟨ψ_i|` (just `h|ψ_i⟩⟨ψ_i|` when `i = j`,
/// where `h` must be real). Coefficients below 1e−14 are pruned.
pub fn expand_projector_pauli(i: usize, j: usize, h: Complex64, n: usize) -> Result<PauliTermList> {
    label_coefficients(i, j, n)?;
    let mut acc = BTreeMap::new();
    if i == j {
        if h.im.abs() > 1e-12 {
            return Err(QgateError::NonHermitian(h.im.abs()));
        }
        expand_outer(i, i, n, Complex64::new(h.re, 0.0), &mut acc);
    } else {
        expand_outer(i, j, n, h, &mut acc);
        expand_outer(j, i, n, h.conj(), &mut acc);
    }
    let terms = acc
        .into_iter()
        .filter(|(_, c)| c.norm() >= 1e-14)
        .map(|(ls, c)| WeightedPauli::new(c, PauliString::from_letters(&ls)))
        .collect();
    PauliTermList::new(n, terms)
}

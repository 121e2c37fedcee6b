use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QgateError, Result};
use crate::pauli::{DenseMatrix, Letter, PauliString, WeightedPauli};

use super::hamiltonian::PauliTermList;

/// Normal-ordered fermionic term with real or complex weight `h`.
///
/// `OneBody { p, q }` is `h a†_p a_q + h.c.` (or `h n_p` when `p == q`);
/// `TwoBody { p, q, r, s }` is `h a†_p a†_q a_r a_s + h.c.` with `p ≥ q ≥ r ≥ s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum FermionTerm {
    OneBody { p: usize, q: usize, h: f64 },
    TwoBody { p: usize, q: usize, r: usize, s: usize, h: f64 },
}

impl FermionTerm {
    fn sites(&self) -> Vec<usize> {
        match *self {
            FermionTerm::OneBody { p, q, .. } => vec![p, q],
            FermionTerm::TwoBody { p, q, r, s, .. } => vec![p, q, r, s],
        }
    }

    /// Ladder operators of the non-conjugated product, creation flags first.
    fn ladder(&self) -> Vec<(usize, bool)> {
        match *self {
            FermionTerm::OneBody { p, q, .. } => vec![(p, true), (q, false)],
            FermionTerm::TwoBody { p, q, r, s, .. } => vec![(p, true), (q, true), (r, false), (s, false)],
        }
    }

    fn weight(&self) -> f64 {
        match *self {
            FermionTerm::OneBody { h, .. } | FermionTerm::TwoBody { h, .. } => h,
        }
    }

    fn is_number(&self) -> bool {
        matches!(*self, FermionTerm::OneBody { p, q, .. } if p == q)
    }

    fn check(&self, n: usize) -> Result<()> {
        if let Some(&bad) = self.sites().iter().find(|&&x| x >= n) {
            return Err(QgateError::InvalidIndex(format!("site {bad} on {n} modes")));
        }
        if let FermionTerm::TwoBody { p, q, r, s, .. } = *self {
            if !(p >= q && q >= r && r >= s) {
                return Err(QgateError::InvalidArgument(format!(
                    "two-body indices ({p},{q},{r},{s}) must satisfy p≥q≥r≥s"
                )));
            }
        }
        if !self.weight().is_finite() {
            return Err(QgateError::NonFinite("fermionic weight".into()));
        }
        Ok(())
    }
}

fn product(a: &[WeightedPauli], b: &[WeightedPauli]) -> Result<Vec<WeightedPauli>> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(WeightedPauli::new(x.coefficient * y.coefficient, x.string.multiply(&y.string)?));
        }
    }
    Ok(out)
}

/// `a_j` (or `a†_j`) as `σ^∓_j ∏_{i<j} Z_i` with `σ⁺ = (X + iY)/2 = |0⟩⟨1|`.
pub fn ladder_operator(n: usize, j: usize, creation: bool) -> Result<Vec<WeightedPauli>> {
    if j >= n {
        return Err(QgateError::InvalidIndex(format!("site {j} on {n} modes")));
    }
    let mut chain = PauliString::identity(n);
    for i in 0..j {
        chain.set_letter(i, Letter::Z);
    }
    let mut x = chain.clone();
    x.set_letter(j, Letter::X);
    let mut y = chain;
    y.set_letter(j, Letter::Y);
    let iy = if creation { -0.5 } else { 0.5 };
    Ok(vec![WeightedPauli::new(Complex64::new(0.5, 0.0), x), WeightedPauli::new(Complex64::new(0.0, iy), y)])
}

/// Jordan–Wigner image of a fermionic term on `n` modes as a combined
/// Hermitian Pauli sum.
pub fn jordan_wigner(term: &FermionTerm, n: usize) -> Result<PauliTermList> {
    term.check(n)?;
    let mut acc = vec![WeightedPauli::new(Complex64::new(term.weight(), 0.0), PauliString::identity(n))];
    for (site, creation) in term.ladder() {
        acc = product(&acc, &ladder_operator(n, site, creation)?)?;
    }
    let mut all = PauliTermList::new(n, acc)?.combined().terms;
    if !term.is_number() {
        let adjoint: Vec<WeightedPauli> =
            all.iter().map(|t| WeightedPauli::new(t.coefficient.conj(), t.string.clone())).collect();
        all.extend(adjoint);
    }
    PauliTermList::new(n, all).map(|l| l.combined())
}

/// Jordan–Wigner image of a sum of fermionic terms.
pub fn jordan_wigner_sum(terms: &[FermionTerm], n: usize) -> Result<PauliTermList> {
    let mut all = Vec::new();
    for t in terms {
        all.extend(jordan_wigner(t, n)?.terms);
    }
    PauliTermList::new(n, all).map(|l| l.combined())
}

/// Dense annihilation operator built directly on occupation states:
/// `a_j |…n_j…⟩ = (−1)^{Σ_{i<j} n_i} |…(n_j−1)…⟩`. Mode 0 is the most
/// significant bit of the basis index.
pub fn dense_annihilation(n: usize, j: usize) -> Result<DenseMatrix> {
    if j >= n || n > crate::pauli::DEFAULT_DENSE_LIMIT {
        return Err(QgateError::InvalidIndex(format!("site {j} on {n} modes")));
    }
    let dim = 1usize << n;
    let bit = |k: usize| 1usize << (n - 1 - k);
    let mut m = DenseMatrix::zeros(dim, dim);
    for col in 0..dim {
        if col & bit(j) == 0 {
            continue;
        }
        let parity = (0..j).filter(|&i| col & bit(i) != 0).count();
        let sign = if parity % 2 == 0 { 1.0 } else { -1.0 };
        m[(col ^ bit(j), col)] = Complex64::new(sign, 0.0);
    }
    Ok(m)
}

/// Dense matrix of a fermionic term from occupation-basis ladder matrices.
pub fn dense_fermion_term(term: &FermionTerm, n: usize) -> Result<DenseMatrix> {
    term.check(n)?;
    let dim = 1usize << n;
    let mut op = DenseMatrix::identity(dim, dim) * Complex64::new(term.weight(), 0.0);
    for (site, creation) in term.ladder() {
        let a = dense_annihilation(n, site)?;
        op *= if creation { a.adjoint() } else { a };
    }
    if term.is_number() {
        Ok(op)
    } else {
        let adj = op.adjoint();
        Ok(op + adj)
    }
}

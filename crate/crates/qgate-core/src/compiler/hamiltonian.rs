use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QgateError, Result};
use crate::pauli::{DenseMatrix, PauliString, WeightedPauli, DEFAULT_DENSE_LIMIT};

const HERMITIAN_TOL: f64 = 1e-12;

/// Sparse Hermitian matrix on `n_qubits` qubits.
///
/// Stored canonically: real diagonal plus one entry per off-diagonal pair
/// `(i, j, H_ij)` with `i < j`. The mirrored entry is implied.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseHamiltonian {
    n_qubits: usize,
    diagonal: BTreeMap<usize, f64>,
    upper: BTreeMap<(usize, usize), Complex64>,
}

impl SparseHamiltonian {
    /// Build from raw `(row, col, value)` entries. Duplicates are summed; a missing
    /// mirror entry is implied; a present mirror must be the conjugate.
    pub fn new(n_qubits: usize, entries: &[(usize, usize, Complex64)]) -> Result<Self> {
        if n_qubits >= usize::BITS as usize - 1 {
            return Err(QgateError::Resource(format!("{n_qubits} qubits")));
        }
        let dim = 1usize << n_qubits;
        let mut raw: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
        for &(i, j, v) in entries {
            if i >= dim || j >= dim {
                return Err(QgateError::InvalidIndex(format!("entry ({i}, {j}) outside dimension {dim}")));
            }
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(QgateError::NonFinite(format!("entry ({i}, {j})")));
            }
            *raw.entry((i, j)).or_default() += v;
        }
        let mut diagonal = BTreeMap::new();
        let mut upper = BTreeMap::new();
        for (&(i, j), &v) in &raw {
            if i == j {
                if v.im.abs() > HERMITIAN_TOL {
                    return Err(QgateError::NonHermitian(v.im.abs()));
                }
                if v.re != 0.0 {
                    diagonal.insert(i, v.re);
                }
                continue;
            }
            let (lo, hi, val) = if i < j { (i, j, v) } else { (j, i, v.conj()) };
            if let Some(&mirror) = raw.get(&(j, i)) {
                let dev = (mirror - v.conj()).norm();
                if dev > HERMITIAN_TOL {
                    return Err(QgateError::NonHermitian(dev));
                }
            }
            if val != Complex64::new(0.0, 0.0) {
                upper.insert((lo, hi), val);
            }
        }
        Ok(SparseHamiltonian { n_qubits, diagonal, upper })
    }

    /// From a dense Hermitian matrix, dropping entries below `tol`.
    pub fn from_dense(m: &DenseMatrix, tol: f64) -> Result<Self> {
        let dim = m.nrows();
        if dim != m.ncols() || !dim.is_power_of_two() {
            return Err(QgateError::Dimension(format!("{}x{} matrix", m.nrows(), m.ncols())));
        }
        let mut entries = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                if m[(i, j)].norm() > tol {
                    entries.push((i, j, m[(i, j)]));
                }
            }
        }
        Self::new(dim.trailing_zeros() as usize, &entries)
    }

    /// Seeded random real sparse Hermitian matrix: every diagonal entry and each
    /// upper pair with probability `fill`, values uniform in [−1, 1].
    pub fn random_real(n_qubits: usize, fill: f64, rng: &mut impl Rng) -> Result<Self> {
        let dim = 1usize << n_qubits;
        let mut entries = Vec::new();
        for i in 0..dim {
            entries.push((i, i, Complex64::new(rng.random_range(-1.0..1.0), 0.0)));
            for j in i + 1..dim {
                if rng.random::<f64>() < fill {
                    entries.push((i, j, Complex64::new(rng.random_range(-1.0..1.0), 0.0)));
                }
            }
        }
        Self::new(n_qubits, &entries)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// Full diagonal (zeros filled in).
    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim()];
        for (&i, &v) in &self.diagonal {
            d[i] = v;
        }
        d
    }

    pub fn has_diagonal(&self) -> bool {
        !self.diagonal.is_empty()
    }

    /// Upper off-diagonal pairs `(i, j, H_ij)` with `i < j`.
    pub fn off_diagonal_pairs(&self) -> Vec<(usize, usize, Complex64)> {
        self.upper.iter().map(|(&(i, j), &v)| (i, j, v)).collect()
    }

    /// Number of stored nonzeros counting both triangles.
    pub fn nnz(&self) -> usize {
        self.diagonal.len() + 2 * self.upper.len()
    }

    /// All entries, both triangles, sorted by (row, col).
    pub fn entries(&self) -> Vec<(usize, usize, Complex64)> {
        let mut out: Vec<_> = self.diagonal.iter().map(|(&i, &v)| (i, i, Complex64::new(v, 0.0))).collect();
        for (&(i, j), &v) in &self.upper {
            out.push((i, j, v));
            out.push((j, i, v.conj()));
        }
        out.sort_by_key(|&(i, j, _)| (i, j));
        out
    }

    pub fn to_dense(&self) -> Result<DenseMatrix> {
        if self.n_qubits > DEFAULT_DENSE_LIMIT {
            return Err(QgateError::Resource(format!("{} qubits exceeds the dense cap", self.n_qubits)));
        }
        let mut m = DenseMatrix::zeros(self.dim(), self.dim());
        for (i, j, v) in self.entries() {
            m[(i, j)] = v;
        }
        Ok(m)
    }

    /// Exact Pauli expansion via per-pair projector expansion.
    pub fn to_pauli_terms(&self) -> Result<PauliTermList> {
        let mut acc: Vec<WeightedPauli> = Vec::new();
        for (i, v) in self.diagonal.iter() {
            acc.extend(super::projector::expand_projector_pauli(*i, *i, Complex64::new(*v, 0.0), self.n_qubits)?.terms);
        }
        for (&(i, j), &v) in &self.upper {
            acc.extend(super::projector::expand_projector_pauli(i, j, v, self.n_qubits)?.terms);
        }
        Ok(PauliTermList::new(self.n_qubits, acc)?.combined())
    }
}

/// List of weighted Pauli strings over a common register.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliTermList {
    pub n_qubits: usize,
    pub terms: Vec<WeightedPauli>,
}

impl PauliTermList {
    pub fn new(n_qubits: usize, terms: Vec<WeightedPauli>) -> Result<Self> {
        for t in &terms {
            if t.string.n_qubits() != n_qubits {
                return Err(QgateError::Dimension(format!("term {} on {n_qubits} qubits", t.string)));
            }
        }
        Ok(PauliTermList { n_qubits, terms })
    }

    /// Real-coefficient list from `(coefficient, string)` pairs.
    pub fn from_real(items: &[(f64, &str)]) -> Result<Self> {
        let mut terms = Vec::new();
        for (c, s) in items {
            terms.push(WeightedPauli::real(*c, s.parse()?));
        }
        let n = terms.first().map(|t| t.string.n_qubits()).unwrap_or(0);
        Self::new(n, terms)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Merge equal strings (phases folded into coefficients) and drop |c| < 1e−14.
    /// Output is sorted by string text.
    pub fn combined(&self) -> Self {
        let mut acc: BTreeMap<String, (PauliString, Complex64)> = BTreeMap::new();
        for t in &self.terms {
            let k = t.string.phase_exponent();
            let bare = t.string.clone().with_phase(0);
            let c = t.coefficient * crate::pauli::phase_factor(k);
            acc.entry(bare.to_string()).or_insert((bare, Complex64::new(0.0, 0.0))).1 += c;
        }
        let terms =
            acc.into_values().filter(|(_, c)| c.norm() >= 1e-14).map(|(s, c)| WeightedPauli::new(c, s)).collect();
        PauliTermList { n_qubits: self.n_qubits, terms }
    }

    /// Real coefficients with phases folded in; errors if any is complex.
    pub fn real_terms(&self) -> Result<Vec<(PauliString, f64)>> {
        self.terms
            .iter()
            .map(|t| {
                let c = t.coefficient * crate::pauli::phase_factor(t.string.phase_exponent());
                if c.im.abs() > HERMITIAN_TOL {
                    return Err(QgateError::NonHermitian(c.im.abs()));
                }
                Ok((t.string.clone().with_phase(0), c.re))
            })
            .collect()
    }

    pub fn to_dense(&self) -> Result<DenseMatrix> {
        crate::pauli::sum_to_dense(self.n_qubits, &self.terms)
    }
}

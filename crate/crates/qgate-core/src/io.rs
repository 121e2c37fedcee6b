//! Readers and writers for Hamiltonian inputs.
//!
//! * MatrixMarket coordinate files (`real`, `integer` or `complex`; `general`,
//!   `symmetric` or `hermitian`). Non-power-of-two sizes are zero-padded.
//! * Sparse JSON: `{"dimension", "symmetry", "entries": [{"row", "col", "re", "im"}]}`
//!   with 0-based indices.
//! * Pauli text: one `coefficient string` pair per line, `#` starts a comment.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algorithms::HamiltonianInput;
use crate::compiler::{PauliTermList, SparseHamiltonian};
use crate::error::{QgateError, Result};
use crate::pauli::{PauliString, WeightedPauli};

fn parse_err(line: usize, message: impl Into<String>) -> QgateError {
    QgateError::Parse { line, message: message.into() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Field {
    Real,
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    General,
    Symmetric,
    Hermitian,
}

/// Smallest qubit count whose dimension holds `dim`.
fn qubits_for(dim: usize) -> usize {
    dim.next_power_of_two().trailing_zeros() as usize
}

fn build(
    dim: usize,
    symmetry: Symmetry,
    raw: Vec<(usize, usize, Complex64)>,
    line_of: &[usize],
) -> Result<SparseHamiltonian> {
    if dim == 0 {
        return Err(parse_err(0, "empty matrix"));
    }
    let n = qubits_for(dim).max(1);
    let mut entries = Vec::with_capacity(raw.len());
    for (k, &(i, j, v)) in raw.iter().enumerate() {
        let line = line_of.get(k).copied().unwrap_or(0);
        if i >= dim || j >= dim {
            return Err(parse_err(line, format!("entry ({}, {}) outside a {dim}x{dim} matrix", i + 1, j + 1)));
        }
        if symmetry == Symmetry::Symmetric && i != j && v.im != 0.0 {
            return Err(QgateError::NonHermitian(v.im.abs()));
        }
        if symmetry != Symmetry::General && i < j {
            return Err(parse_err(line, "symmetric storage expects the lower triangle"));
        }
        entries.push((i, j, v));
    }
    SparseHamiltonian::new(n, &entries)
}

/// Parse MatrixMarket coordinate text.
pub fn parse_matrix_market(text: &str) -> Result<SparseHamiltonian> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let words: Vec<String> = header.split_whitespace().map(|w| w.to_ascii_lowercase()).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(parse_err(hl, "expected '%%MatrixMarket matrix coordinate <field> <symmetry>'"));
    }
    if words[2] != "coordinate" {
        return Err(parse_err(hl, format!("unsupported format '{}'", words[2])));
    }
    let field = match words[3].as_str() {
        "real" | "integer" | "double" => Field::Real,
        "complex" => Field::Complex,
        other => return Err(parse_err(hl, format!("unsupported field '{other}'"))),
    };
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(parse_err(hl, format!("unsupported symmetry '{other}'"))),
    };
    let mut body = lines.filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('%'));
    let (sl, size) = body.next().ok_or_else(|| parse_err(hl + 1, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|w| w.parse::<usize>().map_err(|_| parse_err(sl, format!("bad size field '{w}'"))))
        .collect::<Result<_>>()?;
    let [rows, cols, nnz] = dims[..] else {
        return Err(parse_err(sl, "size line needs rows, cols and entry count"));
    };
    if rows != cols {
        return Err(parse_err(sl, format!("{rows}x{cols} matrix is not square")));
    }
    let mut raw = Vec::with_capacity(nnz);
    let mut line_of = Vec::with_capacity(nnz);
    for (ln, l) in body {
        let f: Vec<&str> = l.split_whitespace().collect();
        let want = if field == Field::Complex { 4 } else { 3 };
        if f.len() != want {
            return Err(parse_err(ln, format!("expected {want} fields, found {}", f.len())));
        }
        let idx = |s: &str| -> Result<usize> {
            match s.parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v - 1),
                _ => Err(parse_err(ln, format!("bad index '{s}'"))),
            }
        };
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| parse_err(ln, format!("bad value '{s}'")))
        };
        let v = Complex64::new(num(f[2])?, if want == 4 { num(f[3])? } else { 0.0 });
        raw.push((idx(f[0])?, idx(f[1])?, v));
        line_of.push(ln);
    }
    if raw.len() != nnz {
        return Err(parse_err(0, format!("size line promises {nnz} entries, found {}", raw.len())));
    }
    build(rows, symmetry, raw, &line_of)
}

/// MatrixMarket text with Hermitian storage (lower triangle, 1-based).
pub fn write_matrix_market(h: &SparseHamiltonian) -> String {
    let mut lower: Vec<(usize, usize, Complex64)> = h.entries().into_iter().filter(|(i, j, _)| i >= j).collect();
    lower.sort_by_key(|&(i, j, _)| (j, i));
    let mut out = String::from("%%MatrixMarket matrix coordinate complex hermitian\n");
    let _ = writeln!(out, "{} {} {}", h.dim(), h.dim(), lower.len());
    for (i, j, v) in lower {
        let _ = writeln!(out, "{} {} {:e} {:e}", i + 1, j + 1, v.re, v.im);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonEntry {
    pub row: usize,
    pub col: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// JSON form of a sparse Hamiltonian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseJson {
    pub dimension: usize,
    #[serde(default = "default_symmetry")]
    pub symmetry: Symmetry,
    pub entries: Vec<JsonEntry>,
}

fn default_symmetry() -> Symmetry {
    Symmetry::General
}

pub fn parse_sparse_json(text: &str) -> Result<SparseHamiltonian> {
    let doc: SparseJson = serde_json::from_str(text).map_err(|e| parse_err(e.line(), e.to_string()))?;
    let raw = doc.entries.iter().map(|e| (e.row, e.col, Complex64::new(e.re, e.im))).collect();
    build(doc.dimension, doc.symmetry, raw, &[])
}

/// Canonical JSON (upper triangle and diagonal, general symmetry).
pub fn write_sparse_json(h: &SparseHamiltonian) -> Result<String> {
    let doc = SparseJson {
        dimension: h.dim(),
        symmetry: Symmetry::General,
        entries: h.entries().into_iter().map(|(row, col, v)| JsonEntry { row, col, re: v.re, im: v.im }).collect(),
    };
    serde_json::to_string_pretty(&doc).map_err(|e| QgateError::InternalConsistency(e.to_string()))
}

/// Parse `coefficient string` lines into a term list.
pub fn parse_pauli_terms(text: &str) -> Result<PauliTermList> {
    let mut terms = Vec::new();
    let mut n = None;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 2 {
            return Err(parse_err(line, "expected '<coefficient> <pauli string>'"));
        }
        let c: f64 = f[0]
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| parse_err(line, format!("bad coefficient '{}'", f[0])))?;
        let p: PauliString = f[1].parse().map_err(|e: QgateError| parse_err(line, e.to_string()))?;
        match n {
            None => n = Some(p.n_qubits()),
            Some(m) if m != p.n_qubits() => {
                return Err(parse_err(line, format!("{}-qubit string after {m}-qubit strings", p.n_qubits())))
            }
            _ => {}
        }
        terms.push(WeightedPauli::real(c, p));
    }
    let n = n.ok_or_else(|| parse_err(0, "no terms"))?;
    PauliTermList::new(n, terms)
}

/// Inverse of [`parse_pauli_terms`] for real coefficients.
pub fn write_pauli_terms(terms: &PauliTermList) -> Result<String> {
    let mut out = String::new();
    for (p, c) in terms.real_terms()? {
        let _ = writeln!(out, "{c} {p}");
    }
    Ok(out)
}

/// Load a Hamiltonian, choosing the reader by extension: `.mtx`, `.json`,
/// anything else as Pauli text.
pub fn load_hamiltonian(path: &Path) -> Result<HamiltonianInput> {
    let text = std::fs::read_to_string(path).map_err(|e| QgateError::Io(format!("{}: {e}", path.display())))?;
    match path.extension().and_then(|e| e.to_str()).map(|e| e.to_ascii_lowercase()).as_deref() {
        Some("mtx") => parse_matrix_market(&text).map(HamiltonianInput::Sparse),
        Some("json") => parse_sparse_json(&text).map(HamiltonianInput::Sparse),
        _ => parse_pauli_terms(&text).map(HamiltonianInput::Pauli),
    }
}

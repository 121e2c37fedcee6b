//! Symplectic algebra for N-qubit Pauli strings.
//!
//! A string is stored as packed x/z bit-vectors plus a global prefactor
//! `i^phase`. Per-qubit decode: (0,0)=I, (1,0)=X, (1,1)=Y, (0,1)=Z.
//! Qubit 0 is the leftmost letter in text form and the most significant
//! bit of a basis-state index.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{QgateError, Result};

/// Dense complex matrix used by all oracles.
pub type DenseMatrix = DMatrix<Complex64>;

/// Default qubit cap for dense realizations.
pub const DEFAULT_DENSE_LIMIT: usize = 12;

const WORD: usize = 64;

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn from_bits(x: bool, z: bool) -> Letter {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    /// 2x2 matrix of the letter, row-major.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Letter::I => [[l, o], [o, l]],
            Letter::X => [[o, l], [l, o]],
            Letter::Y => [[o, -i], [i, o]],
            Letter::Z => [[l, o], [o, -l]],
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// `i^k` as a complex number.
pub fn phase_factor(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// N-qubit Pauli operator `i^phase · σ_0 ⊗ … ⊗ σ_{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

fn words(n: usize) -> usize {
    n.div_ceil(WORD)
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString { n, x: vec![0; words(n)], z: vec![0; words(n)], phase: 0 }
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        let mut p = PauliString::identity(letters.len());
        for (q, &l) in letters.iter().enumerate() {
            p.set_letter(q, l);
        }
        p
    }

    /// Identity everywhere except `letter` on qubit `q`.
    pub fn single(n: usize, q: usize, letter: Letter) -> Self {
        let mut p = PauliString::identity(n);
        p.set_letter(q, letter);
        p
    }

    /// Build from (qubit, letter) pairs; later pairs overwrite earlier ones.
    pub fn from_sparse(n: usize, ops: &[(usize, Letter)]) -> Result<Self> {
        let mut p = PauliString::identity(n);
        for &(q, l) in ops {
            if q >= n {
                return Err(QgateError::InvalidIndex(format!("qubit {q} out of range for {n} qubits")));
            }
            p.set_letter(q, l);
        }
        Ok(p)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn phase_exponent(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, k: u8) -> Self {
        self.phase = k % 4;
        self
    }

    pub fn set_phase(&mut self, k: u8) {
        self.phase = k % 4;
    }

    /// Returns `-self`.
    pub fn negated(&self) -> Self {
        let mut p = self.clone();
        p.phase = (p.phase + 2) % 4;
        p
    }

    pub fn x_bit(&self, q: usize) -> bool {
        (self.x[q / WORD] >> (q % WORD)) & 1 == 1
    }

    pub fn z_bit(&self, q: usize) -> bool {
        (self.z[q / WORD] >> (q % WORD)) & 1 == 1
    }

    pub fn letter(&self, q: usize) -> Letter {
        Letter::from_bits(self.x_bit(q), self.z_bit(q))
    }

    pub fn set_letter(&mut self, q: usize, l: Letter) {
        assert!(q < self.n, "qubit {q} out of range for {} qubits", self.n);
        let (xb, zb) = l.bits();
        let (w, b) = (q / WORD, q % WORD);
        self.x[w] = (self.x[w] & !(1 << b)) | ((xb as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((zb as u64) << b);
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.n).map(|q| self.letter(q)).collect()
    }

    /// Qubits carrying a non-identity letter.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.x_bit(q) || self.z_bit(q)).collect()
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(a, b)| (a | b).count_ones() as usize).sum()
    }

    /// True when every letter is I (the phase is ignored).
    pub fn is_identity_letters(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// Hermitian iff the prefactor is real.
    pub fn is_hermitian(&self) -> bool {
        self.phase.is_multiple_of(2)
    }

    /// Count of Y letters; the operator equals `i^(phase - n_y) X^x Z^z` up to ordering.
    pub fn y_count(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    fn check_len(&self, other: &PauliString) -> Result<()> {
        if self.n != other.n {
            return Err(QgateError::Dimension(format!("pauli strings of length {} and {}", self.n, other.n)));
        }
        Ok(())
    }

    /// Product `self · other` with exact phase.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        self.check_len(other)?;
        let mut pos = 0u32;
        let mut neg = 0u32;
        let mut x = Vec::with_capacity(self.x.len());
        let mut z = Vec::with_capacity(self.z.len());
        for w in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[w], self.z[w], other.x[w], other.z[w]);
            // X·Y, Y·Z, Z·X contribute +i; the reversed orders contribute -i.
            pos += (x1 & !z1 & x2 & z2).count_ones()
                + (x1 & z1 & !x2 & z2).count_ones()
                + (!x1 & z1 & x2 & !z2).count_ones();
            neg += (x1 & z1 & x2 & !z2).count_ones()
                + (x1 & !z1 & !x2 & z2).count_ones()
                + (!x1 & z1 & x2 & z2).count_ones();
            x.push(x1 ^ x2);
            z.push(z1 ^ z2);
        }
        let phase = (self.phase as i64 + other.phase as i64 + pos as i64 - neg as i64).rem_euclid(4) as u8;
        Ok(PauliString { n: self.n, x, z, phase })
    }

    /// Symplectic commutation test.
    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_len(other)?;
        let mut parity = 0u32;
        for w in 0..self.x.len() {
            parity += ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones();
        }
        Ok(parity.is_multiple_of(2))
    }

    /// Tensor product `self ⊗ other`; qubits of `other` follow those of `self`.
    pub fn tensor(&self, other: &PauliString) -> PauliString {
        let mut letters = self.letters();
        letters.extend(other.letters());
        PauliString::from_letters(&letters).with_phase(self.phase + other.phase)
    }

    /// Insert a qubit at `pos`, shifting later qubits up.
    pub fn insert_qubit(&self, pos: usize, l: Letter) -> PauliString {
        let mut letters = self.letters();
        letters.insert(pos, l);
        PauliString::from_letters(&letters).with_phase(self.phase)
    }

    /// Remove qubit `pos`, shifting later qubits down; returns the dropped letter.
    pub fn remove_qubit(&self, pos: usize) -> (PauliString, Letter) {
        let mut letters = self.letters();
        let l = letters.remove(pos);
        (PauliString::from_letters(&letters).with_phase(self.phase), l)
    }

    /// Basis-index masks (x, z) with qubit 0 at the most significant bit.
    pub fn index_masks(&self) -> Result<(usize, usize)> {
        if self.n >= usize::BITS as usize {
            return Err(QgateError::Resource(format!("{} qubits exceed index width", self.n)));
        }
        let (mut xm, mut zm) = (0usize, 0usize);
        for q in 0..self.n {
            let bit = 1usize << (self.n - 1 - q);
            if self.x_bit(q) {
                xm |= bit;
            }
            if self.z_bit(q) {
                zm |= bit;
            }
        }
        Ok((xm, zm))
    }

    /// Dense matrix under the default qubit cap.
    pub fn to_dense(&self) -> Result<DenseMatrix> {
        self.to_dense_with_limit(DEFAULT_DENSE_LIMIT)
    }

    pub fn to_dense_with_limit(&self, limit: usize) -> Result<DenseMatrix> {
        if self.n > limit {
            return Err(QgateError::Resource(format!("dense realization of {} qubits exceeds cap {limit}", self.n)));
        }
        let dim = 1usize << self.n;
        let (xm, zm) = self.index_masks()?;
        let ny = self.y_count() as u8;
        let mut m = DenseMatrix::zeros(dim, dim);
        for b in 0..dim {
            // Y = iXZ per site: P|b> = i^(phase+ny) (-1)^{|b & z|} |b ^ x>
            let sign = if (b & zm).count_ones() % 2 == 1 { 2 } else { 0 };
            m[(b ^ xm, b)] = phase_factor(self.phase + ny + sign);
        }
        Ok(m)
    }
}

/// `a · b` with exact phase.
pub fn multiply(a: &PauliString, b: &PauliString) -> Result<PauliString> {
    a.multiply(b)
}

/// Whether `a` and `b` commute.
pub fn commutes(a: &PauliString, b: &PauliString) -> Result<bool> {
    a.commutes(b)
}

/// Dense realization under the default cap.
pub fn to_dense(p: &PauliString) -> Result<DenseMatrix> {
    p.to_dense()
}

/// `exp(iφP/2) = cos(φ/2) I + i sin(φ/2) P`.
pub fn pauli_rotation_matrix(p: &PauliString, phi: f64) -> Result<DenseMatrix> {
    if !phi.is_finite() {
        return Err(QgateError::NonFinite(format!("rotation angle {phi}")));
    }
    let dense = p.to_dense()?;
    let dim = dense.nrows();
    let c = Complex64::new((phi / 2.0).cos(), 0.0);
    let s = Complex64::new(0.0, (phi / 2.0).sin());
    Ok(DenseMatrix::identity(dim, dim) * c + dense * s)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{prefix}")?;
        for q in 0..self.n {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = QgateError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = |m: &str| QgateError::Parse { line: 0, message: format!("pauli string {s:?}: {m}") };
        let (negative, rest) = if let Some(r) = t.strip_prefix('-') {
            (true, r)
        } else if let Some(r) = t.strip_prefix('\u{2212}') {
            (true, r)
        } else if let Some(r) = t.strip_prefix('+') {
            (false, r)
        } else {
            (false, t)
        };
        let (imag, rest) = if let Some(r) = rest.strip_prefix('i') {
            (true, r)
        } else if let Some(r) = rest.strip_prefix('1') {
            (false, r)
        } else {
            (false, rest)
        };
        let mut letters = Vec::with_capacity(rest.len());
        for c in rest.chars() {
            letters.push(Letter::from_char(c).ok_or_else(|| bad(&format!("unexpected character {c:?}")))?);
        }
        let phase = (if negative { 2 } else { 0 }) + (if imag { 1 } else { 0 });
        Ok(PauliString::from_letters(&letters).with_phase(phase))
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Pauli string with a complex coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedPauli {
    pub coefficient: Complex64,
    pub string: PauliString,
}

impl WeightedPauli {
    pub fn new(coefficient: Complex64, string: PauliString) -> Self {
        WeightedPauli { coefficient, string }
    }

    pub fn real(coefficient: f64, string: PauliString) -> Self {
        WeightedPauli { coefficient: Complex64::new(coefficient, 0.0), string }
    }

    /// Coefficient times the dense string.
    pub fn to_dense(&self) -> Result<DenseMatrix> {
        Ok(self.string.to_dense()? * self.coefficient)
    }
}

/// Dense matrix of a weighted sum.
pub fn sum_to_dense(n: usize, terms: &[WeightedPauli]) -> Result<DenseMatrix> {
    let dim = 1usize << n;
    let mut m = DenseMatrix::zeros(dim, dim);
    for t in terms {
        if t.string.n_qubits() != n {
            return Err(QgateError::Dimension(format!("term on {} qubits in a {n}-qubit sum", t.string.n_qubits())));
        }
        m += t.to_dense()?;
    }
    Ok(m)
}

//! Dense statevector engine and exact matrix oracles.
//!
//! Bit order: qubit 0 is the most significant bit of the basis index,
//! so `init_basis(2, 2)` is `|10⟩`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QgateError, Result};
use crate::pauli::{phase_factor, DenseMatrix, Letter, PauliString, DEFAULT_DENSE_LIMIT};

/// Born probability below which a forced outcome is rejected.
pub const POSTSELECTION_FLOOR: f64 = 1e-12;

const NORM_TOL: f64 = 1e-10;

/// Single-qubit gates. Rotations use `R_X(θ) = exp(-iθX/2)`, `R_Z(θ) = exp(-iθZ/2)`,
/// and `P(θ) = diag(1, e^{iθ})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    H,
    S,
    Sdg,
    X,
    Y,
    Z,
    Rx(f64),
    Rz(f64),
    P(f64),
}

impl Gate {
    /// Row-major 2x2 matrix.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        match self {
            Gate::H => [[h, h], [h, -h]],
            Gate::S => [[l, o], [o, i]],
            Gate::Sdg => [[l, o], [o, -i]],
            Gate::X => Letter::X.matrix(),
            Gate::Y => Letter::Y.matrix(),
            Gate::Z => Letter::Z.matrix(),
            Gate::Rx(t) => {
                let c = Complex64::new((t / 2.0).cos(), 0.0);
                let s = Complex64::new(0.0, -(t / 2.0).sin());
                [[c, s], [s, c]]
            }
            Gate::Rz(t) => [[Complex64::from_polar(1.0, -t / 2.0), o], [o, Complex64::from_polar(1.0, t / 2.0)]],
            Gate::P(t) => [[l, o], [o, Complex64::from_polar(1.0, t)]],
        }
    }

    fn angle(self) -> Option<f64> {
        match self {
            Gate::Rx(t) | Gate::Rz(t) | Gate::P(t) => Some(t),
            _ => None,
        }
    }
}

/// How a measurement outcome is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasureMode {
    Forced(u8),
    Sampled(u64),
}

/// Whether an outcome was forced or drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RecordMode {
    Forced,
    Sampled,
}

/// Outcome of one projective Z measurement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub qubit_index: usize,
    pub outcome: u8,
    pub probability: f64,
    pub mode: RecordMode,
}

/// Normalized amplitude vector over `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

fn check_finite(t: f64) -> Result<()> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(QgateError::NonFinite(format!("angle {t}")))
    }
}

impl StateVector {
    /// Computational basis state `|index⟩`.
    pub fn init_basis(n: usize, index: usize) -> Result<Self> {
        if n >= usize::BITS as usize - 1 || index >= (1usize << n) {
            return Err(QgateError::InvalidIndex(format!("basis index {index} for {n} qubits")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    /// Wrap amplitudes; length must be a power of two and the norm 1 within 1e-10.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(QgateError::Dimension(format!("amplitude count {len} is not a power of two")));
        }
        let sv = StateVector { n: len.trailing_zeros() as usize, amps };
        let norm = sv.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(QgateError::InvalidArgument(format!("state norm² {norm} is not 1")));
        }
        Ok(sv)
    }

    /// Normalize arbitrary nonzero amplitudes.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(QgateError::InvalidArgument("cannot normalize a zero vector".into()));
        }
        StateVector::from_amplitudes(amps.into_iter().map(|a| a / norm).collect())
    }

    /// Product state `|+⟩^{⊗n}`.
    pub fn plus_state(n: usize) -> Self {
        let a = Complex64::new((0.5f64).powf(n as f64 / 2.0), 0.0);
        StateVector { n, amps: vec![a; 1 << n] }
    }

    /// Haar-like random state from a seeded generator.
    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        let amps: Vec<Complex64> =
            (0..1usize << n).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        StateVector::normalized(amps).expect("random state is nonzero")
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn mask(&self, q: usize) -> Result<usize> {
        if q >= self.n {
            return Err(QgateError::InvalidIndex(format!("qubit {q} of {}", self.n)));
        }
        Ok(1usize << (self.n - 1 - q))
    }

    /// Multiply every amplitude by `c` (used for global phases).
    pub fn scale(&mut self, c: Complex64) {
        for a in &mut self.amps {
            *a *= c;
        }
    }

    /// Apply a 2x2 matrix to qubit `q` on the subset of indices accepted by `filter`.
    fn apply_matrix_where(&mut self, q: usize, m: [[Complex64; 2]; 2], filter: impl Fn(usize) -> bool) -> Result<()> {
        let mask = self.mask(q)?;
        for i0 in 0..self.amps.len() {
            if i0 & mask != 0 || !filter(i0) {
                continue;
            }
            let i1 = i0 | mask;
            let (a0, a1) = (self.amps[i0], self.amps[i1]);
            self.amps[i0] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[i1] = m[1][0] * a0 + m[1][1] * a1;
        }
        Ok(())
    }

    /// Standard action of a single-qubit gate on qubit `q`.
    pub fn apply_single(&mut self, q: usize, gate: Gate) -> Result<()> {
        if let Some(t) = gate.angle() {
            check_finite(t)?;
        }
        self.apply_matrix_where(q, gate.matrix(), |_| true)
    }

    /// Arbitrary 2x2 matrix on qubit `q` (caller guarantees unitarity).
    pub fn apply_unitary_1q(&mut self, q: usize, m: [[Complex64; 2]; 2]) -> Result<()> {
        self.apply_matrix_where(q, m, |_| true)
    }

    /// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ σ` with `σ` on `target`.
    pub fn apply_controlled_pauli(&mut self, control: usize, target: usize, letter: Letter) -> Result<()> {
        if control == target {
            return Err(QgateError::InvalidIndex(format!("control and target both {control}")));
        }
        let cm = self.mask(control)?;
        self.apply_matrix_where(target, letter.matrix(), |i| i & cm != 0)
    }

    /// Apply `gate` to `target` iff every control bit equals its key.
    pub fn apply_arbitrary_controlled(&mut self, controls: &[(usize, u8)], target: usize, gate: Gate) -> Result<()> {
        if let Some(t) = gate.angle() {
            check_finite(t)?;
        }
        let (cmask, cval) = self.control_masks(controls, Some(target))?;
        self.apply_matrix_where(target, gate.matrix(), |i| i & cmask == cval)
    }

    /// Combined (mask, value) for a control list; rejects duplicates and collisions with `target`.
    pub fn control_masks(&self, controls: &[(usize, u8)], target: Option<usize>) -> Result<(usize, usize)> {
        let (mut cmask, mut cval) = (0usize, 0usize);
        for &(q, key) in controls {
            let m = self.mask(q)?;
            if cmask & m != 0 || Some(q) == target {
                return Err(QgateError::InvalidIndex(format!("qubit {q} repeated in controlled operation")));
            }
            if key > 1 {
                return Err(QgateError::InvalidArgument(format!("control key {key} is not a bit")));
            }
            cmask |= m;
            if key == 1 {
                cval |= m;
            }
        }
        Ok((cmask, cval))
    }

    /// `P|ψ⟩` including the string's phase prefactor.
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        self.check_pauli(p)?;
        let (xm, zm) = p.index_masks()?;
        let base = p.phase_exponent() + p.y_count() as u8;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (b, &a) in self.amps.iter().enumerate() {
            let sign = if (b & zm).count_ones() % 2 == 1 { 2 } else { 0 };
            out[b ^ xm] = a * phase_factor(base + sign);
        }
        self.amps = out;
        Ok(())
    }

    fn check_pauli(&self, p: &PauliString) -> Result<()> {
        if p.n_qubits() != self.n {
            return Err(QgateError::Dimension(format!(
                "pauli string on {} qubits applied to {}-qubit state",
                p.n_qubits(),
                self.n
            )));
        }
        Ok(())
    }

    /// `exp(iφP/2)|ψ⟩ = cos(φ/2)|ψ⟩ + i sin(φ/2) P|ψ⟩`, without a dense matrix.
    pub fn apply_pauli_rotation(&mut self, p: &PauliString, phi: f64) -> Result<()> {
        self.apply_controlled_pauli_rotation(&[], p, phi)
    }

    /// Pauli rotation restricted to the subspace where every control matches its key.
    /// Controls must lie outside the support of `p`.
    pub fn apply_controlled_pauli_rotation(
        &mut self,
        controls: &[(usize, u8)],
        p: &PauliString,
        phi: f64,
    ) -> Result<()> {
        check_finite(phi)?;
        self.check_pauli(p)?;
        let (cmask, cval) = self.control_masks(controls, None)?;
        let (xm, zm) = p.index_masks()?;
        if cmask & (xm | zm) != 0 {
            return Err(QgateError::InvalidIndex("control inside rotation support".into()));
        }
        let base = p.phase_exponent() + p.y_count() as u8;
        let c = Complex64::new((phi / 2.0).cos(), 0.0);
        let s = Complex64::new(0.0, (phi / 2.0).sin());
        let old = self.amps.clone();
        for (b, &a) in old.iter().enumerate() {
            if b & cmask != cval {
                continue;
            }
            let sign = if (b & zm).count_ones() % 2 == 1 { 2 } else { 0 };
            let t = b ^ xm;
            if t == b {
                // diagonal string: eigenvalue ±1 (times phase)
                self.amps[b] = c * a + s * phase_factor(base + sign) * a;
            } else {
                self.amps[t] = c * old[t] + s * phase_factor(base + sign) * a;
            }
        }
        Ok(())
    }

    /// Probability that qubit `q` reads 1.
    pub fn probability_one(&self, q: usize) -> Result<f64> {
        let m = self.mask(q)?;
        Ok(self.amps.iter().enumerate().filter(|(i, _)| i & m != 0).map(|(_, a)| a.norm_sqr()).sum())
    }

    /// Projective Z measurement of `q`; the qubit is removed from the register.
    pub fn measure(&self, q: usize, mode: MeasureMode) -> Result<(StateVector, MeasurementRecord)> {
        match mode {
            MeasureMode::Forced(bit) => self.measure_outcome(q, bit, RecordMode::Forced),
            MeasureMode::Sampled(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                self.measure_with_draw(q, rng.random::<f64>())
            }
        }
    }

    /// Sampled measurement given a uniform draw `u ∈ [0,1)`: outcome 1 iff `u < p(1)`.
    pub fn measure_with_draw(&self, q: usize, u: f64) -> Result<(StateVector, MeasurementRecord)> {
        let p1 = self.probability_one(q)?;
        let bit = if u < p1 { 1 } else { 0 };
        self.measure_outcome(q, bit, RecordMode::Sampled)
    }

    /// Project onto `bit` and renormalize.
    pub fn measure_outcome(&self, q: usize, bit: u8, mode: RecordMode) -> Result<(StateVector, MeasurementRecord)> {
        let m = self.mask(q)?;
        if bit > 1 {
            return Err(QgateError::InvalidArgument(format!("outcome {bit} is not a bit")));
        }
        // weights are taken relative to the actual norm so rounding drift cannot compound
        let p_bit: f64 =
            self.amps.iter().enumerate().filter(|(i, _)| (i & m != 0) == (bit == 1)).map(|(_, a)| a.norm_sqr()).sum();
        let prob = p_bit / self.norm_sqr();
        if prob.is_nan() || prob < POSTSELECTION_FLOOR {
            return Err(QgateError::PostselectionImpossible {
                qubit: q,
                probability: if prob.is_nan() { 0.0 } else { prob },
            });
        }
        let norm = p_bit.sqrt();
        let low = m - 1;
        let mut amps = Vec::with_capacity(self.amps.len() / 2);
        for r in 0..self.amps.len() / 2 {
            // reinsert the measured bit between the high and low parts of r
            let idx = ((r & !low) << 1) | (r & low) | if bit == 1 { m } else { 0 };
            amps.push(self.amps[idx] / norm);
        }
        let sv = StateVector { n: self.n - 1, amps };
        Ok((sv, MeasurementRecord { qubit_index: q, outcome: bit, probability: prob, mode }))
    }

    /// Append a qubit in state `a0|0⟩ + a1|1⟩` as the new last (least significant) qubit.
    pub fn append_qubit(&mut self, a0: Complex64, a1: Complex64) {
        let mut amps = Vec::with_capacity(self.amps.len() * 2);
        for &a in &self.amps {
            amps.push(a * a0);
            amps.push(a * a1);
        }
        self.amps = amps;
        self.n += 1;
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n != other.n {
            return Err(QgateError::Dimension(format!("{} vs {} qubits", self.n, other.n)));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Apply a dense matrix of matching dimension.
    pub fn apply_dense(&mut self, m: &DenseMatrix) -> Result<()> {
        if m.nrows() != self.dim() || m.ncols() != self.dim() {
            return Err(QgateError::Dimension(format!(
                "{}x{} matrix on dimension {}",
                m.nrows(),
                m.ncols(),
                self.dim()
            )));
        }
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        self.amps = (m * v).as_slice().to_vec();
        Ok(())
    }

    /// Max over amplitudes of `|a - e^{iα} b|` with α chosen to align the two states.
    pub fn distance_up_to_phase(&self, other: &StateVector) -> Result<f64> {
        let ov = self.inner(other)?;
        let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { Complex64::new(1.0, 0.0) };
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| (a * phase - b).norm()).fold(0.0, f64::max))
    }

    /// Max amplitude difference without phase alignment.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        if self.n != other.n {
            return Err(QgateError::Dimension(format!("{} vs {} qubits", self.n, other.n)));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// CSV dump with header `index,re,im`.
    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "index,re,im")?;
        for (i, a) in self.amps.iter().enumerate() {
            writeln!(w, "{i},{},{}", a.re, a.im)?;
        }
        Ok(())
    }
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

/// Square unitary matrix; unitarity checked on construction when requested.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseUnitary {
    matrix: DenseMatrix,
}

impl DenseUnitary {
    pub fn new(matrix: DenseMatrix, check: bool) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(QgateError::Dimension(format!("{}x{} is not square", matrix.nrows(), matrix.ncols())));
        }
        if check {
            let dev = unitarity_deviation(&matrix);
            if dev > 1e-9 {
                return Err(QgateError::InternalConsistency(format!("matrix deviates from unitary by {dev:.3e}")));
            }
        }
        Ok(DenseUnitary { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        DenseUnitary { matrix: DenseMatrix::identity(dim, dim) }
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, sv: &StateVector) -> Result<StateVector> {
        let mut out = sv.clone();
        out.apply_dense(&self.matrix)?;
        Ok(out)
    }
}

/// `max |(U U† - I)_{ij}|`.
pub fn unitarity_deviation(m: &DenseMatrix) -> f64 {
    let d = m * m.adjoint() - DenseMatrix::identity(m.nrows(), m.ncols());
    d.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Raw Frobenius distance `‖U − V‖_F` (no phase quotient).
pub fn frobenius_distance(u: &DenseUnitary, v: &DenseUnitary) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(QgateError::Dimension(format!("{} vs {}", u.dim(), v.dim())));
    }
    Ok((u.matrix() - v.matrix()).norm())
}

/// `max |H − H†|`.
pub fn hermiticity_deviation(h: &DenseMatrix) -> f64 {
    (h - h.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Eigenvalues (ascending) and eigenvectors (columns) of a Hermitian matrix.
pub fn hermitian_eigen(h: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    if h.nrows() != h.ncols() {
        return Err(QgateError::Dimension(format!("{}x{} is not square", h.nrows(), h.ncols())));
    }
    if h.nrows() > (1 << DEFAULT_DENSE_LIMIT) {
        return Err(QgateError::Resource(format!("dimension {} exceeds oracle cap", h.nrows())));
    }
    let dev = hermiticity_deviation(h);
    if dev >= 1e-9 {
        return Err(QgateError::NonHermitian(dev));
    }
    let sym = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..h.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(h.nrows(), h.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// `exp(−iHt)` via Hermitian eigendecomposition.
pub fn hermitian_exponential_oracle(h: &DenseMatrix, t: f64) -> Result<DenseUnitary> {
    check_finite(t)?;
    let (values, vectors) = hermitian_eigen(h)?;
    let n = values.len();
    let mut scaled = vectors.clone();
    for (c, &lam) in values.iter().enumerate() {
        let f = Complex64::from_polar(1.0, -lam * t);
        for r in 0..n {
            scaled[(r, c)] *= f;
        }
    }
    DenseUnitary::new(scaled * vectors.adjoint(), true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_ordering() {
        let s = StateVector::init_basis(2, 2).unwrap();
        assert_eq!(s.amplitudes()[2], c(1.0, 0.0));
        assert!(StateVector::init_basis(2, 4).is_err());
        let s = StateVector::init_basis(5, 31).unwrap();
        assert_eq!(s.amplitudes()[31], c(1.0, 0.0));
    }

    #[test]
    fn hadamard_gives_plus() {
        let mut s = StateVector::init_basis(1, 0).unwrap();
        s.apply_single(0, Gate::H).unwrap();
        assert!((s.amplitudes()[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((s.amplitudes()[1] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rx_negative_angle_matches_magic_state_form() {
        let theta = 0.731;
        let mut s = StateVector::init_basis(1, 0).unwrap();
        s.apply_single(0, Gate::Rx(-theta)).unwrap();
        assert!((s.amplitudes()[0] - c((theta / 2.0).cos(), 0.0)).norm() < 1e-15);
        assert!((s.amplitudes()[1] - c(0.0, (theta / 2.0).sin())).norm() < 1e-15);
    }

    #[test]
    fn s_squared_is_z() {
        let mut s = StateVector::init_basis(1, 1).unwrap();
        s.apply_single(0, Gate::S).unwrap();
        s.apply_single(0, Gate::S).unwrap();
        assert!((s.amplitudes()[1] - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn controlled_paulis() {
        let mut s = StateVector::init_basis(2, 2).unwrap();
        s.apply_controlled_pauli(0, 1, Letter::X).unwrap();
        assert_eq!(s.amplitudes()[3], c(1.0, 0.0));

        let mut s = StateVector::init_basis(2, 2).unwrap();
        s.apply_controlled_pauli(0, 1, Letter::Y).unwrap();
        assert!((s.amplitudes()[3] - c(0.0, 1.0)).norm() < 1e-15);

        assert!(s.apply_controlled_pauli(1, 1, Letter::Z).is_err());
    }

    #[test]
    fn cluster_state_stabilizers() {
        let mut s = StateVector::plus_state(2);
        s.apply_controlled_pauli(0, 1, Letter::Z).unwrap();
        for g in ["XZ", "ZX"] {
            let mut t = s.clone();
            t.apply_pauli(&g.parse().unwrap()).unwrap();
            assert!(t.max_abs_diff(&s).unwrap() < 1e-12, "{g}");
        }
    }

    #[test]
    fn rotation_on_eigenstate() {
        let phi = 0.9;
        let mut s = StateVector::init_basis(1, 0).unwrap();
        s.apply_pauli_rotation(&"Z".parse().unwrap(), phi).unwrap();
        assert!((s.amplitudes()[0] - Complex64::from_polar(1.0, phi / 2.0)).norm() < 1e-15);
        let before = s.clone();
        s.apply_pauli_rotation(&"Z".parse().unwrap(), 0.0).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn measurement_examples() {
        let plus = StateVector::plus_state(1);
        let (rest, rec) = plus.measure(0, MeasureMode::Forced(0)).unwrap();
        assert_eq!(rest.n_qubits(), 0);
        assert!((rec.probability - 0.5).abs() < 1e-15);

        let bell =
            StateVector::from_amplitudes(vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(FRAC_1_SQRT_2, 0.0)])
                .unwrap();
        let (rest, rec) = bell.measure(0, MeasureMode::Sampled(7)).unwrap();
        assert!((rec.probability - 0.5).abs() < 1e-12);
        assert_eq!(rest.amplitudes()[rec.outcome as usize], c(1.0, 0.0));

        let zero = StateVector::init_basis(1, 0).unwrap();
        assert!(matches!(zero.measure(0, MeasureMode::Forced(1)), Err(QgateError::PostselectionImpossible { .. })));
    }

    #[test]
    fn measurement_removes_middle_qubit() {
        // |1 0 1> measuring qubit 1 leaves |11>
        let s = StateVector::init_basis(3, 0b101).unwrap();
        let (rest, _) = s.measure(1, MeasureMode::Forced(0)).unwrap();
        assert_eq!(rest.amplitudes()[0b11], c(1.0, 0.0));
    }

    #[test]
    fn oracle_special_cases() {
        let z = DenseMatrix::zeros(4, 4);
        let u = hermitian_exponential_oracle(&z, 1.3).unwrap();
        assert!((u.matrix() - DenseMatrix::identity(4, 4)).norm() < 1e-14);

        let zm = "Z".parse::<PauliString>().unwrap().to_dense().unwrap();
        let u = hermitian_exponential_oracle(&zm, PI / 2.0).unwrap();
        assert!((u.matrix()[(0, 0)] - Complex64::from_polar(1.0, -PI / 2.0)).norm() < 1e-14);
        assert!((u.matrix()[(1, 1)] - Complex64::from_polar(1.0, PI / 2.0)).norm() < 1e-14);

        let mut bad = DenseMatrix::zeros(2, 2);
        bad[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(hermitian_exponential_oracle(&bad, 1.0), Err(QgateError::NonHermitian(_))));
    }

    #[test]
    fn fidelity_and_distance() {
        let a = StateVector::init_basis(1, 0).unwrap();
        let b = StateVector::init_basis(1, 1).unwrap();
        assert_eq!(fidelity(&a, &a).unwrap(), 1.0);
        assert_eq!(fidelity(&a, &b).unwrap(), 0.0);
        let alpha = 0.4;
        let u = DenseUnitary::identity(4);
        let v = DenseUnitary::new(DenseMatrix::identity(4, 4) * Complex64::from_polar(1.0, alpha), true).unwrap();
        let d = frobenius_distance(&u, &v).unwrap();
        assert!((d - (Complex64::from_polar(1.0, alpha) - 1.0).norm() * 2.0).abs() < 1e-14);
    }

    #[test]
    fn arbitrary_controlled_cnot() {
        let mut s = StateVector::init_basis(2, 2).unwrap();
        s.apply_arbitrary_controlled(&[(0, 1)], 1, Gate::X).unwrap();
        assert_eq!(s.amplitudes()[3], c(1.0, 0.0));
        assert!(s.apply_arbitrary_controlled(&[(1, 1)], 1, Gate::X).is_err());
    }

    #[test]
    fn append_qubit_is_least_significant() {
        let mut s = StateVector::init_basis(1, 1).unwrap();
        s.append_qubit(c(0.0, 0.0), c(1.0, 0.0));
        assert_eq!(s.amplitudes()[3], c(1.0, 0.0));
    }
}

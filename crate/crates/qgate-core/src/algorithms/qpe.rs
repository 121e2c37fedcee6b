use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::compiler::{
    add_control, compile_sparse, compile_trotter, controlled_phase_rotations, PauliTermList, SparseHamiltonian,
    TermOrdering, TrotterOrder,
};
use crate::error::{QgateError, Result};
use crate::ir::{
    execute_one, CliffordGate, Control, ExecMode, ExecOptions, FramePolicy, Instruction, ProgramBuilder, QGateProgram,
    QubitRef,
};
use crate::pauli::{DenseMatrix, DEFAULT_DENSE_LIMIT};
use crate::statevector::{frobenius_distance, hermitian_exponential_oracle, StateVector};

/// Sweep scale constant for a 3-qubit phase register.
pub const C3: f64 = 0.695;
/// Sweep scale constant for a 4-qubit phase register.
pub const C4: f64 = 0.3455;

/// Hamiltonian given as Pauli terms (compiled by Trotterized rotations) or as
/// a sparse matrix (compiled by the direct method).
#[derive(Clone, Debug, PartialEq)]
pub enum HamiltonianInput {
    Pauli(PauliTermList),
    Sparse(SparseHamiltonian),
}

impl HamiltonianInput {
    pub fn n_qubits(&self) -> usize {
        match self {
            HamiltonianInput::Pauli(p) => p.n_qubits,
            HamiltonianInput::Sparse(s) => s.n_qubits(),
        }
    }

    pub fn to_dense(&self) -> Result<DenseMatrix> {
        match self {
            HamiltonianInput::Pauli(p) => p.to_dense(),
            HamiltonianInput::Sparse(s) => s.to_dense(),
        }
    }

    /// Compiled `exp(−iHt)`.
    pub fn compile(&self, t: f64, order: TrotterOrder, steps: usize) -> Result<QGateProgram> {
        match self {
            HamiltonianInput::Pauli(p) => compile_trotter(p, order, steps, TermOrdering::AsGiven, t),
            HamiltonianInput::Sparse(s) => compile_sparse(s, t, order, steps, TermOrdering::AsGiven),
        }
    }
}

/// How the controlled evolutions are realized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Evolution {
    /// Dense controlled powers of the exact exponential.
    Native,
    /// Compiled program with the phase-register qubit added as a control to
    /// every rotation, repeated `2^j` times.
    Compiled { order: TrotterOrder, steps: usize },
}

/// Phase estimation settings. The evolution is `U = exp(−iH·delta·scale)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QpeConfig {
    pub b_qubits: usize,
    pub shots: usize,
    pub seed: u64,
    pub delta: f64,
    pub scale: f64,
}

impl QpeConfig {
    pub fn new(b_qubits: usize, shots: usize, seed: u64, delta: f64) -> Self {
        QpeConfig { b_qubits, shots, seed, delta, scale: 1.0 }
    }

    pub fn time(&self) -> f64 {
        self.delta * self.scale
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.b_qubits == 0 || self.shots == 0 {
            return Err(QgateError::InvalidArgument("b_qubits and shots must be at least 1".into()));
        }
        if self.b_qubits + n > DEFAULT_DENSE_LIMIT + 2 {
            return Err(QgateError::Resource(format!("{} phase qubits on {n} state qubits", self.b_qubits)));
        }
        if !self.time().is_finite() {
            return Err(QgateError::NonFinite("evolution time".into()));
        }
        Ok(())
    }
}

/// Outcome of phase estimation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseEstimate {
    /// Bitstring (phase qubit 0 first, most significant) to count.
    pub histogram: BTreeMap<String, usize>,
    pub mode_bitstring: String,
    /// `int(mode) / 2^b`.
    pub theta_hat: f64,
    /// Exact outcome distribution of the phase register.
    pub probabilities: Vec<f64>,
    pub energy_hat: f64,
}

/// Wrap a phase in turns into `(−½, ½]`.
pub fn wrap_phase(theta: f64) -> f64 {
    let t = theta - theta.floor();
    if t > 0.5 {
        t - 1.0
    } else {
        t
    }
}

/// Energy from an estimated phase of `exp(−iEt)`: `E = −2π·wrap(θ)/t`.
/// Phases in the lower half map to negative energies.
pub fn energy_from_phase(theta: f64, t: f64) -> Result<f64> {
    if t == 0.0 || !t.is_finite() {
        return Err(QgateError::InvalidArgument(format!("evolution time {t}")));
    }
    Ok(-2.0 * PI * wrap_phase(theta) / t)
}

/// Phase in turns, in `[0, 1)`, of `exp(−iEt)`.
pub fn exact_phase(energy: f64, t: f64) -> f64 {
    let th = -energy * t / (2.0 * PI);
    th - th.floor()
}

/// Largest eigenphase shift, in turns, of a unitary within `eps` (spectral
/// norm, bounded here by the Frobenius distance) of the exact one.
pub fn phase_drift_bound(eps: f64) -> f64 {
    if eps >= 2.0 {
        0.5
    } else {
        2.0 * (eps / 2.0).asin() / (2.0 * PI)
    }
}

fn bitstring(x: usize, b: usize) -> String {
    (0..b).map(|k| if (x >> (b - 1 - k)) & 1 == 1 { '1' } else { '0' }).collect()
}

fn emit_cnot(b: &mut ProgramBuilder, c: usize, t: usize) -> Result<()> {
    b.controlled_block(
        vec![Control { qubit: QubitRef::logical(c), key: 1 }],
        vec![Instruction::SingleClifford { qubit: QubitRef::logical(t), gate: CliffordGate::X }],
    )
}

/// Inverse Fourier transform on qubits `0..b` of an `n`-qubit register, from
/// Hadamards and controlled phases lowered to Z-string rotations. Qubit 0 is
/// the most significant bit of both input and output.
pub fn inverse_qft_program(n: usize, b: usize) -> Result<QGateProgram> {
    if b == 0 || b > n {
        return Err(QgateError::InvalidArgument(format!("{b} phase qubits on {n}")));
    }
    let mut pb = ProgramBuilder::new(n).named(format!("inverse qft {b}"), "qpe");
    for k in 0..b / 2 {
        let (x, y) = (k, b - 1 - k);
        emit_cnot(&mut pb, x, y)?;
        emit_cnot(&mut pb, y, x)?;
        emit_cnot(&mut pb, x, y)?;
    }
    for j in (0..b).rev() {
        for k in (j + 1..b).rev() {
            let phi = -2.0 * PI / (1u64 << (k - j + 1)) as f64;
            let set = controlled_phase_rotations(n, &[(k, 1)], &[j], phi)?;
            for (p, a) in &set.rotations {
                pb.pauli_rotation(p, *a)?;
            }
            pb.add_global_phase(set.global_phase);
        }
        pb.clifford(QubitRef::logical(j), CliffordGate::H)?;
    }
    pb.build()
}

fn dense_inverse_qft(state: &mut [Complex64], b: usize, n: usize) {
    let nb = 1usize << b;
    let ns = 1usize << n;
    let norm = 1.0 / (nb as f64).sqrt();
    let mut col = vec![Complex64::new(0.0, 0.0); nb];
    for s in 0..ns {
        for x in 0..nb {
            col[x] = state[(x << n) | s];
        }
        for y in 0..nb {
            let mut acc = Complex64::new(0.0, 0.0);
            for (x, a) in col.iter().enumerate() {
                acc += a * Complex64::from_polar(norm, -2.0 * PI * ((x * y) % nb) as f64 / nb as f64);
            }
            state[(y << n) | s] = acc;
        }
    }
}

fn controlled_dense(state: &mut [Complex64], control_mask: usize, n: usize, u: &DenseMatrix) {
    let ns = 1usize << n;
    for hi in (0..state.len()).step_by(ns) {
        if hi & control_mask == 0 {
            continue;
        }
        let v = nalgebra::DVector::from_column_slice(&state[hi..hi + ns]);
        let w = u * v;
        state[hi..hi + ns].copy_from_slice(w.as_slice());
    }
}

/// Register state just before measuring the phase qubits.
fn qpe_state(h: &HamiltonianInput, eigenstate: &StateVector, cfg: &QpeConfig, evo: Evolution) -> Result<StateVector> {
    let n = h.n_qubits();
    let b = cfg.b_qubits;
    let total = n + b;
    let t = cfg.time();
    // |+⟩^b ⊗ |ψ⟩
    let amp = Complex64::new(1.0 / ((1u64 << b) as f64).sqrt(), 0.0);
    let mut amps = Vec::with_capacity(1 << total);
    for _ in 0..1usize << b {
        amps.extend(eigenstate.amplitudes().iter().map(|a| a * amp));
    }
    match evo {
        Evolution::Native => {
            let dense = h.to_dense()?;
            for k in 0..b {
                let power = (1u64 << (b - 1 - k)) as f64;
                let u = hermitian_exponential_oracle(&dense, t * power)?;
                controlled_dense(&mut amps, 1usize << (total - 1 - k), n, u.matrix());
            }
            dense_inverse_qft(&mut amps, b, n);
            StateVector::normalized(amps)
        }
        Evolution::Compiled { order, steps } => {
            let mut state = StateVector::normalized(amps)?;
            let opts = ExecOptions::new(ExecMode::PostselectZero, FramePolicy::ApplyImmediately);
            let u = h.compile(t, order, steps)?;
            let layout: Vec<usize> = (b..total).collect();
            let embedded = u.embed(total, &layout)?;
            for k in 0..b {
                let cu = add_control(&embedded, k)?;
                for _ in 0..1u64 << (b - 1 - k) {
                    state = execute_one(&cu, &state, &opts)?.final_state;
                }
            }
            execute_one(&inverse_qft_program(total, b)?, &state, &opts).map(|r| r.final_state)
        }
    }
}

/// Quantum phase estimation of `exp(−iH·t)` on `eigenstate`: phase register
/// first, qubit `k` controlling `U^{2^{b−1−k}}`, inverse Fourier transform,
/// then `shots` seeded samples of the phase register.
pub fn qpe(h: &HamiltonianInput, eigenstate: &StateVector, cfg: &QpeConfig, evo: Evolution) -> Result<PhaseEstimate> {
    let n = h.n_qubits();
    cfg.check(n)?;
    if eigenstate.n_qubits() != n {
        return Err(QgateError::Dimension(format!(
            "{}-qubit state for a {n}-qubit Hamiltonian",
            eigenstate.n_qubits()
        )));
    }
    if (eigenstate.norm_sqr() - 1.0).abs() > 1e-9 {
        return Err(QgateError::InvalidArgument("eigenstate is not normalized".into()));
    }
    let final_state = qpe_state(h, eigenstate, cfg, evo)?;
    let b = cfg.b_qubits;
    let ns = 1usize << n;
    let mut probabilities = vec![0.0; 1 << b];
    for (i, a) in final_state.amplitudes().iter().enumerate() {
        probabilities[i / ns] += a.norm_sqr();
    }
    let dist = WeightedIndex::new(&probabilities).map_err(|e| QgateError::InternalConsistency(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut counts = vec![0usize; 1 << b];
    for _ in 0..cfg.shots {
        counts[dist.sample(&mut rng)] += 1;
    }
    // ties go to the smaller integer
    let mode = counts.iter().enumerate().max_by(|x, y| x.1.cmp(y.1).then(y.0.cmp(&x.0))).map(|(i, _)| i).unwrap_or(0);
    let histogram = counts.iter().enumerate().filter(|(_, c)| **c > 0).map(|(i, c)| (bitstring(i, b), *c)).collect();
    let theta_hat = mode as f64 / (1u64 << b) as f64;
    Ok(PhaseEstimate {
        histogram,
        mode_bitstring: bitstring(mode, b),
        theta_hat,
        probabilities,
        energy_hat: energy_from_phase(theta_hat, cfg.time())?,
    })
}

/// One point of a phase sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta: f64,
    pub theta_hat: f64,
    pub theta_exact: f64,
}

/// Phase estimation of `U^{Δ·c}` for each Δ in `deltas`, with the exact
/// phase taken from `energy`.
pub fn qpe_sweep(
    h: &HamiltonianInput,
    eigenstate: &StateVector,
    energy: f64,
    base: &QpeConfig,
    deltas: &[f64],
    evo: Evolution,
) -> Result<Vec<SweepRow>> {
    deltas
        .iter()
        .map(|&delta| {
            let cfg = QpeConfig { delta, ..*base };
            let est = qpe(h, eigenstate, &cfg, evo)?;
            Ok(SweepRow { delta, theta_hat: est.theta_hat, theta_exact: exact_phase(energy, cfg.time()) })
        })
        .collect()
}

/// Frobenius distance of the compiled evolution from the exact one.
pub fn compiled_evolution_error(h: &HamiltonianInput, t: f64, order: TrotterOrder, steps: usize) -> Result<f64> {
    let prog = h.compile(t, order, steps)?;
    let u = crate::ir::program_unitary(&prog)?;
    frobenius_distance(&u, &hermitian_exponential_oracle(&h.to_dense()?, t)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::H2TwoQubitModel;
    use crate::ir::program_unitary;
    use crate::statevector::hermitian_eigen;

    #[test]
    fn phase_energy_conventions() {
        assert_eq!(energy_from_phase(0.0, 2.0).unwrap(), 0.0);
        assert!((wrap_phase(0.75) + 0.25).abs() < 1e-15);
        assert!((wrap_phase(0.5) - 0.5).abs() < 1e-15);
        assert!(energy_from_phase(0.1, 0.0).is_err());
        let e = -1.3;
        let th = exact_phase(e, 0.7);
        assert!((energy_from_phase(th, 0.7).unwrap() - e).abs() < 1e-12);
        // 3/16 of a turn at unit time
        assert!((energy_from_phase(0.1875, 1.0).unwrap() + 3.0 * PI / 8.0).abs() < 1e-15);
    }

    #[test]
    fn drift_bound_is_monotone() {
        assert_eq!(phase_drift_bound(0.0), 0.0);
        assert!(phase_drift_bound(0.1) < phase_drift_bound(0.2));
        assert_eq!(phase_drift_bound(3.0), 0.5);
    }

    #[test]
    fn inverse_qft_matches_dense() {
        for b in 1..=4 {
            let u = program_unitary(&inverse_qft_program(b, b).unwrap()).unwrap();
            let nb = 1usize << b;
            let want = DenseMatrix::from_fn(nb, nb, |y, x| {
                Complex64::from_polar(1.0 / (nb as f64).sqrt(), -2.0 * PI * ((x * y) % nb) as f64 / nb as f64)
            });
            assert!((u.matrix() - want).norm() < 1e-10, "b = {b}");
        }
    }

    fn quarter_turn() -> HamiltonianInput {
        // diag(0, −π/2): exp(−iH) = diag(1, e^{iπ/2})
        let e1 = -PI / 2.0;
        HamiltonianInput::Pauli(PauliTermList::from_real(&[(e1 / 2.0, "I"), (-e1 / 2.0, "Z")]).unwrap())
    }

    #[test]
    fn representable_phase_is_exact() {
        let psi = StateVector::init_basis(1, 1).unwrap();
        let cfg = QpeConfig::new(2, 64, 3, 1.0);
        for evo in [Evolution::Native, Evolution::Compiled { order: TrotterOrder::First, steps: 1 }] {
            let est = qpe(&quarter_turn(), &psi, &cfg, evo).unwrap();
            assert_eq!(est.mode_bitstring, "01");
            assert_eq!(est.theta_hat, 0.25);
            assert!((est.probabilities[1] - 1.0).abs() < 1e-12);
            assert_eq!(est.histogram.get("01"), Some(&64));
        }
    }

    #[test]
    fn sampling_is_seeded() {
        let m = H2TwoQubitModel::default();
        let h = HamiltonianInput::Pauli(m.terms());
        let psi = StateVector::init_basis(2, 1).unwrap();
        let cfg = QpeConfig::new(3, 100, 9, 1.0);
        let a = qpe(&h, &psi, &cfg, Evolution::Native).unwrap();
        let b = qpe(&h, &psi, &cfg, Evolution::Native).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.histogram.values().sum::<usize>(), 100);
    }

    #[test]
    fn h2_ground_state_native_and_compiled() {
        let m = H2TwoQubitModel::default();
        let h = HamiltonianInput::Pauli(m.terms());
        let (vals, vecs) = hermitian_eigen(&h.to_dense().unwrap()).unwrap();
        let psi = StateVector::normalized(vecs.column(0).iter().copied().collect()).unwrap();
        let cfg = QpeConfig::new(5, 200, 1, 1.0);
        let exact = exact_phase(vals[0], 1.0);
        let native = qpe(&h, &psi, &cfg, Evolution::Native).unwrap();
        assert!(wrap_phase(native.theta_hat - exact).abs() <= 1.0 / 32.0);
        let compiled = qpe(&h, &psi, &cfg, Evolution::Compiled { order: TrotterOrder::Second, steps: 4 }).unwrap();
        let eps = compiled_evolution_error(&h, 1.0, TrotterOrder::Second, 4).unwrap();
        assert!(wrap_phase(compiled.theta_hat - exact).abs() <= 1.0 / 32.0 + phase_drift_bound(eps));
        assert!((native.energy_hat - vals[0]).abs() <= 2.0 * PI / 32.0);
    }

    #[test]
    fn direct_compiled_matches_native_distribution() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = SparseHamiltonian::random_real(2, 0.5, &mut rng).unwrap();
        let h = HamiltonianInput::Sparse(s);
        let (_, vecs) = hermitian_eigen(&h.to_dense().unwrap()).unwrap();
        let psi = StateVector::normalized(vecs.column(1).iter().copied().collect()).unwrap();
        let cfg = QpeConfig::new(3, 10, 1, 0.8);
        let native = qpe(&h, &psi, &cfg, Evolution::Native).unwrap();
        let compiled = qpe(&h, &psi, &cfg, Evolution::Compiled { order: TrotterOrder::Fourth, steps: 8 }).unwrap();
        for (a, b) in native.probabilities.iter().zip(&compiled.probabilities) {
            assert!((a - b).abs() < 1e-3);
        }
    }

    #[test]
    fn bad_inputs() {
        let psi = StateVector::init_basis(1, 0).unwrap();
        assert!(qpe(&quarter_turn(), &psi, &QpeConfig::new(0, 1, 0, 1.0), Evolution::Native).is_err());
        assert!(qpe(
            &quarter_turn(),
            &StateVector::init_basis(2, 0).unwrap(),
            &QpeConfig::new(2, 1, 0, 1.0),
            Evolution::Native
        )
        .is_err());
    }
}

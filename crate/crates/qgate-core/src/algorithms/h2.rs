use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::compiler::{compile_trotter, PauliTermList, TermOrdering, TrotterOrder};
use crate::error::{QgateError, Result};
use crate::ir::{execute_one, ExecMode, ExecOptions, FramePolicy};
use crate::statevector::{fidelity, hermitian_exponential_oracle, StateVector};

/// Two-qubit H₂ Hamiltonian `αII + βZI + γIZ + δZZ + ζXX` (Hartree).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct H2TwoQubitModel {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub zeta: f64,
}

impl Default for H2TwoQubitModel {
    /// Coefficients at bond length 1.8 Å.
    fn default() -> Self {
        H2TwoQubitModel { alpha: -0.96028, beta: 0.08240, gamma: -0.08240, delta: -0.00226, zeta: 0.24801 }
    }
}

impl H2TwoQubitModel {
    pub fn terms(&self) -> PauliTermList {
        PauliTermList::from_real(&[
            (self.alpha, "II"),
            (self.beta, "ZI"),
            (self.gamma, "IZ"),
            (self.delta, "ZZ"),
            (self.zeta, "XX"),
        ])
        .expect("fixed two-qubit strings")
    }

    /// `(|01⟩ + |10⟩)/√2`.
    pub fn initial_state() -> StateVector {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        StateVector::from_amplitudes(vec![z, h, h, z]).expect("normalized")
    }
}

/// `(τ, 1 − F)` for the Trotterized `exp(−iH)` against the exact evolution,
/// both started from `(|01⟩ + |10⟩)/√2`.
pub fn h2_fidelity_curve(model: &H2TwoQubitModel, taus: &[usize], order: TrotterOrder) -> Result<Vec<(usize, f64)>> {
    if taus.is_empty() {
        return Err(QgateError::InvalidArgument("empty Trotter step list".into()));
    }
    let terms = model.terms();
    let psi0 = H2TwoQubitModel::initial_state();
    let exact = hermitian_exponential_oracle(&terms.to_dense()?, 1.0)?.apply(&psi0)?;
    let opts = ExecOptions::new(ExecMode::PostselectZero, FramePolicy::ApplyImmediately);
    taus.iter()
        .map(|&tau| {
            let prog = compile_trotter(&terms, order, tau, TermOrdering::AsGiven, 1.0)?;
            let got = execute_one(&prog, &psi0, &opts)?.final_state;
            Ok((tau, (1.0 - fidelity(&got, &exact)?).max(0.0)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_falls_with_steps() {
        let curve = h2_fidelity_curve(&H2TwoQubitModel::default(), &[1, 10, 100], TrotterOrder::First).unwrap();
        assert!(curve[0].1 > curve[1].1 && curve[1].1 > curve[2].1);
    }

    #[test]
    fn commuting_model_is_exact() {
        let m = H2TwoQubitModel { zeta: 0.0, ..Default::default() };
        for (_, e) in h2_fidelity_curve(&m, &[1, 3, 7], TrotterOrder::First).unwrap() {
            assert!(e < 1e-12);
        }
    }

    #[test]
    fn second_order_beats_first() {
        let m = H2TwoQubitModel::default();
        let taus = [1, 2, 5, 10, 20];
        let a = h2_fidelity_curve(&m, &taus, TrotterOrder::First).unwrap();
        let b = h2_fidelity_curve(&m, &taus, TrotterOrder::Second).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!(y.1 < x.1, "tau {}: {} vs {}", x.0, y.1, x.1);
        }
    }

    #[test]
    fn empty_grid_rejected() {
        assert!(h2_fidelity_curve(&H2TwoQubitModel::default(), &[], TrotterOrder::First).is_err());
    }
}

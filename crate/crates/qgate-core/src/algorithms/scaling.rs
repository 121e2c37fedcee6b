use serde::{Deserialize, Serialize};

use crate::compiler::{compile_sparse, SparseHamiltonian, TermOrdering, TrotterOrder};
use crate::error::{QgateError, Result};
use crate::ir::program_unitary;
use crate::statevector::{frobenius_distance, hermitian_exponential_oracle, DenseUnitary};

/// One grid point of a Trotter scaling study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub order: u32,
    pub tau: usize,
    /// Raw `‖U_τ − U‖_F`.
    pub frobenius: f64,
    /// `1 − |⟨n|U†U_τ|n⟩|²` for each basis state `n`.
    pub infidelities: Vec<f64>,
}

impl ScalingRow {
    /// Worst infidelity over basis states.
    pub fn one_minus_f(&self) -> f64 {
        self.infidelities.iter().copied().fold(0.0, f64::max)
    }
}

fn basis_infidelities(u: &DenseUnitary, exact: &DenseUnitary) -> Vec<f64> {
    let m = exact.matrix().adjoint() * u.matrix();
    (0..m.nrows()).map(|n| (1.0 - m[(n, n)].norm_sqr()).max(0.0)).collect()
}

/// Compile `exp(−iΔH)` with the direct method for every `(order, τ)` and
/// compare the reconstructed unitary with the exact exponential.
pub fn trotter_scaling_study(
    h: &SparseHamiltonian,
    delta: f64,
    taus: &[usize],
    orders: &[TrotterOrder],
) -> Result<Vec<ScalingRow>> {
    if h.n_qubits() > 6 {
        return Err(QgateError::Resource(format!("{} qubits; full unitaries are capped at 6", h.n_qubits())));
    }
    let exact = hermitian_exponential_oracle(&h.to_dense()?, delta)?;
    let mut rows = Vec::new();
    for &order in orders {
        for &tau in taus {
            let prog = compile_sparse(h, delta, order, tau, TermOrdering::AsGiven)?;
            let u = program_unitary(&prog)?;
            rows.push(ScalingRow {
                order: order.number(),
                tau,
                frobenius: frobenius_distance(&u, &exact)?,
                infidelities: basis_infidelities(&u, &exact),
            });
        }
    }
    Ok(rows)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 || points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(QgateError::InvalidArgument("need at least two positive points".into()));
    }
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(QgateError::InvalidArgument("all x values equal".into()));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<_> = [1.0, 2.0, 4.0, 8.0].iter().map(|&x: &f64| (x, 3.0 * x.powf(-2.0))).collect();
        assert!((fit_loglog_slope(&pts).unwrap() + 2.0).abs() < 1e-12);
        assert!(fit_loglog_slope(&[(1.0, 1.0)]).is_err());
        assert!(fit_loglog_slope(&[(1.0, 0.0), (2.0, 1.0)]).is_err());
    }

    #[test]
    fn single_pair_is_exact() {
        let h = SparseHamiltonian::new(2, &[(1, 2, Complex64::new(0.8, 0.0))]).unwrap();
        for row in trotter_scaling_study(&h, 1.1, &[1, 4], &[TrotterOrder::First, TrotterOrder::Fourth]).unwrap() {
            assert!(row.frobenius < 1e-10);
        }
    }

    #[test]
    fn zero_time_is_identity() {
        let h =
            SparseHamiltonian::new(2, &[(0, 0, Complex64::new(0.3, 0.0)), (0, 3, Complex64::new(0.5, 0.0))]).unwrap();
        let rows = trotter_scaling_study(&h, 0.0, &[2], &[TrotterOrder::Second]).unwrap();
        assert!(rows[0].frobenius < 1e-14);
        assert!(rows[0].one_minus_f() < 1e-14);
    }
}

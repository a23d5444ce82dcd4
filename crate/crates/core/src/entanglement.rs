//! Concurrence, one-tangle and three-tangle, and the angle sweeps built on them.

use std::f64::consts::PI;

use serde::Serialize;

use crate::chain::{evolve, ChainSpec, EvolutionAngle};
use crate::error::{Error, Result};
use crate::qlinalg::{
    partial_trace, pauli, tensor, ComplexMatrix, DensityMatrix, PureState, QubitIndex,
};

const PSD_TOL: f64 = 1e-10;
const PURITY_TOL: f64 = 1e-8;

/// Entanglement of qubit 1 with the other two, pairwise and intrinsic, at one angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglementProfile {
    pub phi: f64,
    pub c12: f64,
    pub c13: f64,
    pub c23: f64,
    pub c1_23: f64,
    pub c123: f64,
}

fn require_dim(rho: &DensityMatrix, dim: usize) -> Result<()> {
    if rho.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: rho.dim(),
        });
    }
    Ok(())
}

/// `(Y x Y) conj(rho) (Y x Y)`.
pub fn spin_flip(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    require_dim(rho, 4)?;
    let yy = tensor(&pauli::y(), &pauli::y());
    Ok(&yy * rho.matrix().conjugate() * &yy)
}

/// Concurrence from any ensemble `rho = sum_k w_k w_k^dag`, given as the
/// columns of a 4-row matrix: the `lambda_i` are the singular values of
/// `W^T (Y x Y) W`. Near-zero weights enter squared rather than rooted.
fn concurrence_of_ensemble(w: &ComplexMatrix) -> f64 {
    let yy = tensor(&pauli::y(), &pauli::y());
    let tau = w.transpose() * yy * w;
    let mut lambdas: Vec<f64> = tau.singular_values().iter().copied().collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    let rest: f64 = lambdas.iter().skip(1).sum();
    (lambdas[0] - rest).clamp(0.0, 1.0)
}

/// Wootters concurrence of a two-qubit state.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    require_dim(rho, 4)?;
    let eig = rho.matrix().clone().symmetric_eigen();
    if let Some(low) = eig.eigenvalues.iter().copied().reduce(f64::min) {
        if low < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "two-qubit state has negative eigenvalue {low:.3e}"
            )));
        }
    }
    let mut w = eig.eigenvectors;
    for (k, &p) in eig.eigenvalues.iter().enumerate() {
        w.column_mut(k).scale_mut(p.max(0.0).sqrt());
    }
    Ok(concurrence_of_ensemble(&w))
}

/// Concurrence between qubits `i` and `j` of a larger register.
pub fn pair_concurrence(rho: &DensityMatrix, i: QubitIndex, j: QubitIndex) -> Result<f64> {
    if i == j {
        return Err(Error::InvalidArgument(
            "pair needs two distinct qubits".into(),
        ));
    }
    concurrence(&partial_trace(rho, &[i, j])?)
}

/// Pair concurrence of a pure register, read straight from the amplitudes:
/// each configuration of the other qubits contributes one ensemble vector.
pub fn pure_pair_concurrence(psi: &PureState, i: QubitIndex, j: QubitIndex) -> Result<f64> {
    let n = psi.n_qubits();
    i.check(n)?;
    j.check(n)?;
    if i == j {
        return Err(Error::InvalidArgument(
            "pair needs two distinct qubits".into(),
        ));
    }
    let (bi, bj) = (i.bit(n), j.bit(n));
    let others = 1usize << (n - 2);
    let mut w = ComplexMatrix::zeros(4, others);
    for index in 0..psi.dim() {
        let row = (((index >> bi) & 1) << 1) | ((index >> bj) & 1);
        let mut col = 0;
        for bit in (0..n).rev().filter(|&b| b != bi && b != bj) {
            col = (col << 1) | ((index >> bit) & 1);
        }
        w[(row, col)] = psi.amplitude(index);
    }
    Ok(concurrence_of_ensemble(&w))
}

/// `sqrt(2 (1 - Tr rho_i^2))`, the entanglement of qubit `i` with the rest.
pub fn one_tangle(rho: &DensityMatrix, i: QubitIndex) -> Result<f64> {
    Ok(one_tangle_squared(rho, i)?.sqrt())
}

fn one_tangle_squared(rho: &DensityMatrix, i: QubitIndex) -> Result<f64> {
    let marginal = partial_trace(rho, &[i])?;
    Ok((2.0 * (1.0 - marginal.purity())).max(0.0))
}

/// Intrinsic three-qubit entanglement of a pure state, with qubit 1 as the focus.
pub fn three_tangle(psi: &PureState) -> Result<f64> {
    three_tangle_with_focus(psi, QubitIndex::of(1))
}

/// `C_f(rest)^2 - C_fa^2 - C_fb^2`.
pub fn three_tangle_with_focus(psi: &PureState, focus: QubitIndex) -> Result<f64> {
    if psi.n_qubits() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 8,
            actual: psi.dim(),
        });
    }
    focus.check(3)?;
    let others: Vec<QubitIndex> = (1..=3)
        .map(QubitIndex::of)
        .filter(|&q| q != focus)
        .collect();
    let c_a = pure_pair_concurrence(psi, focus, others[0])?;
    let c_b = pure_pair_concurrence(psi, focus, others[1])?;
    let tau = one_tangle_squared(&psi.to_density(), focus)? - c_a * c_a - c_b * c_b;
    if tau < -PSD_TOL {
        return Err(Error::Numerical(format!(
            "residual tangle {tau:.3e} is negative beyond tolerance"
        )));
    }
    Ok(tau.clamp(0.0, 1.0))
}

/// Three-tangle for a density matrix that must be pure; mixed input is an error.
pub fn three_tangle_density(rho: &DensityMatrix) -> Result<f64> {
    require_dim(rho, 8)?;
    let purity = rho.purity();
    if purity < 1.0 - PURITY_TOL {
        return Err(Error::InvalidState(format!(
            "three-tangle is defined for pure states only (purity {purity:.6})"
        )));
    }
    let eig = rho.matrix().clone().symmetric_eigen();
    let top = eig.eigenvalues.imax();
    let psi = PureState::normalized(eig.eigenvectors.column(top).iter().copied().collect())?;
    three_tangle(&psi)
}

/// Every measure for a three-qubit pure state; `phi` is only a label.
pub fn profile(psi: &PureState, phi: f64) -> Result<EntanglementProfile> {
    if psi.n_qubits() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 8,
            actual: psi.dim(),
        });
    }
    let rho = psi.to_density();
    let q = QubitIndex::of;
    Ok(EntanglementProfile {
        phi,
        c12: pure_pair_concurrence(psi, q(1), q(2))?,
        c13: pure_pair_concurrence(psi, q(1), q(3))?,
        c23: pure_pair_concurrence(psi, q(2), q(3))?,
        c1_23: one_tangle(&rho, q(1))?,
        c123: three_tangle(psi)?,
    })
}

/// Evolves `initial` under the uniform three-spin chain and profiles each grid point.
pub fn dynamics_sweep(initial: &PureState, phi_grid: &[f64]) -> Result<Vec<EntanglementProfile>> {
    let spec = ChainSpec::three_spin();
    phi_grid
        .iter()
        .map(|&phi| profile(&evolve(initial, &spec, EvolutionAngle(phi))?, phi))
        .collect()
}

/// Grid from `start` to `end` inclusive with spacing `step`.
pub fn phi_grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || !start.is_finite() || !end.is_finite() || end < start {
        return Err(Error::InvalidArgument(format!(
            "bad grid [{start}, {end}] with step {step}"
        )));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

/// 629 points over `[0, pi]`, step `pi / 628`.
pub fn default_phi_grid() -> Vec<f64> {
    (0..=628).map(|k| k as f64 * PI / 628.0).collect()
}

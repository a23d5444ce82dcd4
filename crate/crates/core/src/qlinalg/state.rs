use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{
    hermitian_eigenvalues, identity, max_abs_diff, trace, ComplexMatrix, C64, MAX_QUBITS, ONE, ZERO,
};
use crate::error::{Error, Result};

const STATE_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-12;

/// 1-based qubit label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QubitIndex(usize);

impl QubitIndex {
    pub fn new(index: usize) -> Result<Self> {
        if index == 0 {
            return Err(Error::QubitOutOfRange { index, n_qubits: 0 });
        }
        Ok(QubitIndex(index))
    }

    /// Panics on zero; meant for literal indices.
    pub const fn of(index: usize) -> Self {
        assert!(index >= 1, "qubit indices start at 1");
        QubitIndex(index)
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Zero-based slot when `self` lies in `[1, n_qubits]`.
    pub fn check(self, n_qubits: usize) -> Result<usize> {
        if self.0 == 0 || self.0 > n_qubits {
            return Err(Error::QubitOutOfRange {
                index: self.0,
                n_qubits,
            });
        }
        Ok(self.0 - 1)
    }

    /// Bit position of this qubit inside a basis index (qubit 1 is the MSB).
    pub fn bit(self, n_qubits: usize) -> usize {
        n_qubits - self.0
    }
}

impl std::fmt::Display for QubitIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::InvalidState(format!(
            "dimension {dim} is not a power of two"
        )));
    }
    let n = dim.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(Error::InvalidState(format!(
            "{n} qubits exceeds the supported maximum of {MAX_QUBITS}"
        )));
    }
    Ok(n)
}

/// Parses a bit label such as `"010"` into a basis index.
pub(crate) fn parse_label(label: &str) -> Result<(usize, usize)> {
    if label.is_empty() || label.len() > MAX_QUBITS {
        return Err(Error::InvalidArgument(format!("bad basis label {label:?}")));
    }
    let mut index = 0usize;
    for ch in label.chars() {
        index <<= 1;
        match ch {
            '0' => {}
            '1' => index |= 1,
            _ => return Err(Error::InvalidArgument(format!("bad basis label {label:?}"))),
        }
    }
    Ok((label.len(), index))
}

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: DVector<C64>,
    n_qubits: usize,
}

impl PureState {
    /// Accepts amplitudes whose 2-norm is 1 within 1e-12.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_dim(amplitudes.len())?;
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "state norm is {norm}, expected 1"
            )));
        }
        Ok(PureState {
            amplitudes: v,
            n_qubits,
        })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_dim(amplitudes.len())?;
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite vector".into()));
        }
        Ok(PureState {
            amplitudes: v.unscale(norm),
            n_qubits,
        })
    }

    /// Computational basis state from a bit label, qubit 1 first.
    pub fn basis(label: &str) -> Result<Self> {
        let (n, index) = parse_label(label)?;
        Self::basis_index(n, index)
    }

    pub fn basis_index(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS || index >= (1 << n_qubits) {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} invalid for {n_qubits} qubits"
            )));
        }
        let mut v = DVector::from_element(1 << n_qubits, ZERO);
        v[index] = ONE;
        Ok(PureState {
            amplitudes: v,
            n_qubits,
        })
    }

    /// `|+>^n`, the equal superposition of all basis states.
    pub fn equal_superposition(n_qubits: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        Self::normalized(vec![ONE; dim])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|<self|other>|`, insensitive to global phase.
    pub fn overlap(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    /// `u |self>`; the result is renormalized only through `u` being unitary.
    pub fn apply(&self, u: &ComplexMatrix) -> Result<PureState> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: u.nrows(),
            });
        }
        Ok(PureState {
            amplitudes: u * &self.amplitudes,
            n_qubits: self.n_qubits,
        })
    }

    pub fn scaled(&self, phase: C64) -> PureState {
        PureState {
            amplitudes: self.amplitudes.map(|z| z * phase),
            n_qubits: self.n_qubits,
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}

/// Unit-trace, Hermitian, positive semidefinite operator on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    n_qubits: usize,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity to 1e-10.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::InvalidState("density matrix must be square".into()));
        }
        let n_qubits = qubits_for_dim(matrix.nrows())?;
        let herm = max_abs_diff(&matrix, &matrix.adjoint());
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {herm:.3e})"
            )));
        }
        let tr = trace(&matrix);
        if (tr - ONE).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min_eig = hermitian_eigenvalues(&matrix)
            .first()
            .copied()
            .unwrap_or(0.0);
        if min_eig < -STATE_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(DensityMatrix { matrix, n_qubits })
    }

    /// Skips validation; callers guarantee the invariants (CPTP maps, unitary conjugation).
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        let n_qubits = matrix.nrows().trailing_zeros() as usize;
        DensityMatrix { matrix, n_qubits }
    }

    pub fn from_pure(state: &PureState) -> Self {
        let v = state.amplitudes();
        DensityMatrix {
            matrix: v * v.adjoint(),
            n_qubits: state.n_qubits(),
        }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        DensityMatrix {
            matrix: identity(dim).unscale(dim as f64),
            n_qubits,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        trace(&self.matrix)
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        super::trace_of_product(&self.matrix, &self.matrix).re
    }

    /// `u rho u^dagger`.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<DensityMatrix> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: u.nrows(),
            });
        }
        Ok(DensityMatrix {
            matrix: u * &self.matrix * u.adjoint(),
            n_qubits: self.n_qubits,
        })
    }

    /// `<psi| rho |psi>`.
    pub fn population_of(&self, state: &PureState) -> Result<f64> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: state.dim(),
            });
        }
        let v = state.amplitudes();
        Ok(v.dotc(&(&self.matrix * v)).re)
    }
}

/// Traces out every qubit not listed in `keep`; kept qubits stay in ascending order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[QubitIndex]) -> Result<DensityMatrix> {
    let n = rho.n_qubits();
    if keep.is_empty() {
        return Err(Error::InvalidArgument(
            "partial trace needs at least one kept qubit".into(),
        ));
    }
    let mut kept: Vec<QubitIndex> = keep.to_vec();
    kept.sort();
    kept.dedup();
    for q in &kept {
        q.check(n)?;
    }
    let traced: Vec<QubitIndex> = (1..=n)
        .map(QubitIndex)
        .filter(|q| !kept.contains(q))
        .collect();

    let scatter = |bits: usize, qubits: &[QubitIndex]| -> usize {
        let k = qubits.len();
        qubits.iter().enumerate().fold(0usize, |acc, (pos, q)| {
            let bit = (bits >> (k - 1 - pos)) & 1;
            acc | (bit << q.bit(n))
        })
    };

    let out_dim = 1usize << kept.len();
    let env_dim = 1usize << traced.len();
    let kept_idx: Vec<usize> = (0..out_dim).map(|b| scatter(b, &kept)).collect();
    let env_idx: Vec<usize> = (0..env_dim).map(|b| scatter(b, &traced)).collect();

    let m = rho.matrix();
    let out = ComplexMatrix::from_fn(out_dim, out_dim, |i, j| {
        env_idx
            .iter()
            .map(|&e| m[(kept_idx[i] | e, kept_idx[j] | e)])
            .sum()
    });
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::{c, max_abs_diff};

    fn q(i: usize) -> QubitIndex {
        QubitIndex::of(i)
    }

    #[test]
    fn basis_ordering_is_qubit_one_msb() {
        let s = PureState::basis("100").unwrap();
        assert_eq!(s.amplitude(4), ONE);
        let s = PureState::basis("001").unwrap();
        assert_eq!(s.amplitude(1), ONE);
    }

    #[test]
    fn rejects_unnormalized_and_bad_labels() {
        assert!(PureState::new(vec![ONE, ONE]).is_err());
        assert!(PureState::basis("0a1").is_err());
        assert!(PureState::new(vec![ONE, ZERO, ZERO]).is_err());
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(identity(4).unscale(4.0)).is_ok());
        assert!(DensityMatrix::new(identity(4)).is_err());
        let mut m = identity(2).unscale(2.0);
        m[(0, 0)] = c(1.5, 0.0);
        m[(1, 1)] = c(-0.5, 0.0);
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn partial_trace_product_state() {
        let rho = PureState::basis("000").unwrap().to_density();
        let red = partial_trace(&rho, &[q(1), q(3)]).unwrap();
        let expected = PureState::basis("00").unwrap().to_density();
        assert!(max_abs_diff(red.matrix(), expected.matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_ghz_marginal_is_mixed() {
        let ghz =
            PureState::normalized(vec![ONE, ZERO, ZERO, ZERO, ZERO, ZERO, ZERO, ONE]).unwrap();
        let red = partial_trace(&ghz.to_density(), &[q(1)]).unwrap();
        assert!(max_abs_diff(red.matrix(), &identity(2).unscale(2.0)) < 1e-15);
    }

    #[test]
    fn partial_trace_end_qubits_of_hopping_state() {
        // -i/sqrt(2) (|001> + |100>) leaves qubits 1 and 3 in (|01> + |10>)/sqrt(2)
        let a = c(0.0, -std::f64::consts::FRAC_1_SQRT_2);
        let mut amps = vec![ZERO; 8];
        amps[1] = a;
        amps[4] = a;
        let psi = PureState::new(amps).unwrap();
        let red = partial_trace(&psi.to_density(), &[q(1), q(3)]).unwrap();
        let bell = PureState::normalized(vec![ZERO, ONE, ONE, ZERO]).unwrap();
        assert!(max_abs_diff(red.matrix(), bell.to_density().matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_keeps_order_and_checks_bounds() {
        let rho = PureState::basis("011").unwrap().to_density();
        let red = partial_trace(&rho, &[q(3), q(1)]).unwrap();
        // kept qubits are reported as (1, 3) -> |01>
        assert_eq!(red.matrix()[(1, 1)], ONE);
        assert!(partial_trace(&rho, &[]).is_err());
        assert!(partial_trace(&rho, &[q(4)]).is_err());
    }
}

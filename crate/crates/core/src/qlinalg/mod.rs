//! Dense complex linear algebra for small qubit registers.
//!
//! Qubit 1 is the most significant bit of a basis index, so for three qubits
//! the basis runs `|000>, |001>, ..., |111>` and `tensor(a, b)` places `a` on
//! the lower-numbered qubit.

pub(crate) mod state;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use state::{partial_trace, DensityMatrix, PureState, QubitIndex};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;

/// Largest register the dense routines accept.
pub const MAX_QUBITS: usize = 10;

/// Default tolerance for unitarity and equivalence checks.
pub const DEFAULT_TOL: f64 = 1e-10;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

/// Single-qubit Pauli and ladder operators.
pub mod pauli {
    use super::{c, ComplexMatrix, ONE, ZERO};

    pub fn id() -> ComplexMatrix {
        ComplexMatrix::identity(2, 2)
    }

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO])
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
    }

    /// `|0><1|`, raises the spin from `|1>` (down) to `|0>` (up).
    pub fn plus() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO])
    }

    /// `|1><0|`.
    pub fn minus() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ONE, ZERO])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn pauli(self) -> ComplexMatrix {
        match self {
            Axis::X => pauli::x(),
            Axis::Y => pauli::y(),
            Axis::Z => pauli::z(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            other => Err(Error::InvalidArgument(format!("unknown axis {other:?}"))),
        }
    }
}

/// `exp(-i * angle * sigma_axis / 2)` as a 2x2 matrix.
pub fn rotation(axis: Axis, angle: f64) -> ComplexMatrix {
    let (cos, sin) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    identity(2).map(|v| v * cos) - axis.pauli().map(|v| v * c(0.0, sin))
}

/// Kronecker product; `a` acts on the more significant qubits.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn tensor_all<'a, I>(factors: I) -> ComplexMatrix
where
    I: IntoIterator<Item = &'a ComplexMatrix>,
{
    factors
        .into_iter()
        .fold(identity(1), |acc, f| tensor(&acc, f))
}

/// Embeds single-qubit operators on the listed qubits, identity elsewhere.
pub fn embed(ops: &[(QubitIndex, &ComplexMatrix)], n_qubits: usize) -> Result<ComplexMatrix> {
    let id = pauli::id();
    let mut slots: Vec<&ComplexMatrix> = vec![&id; n_qubits];
    for (q, op) in ops {
        let k = q.check(n_qubits)?;
        if op.nrows() != 2 || op.ncols() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: op.nrows(),
            });
        }
        slots[k] = op;
    }
    Ok(tensor_all(slots))
}

/// Shorthand for one operator on one qubit.
pub fn embed_one(op: &ComplexMatrix, qubit: QubitIndex, n_qubits: usize) -> Result<ComplexMatrix> {
    embed(&[(qubit, op)], n_qubits)
}

pub fn dagger(m: &ComplexMatrix) -> ComplexMatrix {
    m.adjoint()
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.diagonal().iter().sum()
}

fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn is_square(m: &ComplexMatrix) -> bool {
    m.nrows() == m.ncols()
}

pub fn is_hermitian(m: &ComplexMatrix, tol: f64) -> bool {
    is_square(m) && hermitian_deviation(m) <= tol
}

pub fn is_unitary(m: &ComplexMatrix, tol: f64) -> bool {
    is_square(m) && max_abs_diff(&(m.adjoint() * m), &identity(m.nrows())) <= tol
}

/// Hermitian and every eigenvalue at least `-tol`.
pub fn is_psd(m: &ComplexMatrix, tol: f64) -> bool {
    if !is_hermitian(m, tol) {
        return false;
    }
    hermitian_eigenvalues(m).iter().all(|&l| l >= -tol)
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let sym = symmetrize(m);
    let mut vals: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    vals
}

fn symmetrize(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).map(|z| z * 0.5)
}

/// Applies `f` to the spectrum of a Hermitian matrix: `V f(D) V^dagger`.
pub fn hermitian_function<F>(m: &ComplexMatrix, f: F) -> ComplexMatrix
where
    F: Fn(f64) -> C64,
{
    let eig = symmetrize(m).symmetric_eigen();
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let w = f(lambda);
        for z in scaled.column_mut(k).iter_mut() {
            *z *= w;
        }
    }
    scaled * v.adjoint()
}

/// `exp(-i h t)` through the eigendecomposition of `h`.
pub fn expm_hermitian(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !is_square(h) {
        return Err(Error::DimensionMismatch {
            expected: h.nrows(),
            actual: h.ncols(),
        });
    }
    let deviation = hermitian_deviation(h);
    if deviation > DEFAULT_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    if t == 0.0 {
        return Ok(identity(h.nrows()));
    }
    Ok(hermitian_function(h, |lambda| {
        C64::from_polar(1.0, -lambda * t)
    }))
}

/// Outcome of a global-phase comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseReport {
    pub equivalent: bool,
    /// Unit complex `c` with `u ~ c * v`.
    pub phase: C64,
    pub max_residual: f64,
}

/// Tests whether `u = c * v` for some unit complex `c`.
///
/// `c` is taken from the entry of `v` with the largest magnitude, then the
/// max-entry residual of `u - c v` decides the verdict.
pub fn equal_up_to_global_phase(
    u: &ComplexMatrix,
    v: &ComplexMatrix,
    tol: f64,
) -> Result<PhaseReport> {
    if u.shape() != v.shape() {
        return Err(Error::DimensionMismatch {
            expected: v.nrows(),
            actual: u.nrows(),
        });
    }
    let (idx, pivot) = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(i, z)| (i, *z))
        .unwrap_or((0, ONE));
    let ratio = if pivot.norm() > 0.0 {
        u.as_slice()[idx] / pivot
    } else {
        ONE
    };
    let phase = if ratio.norm() > 0.0 {
        ratio / ratio.norm()
    } else {
        ONE
    };
    let max_residual = max_abs_diff(u, &v.map(|z| z * phase));
    Ok(PhaseReport {
        equivalent: max_residual <= tol,
        phase,
        max_residual,
    })
}

/// `Tr(rho * obs)` for a Hermitian observable.
pub fn expectation(rho: &DensityMatrix, obs: &ComplexMatrix) -> Result<f64> {
    if obs.nrows() != rho.dim() || obs.ncols() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: obs.nrows(),
        });
    }
    let deviation = hermitian_deviation(obs);
    if deviation > DEFAULT_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let value = trace_of_product(rho.matrix(), obs);
    if value.im.abs() > DEFAULT_TOL {
        return Err(Error::Numerical(format!(
            "expectation value has imaginary part {:.3e}",
            value.im
        )));
    }
    Ok(value.re)
}

/// `Tr(a * b)` without forming the product.
pub fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

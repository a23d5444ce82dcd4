//! NMR model of the three-spin register: spin-system parameters, pseudo-pure
//! states, the ZZ coupling Hamiltonian, relaxation, and the overlap metrics
//! used to score prepared states.

mod noise;
mod tomography;

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qlinalg::{
    embed_one, identity, pauli, state::parse_label, trace_of_product, ComplexMatrix, DensityMatrix,
    PureState, QubitIndex, MAX_QUBITS,
};

pub use noise::{
    apply_decoherence, decoherence_estimate, decoherence_estimate_with, dephasing_rate,
    relaxation_kraus, simulate_schedule, NoiseParams,
};
pub use tomography::{
    correlation_sweep, pauli_label, pauli_set, reconstruct_from_pauli_set, PauliSet, PAULI_COUNT,
};

/// Gyromagnetic ratios, scalar couplings and relaxation times of a spin register.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinSystem {
    names: Vec<String>,
    gamma_ratios: Vec<f64>,
    j_hz: Vec<Vec<f64>>,
    t1_s: Vec<f64>,
    t2_s: Vec<f64>,
}

impl Default for SpinSystem {
    /// 13CHFBr2 with H, C, F as qubits 1, 2, 3.
    fn default() -> Self {
        SpinSystem {
            names: vec!["H".into(), "C".into(), "F".into()],
            gamma_ratios: vec![1.0, 0.25, 0.94],
            j_hz: vec![
                vec![0.0, 224.5, 49.7],
                vec![224.5, 0.0, -310.9],
                vec![49.7, -310.9, 0.0],
            ],
            t1_s: vec![6.7, 1.9, 4.0],
            t2_s: vec![1.4, 0.71, 0.70],
        }
    }
}

impl SpinSystem {
    pub fn new(
        names: Vec<String>,
        gamma_ratios: Vec<f64>,
        j_hz: Vec<Vec<f64>>,
        t1_s: Vec<f64>,
        t2_s: Vec<f64>,
    ) -> Result<Self> {
        let s = SpinSystem {
            names,
            gamma_ratios,
            j_hz,
            t1_s,
            t2_s,
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        let n = self.names.len();
        if !(2..=MAX_QUBITS).contains(&n) {
            return Err(Error::Config(format!(
                "need 2..={MAX_QUBITS} spins, got {n}"
            )));
        }
        if self.gamma_ratios.len() != n || self.t1_s.len() != n || self.t2_s.len() != n {
            return Err(Error::Config(
                "per-spin lists have different lengths".into(),
            ));
        }
        if self.j_hz.len() != n || self.j_hz.iter().any(|row| row.len() != n) {
            return Err(Error::Config(format!("coupling matrix must be {n}x{n}")));
        }
        for i in 0..n {
            if self.j_hz[i][i] != 0.0 {
                return Err(Error::Config(
                    "coupling matrix diagonal must be zero".into(),
                ));
            }
            for k in 0..n {
                let v = self.j_hz[i][k];
                if !v.is_finite() || v != self.j_hz[k][i] {
                    return Err(Error::Config(
                        "coupling matrix must be finite and symmetric".into(),
                    ));
                }
            }
            let (t1, t2) = (self.t1_s[i], self.t2_s[i]);
            if t1.is_nan() || t2.is_nan() || t1 <= 0.0 || t2 <= 0.0 {
                return Err(Error::Config(format!(
                    "relaxation times of spin {} must be positive",
                    i + 1
                )));
            }
            if t2 > 2.0 * t1 {
                return Err(Error::Config(format!(
                    "spin {}: T2 = {t2} s exceeds 2 T1 = {} s",
                    i + 1,
                    2.0 * t1
                )));
            }
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn gamma_ratios(&self) -> &[f64] {
        &self.gamma_ratios
    }

    /// Scalar coupling in Hz.
    pub fn coupling(&self, a: QubitIndex, b: QubitIndex) -> Result<f64> {
        let n = self.n_qubits();
        Ok(self.j_hz[a.check(n)?][b.check(n)?])
    }

    pub fn set_coupling(&mut self, a: QubitIndex, b: QubitIndex, j_hz: f64) -> Result<()> {
        let n = self.n_qubits();
        let (i, k) = (a.check(n)?, b.check(n)?);
        if i == k || !j_hz.is_finite() {
            return Err(Error::InvalidArgument("bad coupling assignment".into()));
        }
        self.j_hz[i][k] = j_hz;
        self.j_hz[k][i] = j_hz;
        Ok(())
    }

    pub fn t1(&self, q: QubitIndex) -> Result<f64> {
        Ok(self.t1_s[q.check(self.n_qubits())?])
    }

    pub fn t2(&self, q: QubitIndex) -> Result<f64> {
        Ok(self.t2_s[q.check(self.n_qubits())?])
    }

    /// Replaces relaxation times; `f64::INFINITY` disables a channel.
    pub fn with_relaxation(mut self, t1_s: Vec<f64>, t2_s: Vec<f64>) -> Result<Self> {
        self.t1_s = t1_s;
        self.t2_s = t2_s;
        self.validate()?;
        Ok(self)
    }

    /// Same couplings, no relaxation.
    pub fn without_relaxation(&self) -> Self {
        let n = self.n_qubits();
        SpinSystem {
            t1_s: vec![f64::INFINITY; n],
            t2_s: vec![f64::INFINITY; n],
            ..self.clone()
        }
    }

    /// Every pair with a nonzero coupling, in ascending order.
    pub fn coupled_pairs(&self) -> Vec<(QubitIndex, QubitIndex)> {
        let n = self.n_qubits();
        let mut out = Vec::new();
        for i in 0..n {
            for k in i + 1..n {
                if self.j_hz[i][k] != 0.0 {
                    out.push((QubitIndex::of(i + 1), QubitIndex::of(k + 1)));
                }
            }
        }
        out
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: SpinSystemFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&SpinSystemFile::from(self))?)
    }
}

/// On-disk form. A `null` relaxation time means no relaxation.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct SpinSystemFile {
    spins: Vec<SpinRecord>,
    j_hz: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SpinRecord {
    name: String,
    gamma_ratio: f64,
    t1_s: Option<f64>,
    t2_s: Option<f64>,
}

impl From<&SpinSystem> for SpinSystemFile {
    fn from(s: &SpinSystem) -> Self {
        let finite = |t: f64| t.is_finite().then_some(t);
        SpinSystemFile {
            spins: (0..s.n_qubits())
                .map(|i| SpinRecord {
                    name: s.names[i].clone(),
                    gamma_ratio: s.gamma_ratios[i],
                    t1_s: finite(s.t1_s[i]),
                    t2_s: finite(s.t2_s[i]),
                })
                .collect(),
            j_hz: s.j_hz.clone(),
        }
    }
}

impl TryFrom<SpinSystemFile> for SpinSystem {
    type Error = Error;

    fn try_from(f: SpinSystemFile) -> Result<Self> {
        let inf = |t: Option<f64>| t.unwrap_or(f64::INFINITY);
        SpinSystem::new(
            f.spins.iter().map(|s| s.name.clone()).collect(),
            f.spins.iter().map(|s| s.gamma_ratio).collect(),
            f.j_hz,
            f.spins.iter().map(|s| inf(s.t1_s)).collect(),
            f.spins.iter().map(|s| inf(s.t2_s)).collect(),
        )
    }
}

fn z_on(q: usize, n: usize) -> ComplexMatrix {
    embed_one(&pauli::z(), QubitIndex::of(q), n).expect("qubit within register")
}

/// Thermal deviation `sum_i (gamma_i / gamma_1) Z_i`.
pub fn equilibrium_deviation(system: &SpinSystem) -> ComplexMatrix {
    let n = system.n_qubits();
    let g1 = system.gamma_ratios[0];
    (1..=n).fold(ComplexMatrix::zeros(1 << n, 1 << n), |acc, q| {
        acc + z_on(q, n).map(|z| z * (system.gamma_ratios[q - 1] / g1))
    })
}

/// `(1 - eps) I / 2^n + eps |label><label|`.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoPureState {
    label: String,
    epsilon: f64,
    matrix: DensityMatrix,
}

impl PseudoPureState {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn matrix(&self) -> &DensityMatrix {
        &self.matrix
    }

    pub fn into_density(self) -> DensityMatrix {
        self.matrix
    }

    /// `matrix - I / 2^n`.
    pub fn deviation(&self) -> ComplexMatrix {
        let dim = self.matrix.dim();
        self.matrix.matrix() - identity(dim).unscale(dim as f64)
    }
}

/// Mixes a basis projector with the identity.
///
/// Labels other than all-zero are reached from the all-zero PPS by X flips on
/// the spins set to 1.
pub fn make_pps(label: &str, epsilon: f64) -> Result<PseudoPureState> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidArgument(format!(
            "PPS purity fraction must lie in [0, 1], got {epsilon}"
        )));
    }
    let (n, index) = parse_label(label)?;
    let dim = 1usize << n;
    let ground = PureState::basis_index(n, 0)?.to_density();
    let base = identity(dim).map(|z| z * ((1.0 - epsilon) / dim as f64))
        + ground.matrix().map(|z| z * epsilon);
    let mut rho = DensityMatrix::new(base)?;
    for q in 1..=n {
        if (index >> (n - q)) & 1 == 1 {
            rho = rho.evolve(&embed_one(&pauli::x(), QubitIndex::of(q), n)?)?;
        }
    }
    Ok(PseudoPureState {
        label: label.to_string(),
        epsilon,
        matrix: rho,
    })
}

/// Diagonal of the full coupling Hamiltonian in rad/s, every coupling included.
pub fn zz_diagonal(system: &SpinSystem) -> Vec<f64> {
    zz_diagonal_for(system, &system.coupled_pairs())
}

fn zz_diagonal_for(system: &SpinSystem, pairs: &[(QubitIndex, QubitIndex)]) -> Vec<f64> {
    let n = system.n_qubits();
    (0..1usize << n)
        .map(|k| {
            pairs
                .iter()
                .map(|&(a, b)| {
                    let j = system.j_hz[a.get() - 1][b.get() - 1];
                    let sa = if (k >> a.bit(n)) & 1 == 0 { 1.0 } else { -1.0 };
                    let sb = if (k >> b.bit(n)) & 1 == 0 { 1.0 } else { -1.0 };
                    PI / 2.0 * j * sa * sb
                })
                .sum()
        })
        .collect()
}

/// `sum (pi/2) J_ab Z_a Z_b` over `pairs`, in rad/s with `J` in Hz.
pub fn zz_hamiltonian(
    system: &SpinSystem,
    pairs: &[(QubitIndex, QubitIndex)],
) -> Result<ComplexMatrix> {
    for &(a, b) in pairs {
        if a == b || system.coupling(a, b)? == 0.0 {
            return Err(Error::InvalidArgument(format!(
                "pair ({a}, {b}) has no coupling"
            )));
        }
    }
    let diag = zz_diagonal_for(system, pairs);
    Ok(ComplexMatrix::from_diagonal(
        &nalgebra::DVector::from_iterator(
            diag.len(),
            diag.iter().map(|&e| crate::qlinalg::c(e, 0.0)),
        ),
    ))
}

/// Nearest-neighbor couplings only, `(1,2)` and `(2,3)`.
pub fn zz_hamiltonian_nn(system: &SpinSystem) -> Result<ComplexMatrix> {
    let q = QubitIndex::of;
    zz_hamiltonian(system, &[(q(1), q(2)), (q(2), q(3))])
}

/// Normalized Hilbert-Schmidt overlap `Tr(ab) / sqrt(Tr(a^2) Tr(b^2))`.
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    let (pa, pb) = (a.purity(), b.purity());
    if pa <= 0.0 || pb <= 0.0 {
        return Err(Error::InvalidState("zero purity".into()));
    }
    Ok(trace_of_product(a.matrix(), b.matrix()).re / (pa * pb).sqrt())
}

/// `Tr(theory * experiment) / Tr(theory^2)`; not symmetric in its arguments.
pub fn attenuated_correlation(theory: &DensityMatrix, experiment: &DensityMatrix) -> Result<f64> {
    if theory.dim() != experiment.dim() {
        return Err(Error::DimensionMismatch {
            expected: theory.dim(),
            actual: experiment.dim(),
        });
    }
    let p = theory.purity();
    if p <= 0.0 {
        return Err(Error::InvalidState("zero theory purity".into()));
    }
    Ok(trace_of_product(theory.matrix(), experiment.matrix()).re / p)
}

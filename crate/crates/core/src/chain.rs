//! Nearest-neighbor XY chains: Hamiltonian, propagator and the Bell, W and
//! GHZ preparation protocols for three spins.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use crate::error::{Error, Result};
use crate::qlinalg::{
    c, commutator, embed, embed_one, expm_hermitian, identity, max_abs, max_abs_diff, pauli,
    rotation, tensor_all, Axis, ComplexMatrix, PureState, QubitIndex, MAX_QUBITS, ONE, ZERO,
};

/// Qubit count and the couplings `J_i` between spins `i` and `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    couplings: Vec<f64>,
}

impl ChainSpec {
    pub fn new(couplings: Vec<f64>) -> Result<Self> {
        let n = couplings.len() + 1;
        if couplings.is_empty() || n > MAX_QUBITS {
            return Err(Error::InvalidArgument(format!(
                "chain needs between 2 and {MAX_QUBITS} qubits, got {n}"
            )));
        }
        if couplings.iter().any(|j| !j.is_finite()) {
            return Err(Error::InvalidArgument("couplings must be finite".into()));
        }
        Ok(ChainSpec { couplings })
    }

    pub fn uniform(n_qubits: usize, j: f64) -> Result<Self> {
        if n_qubits < 2 {
            return Err(Error::InvalidArgument(format!(
                "chain needs at least 2 qubits, got {n_qubits}"
            )));
        }
        Self::new(vec![j; n_qubits - 1])
    }

    /// Three spins with unit coupling, the chain every protocol runs on.
    pub fn three_spin() -> Self {
        ChainSpec {
            couplings: vec![1.0, 1.0],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.couplings.len() + 1
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn is_uniform(&self) -> bool {
        self.couplings.iter().all(|&j| j == self.couplings[0])
    }

    /// Coupling that defines the time scale of `phi`: `t = sqrt(2) phi / J_1`.
    pub fn reference_coupling(&self) -> f64 {
        self.couplings[0]
    }
}

/// Dimensionless evolution angle `phi = J t / sqrt(2)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EvolutionAngle(pub f64);

impl EvolutionAngle {
    pub fn from_time(j: f64, t: f64) -> Self {
        EvolutionAngle(j * t / SQRT_2)
    }

    pub fn to_time(self, j: f64) -> f64 {
        SQRT_2 * self.0 / j
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<f64> for EvolutionAngle {
    fn from(phi: f64) -> Self {
        EvolutionAngle(phi)
    }
}

/// `phi` at which `|101>` evolves into an equal-weight superposition: `atan(sqrt 2) / 2`.
pub fn w_angle() -> f64 {
    SQRT_2.atan() / 2.0
}

fn pair_term(a: &ComplexMatrix, i: usize, n: usize) -> Result<ComplexMatrix> {
    embed(&[(QubitIndex::new(i)?, a), (QubitIndex::new(i + 1)?, a)], n)
}

/// `sum_i (J_i / 2)(X_i X_{i+1} + Y_i Y_{i+1})`.
pub fn xy_hamiltonian(spec: &ChainSpec) -> ComplexMatrix {
    let n = spec.n_qubits();
    let (x, y) = (pauli::x(), pauli::y());
    let mut h = ComplexMatrix::zeros(1 << n, 1 << n);
    for (k, &j) in spec.couplings().iter().enumerate() {
        let xx = pair_term(&x, k + 1, n).expect("indices within chain");
        let yy = pair_term(&y, k + 1, n).expect("indices within chain");
        h += (xx + yy).map(|z| z * (j / 2.0));
    }
    h
}

/// The same Hamiltonian written with ladder operators,
/// `sum_i J_i (s+_i s-_{i+1} + s-_i s+_{i+1})`.
pub fn xy_hamiltonian_hopping(spec: &ChainSpec) -> ComplexMatrix {
    let n = spec.n_qubits();
    let (up, down) = (pauli::plus(), pauli::minus());
    let mut h = ComplexMatrix::zeros(1 << n, 1 << n);
    for (k, &j) in spec.couplings().iter().enumerate() {
        let (a, b) = (QubitIndex::of(k + 1), QubitIndex::of(k + 2));
        let hop = embed(&[(a, &up), (b, &down)], n).expect("indices within chain")
            + embed(&[(a, &down), (b, &up)], n).expect("indices within chain");
        h += hop.map(|z| z * j);
    }
    h
}

/// Closed-form 8x8 propagator of the uniform three-spin chain at angle `phi`.
pub fn xy_unitary_closed_form(phi: EvolutionAngle) -> ComplexMatrix {
    let phi = phi.0;
    let cos_sq = c(phi.cos().powi(2), 0.0);
    let sin_sq = c(-phi.sin().powi(2), 0.0);
    let cos2 = c((2.0 * phi).cos(), 0.0);
    let hop = c(0.0, -FRAC_1_SQRT_2 * (2.0 * phi).sin());

    let mut u = ComplexMatrix::zeros(8, 8);
    u[(0, 0)] = ONE;
    u[(7, 7)] = ONE;
    // one-excitation sector {|001>, |010>, |100>}
    u[(1, 1)] = cos_sq;
    u[(1, 2)] = hop;
    u[(1, 4)] = sin_sq;
    u[(2, 1)] = hop;
    u[(2, 2)] = cos2;
    u[(2, 4)] = hop;
    u[(4, 1)] = sin_sq;
    u[(4, 2)] = hop;
    u[(4, 4)] = cos_sq;
    // two-excitation sector {|011>, |101>, |110>}
    u[(3, 3)] = cos_sq;
    u[(3, 5)] = hop;
    u[(3, 6)] = sin_sq;
    u[(5, 3)] = hop;
    u[(5, 5)] = cos2;
    u[(5, 6)] = hop;
    u[(6, 3)] = sin_sq;
    u[(6, 5)] = hop;
    u[(6, 6)] = cos_sq;
    u
}

/// Full propagator at angle `phi`; closed form for the uniform three-spin
/// chain, spectral exponential otherwise.
pub fn propagator(spec: &ChainSpec, phi: EvolutionAngle) -> Result<ComplexMatrix> {
    if spec.n_qubits() == 3 && spec.is_uniform() {
        return Ok(xy_unitary_closed_form(phi));
    }
    let j = spec.reference_coupling();
    if j == 0.0 {
        return Err(Error::InvalidArgument(
            "angle parameterization needs a nonzero first coupling".into(),
        ));
    }
    expm_hermitian(&xy_hamiltonian(spec), phi.to_time(j))
}

pub fn evolve(state: &PureState, spec: &ChainSpec, phi: EvolutionAngle) -> Result<PureState> {
    if state.n_qubits() != spec.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: 1 << spec.n_qubits(),
            actual: state.dim(),
        });
    }
    state.apply(&propagator(spec, phi)?)
}

/// Evolution for a physical time `t` in the units of the couplings.
pub fn evolve_for_time(state: &PureState, spec: &ChainSpec, t: f64) -> Result<PureState> {
    if state.n_qubits() != spec.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: 1 << spec.n_qubits(),
            actual: state.dim(),
        });
    }
    state.apply(&expm_hermitian(&xy_hamiltonian(spec), t)?)
}

/// The two commuting halves `X1X2 + Y2Y3` and `Y1Y2 + X2X3` of the
/// three-spin Hamiltonian (unit coupling, times two).
pub fn split_generators() -> (ComplexMatrix, ComplexMatrix) {
    let (x, y, id) = (pauli::x(), pauli::y(), pauli::id());
    let a = tensor_all([&x, &x, &id]) + tensor_all([&id, &y, &y]);
    let b = tensor_all([&y, &y, &id]) + tensor_all([&id, &x, &x]);
    (a, b)
}

/// `cos(phi) I - (i / sqrt 2) sin(phi) G` for each half `G`.
pub fn split_factors(phi: EvolutionAngle) -> (ComplexMatrix, ComplexMatrix) {
    let (a, b) = split_generators();
    let cos = c(phi.0.cos(), 0.0);
    let k = c(0.0, -FRAC_1_SQRT_2 * phi.0.sin());
    let factor = |g: &ComplexMatrix| identity(8).map(|z| z * cos) + g.map(|z| z * k);
    (factor(&a), factor(&b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitReport {
    pub commutator_norm: f64,
    /// Product of the two factors against the closed form.
    pub product_residual: f64,
    /// Closed form against the spectral exponential of the Hamiltonian.
    pub exponential_residual: f64,
}

pub fn commuting_split_report(phi: EvolutionAngle) -> SplitReport {
    let (a, b) = split_generators();
    let (fa, fb) = split_factors(phi);
    let closed = xy_unitary_closed_form(phi);
    let h = xy_hamiltonian(&ChainSpec::three_spin());
    let direct = expm_hermitian(&h, phi.to_time(1.0)).expect("XY Hamiltonian is Hermitian");
    SplitReport {
        commutator_norm: max_abs(&commutator(&a, &b)),
        product_residual: max_abs_diff(&(fa * fb), &closed),
        exponential_residual: max_abs_diff(&closed, &direct),
    }
}

/// Both halves commute and their factor product reproduces the exponential to 1e-12.
pub fn commuting_split_check(phi: EvolutionAngle) -> bool {
    let r = commuting_split_report(phi);
    r.commutator_norm <= 1e-12 && r.product_residual <= 1e-12 && r.exponential_residual <= 1e-12
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolResult {
    pub final_state: PureState,
    /// State right after the XY evolution, before any local rotation.
    pub intermediate_state: PureState,
    pub phi_used: EvolutionAngle,
}

fn matches_basis(state: &PureState, label: &str) -> bool {
    PureState::basis(label)
        .ok()
        .and_then(|b| b.overlap(state).ok())
        .is_some_and(|o| (o - 1.0).abs() < 1e-12)
}

fn rotate_all(state: &PureState, axis: Axis, angle: f64) -> Result<PureState> {
    let r = rotation(axis, angle);
    let n = state.n_qubits();
    let ops: Vec<(QubitIndex, &ComplexMatrix)> = (1..=n).map(|q| (QubitIndex::of(q), &r)).collect();
    state.apply(&embed(&ops, n)?)
}

/// Evolves `|010>` or `|101>` to `phi = pi/4`, leaving the end qubits in a Bell state.
pub fn prepare_bell(initial: &PureState) -> Result<ProtocolResult> {
    if initial.n_qubits() != 3 || !(matches_basis(initial, "010") || matches_basis(initial, "101"))
    {
        return Err(Error::UnsupportedProtocol(
            "Bell preparation starts from |010> or |101>".into(),
        ));
    }
    let phi = EvolutionAngle(PI / 4.0);
    let evolved = evolve(initial, &ChainSpec::three_spin(), phi)?;
    Ok(ProtocolResult {
        final_state: evolved.clone(),
        intermediate_state: evolved,
        phi_used: phi,
    })
}

/// `|101>` evolved to `phi = atan(sqrt 2)/2`, then a pi/2 Z rotation on qubit 2.
pub fn prepare_w(initial: &PureState) -> Result<ProtocolResult> {
    if initial.n_qubits() != 3 || !matches_basis(initial, "101") {
        return Err(Error::UnsupportedProtocol(
            "W preparation starts from |101>".into(),
        ));
    }
    let phi = EvolutionAngle(w_angle());
    let evolved = evolve(initial, &ChainSpec::three_spin(), phi)?;
    let phase_gate = embed_one(&rotation(Axis::Z, PI / 2.0), QubitIndex::of(2), 3)?;
    Ok(ProtocolResult {
        final_state: evolved.apply(&phase_gate)?,
        intermediate_state: evolved,
        phi_used: phi,
    })
}

/// `|000>` -> pi/2 Y on every qubit -> XY evolution to `phi = pi/2` -> pi/2 X on every qubit.
pub fn prepare_ghz() -> Result<ProtocolResult> {
    let start = rotate_all(&PureState::basis("000")?, Axis::Y, PI / 2.0)?;
    let phi = EvolutionAngle(PI / 2.0);
    let evolved = evolve(&start, &ChainSpec::three_spin(), phi)?;
    Ok(ProtocolResult {
        final_state: rotate_all(&evolved, Axis::X, PI / 2.0)?,
        intermediate_state: evolved,
        phi_used: phi,
    })
}

/// `(|000> + |111>)/sqrt 2`.
pub fn ghz_state() -> PureState {
    let mut amps = vec![ZERO; 8];
    amps[0] = ONE;
    amps[7] = ONE;
    PureState::normalized(amps).expect("nonzero vector")
}

/// `(|101> + |011> + |110>)/sqrt 3`.
pub fn w_state() -> PureState {
    let mut amps = vec![ZERO; 8];
    for idx in [0b101, 0b011, 0b110] {
        amps[idx] = ONE;
    }
    PureState::normalized(amps).expect("nonzero vector")
}

/// End-qubit Bell target for an initial `|010>` (`(|001> + |100>)/sqrt 2`)
/// or `|101>` (`(|011> + |110>)/sqrt 2`).
pub fn bell_target(middle_excited: bool) -> PureState {
    let mut amps = vec![ZERO; 8];
    let (a, b) = if middle_excited {
        (0b011, 0b110)
    } else {
        (0b001, 0b100)
    };
    amps[a] = ONE;
    amps[b] = ONE;
    PureState::normalized(amps).expect("nonzero vector")
}

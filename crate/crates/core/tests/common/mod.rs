#![allow(dead_code)]

use rand::Rng;
use rand_distr::StandardNormal;
use xychain::qlinalg::{embed_one, rotation, Axis, ComplexMatrix};
use xychain::{DensityMatrix, PureState, QubitIndex, C64};

fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state.
pub fn random_pure(rng: &mut impl Rng, n_qubits: usize) -> PureState {
    let amps = (0..1usize << n_qubits).map(|_| gaussian(rng)).collect();
    PureState::normalized(amps).expect("nonzero vector")
}

/// Full-rank random density matrix `G G^dag / Tr`.
pub fn random_mixed(rng: &mut impl Rng, n_qubits: usize) -> DensityMatrix {
    let d = 1usize << n_qubits;
    let g = ComplexMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.unscale(tr)).expect("valid density matrix")
}

/// Product of random Euler rotations, one per qubit.
pub fn random_local_unitary(rng: &mut impl Rng, n_qubits: usize) -> ComplexMatrix {
    let d = 1usize << n_qubits;
    (1..=n_qubits).fold(ComplexMatrix::identity(d, d), |acc, q| {
        let mut angle = || rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let u =
            rotation(Axis::Z, angle()) * rotation(Axis::Y, angle()) * rotation(Axis::Z, angle());
        embed_one(&u, QubitIndex::of(q), n_qubits).expect("qubit in range") * acc
    })
}

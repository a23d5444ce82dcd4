//! Per-spin T1/T2 relaxation and noisy schedule simulation.
//!
//! Each spin relaxes its populations toward `I/2` at rate `1/T1` (the
//! high-temperature equilibrium, so the channel is unital) and dephases at
//! `1/T2' = 1/T2 - 1/(2 T1)`, so a coherence decays as `exp(-t/T2)` in total.

use nalgebra::DVector;

use super::{attenuated_correlation, zz_diagonal, SpinSystem};
use crate::error::{Error, Result};
use crate::pipeline::Protocol;
use crate::pulses::{Schedule, TimedEvent};
use crate::qlinalg::{c, embed_one, rotation, ComplexMatrix, DensityMatrix, QubitIndex, C64, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoiseParams {
    pub enabled: bool,
    /// Slices per delay when interleaving coherent evolution and relaxation.
    pub trotter_slices: usize,
}

impl Default for NoiseParams {
    fn default() -> Self {
        NoiseParams {
            enabled: true,
            trotter_slices: 16,
        }
    }
}

impl NoiseParams {
    pub fn off() -> Self {
        NoiseParams {
            enabled: false,
            ..Self::default()
        }
    }

    pub fn with_slices(self, trotter_slices: usize) -> Self {
        NoiseParams {
            trotter_slices,
            ..self
        }
    }
}

/// `1/T2 - 1/(2 T1)` in 1/s.
pub fn dephasing_rate(t1: f64, t2: f64) -> f64 {
    (1.0 / t2 - 0.5 / t1).max(0.0)
}

/// Kraus operators of one spin's relaxation over `duration` seconds.
pub fn relaxation_kraus(duration: f64, t1: f64, t2: f64) -> Result<Vec<ComplexMatrix>> {
    if duration.is_nan() || duration < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "duration must be >= 0, got {duration}"
        )));
    }
    let gamma = 1.0 - (-duration / t1).exp();
    let lambda = (-duration * dephasing_rate(t1, t2)).exp();
    let h = 0.5f64.sqrt();
    let keep = (1.0 - gamma).sqrt();
    let jump = gamma.sqrt();
    let m = |a: f64, b: f64, cc: f64, d: f64| {
        ComplexMatrix::from_row_slice(2, 2, &[c(a, 0.0), c(b, 0.0), c(cc, 0.0), c(d, 0.0)])
    };
    let damping = [
        m(h, 0.0, 0.0, h * keep),
        m(0.0, h * jump, 0.0, 0.0),
        m(h * keep, 0.0, 0.0, h),
        m(0.0, 0.0, h * jump, 0.0),
    ];
    let p_keep = ((1.0 + lambda) / 2.0).sqrt();
    let p_flip = ((1.0 - lambda) / 2.0).sqrt();
    let dephasing = [m(p_keep, 0.0, 0.0, p_keep), m(p_flip, 0.0, 0.0, -p_flip)];
    Ok(dephasing
        .iter()
        .flat_map(|d| damping.iter().map(move |a| d * a))
        .filter(|k| k.iter().any(|z| *z != ZERO))
        .collect())
}

struct Channel {
    per_qubit: Vec<Vec<ComplexMatrix>>,
}

impl Channel {
    fn new(duration: f64, system: &SpinSystem) -> Result<Self> {
        let n = system.n_qubits();
        let per_qubit = (1..=n)
            .map(|q| {
                let q = QubitIndex::of(q);
                relaxation_kraus(duration, system.t1(q)?, system.t2(q)?)?
                    .iter()
                    .map(|k| embed_one(k, q, n))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Channel { per_qubit })
    }

    fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = rho.clone();
        for ops in &self.per_qubit {
            out = ops
                .iter()
                .fold(ComplexMatrix::zeros(out.nrows(), out.ncols()), |acc, k| {
                    acc + k * &out * k.adjoint()
                });
        }
        out
    }
}

/// Relaxes every spin for `duration` seconds.
pub fn apply_decoherence(
    rho: &DensityMatrix,
    duration: f64,
    system: &SpinSystem,
) -> Result<DensityMatrix> {
    if duration.is_nan() || duration < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "duration must be >= 0, got {duration}"
        )));
    }
    if rho.n_qubits() != system.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: 1 << system.n_qubits(),
            actual: rho.dim(),
        });
    }
    if duration == 0.0 {
        return Ok(rho.clone());
    }
    let channel = Channel::new(duration, system)?;
    Ok(DensityMatrix::from_matrix_unchecked(
        channel.apply(rho.matrix()),
    ))
}

fn free_evolution(energies: &[f64], t: f64) -> DVector<C64> {
    DVector::from_iterator(
        energies.len(),
        energies.iter().map(|&e| C64::from_polar(1.0, -e * t)),
    )
}

fn conjugate_diagonal(rho: &ComplexMatrix, phases: &DVector<C64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(rho.nrows(), rho.ncols(), |i, k| {
        phases[i] * rho[(i, k)] * phases[k].conj()
    })
}

/// Runs a schedule on a density matrix. Pulses are ideal and instantaneous;
/// delays evolve under every coupling of `system`, with relaxation
/// interleaved slice by slice when `noise.enabled`.
pub fn simulate_schedule(
    rho0: &DensityMatrix,
    schedule: &Schedule,
    system: &SpinSystem,
    noise: &NoiseParams,
) -> Result<DensityMatrix> {
    let n = system.n_qubits();
    if rho0.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: 1 << n,
            actual: rho0.dim(),
        });
    }
    let energies = zz_diagonal(system);
    let mut rho = rho0.matrix().clone();
    for event in schedule.events() {
        match *event {
            TimedEvent::Pulse { qubit, axis, angle } => {
                let u = embed_one(&rotation(axis, angle), qubit, n)?;
                rho = &u * rho * u.adjoint();
            }
            TimedEvent::Delay(d) if noise.enabled && d > 0.0 => {
                let slices = noise.trotter_slices.max(1);
                let dt = d / slices as f64;
                let phases = free_evolution(&energies, dt);
                let channel = Channel::new(dt, system)?;
                for _ in 0..slices {
                    rho = channel.apply(&conjugate_diagonal(&rho, &phases));
                }
            }
            TimedEvent::Delay(d) => {
                rho = conjugate_diagonal(&rho, &free_evolution(&energies, d));
            }
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(rho))
}

/// Attenuated correlation between the noisy and noiseless runs of a
/// protocol's lowered schedule, started from its pseudo-pure input.
pub fn decoherence_estimate(protocol: Protocol, system: &SpinSystem) -> Result<f64> {
    decoherence_estimate_with(protocol, system, &NoiseParams::default(), 1.0)
}

/// As [`decoherence_estimate`], with explicit slicing and every delay scaled by `delay_scale`.
pub fn decoherence_estimate_with(
    protocol: Protocol,
    system: &SpinSystem,
    noise: &NoiseParams,
    delay_scale: f64,
) -> Result<f64> {
    let schedule = protocol.schedule(system)?.scale_delays(delay_scale)?;
    let rho0 = protocol.initial_pps(1.0)?.into_density();
    let ideal = simulate_schedule(&rho0, &schedule, system, &NoiseParams::off())?;
    let noisy = simulate_schedule(
        &rho0,
        &schedule,
        system,
        &NoiseParams {
            enabled: true,
            ..*noise
        },
    )?;
    attenuated_correlation(&ideal, &noisy)
}

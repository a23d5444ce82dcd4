//! Bell, W and GHZ preparation run end to end at four levels of realism:
//! ideal XY evolution, the compiled gate sequence, the lowered pulse schedule,
//! and the schedule with relaxation.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::chain::{self, bell_target, ghz_state, w_angle, w_state, ProtocolResult};
use crate::error::{Error, Result};
use crate::nmr::{make_pps, simulate_schedule, NoiseParams, PseudoPureState, SpinSystem};
use crate::pulses::{
    compile_xy_unitary, compile_z_rotation, lower_to_schedule, sequence_unitary, Gate,
    GateSequence, Schedule,
};
use crate::qlinalg::{identity, Axis, DensityMatrix, PureState, QubitIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    Bell010,
    Bell101,
    W,
    Ghz,
}

impl Protocol {
    pub const ALL: [Protocol; 4] = [
        Protocol::Bell010,
        Protocol::Bell101,
        Protocol::W,
        Protocol::Ghz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Bell010 => "bell-010",
            Protocol::Bell101 => "bell-101",
            Protocol::W => "w",
            Protocol::Ghz => "ghz",
        }
    }

    /// Basis label of the pseudo-pure input.
    pub fn initial_label(self) -> &'static str {
        match self {
            Protocol::Bell010 => "010",
            Protocol::Bell101 | Protocol::W => "101",
            Protocol::Ghz => "000",
        }
    }

    pub fn initial_pps(self, epsilon: f64) -> Result<PseudoPureState> {
        make_pps(self.initial_label(), epsilon)
    }

    /// XY evolution angle used by the protocol.
    pub fn phi(self) -> f64 {
        match self {
            Protocol::Bell010 | Protocol::Bell101 => PI / 4.0,
            Protocol::W => w_angle(),
            Protocol::Ghz => PI / 2.0,
        }
    }

    /// State the protocol is meant to produce, up to global phase.
    pub fn target(self) -> PureState {
        match self {
            Protocol::Bell010 => bell_target(false),
            Protocol::Bell101 => bell_target(true),
            Protocol::W => w_state(),
            Protocol::Ghz => ghz_state(),
        }
    }

    pub fn ideal(self) -> Result<ProtocolResult> {
        match self {
            Protocol::Bell010 | Protocol::Bell101 => {
                chain::prepare_bell(&PureState::basis(self.initial_label())?)
            }
            Protocol::W => chain::prepare_w(&PureState::basis("101")?),
            Protocol::Ghz => chain::prepare_ghz(),
        }
    }

    /// Whole protocol as rotations, ZZ and ZZZ gates in time order.
    pub fn gate_sequence(self) -> GateSequence {
        let xy = compile_xy_unitary(self.phi());
        match self {
            Protocol::Bell010 | Protocol::Bell101 => xy,
            Protocol::W => xy.then(&compile_z_rotation(QubitIndex::of(2), PI / 2.0)),
            Protocol::Ghz => {
                let layer = |axis| {
                    GateSequence::new((1..=3).map(|q| Gate::rotation(q, axis, PI / 2.0)).collect())
                };
                layer(Axis::Y).then(&xy).then(&layer(Axis::X))
            }
        }
    }

    pub fn schedule(self, system: &SpinSystem) -> Result<Schedule> {
        lower_to_schedule(&self.gate_sequence(), system)
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bell-010" | "bell" => Ok(Protocol::Bell010),
            "bell-101" => Ok(Protocol::Bell101),
            "w" => Ok(Protocol::W),
            "ghz" => Ok(Protocol::Ghz),
            other => Err(Error::UnsupportedProtocol(format!(
                "unknown protocol {other:?} (expected bell-010, bell-101, w or ghz)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Ideal,
    Compiled,
    Schedule,
    ScheduleNoise,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Ideal => "ideal",
            Mode::Compiled => "compiled",
            Mode::Schedule => "schedule",
            Mode::ScheduleNoise => "schedule-noise",
        }
    }

    pub fn uses_schedule(self) -> bool {
        matches!(self, Mode::Schedule | Mode::ScheduleNoise)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(Mode::Ideal),
            "compiled" => Ok(Mode::Compiled),
            "schedule" => Ok(Mode::Schedule),
            "schedule-noise" | "schedule+noise" => Ok(Mode::ScheduleNoise),
            other => Err(Error::InvalidArgument(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub final_state: DensityMatrix,
    /// Ideal transformation applied to the same pseudo-pure input.
    pub ideal_state: DensityMatrix,
    pub target: PureState,
    pub total_duration_s: Option<f64>,
}

fn mix_with_identity(rho: &DensityMatrix, epsilon: f64) -> Result<DensityMatrix> {
    let dim = rho.dim();
    let m = rho.matrix().map(|z| z * epsilon)
        + identity(dim).map(|z| z * ((1.0 - epsilon) / dim as f64));
    DensityMatrix::new(m)
}

/// Runs `protocol` from its pseudo-pure input with purity fraction `epsilon`.
pub fn run_protocol(
    protocol: Protocol,
    mode: Mode,
    system: &SpinSystem,
    noise: &NoiseParams,
    epsilon: f64,
) -> Result<PipelineOutput> {
    if system.n_qubits() != 3 {
        return Err(Error::InvalidArgument(format!(
            "protocols run on 3 spins, system has {}",
            system.n_qubits()
        )));
    }
    let rho0 = protocol.initial_pps(epsilon)?.into_density();
    let ideal_state = mix_with_identity(&protocol.ideal()?.final_state.to_density(), epsilon)?;
    let (final_state, total_duration_s) = match mode {
        Mode::Ideal => (ideal_state.clone(), None),
        Mode::Compiled => {
            let u = sequence_unitary(&protocol.gate_sequence(), 3)?;
            (rho0.evolve(&u)?, None)
        }
        Mode::Schedule | Mode::ScheduleNoise => {
            let schedule = protocol.schedule(system)?;
            let noise = if mode == Mode::ScheduleNoise {
                NoiseParams {
                    enabled: true,
                    ..*noise
                }
            } else {
                NoiseParams::off()
            };
            let out = simulate_schedule(&rho0, &schedule, system, &noise)?;
            (out, Some(schedule.total_duration()))
        }
    };
    Ok(PipelineOutput {
        final_state,
        ideal_state,
        target: protocol.target(),
        total_duration_s,
    })
}

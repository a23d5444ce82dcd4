//! Gate IR, the compiler from the three-spin XY propagator to rotations and
//! ZZ evolutions, and lowering of ZZ evolutions to refocused delay schedules.
//!
//! Conventions:
//! - `Rotation { axis, angle }` is `exp(-i angle sigma_axis / 2)`.
//! - `Zz { angle }` is `exp(-i angle Z_a Z_b)`.
//! - `Zzz { angle }` is `exp(-i angle Z_1 Z_2 Z_3)`.
//!
//! A [`GateSequence`] lists gates in time order: the first gate acts first.

use std::f64::consts::PI;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nmr::{zz_diagonal, SpinSystem};
use crate::qlinalg::{
    embed_one, equal_up_to_global_phase, identity, rotation, Axis, ComplexMatrix, PhaseReport,
    QubitIndex, C64,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GateRecord", into = "GateRecord")]
pub enum Gate {
    Rotation {
        qubit: QubitIndex,
        axis: Axis,
        angle: f64,
    },
    Zz {
        pair: (QubitIndex, QubitIndex),
        angle: f64,
    },
    Zzz {
        angle: f64,
    },
}

impl Gate {
    pub fn rotation(qubit: usize, axis: Axis, angle: f64) -> Gate {
        Gate::Rotation {
            qubit: QubitIndex::of(qubit),
            axis,
            angle,
        }
    }

    pub fn zz(a: usize, b: usize, angle: f64) -> Gate {
        Gate::Zz {
            pair: (QubitIndex::of(a), QubitIndex::of(b)),
            angle,
        }
    }

    pub fn zzz(angle: f64) -> Gate {
        Gate::Zzz { angle }
    }

    pub fn angle(&self) -> f64 {
        match *self {
            Gate::Rotation { angle, .. } | Gate::Zz { angle, .. } | Gate::Zzz { angle } => angle,
        }
    }

    pub fn with_angle(self, angle: f64) -> Gate {
        match self {
            Gate::Rotation { qubit, axis, .. } => Gate::Rotation { qubit, axis, angle },
            Gate::Zz { pair, .. } => Gate::Zz { pair, angle },
            Gate::Zzz { .. } => Gate::Zzz { angle },
        }
    }
}

/// Flat JSON form: `{"type", "qubits", "axis", "angle"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct GateRecord {
    #[serde(rename = "type")]
    kind: String,
    qubits: Vec<QubitIndex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    axis: Option<Axis>,
    angle: f64,
}

impl From<Gate> for GateRecord {
    fn from(g: Gate) -> Self {
        match g {
            Gate::Rotation { qubit, axis, angle } => GateRecord {
                kind: "rotation".into(),
                qubits: vec![qubit],
                axis: Some(axis),
                angle,
            },
            Gate::Zz { pair, angle } => GateRecord {
                kind: "zz".into(),
                qubits: vec![pair.0, pair.1],
                axis: None,
                angle,
            },
            Gate::Zzz { angle } => GateRecord {
                kind: "zzz".into(),
                qubits: (1..=3).map(QubitIndex::of).collect(),
                axis: None,
                angle,
            },
        }
    }
}

impl TryFrom<GateRecord> for Gate {
    type Error = Error;

    fn try_from(r: GateRecord) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidArgument(format!("gate {:?}: {msg}", r.kind));
        match (r.kind.as_str(), r.qubits.as_slice()) {
            ("rotation", [q]) => Ok(Gate::Rotation {
                qubit: *q,
                axis: r.axis.ok_or_else(|| bad("missing axis"))?,
                angle: r.angle,
            }),
            ("zz", [a, b]) => Ok(Gate::Zz {
                pair: (*a, *b),
                angle: r.angle,
            }),
            ("zzz", qs) if qs.is_empty() || qs == [1, 2, 3].map(QubitIndex::of) => {
                Ok(Gate::Zzz { angle: r.angle })
            }
            _ => Err(bad("unknown type or wrong qubit list")),
        }
    }
}

/// Gates in time order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GateSequence {
    gates: Vec<Gate>,
}

impl GateSequence {
    pub fn new(gates: Vec<Gate>) -> Self {
        GateSequence { gates }
    }

    /// Builds from a product written the way operators are: rightmost factor acts first.
    pub fn from_operator_order(mut factors: Vec<Gate>) -> Self {
        factors.reverse();
        GateSequence { gates: factors }
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gates_mut(&mut self) -> &mut [Gate] {
        &mut self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    /// `self` followed in time by `other`.
    pub fn then(mut self, other: &GateSequence) -> GateSequence {
        self.gates.extend_from_slice(&other.gates);
        self
    }

    pub fn reversed(&self) -> GateSequence {
        GateSequence::from_operator_order(self.gates.clone())
    }

    pub fn count_rotations(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Rotation { .. }))
            .count()
    }

    pub fn count_zz(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Zz { .. }))
            .count()
    }

    pub fn count_zzz(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Zzz { .. }))
            .count()
    }

    /// Replaces every `Zzz` by its rotation + ZZ synthesis.
    pub fn inline_zzz(&self) -> GateSequence {
        let mut out = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            match *g {
                Gate::Zzz { angle } => out.extend_from_slice(compile_zzz(angle).gates()),
                other => out.push(other),
            }
        }
        GateSequence { gates: out }
    }
}

fn z_sign(index: usize, q: QubitIndex, n: usize) -> f64 {
    if (index >> q.bit(n)) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn diagonal_unitary<F>(n: usize, phase: F) -> ComplexMatrix
where
    F: Fn(usize) -> f64,
{
    let diag: Vec<C64> = (0..1usize << n)
        .map(|k| C64::from_polar(1.0, phase(k)))
        .collect();
    ComplexMatrix::from_diagonal(&DVector::from_vec(diag))
}

/// Full `2^n`-dimensional unitary of one gate.
pub fn gate_unitary(gate: &Gate, n_qubits: usize) -> Result<ComplexMatrix> {
    match *gate {
        Gate::Rotation { qubit, axis, angle } => embed_one(&rotation(axis, angle), qubit, n_qubits),
        Gate::Zz {
            pair: (a, b),
            angle,
        } => {
            a.check(n_qubits)?;
            b.check(n_qubits)?;
            if a == b {
                return Err(Error::InvalidArgument(format!("ZZ on repeated qubit {a}")));
            }
            Ok(diagonal_unitary(n_qubits, |k| {
                -angle * z_sign(k, a, n_qubits) * z_sign(k, b, n_qubits)
            }))
        }
        Gate::Zzz { angle } => {
            let qs = [1, 2, 3].map(QubitIndex::of);
            qs[2].check(n_qubits)?;
            Ok(diagonal_unitary(n_qubits, |k| {
                -angle * qs.iter().map(|&q| z_sign(k, q, n_qubits)).product::<f64>()
            }))
        }
    }
}

/// Time-ordered product: the last gate ends up leftmost.
pub fn sequence_unitary(seq: &GateSequence, n_qubits: usize) -> Result<ComplexMatrix> {
    seq.gates()
        .iter()
        .try_fold(identity(1 << n_qubits), |acc, g| {
            Ok(gate_unitary(g, n_qubits)? * acc)
        })
}

/// Rotation + ZZ + ZZZ realization of the three-spin XY propagator at `phi`.
///
/// The two commuting halves of the Hamiltonian are each produced from one ZZ
/// evolution, moved onto the right operators by pi/2 rotations and ZZZ
/// conjugations. Yields 12 rotations, 2 ZZ and 4 ZZZ gates.
pub fn compile_xy_unitary(phi: f64) -> GateSequence {
    use Axis::{X, Y};
    let q = PI / 2.0;
    let e = PI / 8.0;
    let r = Gate::rotation;
    GateSequence::from_operator_order(vec![
        r(1, Y, q),
        r(3, X, -q),
        Gate::zzz(e),
        r(2, Y, q),
        Gate::zz(1, 2, phi),
        r(2, Y, -q),
        Gate::zzz(-e),
        r(1, Y, -q),
        r(3, X, q),
        r(1, X, -q),
        r(3, Y, q),
        Gate::zzz(e),
        r(2, Y, q),
        Gate::zz(2, 3, phi),
        r(2, Y, -q),
        Gate::zzz(-e),
        r(1, X, q),
        r(3, Y, -q),
    ])
}

/// [`compile_xy_unitary`] with every ZZZ replaced by [`compile_zzz`].
pub fn compile_xy_unitary_native(phi: f64) -> GateSequence {
    compile_xy_unitary(phi).inline_zzz()
}

/// `exp(-i angle Z1 Z2 Z3)` from two-spin ZZ evolutions and rotations of qubit 2.
///
/// The construction is fixed at `angle = pi/8`; other angles scale the inner
/// ZZ(2,3) evolution.
pub fn compile_zzz(angle: f64) -> GateSequence {
    use Axis::{X, Y};
    let q = PI / 2.0;
    let r = Gate::rotation;
    GateSequence::from_operator_order(vec![
        r(2, X, q),
        Gate::zz(1, 2, PI / 4.0),
        r(2, Y, q),
        Gate::zz(2, 3, angle),
        r(2, Y, q),
        Gate::zz(1, 2, PI / 4.0),
        r(2, Y, -PI),
        r(2, X, -q),
    ])
}

/// Z rotation built as `[pi/2]_Y - [angle]_X - [pi/2]_-Y` in time order.
pub fn compile_z_rotation(qubit: QubitIndex, angle: f64) -> GateSequence {
    let q = PI / 2.0;
    GateSequence::new(vec![
        Gate::Rotation {
            qubit,
            axis: Axis::Y,
            angle: q,
        },
        Gate::Rotation {
            qubit,
            axis: Axis::X,
            angle,
        },
        Gate::Rotation {
            qubit,
            axis: Axis::Y,
            angle: -q,
        },
    ])
}

/// One entry of a pulse schedule; pulses are ideal and instantaneous.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TimedEvent {
    #[serde(rename = "pulse")]
    Pulse {
        qubit: QubitIndex,
        axis: Axis,
        angle: f64,
    },
    #[serde(rename = "delay_s")]
    Delay(f64),
}

/// Pulses and free-evolution delays in time order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    events: Vec<TimedEvent>,
}

impl Schedule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_events(events: Vec<TimedEvent>) -> Result<Self> {
        let mut s = Schedule::new();
        for e in events {
            s.push(e)?;
        }
        Ok(s)
    }

    pub fn push(&mut self, event: TimedEvent) -> Result<()> {
        if let TimedEvent::Delay(d) = event {
            if d.is_nan() || d < 0.0 || !d.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "delay must be >= 0, got {d}"
                )));
            }
        }
        self.events.push(event);
        Ok(())
    }

    pub fn pulse(&mut self, qubit: QubitIndex, axis: Axis, angle: f64) {
        self.events.push(TimedEvent::Pulse { qubit, axis, angle });
    }

    pub fn extend(&mut self, other: &Schedule) {
        self.events.extend_from_slice(&other.events);
    }

    pub fn events(&self) -> &[TimedEvent] {
        &self.events
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn delays(&self) -> impl Iterator<Item = f64> + '_ {
        self.events.iter().filter_map(|e| match e {
            TimedEvent::Delay(d) => Some(*d),
            TimedEvent::Pulse { .. } => None,
        })
    }

    /// Sum of all delays in seconds.
    pub fn total_duration(&self) -> f64 {
        self.delays().sum()
    }

    pub fn pulse_count(&self) -> usize {
        self.events.len() - self.delays().count()
    }

    /// Copy with every delay multiplied by `factor`.
    pub fn scale_delays(&self, factor: f64) -> Result<Schedule> {
        if factor.is_nan() || factor < 0.0 {
            return Err(Error::InvalidArgument(format!("bad delay scale {factor}")));
        }
        let events = self
            .events
            .iter()
            .map(|e| match *e {
                TimedEvent::Delay(d) => TimedEvent::Delay(d * factor),
                p => p,
            })
            .collect();
        Ok(Schedule { events })
    }
}

fn spectator_of(a: QubitIndex, b: QubitIndex, n_qubits: usize) -> Result<QubitIndex> {
    if n_qubits != 3 {
        return Err(Error::InvalidArgument(format!(
            "refocused ZZ lowering needs exactly 3 spins, got {n_qubits}"
        )));
    }
    a.check(3)?;
    b.check(3)?;
    if a == b {
        return Err(Error::InvalidArgument(format!("ZZ on repeated qubit {a}")));
    }
    Ok(QubitIndex::of(6 - a.get() - b.get()))
}

/// Lowers `exp(-i phi Z_a Z_b)` to `tau/2 - [pi]_s - tau/2 - [pi]_s` with
/// `tau = 2|phi| / (pi |J_ab|)` and `s` the third spin.
///
/// The pi pulses on the spectator refocus both of its couplings. When the sign
/// of `phi` disagrees with the sign of `J_ab`, the window is bracketed by pi
/// pulses on qubit `a`, which reverses the accumulated ZZ phase.
pub fn expand_zz_to_schedule(
    pair: (QubitIndex, QubitIndex),
    phi: f64,
    system: &SpinSystem,
) -> Result<Schedule> {
    let (a, b) = pair;
    let spectator = spectator_of(a, b, system.n_qubits())?;
    let j = system.coupling(a, b)?;
    if j == 0.0 {
        return Err(Error::InvalidArgument(format!(
            "qubits {a} and {b} are not coupled"
        )));
    }
    let mut s = Schedule::new();
    if phi == 0.0 {
        return Ok(s);
    }
    let tau = 2.0 * phi.abs() / (PI * j.abs());
    let flip = phi.signum() != j.signum();
    if flip {
        s.pulse(a, Axis::X, PI);
    }
    s.push(TimedEvent::Delay(tau / 2.0))?;
    s.pulse(spectator, Axis::X, PI);
    s.push(TimedEvent::Delay(tau / 2.0))?;
    s.pulse(spectator, Axis::X, PI);
    if flip {
        s.pulse(a, Axis::X, PI);
    }
    Ok(s)
}

/// Lowers a gate sequence to NMR events: ZZZ synthesized, Z rotations made
/// composite, every ZZ expanded to a refocused delay block.
pub fn lower_to_schedule(seq: &GateSequence, system: &SpinSystem) -> Result<Schedule> {
    let mut s = Schedule::new();
    for gate in seq.inline_zzz().gates() {
        match *gate {
            Gate::Rotation {
                qubit,
                axis: Axis::Z,
                angle,
            } => {
                for g in compile_z_rotation(qubit, angle).gates() {
                    if let Gate::Rotation { qubit, axis, angle } = *g {
                        s.pulse(qubit, axis, angle);
                    }
                }
            }
            Gate::Rotation { qubit, axis, angle } => s.pulse(qubit, axis, angle),
            Gate::Zz { pair, angle } => s.extend(&expand_zz_to_schedule(pair, angle, system)?),
            Gate::Zzz { .. } => unreachable!("ZZZ gates are inlined above"),
        }
    }
    Ok(s)
}

/// Noiseless propagator of a schedule, with delays evolving under every
/// coupling of `system` (including the ones the schedule refocuses).
pub fn schedule_unitary(schedule: &Schedule, system: &SpinSystem) -> Result<ComplexMatrix> {
    let n = system.n_qubits();
    let energies = zz_diagonal(system);
    schedule
        .events()
        .iter()
        .try_fold(identity(1 << n), |acc, e| {
            let step = match *e {
                TimedEvent::Pulse { qubit, axis, angle } => {
                    embed_one(&rotation(axis, angle), qubit, n)?
                }
                TimedEvent::Delay(d) => diagonal_unitary(n, |k| -energies[k] * d),
            };
            Ok(step * acc)
        })
}

/// Something whose unitary can be checked against a target.
#[derive(Debug, Clone, Copy)]
pub enum Program<'a> {
    Gates(&'a GateSequence),
    Schedule(&'a Schedule, &'a SpinSystem),
}

impl<'a> From<&'a GateSequence> for Program<'a> {
    fn from(seq: &'a GateSequence) -> Self {
        Program::Gates(seq)
    }
}

/// Compares the program's unitary with `target` up to a global phase.
pub fn verify_equivalence<'a>(
    program: impl Into<Program<'a>>,
    target: &ComplexMatrix,
    tol: f64,
) -> Result<PhaseReport> {
    let dim = target.nrows();
    if !dim.is_power_of_two() || dim < 2 {
        return Err(Error::InvalidArgument(format!("target dimension {dim}")));
    }
    let n = dim.trailing_zeros() as usize;
    let u = match program.into() {
        Program::Gates(seq) => sequence_unitary(seq, n)?,
        Program::Schedule(s, system) => {
            if system.n_qubits() != n {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: 1 << system.n_qubits(),
                });
            }
            schedule_unitary(s, system)?
        }
    };
    equal_up_to_global_phase(&u, target, tol)
}

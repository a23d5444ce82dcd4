//! Exact simulation of small Heisenberg-XY spin chains.
//!
//! The crate covers the closed-form three-spin XY propagator, pairwise and
//! tripartite entanglement measures, preparation of Bell, W and GHZ states, a
//! compiler from the XY propagator to NMR-native gates (single-qubit rotations
//! and ZZ evolutions), delay-level pulse schedules with refocusing, and a
//! T1/T2 relaxation model for estimating decoherence losses.

pub mod chain;
pub mod cli;
pub mod entanglement;
pub mod error;
pub mod nmr;
pub mod pipeline;
pub mod pulses;
pub mod qlinalg;

pub use error::{Error, Result};
pub use qlinalg::{ComplexMatrix, DensityMatrix, PureState, QubitIndex, C64};

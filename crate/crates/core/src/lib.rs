//! Tunneling phase times for non-relativistic wave packets crossing a
//! rectangular barrier.
//!
//! The crate evaluates the exact and opaque-limit transmission amplitude,
//! the stationary-phase time, a moment-based phase time for opaque
//! barriers, and the numerical peak-arrival time of a synthesized wave
//! packet at the barrier exit. All physics runs in reduced units (see
//! [`units`]); physical units only enter through [`units::PhysicalParams`].

pub mod error;
pub mod exec;
pub mod experiment;
pub mod peakfind;
pub mod phasetime;
pub mod quadrature;
pub mod spectrum;
pub mod transmission;
pub mod units;
pub mod wavepacket;

pub use error::{Error, Result};
pub use exec::Execution;
pub use peakfind::{full_report, peak_arrival, PeakResult, PeakSearchConfig};
pub use phasetime::{MomentTable, PhaseTimeReport};
pub use spectrum::Spectrum;
pub use transmission::TransmissionValue;
pub use units::{DimensionlessParams, PhysicalParams, UnitScales};
pub use wavepacket::{QuadratureSettings, WavePacket, WaveSample};

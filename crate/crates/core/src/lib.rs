//! Kinematics, gait simulation, design fitting, system identification and
//! control simulation for a robotic ankle with two energy-store-and-release
//! spring mechanisms.
//!
//! Everything is SI internally (m, N, N·m, rad, s). Degrees and millimetres
//! only appear at the config and CSV boundaries.
//!
//! Modules:
//! - [`mech`]: planar quasi-static mechanism models (DF spring pack, motorized
//!   EES spring, reset spring).
//! - [`gait`]: Akima interpolation, gait profiles and full-cycle simulation.
//! - [`design`]: force-deflection derivation, spring fitting, energy budget,
//!   battery sizing and geometry calibration.
//! - [`sysid`]: chirp excitation and second-order output-error fitting.
//! - [`control`]: PID and disturbance-observer closed-loop simulation.

pub mod control;
pub mod design;
pub mod error;
pub mod gait;
pub mod mech;
pub mod params;
pub mod search;
pub mod sysid;

pub use error::{Error, Result};

/// Standard gravity, m/s².
pub const G: f64 = 9.80665;

//! Discrete-time PID and disturbance-observer loops at a fixed step.
//!
//! Controller and observer state are plain values passed in and returned.

mod dob;
mod pid;
mod reference;
mod scenario;
mod sim;

pub use dob::{dob_update, DobConfig, DobState, NominalPlant};
pub use pid::{pid_update, PidGains, PidState};
pub use reference::{cubic_velocity_reference, sample_references, velocity_profile, CubicVelocityRef};
pub use scenario::{DobScenario, RampScenario, LOOP_DT};
pub use sim::{simulate_velocity_loop, ClosedLoopTrace, BLOW_UP, TRACE_CSV_HEADER};

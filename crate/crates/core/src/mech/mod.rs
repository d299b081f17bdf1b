//! Quasi-static planar models of the three spring mechanisms.
//!
//! Frame: foot-fixed, origin at the ankle joint F, x toward the toe, y up.
//! A positive ankle angle is dorsi-flexion, which rotates the shank (and
//! everything mounted on it) clockwise in this frame.

mod df;
mod ees;
mod reset;
mod torque;
mod vector;

pub use df::{
    design_slider_arc, df_attachment_position, df_deflection, df_torque, spring_force,
    DfGeometry, DfMechanism, ParallelSpringPair,
};
pub use ees::{ees_moment_arm, ees_torque, ees_torque_with_force, EesMechanism};
pub use reset::{
    reset_required_force, reset_spring_design, reset_torque, required_force, ResetProfile,
    ResetSpringDesign,
};
pub use torque::{AnkleState, TorqueResult, THETA_A_MAX, THETA_A_MIN};
pub use vector::PlanarVector;

/// Rotation that carries shank-fixed reference points to ankle angle `theta_a`.
pub(crate) fn shank_rotation(p: PlanarVector, theta_a: f64) -> PlanarVector {
    p.rotate(-theta_a)
}

use super::PlanarVector;
use crate::error::{Error, Result};

/// Lower bound of the ankle angle guard, rad (about −25.8°).
pub const THETA_A_MIN: f64 = -0.45;
/// Upper bound of the ankle angle guard, rad (about 17.2°).
pub const THETA_A_MAX: f64 = 0.30;

/// Instantaneous ankle state. Dorsi-flexion is positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnkleState {
    pub theta_a: f64,
    /// Fraction of the stride, `[0, 1]`.
    pub gait_percent: f64,
    /// Joint velocity, rad/s.
    pub omega: f64,
}

impl AnkleState {
    pub fn new(theta_a: f64, gait_percent: f64, omega: f64) -> Result<Self> {
        check_theta_a(theta_a)?;
        if !(0.0..=1.0).contains(&gait_percent) {
            return Err(Error::Range { value: gait_percent, min: 0.0, max: 1.0 });
        }
        crate::error::ensure_finite("omega", omega)?;
        Ok(Self { theta_a, gait_percent, omega })
    }

    /// A static pose at the start of the stride.
    pub fn at_angle(theta_a: f64) -> Result<Self> {
        Self::new(theta_a, 0.0, 0.0)
    }
}

pub(crate) fn check_theta_a(theta_a: f64) -> Result<()> {
    if (THETA_A_MIN..=THETA_A_MAX).contains(&theta_a) {
        Ok(())
    } else {
        Err(Error::Range { value: theta_a, min: THETA_A_MIN, max: THETA_A_MAX })
    }
}

/// Torque about the ankle axis together with the force and arm that make it.
///
/// `torque` is positive when it drives plantar-flexion. `force` is the
/// force acting on the shank-side attachment and `moment_arm` runs from the
/// joint to a point on its line of action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorqueResult {
    pub torque: f64,
    pub force: PlanarVector,
    pub moment_arm: PlanarVector,
}

impl TorqueResult {
    pub fn new(moment_arm: PlanarVector, force: PlanarVector) -> Self {
        Self { torque: moment_arm.cross(force), force, moment_arm }
    }

    pub fn zero(moment_arm: PlanarVector) -> Self {
        Self::new(moment_arm, PlanarVector::ZERO)
    }

    /// Perpendicular distance from the joint to the line of action, m.
    pub fn perpendicular_arm(&self) -> Option<f64> {
        self.force.unit().map(|u| self.moment_arm.cross(u).abs())
    }
}

use super::{PlanarVector, TorqueResult};
use crate::error::{Error, Result};

/// Motorized spring whose anchor travels an orbital arc S → S' on release.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EesMechanism {
    /// Spring rate, N/m.
    pub k_es: f64,
    /// Maximum compression, m.
    pub stroke: f64,
    pub orbital_radius: f64,
    /// Arc travel from S to S', rad.
    pub theta_r_final: f64,
    pub attach_initial: PlanarVector,
    pub attach_final: PlanarVector,
}

impl EesMechanism {
    /// Builds the mechanism; `attach_final` follows from the arc.
    pub fn new(
        k_es: f64,
        stroke: f64,
        orbital_radius: f64,
        theta_r_final: f64,
        attach_initial: PlanarVector,
    ) -> Result<Self> {
        let arm = arc_vector(orbital_radius, theta_r_final);
        let m = Self {
            k_es,
            stroke,
            orbital_radius,
            theta_r_final,
            attach_initial,
            attach_final: attach_initial + arm,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k_es.is_finite() && self.k_es >= 0.0) {
            return Err(Error::Domain(format!("k_es must be >= 0, got {}", self.k_es)));
        }
        if !(self.stroke > 0.0 && self.orbital_radius > 0.0) {
            return Err(Error::Domain("stroke and orbital radius must be positive".into()));
        }
        if !(self.theta_r_final > 0.0 && self.theta_r_final < std::f64::consts::PI) {
            return Err(Error::Domain(format!("theta_r_final {} outside (0, pi)", self.theta_r_final)));
        }
        let chord = self.chord();
        let got = self.attach_final.distance(self.attach_initial);
        if (got - chord).abs() > 1e-9 * chord {
            return Err(Error::Geometry(format!("|SS'| = {got} but the arc chord is {chord}")));
        }
        Ok(())
    }

    /// Chord of the full orbital travel, m.
    pub fn chord(&self) -> f64 {
        2.0 * self.orbital_radius * (0.5 * self.theta_r_final).sin()
    }

    /// Energy stored at full stroke, J.
    pub fn stored_energy(&self) -> f64 {
        0.5 * self.k_es * self.stroke * self.stroke
    }
}

fn arc_vector(r: f64, theta_r: f64) -> PlanarVector {
    PlanarVector::new(-r * theta_r.sin(), r * (1.0 - theta_r.cos()))
}

/// Moment arm SS' after `theta_r` of arc travel.
pub fn ees_moment_arm(mech: &EesMechanism, theta_r: f64) -> Result<PlanarVector> {
    if !(0.0..=mech.theta_r_final).contains(&theta_r) {
        return Err(Error::Range { value: theta_r, min: 0.0, max: mech.theta_r_final });
    }
    Ok(arc_vector(mech.orbital_radius, theta_r))
}

/// EES torque for spring compression `deflection`.
pub fn ees_torque(mech: &EesMechanism, deflection: f64, theta_r: f64) -> Result<TorqueResult> {
    if !(deflection >= 0.0) {
        return Err(Error::Domain(format!("negative deflection {deflection}")));
    }
    if deflection > mech.stroke {
        return Err(Error::SolidHeight { deflection, limit: mech.stroke });
    }
    ees_torque_with_force(mech, mech.k_es * deflection, theta_r)
}

/// EES torque for a given spring force magnitude, bypassing `k_es`.
///
/// The force on the ankle side is `−|F|·(sin θr, cos θr)`, so the torque is
/// `r·|F|·sin θr`.
pub fn ees_torque_with_force(mech: &EesMechanism, force: f64, theta_r: f64) -> Result<TorqueResult> {
    if !(force >= 0.0 && force.is_finite()) {
        return Err(Error::Domain(format!("force must be finite and >= 0, got {force}")));
    }
    let arm = ees_moment_arm(mech, theta_r)?;
    let (s, c) = theta_r.sin_cos();
    Ok(TorqueResult::new(arm, PlanarVector::new(-force * s, -force * c)))
}

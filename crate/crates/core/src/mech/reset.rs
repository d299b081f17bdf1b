use super::{PlanarVector, TorqueResult};
use crate::error::{Error, Result};
use crate::G;

/// Sweep points in a reset-spring torque profile.
const PROFILE_POINTS: usize = 101;

/// Reset spring returning the foot to neutral during swing.
///
/// `point_a` is the joint, `point_f` the foot-side attachment in the neutral
/// pose and `point_d` the shank-side anchor. The foot rotates about A by
/// the ankle angle θ (negative in plantar-flexion).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResetSpringDesign {
    pub foot_mass: f64,
    /// Height the foot centre of mass must be lifted, m.
    pub l2: f64,
    pub beta: f64,
    pub point_d: PlanarVector,
    pub point_a: PlanarVector,
    pub point_f: PlanarVector,
    pub theta_pf: f64,
    /// Spring rate, N/m. Zero until designed.
    pub k_reset: f64,
}

/// Output of [`reset_spring_design`].
#[derive(Debug, Clone, PartialEq)]
pub struct ResetProfile {
    pub k: f64,
    /// `(θ, torque)` from `theta_pf` up to 0.
    pub torque_profile: Vec<(f64, TorqueResult)>,
}

impl ResetSpringDesign {
    pub fn validate(&self) -> Result<()> {
        if !(self.foot_mass > 0.0 && self.l2 > 0.0) {
            return Err(Error::Domain("foot mass and l2 must be positive".into()));
        }
        if !(self.beta.cos().abs() > 1e-6) {
            return Err(Error::SingularGeometry(format!("cos(beta) ~ 0 for beta = {}", self.beta)));
        }
        if !(self.k_reset >= 0.0 && self.k_reset.is_finite()) {
            return Err(Error::Domain(format!("k_reset must be >= 0, got {}", self.k_reset)));
        }
        if !(self.theta_pf < 0.0) {
            return Err(Error::Domain(format!("theta_pf must be negative, got {}", self.theta_pf)));
        }
        for p in [self.point_a, self.point_d, self.point_f] {
            if !p.is_finite() {
                return Err(Error::Domain("non-finite attachment point".into()));
            }
        }
        Ok(())
    }

    /// Foot attachment F' after rotating by `theta`.
    pub fn foot_point(&self, theta: f64) -> PlanarVector {
        self.point_a + (self.point_f - self.point_a).rotate(theta)
    }

    /// |FF'| for rotation `theta`.
    pub fn chord(&self, theta: f64) -> f64 {
        self.foot_point(theta).distance(self.point_f)
    }

    /// Spring extension at `theta`, m: `|DF'| − |DF|` with `DF' = DA − AF'`.
    pub fn extension(&self, theta: f64) -> f64 {
        let da = self.point_d - self.point_a;
        let af = self.foot_point(theta) - self.point_a;
        let af0 = self.point_f - self.point_a;
        (da - af).norm() - (da - af0).norm()
    }

    /// Gravity work to lift the foot from `theta_pf` to `theta`, J.
    ///
    /// The lift is taken linear in angle, reaching `l2` at neutral.
    pub fn gravity_work(&self, theta: f64) -> f64 {
        self.foot_mass * G * self.l2 * (theta - self.theta_pf) / (-self.theta_pf)
    }
}

/// Force magnitude from the moment balance `|F|·|FF'|·cos β = m·g·l2`.
pub fn required_force(foot_mass: f64, l2: f64, chord: f64, beta: f64) -> Result<f64> {
    let c = beta.cos();
    if c.abs() <= 1e-6 {
        return Err(Error::SingularGeometry(format!("cos(beta) ~ 0 for beta = {beta}")));
    }
    if !(chord > 0.0) {
        return Err(Error::Geometry("zero travel of the foot attachment".into()));
    }
    Ok(foot_mass * G * l2 / (chord * c))
}

/// Required reset force at the design's maximum plantar-flexion, N.
pub fn reset_required_force(design: &ResetSpringDesign) -> Result<f64> {
    design.validate()?;
    required_force(design.foot_mass, design.l2, design.chord(design.theta_pf), design.beta)
}

/// Reset torque at angle `theta` using `design.k_reset`.
///
/// The cable only pulls: no force when the extension is negative.
pub fn reset_torque(design: &ResetSpringDesign, theta: f64) -> Result<TorqueResult> {
    let ad = design.point_d - design.point_a;
    let x = design.extension(theta);
    if x <= 0.0 || design.k_reset == 0.0 {
        return Ok(TorqueResult::zero(ad));
    }
    let dir = (design.foot_point(theta) - design.point_d)
        .unit()
        .ok_or_else(|| Error::Geometry("reset spring collapsed".into()))?;
    Ok(TorqueResult::new(ad, dir * (design.k_reset * x)))
}

/// Sizes the spring so that `|F|` is reached at `theta_pf`, then sweeps the
/// torque from `theta_pf` back to neutral.
pub fn reset_spring_design(design: &ResetSpringDesign, theta_pf: f64) -> Result<ResetProfile> {
    let mut d = *design;
    d.theta_pf = theta_pf;
    d.k_reset = 0.0;
    let f = reset_required_force(&d)?;
    let x = d.extension(theta_pf);
    if !(x > 0.0) {
        return Err(Error::Geometry(format!("spring does not extend at theta_pf (dx = {x})")));
    }
    d.k_reset = f / x;
    let n = PROFILE_POINTS - 1;
    let torque_profile = (0..=n)
        .map(|i| {
            let th = if i == n { 0.0 } else { theta_pf * (1.0 - i as f64 / n as f64) };
            reset_torque(&d, th).map(|t| (th, t))
        })
        .collect::<Result<_>>()?;
    Ok(ResetProfile { k: d.k_reset, torque_profile })
}

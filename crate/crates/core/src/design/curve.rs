use crate::error::{Error, Result};
use crate::gait::GaitProfile;
use crate::mech::{df_attachment_position, df_deflection, DfGeometry};

/// Spring force against deflection, deflection strictly increasing from 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceDeflectionCurve {
    pub points: Vec<(f64, f64)>,
}

impl ForceDeflectionCurve {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        match points.first() {
            Some((x, _)) if *x == 0.0 => {}
            _ => return Err(Error::Domain("curve must start at zero deflection".into())),
        }
        for (i, w) in points.windows(2).enumerate() {
            if !(w[1].0 > w[0].0) {
                return Err(Error::Grid(format!("point {}: deflection does not increase", i + 1)));
            }
        }
        if points.iter().any(|p| !(p.1 >= 0.0) || !p.0.is_finite() || !p.1.is_finite()) {
            return Err(Error::Domain("forces must be finite and >= 0".into()));
        }
        Ok(Self { points })
    }

    pub fn max_deflection(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.0)
    }
}

/// Force the springs must supply so the mechanism reproduces the natural
/// torque over the storage window (from the last non-positive angle sample
/// before maximum dorsi-flexion up to it), with the slider at the arc start.
pub fn derive_force_deflection(profile: &GaitProfile, geom: &DfGeometry) -> Result<ForceDeflectionCurve> {
    profile.validate()?;
    let s = &profile.samples;
    let mut imax = 0;
    for (i, smp) in s.iter().enumerate() {
        if smp.angle > s[imax].angle {
            imax = i;
        }
    }
    let mut i0 = imax;
    while i0 > 0 && s[i0 - 1].angle > 0.0 {
        i0 -= 1;
    }
    let tr = geom.arc_theta_range[0];
    let anchor = geom.toe_anchor();
    let mut points = vec![(0.0, 0.0)];
    for smp in &s[i0..=imax] {
        let x = df_deflection(geom, smp.angle, tr)?;
        let ap = df_attachment_position(geom, smp.angle, tr)?;
        let p = anchor + ap;
        let arm = p.cross(ap).abs() / ap.norm();
        if !(arm > 1e-9) {
            return Err(Error::Singularity(format!(
                "moment arm vanishes at {}% of stride",
                smp.percent
            )));
        }
        if x > points[points.len() - 1].0 {
            points.push((x, smp.torque.max(0.0) / arm));
        }
    }
    ForceDeflectionCurve::new(points)
}

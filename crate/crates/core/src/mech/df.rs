use std::f64::consts::PI;

use super::torque::check_theta_a;
use super::{shank_rotation, AnkleState, PlanarVector, TorqueResult};
use crate::error::{ensure_finite, Error, Result};

/// Tolerance on the slider angle range check, rad.
const ARC_SLACK: f64 = 1e-12;
/// Arc-angle samples used to bracket the design roots.
const ROOT_SCAN: usize = 720;

/// Geometry of the dorsi-flexion spring pack.
///
/// The toe-side end A of the spring is foot-fixed. The other end slides on a
/// circular arc mounted on the shank: centre `O = M + mo_offset`, radius
/// `arc_radius`, where `M` sits `m_len` behind the joint. The slider position
/// on the arc is the angle `theta_r`, measured so that
/// `B = O + r·(−cos θr, sin θr)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DfGeometry {
    /// |FM|, m.
    pub m_len: f64,
    /// |AM| in the neutral pose, m.
    pub l_m: f64,
    /// Angle of AM below the horizontal in the neutral pose, rad.
    pub theta_in: f64,
    pub mo_offset: PlanarVector,
    pub arc_radius: f64,
    /// `[start, end]` in release order. `end` may be smaller than `start`.
    pub arc_theta_range: [f64; 2],
    /// Spring length at zero deflection, m.
    pub free_length: f64,
}

impl DfGeometry {
    /// Geometry before the arc is placed; `design_slider_arc` fills in
    /// `mo_offset` and `arc_theta_range`.
    pub fn partial(m_len: f64, l_m: f64, theta_in: f64, arc_radius: f64, free_length: f64) -> Self {
        Self {
            m_len,
            l_m,
            theta_in,
            mo_offset: PlanarVector::ZERO,
            arc_radius,
            arc_theta_range: [0.0, 0.0],
            free_length,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("m_len", self.m_len),
            ("l_m", self.l_m),
            ("arc_radius", self.arc_radius),
            ("free_length", self.free_length),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Geometry(format!("{name} must be positive, got {v}")));
            }
        }
        ensure_finite("theta_in", self.theta_in)?;
        if !self.mo_offset.is_finite() {
            return Err(Error::Geometry("mo_offset is not finite".into()));
        }
        let [a, b] = self.arc_theta_range;
        if !(a.is_finite() && b.is_finite()) || (b - a).abs() > PI {
            return Err(Error::Geometry(format!("arc range [{a}, {b}] wider than pi")));
        }
        Ok(())
    }

    /// Point M (shank-fixed) in the neutral pose.
    pub fn m_point(&self) -> PlanarVector {
        PlanarVector::new(-self.m_len, 0.0)
    }

    /// Neutral-pose vector AM.
    pub fn am_ref(&self) -> PlanarVector {
        PlanarVector::new(-self.l_m * self.theta_in.cos(), self.l_m * self.theta_in.sin())
    }

    /// Foot-fixed spring anchor A.
    pub fn toe_anchor(&self) -> PlanarVector {
        self.m_point() - self.am_ref()
    }

    /// Arc centre O in the neutral pose.
    pub fn arc_center(&self) -> PlanarVector {
        self.m_point() + self.mo_offset
    }

    /// Vector OB for slider angle `theta_r`.
    pub fn ob(&self, theta_r: f64) -> PlanarVector {
        PlanarVector::new(-self.arc_radius * theta_r.cos(), self.arc_radius * theta_r.sin())
    }

    /// Slider point B in the neutral pose.
    pub fn slider_point(&self, theta_r: f64) -> PlanarVector {
        self.arc_center() + self.ob(theta_r)
    }

    /// Height of B above the joint at the start of the arc, m.
    pub fn y_b(&self) -> f64 {
        self.slider_point(self.arc_theta_range[0]).y
    }

    /// Slider angle at fraction `s ∈ [0, 1]` of the release stroke.
    pub fn arc_angle_at(&self, s: f64) -> f64 {
        let [a, b] = self.arc_theta_range;
        a + s.clamp(0.0, 1.0) * (b - a)
    }

    /// Largest deflection reachable on this geometry (at the isometric pose).
    pub fn max_deflection(&self) -> f64 {
        (self.free_length - self.arc_radius).max(0.0)
    }

    fn check_theta_r(&self, theta_r: f64) -> Result<()> {
        let [a, b] = self.arc_theta_range;
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if theta_r >= lo - ARC_SLACK && theta_r <= hi + ARC_SLACK {
            Ok(())
        } else {
            Err(Error::Range { value: theta_r, min: lo, max: hi })
        }
    }

    /// Shank point P (current position of B) and vector AP, unchecked.
    fn pose(&self, theta_a: f64, theta_r: f64) -> (PlanarVector, PlanarVector) {
        let b = self.slider_point(theta_r);
        let bp = shank_rotation(b, theta_a) - b;
        let ap = self.am_ref() + self.mo_offset + self.ob(theta_r) + bp;
        (b + bp, ap)
    }
}

/// Spring vector AP at ankle angle `theta_a` and slider angle `theta_r`.
///
/// Built as the chain AM + MO + OB + BP, where BP is the rigid rotation of
/// the shank-fixed point B about the joint.
pub fn df_attachment_position(geom: &DfGeometry, theta_a: f64, theta_r: f64) -> Result<PlanarVector> {
    geom.validate()?;
    check_theta_a(theta_a)?;
    geom.check_theta_r(theta_r)?;
    Ok(geom.pose(theta_a, theta_r).1)
}

/// Compression of the spring pack, m. Never negative: the springs only push.
pub fn df_deflection(geom: &DfGeometry, theta_a: f64, theta_r: f64) -> Result<f64> {
    let ap = df_attachment_position(geom, theta_a, theta_r)?;
    Ok((geom.free_length - ap.norm()).max(0.0))
}

/// Two coaxial compression springs; the second engages after `engagement_offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParallelSpringPair {
    pub k1: f64,
    pub k2: f64,
    pub engagement_offset: f64,
    pub max_deflection: f64,
}

impl ParallelSpringPair {
    pub fn new(k1: f64, k2: f64, engagement_offset: f64, max_deflection: f64) -> Result<Self> {
        let p = Self { k1, k2, engagement_offset, max_deflection };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.k1.is_finite()
            && self.k2.is_finite()
            && self.k1 >= 0.0
            && self.k2 >= 0.0
            && self.engagement_offset >= 0.0
            && self.max_deflection.is_finite()
            && self.max_deflection > self.engagement_offset;
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("invalid spring pair {self:?}")))
        }
    }

    /// Force without the solid-height check.
    pub fn force_unchecked(&self, x: f64) -> f64 {
        self.k1 * x + self.k2 * (x - self.engagement_offset).max(0.0)
    }

    /// Stored energy at deflection `x`, J.
    pub fn energy(&self, x: f64) -> f64 {
        let x2 = (x - self.engagement_offset).max(0.0);
        0.5 * self.k1 * x * x + 0.5 * self.k2 * x2 * x2
    }
}

/// Spring pack force at deflection `x`, N.
pub fn spring_force(pair: &ParallelSpringPair, deflection: f64) -> Result<f64> {
    if !(deflection >= 0.0) {
        return Err(Error::Domain(format!("negative deflection {deflection}")));
    }
    if deflection > pair.max_deflection {
        return Err(Error::SolidHeight { deflection, limit: pair.max_deflection });
    }
    Ok(pair.force_unchecked(deflection))
}

/// Geometry plus springs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DfMechanism {
    pub geometry: DfGeometry,
    pub springs: ParallelSpringPair,
}

/// Ankle torque from the DF spring pack.
///
/// The spring pushes P away from A along AP; torque is `(FP × force).z`.
pub fn df_torque(
    geom: &DfGeometry,
    pair: &ParallelSpringPair,
    state: &AnkleState,
    theta_r: f64,
) -> Result<TorqueResult> {
    geom.validate()?;
    check_theta_a(state.theta_a)?;
    geom.check_theta_r(theta_r)?;
    let (p, ap) = geom.pose(state.theta_a, theta_r);
    if p.norm() < 1e-12 {
        return Err(Error::Geometry("spring attachment coincides with the joint".into()));
    }
    let len = ap.norm();
    if len < 1e-12 {
        return Err(Error::Geometry("spring collapsed to zero length".into()));
    }
    let x = (geom.free_length - len).max(0.0);
    if x == 0.0 {
        return Ok(TorqueResult::zero(p));
    }
    let f = spring_force(pair, x)?;
    Ok(TorqueResult::new(p, ap * (f / len)))
}

/// Places the arc so that spring length is constant along it at
/// `theta_max_df`, and deflection is zero at the arc end at `theta_toe_off`.
///
/// The centre is fixed in closed form by the isometry condition (O coincides
/// with the anchor A seen from the shank at maximum dorsi-flexion). The arc
/// start solves `|AP| = free_length` at the neutral pose and the arc end
/// solves the same at toe-off; both by bracketing and bisection.
pub fn design_slider_arc(
    geom_partial: &DfGeometry,
    theta_max_df: f64,
    theta_toe_off: f64,
) -> Result<DfGeometry> {
    if !(theta_max_df > 0.0 && theta_toe_off < 0.0) {
        return Err(Error::Domain(format!(
            "need theta_max_df > 0 > theta_toe_off, got {theta_max_df}, {theta_toe_off}"
        )));
    }
    check_theta_a(theta_max_df)?;
    check_theta_a(theta_toe_off)?;
    let mut g = *geom_partial;
    g.arc_theta_range = [0.0, 0.0];
    g.mo_offset = PlanarVector::ZERO;
    g.validate()?;
    if g.arc_radius >= g.free_length {
        return Err(Error::Design {
            reason: "arc radius must be shorter than the spring free length".into(),
            residual: g.arc_radius - g.free_length,
        });
    }
    let a = g.toe_anchor();
    let center = a.rotate(theta_max_df);
    g.mo_offset = center - g.m_point();

    let length_residual = |theta_a: f64| {
        let g = g;
        move |tr: f64| shank_rotation(g.slider_point(tr), theta_a).distance(a) - g.free_length
    };
    let starts = circle_roots(length_residual(0.0));
    let ends = circle_roots(length_residual(theta_toe_off));
    if starts.roots.is_empty() {
        return Err(Error::Design {
            reason: "no arc point gives zero deflection in the neutral pose".into(),
            residual: starts.best,
        });
    }
    if ends.roots.is_empty() {
        return Err(Error::Design {
            reason: "no arc point gives zero deflection at toe-off".into(),
            residual: ends.best,
        });
    }
    // Start where the stored force has the largest lever at max dorsi-flexion.
    let arm_at = |tr: f64| {
        let (p, ap) = g.pose(theta_max_df, tr);
        ap.unit().map_or(0.0, |u| p.cross(u).abs())
    };
    let start = *starts
        .roots
        .iter()
        .max_by(|x, y| arm_at(**x).total_cmp(&arm_at(**y)))
        .expect("non-empty");
    let end = ends
        .roots
        .iter()
        .map(|&e| {
            // Unwrap onto the branch closest to the start.
            let mut e = e;
            while e - start > PI {
                e -= 2.0 * PI;
            }
            while start - e > PI {
                e += 2.0 * PI;
            }
            e
        })
        .min_by(|x, y| (x - start).abs().total_cmp(&(y - start).abs()))
        .expect("non-empty");
    g.arc_theta_range = [start, end];
    g.validate()?;
    Ok(g)
}

struct Roots {
    roots: Vec<f64>,
    best: f64,
}

fn circle_roots(f: impl Fn(f64) -> f64) -> Roots {
    let h = 2.0 * PI / ROOT_SCAN as f64;
    let mut roots = Vec::new();
    let mut best = f64::INFINITY;
    let mut x0 = -PI;
    let mut f0 = f(x0);
    for i in 1..=ROOT_SCAN {
        let x1 = -PI + i as f64 * h;
        let f1 = f(x1);
        best = best.min(f1.abs());
        if f0 == 0.0 {
            roots.push(x0);
        } else if f0 * f1 < 0.0 {
            roots.push(bisect(&f, x0, x1, f0));
        }
        x0 = x1;
        f0 = f1;
    }
    Roots { roots, best }
}

fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut flo: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 || (hi - lo) < 1e-15 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DfGeometry {
        let p = DfGeometry::partial(0.03, 0.17, 30f64.to_radians(), 0.15, 0.16);
        design_slider_arc(&p, 10f64.to_radians(), -20f64.to_radians()).unwrap()
    }

    #[test]
    fn neutral_pose_at_arc_start_is_free_length() {
        let g = sample();
        let ap = df_attachment_position(&g, 0.0, g.arc_theta_range[0]).unwrap();
        assert!((ap.norm() - g.free_length).abs() < 1e-12);
        assert!(df_deflection(&g, 0.0, g.arc_theta_range[0]).unwrap() < 1e-12);
    }

    #[test]
    fn chain_matches_hand_sum() {
        // Independent evaluation: rotate B about the joint by hand.
        let g = sample();
        let th = 0.1745_f64;
        let tr = g.arc_theta_range[0];
        let (c, s) = (th.cos(), th.sin());
        let o = PlanarVector::new(-g.m_len + g.mo_offset.x, g.mo_offset.y);
        let b = PlanarVector::new(o.x - g.arc_radius * tr.cos(), o.y + g.arc_radius * tr.sin());
        let p = PlanarVector::new(c * b.x + s * b.y, -s * b.x + c * b.y);
        let a = PlanarVector::new(-g.m_len + g.l_m * g.theta_in.cos(), -g.l_m * g.theta_in.sin());
        let ap = df_attachment_position(&g, th, tr).unwrap();
        assert!((ap.x - (p.x - a.x)).abs() < 1e-14);
        assert!((ap.y - (p.y - a.y)).abs() < 1e-14);
    }

    #[test]
    fn isometric_along_arc_at_max_dorsi() {
        let g = sample();
        let th = 10f64.to_radians();
        let l0 = df_attachment_position(&g, th, g.arc_theta_range[0]).unwrap().norm();
        for i in 0..=50 {
            let tr = g.arc_angle_at(i as f64 / 50.0);
            let l = df_attachment_position(&g, th, tr).unwrap().norm();
            assert!((l - l0).abs() < 1e-9 * g.free_length);
        }
    }

    #[test]
    fn toe_off_deflection_is_zero() {
        let g = sample();
        let x = df_deflection(&g, -20f64.to_radians(), g.arc_theta_range[1]).unwrap();
        assert!(x < 1e-9);
    }

    #[test]
    fn moved_centre_breaks_isometry() {
        let mut g = sample();
        g.mo_offset.x += 0.001;
        let th = 10f64.to_radians();
        let ls: Vec<f64> = (0..=50)
            .map(|i| df_attachment_position(&g, th, g.arc_angle_at(i as f64 / 50.0)).unwrap().norm())
            .collect();
        let spread = ls.iter().cloned().fold(f64::MIN, f64::max) - ls.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread > 1e-5, "spread {spread}");
    }

    #[test]
    fn spring_force_examples() {
        let p = ParallelSpringPair::new(20_000.0, 25_000.0, 0.005, 0.02).unwrap();
        assert_eq!(spring_force(&p, 0.0).unwrap(), 0.0);
        assert!((spring_force(&p, 0.010).unwrap() - 325.0).abs() < 1e-9);
        assert!(matches!(spring_force(&p, 0.03), Err(Error::SolidHeight { .. })));
    }

    #[test]
    fn deflection_is_free_length_minus_span() {
        let p = DfGeometry::partial(0.03, 0.17, 30f64.to_radians(), 0.14, 0.16);
        let g = design_slider_arc(&p, 10f64.to_radians(), -20f64.to_radians()).unwrap();
        // Find the pose whose span is free_length − 12 mm at the arc start.
        let tr = g.arc_theta_range[0];
        let target = g.free_length - 0.012;
        let (mut lo, mut hi) = (0.0, 10f64.to_radians());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if df_attachment_position(&g, mid, tr).unwrap().norm() > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x = df_deflection(&g, 0.5 * (lo + hi), tr).unwrap();
        assert!((x - 0.012).abs() < 1e-12);
    }

    #[test]
    fn zero_deflection_zero_torque() {
        let g = sample();
        let p = ParallelSpringPair::new(20_000.0, 25_000.0, 0.005, 0.02).unwrap();
        let st = AnkleState::at_angle(-0.1).unwrap();
        let t = df_torque(&g, &p, &st, g.arc_theta_range[0]).unwrap();
        assert_eq!(t.torque, 0.0);
    }

    #[test]
    fn torque_matches_scalar_cross() {
        let g = sample();
        let p = ParallelSpringPair::new(20_000.0, 25_000.0, 0.002, 0.02).unwrap();
        let st = AnkleState::at_angle(0.12).unwrap();
        let t = df_torque(&g, &p, &st, g.arc_angle_at(0.3)).unwrap();
        let a = t.moment_arm;
        let f = t.force;
        let sin = (a.cross(f) / (a.norm() * f.norm())).abs();
        let angle = (a.dot(f) / (a.norm() * f.norm())).acos();
        assert!((t.torque.abs() - a.norm() * f.norm() * angle.sin()).abs() < 1e-9 * t.torque.abs());
        assert!((t.torque.abs() - a.norm() * f.norm() * sin).abs() < 1e-9 * t.torque.abs());
    }

    #[test]
    fn out_of_range_angles_rejected() {
        let g = sample();
        assert!(df_attachment_position(&g, 0.5, g.arc_theta_range[0]).is_err());
        assert!(df_attachment_position(&g, 0.0, g.arc_theta_range[0] + 4.0).is_err());
    }

    #[test]
    fn infeasible_design_reports_residual() {
        let p = DfGeometry::partial(0.03, 0.17, 0.5, 0.2, 0.16);
        let err = design_slider_arc(&p, 0.17, -0.35).unwrap_err();
        assert!(matches!(err, Error::Design { .. }));
        // Anchor far from any arc point: no zero-deflection root.
        let p = DfGeometry::partial(0.03, 0.17, 0.5, 0.001, 0.005);
        assert!(matches!(design_slider_arc(&p, 0.17, -0.35), Err(Error::Design { .. })));
    }
}

//! Mechanism properties: torque cross products, arc design, spring law and
//! quasi-static energy balance.

use ankle_core::design::synthesize_design;
use ankle_core::mech::*;
use ankle_core::params::AnkleParams;
use proptest::prelude::*;

fn design(m_len: f64, l_m: f64, theta_in_deg: f64, r: f64, max_df_deg: f64, toe_deg: f64) -> Option<DfGeometry> {
    let p = DfGeometry::partial(m_len, l_m, theta_in_deg.to_radians(), r, 0.16);
    design_slider_arc(&p, max_df_deg.to_radians(), toe_deg.to_radians()).ok()
}

fn pair() -> ParallelSpringPair {
    ParallelSpringPair::new(130_000.0, 390_000.0, 0.008, 0.03).unwrap()
}

/// `|a|·|f|·sin∠(a, f)` with the angle taken from `atan2`, independent of
/// the cross-product expression.
fn sine_oracle(t: &TorqueResult) -> f64 {
    let angle = t.force.y.atan2(t.force.x) - t.moment_arm.y.atan2(t.moment_arm.x);
    t.moment_arm.norm() * t.force.norm() * angle.sin()
}

fn check_cross(t: &TorqueResult) -> Result<(), TestCaseError> {
    prop_assert_eq!(t.torque, t.moment_arm.x * t.force.y - t.moment_arm.y * t.force.x);
    let scale = t.moment_arm.norm() * t.force.norm();
    prop_assert!((t.torque - sine_oracle(t)).abs() <= 1e-9 * scale.max(1e-300));
    Ok(())
}

/// Trapezoidal `∫ τ dθ` from `a0` to `a1` with the slider fixed at `tr`.
fn work(g: &DfGeometry, s: &ParallelSpringPair, tr: f64, a0: f64, a1: f64, n: usize) -> f64 {
    let tau = |a: f64| df_torque(g, s, &AnkleState::at_angle(a).unwrap(), tr).unwrap().torque;
    let h = (a1 - a0) / n as f64;
    (0..n).map(|i| 0.5 * (tau(a0 + i as f64 * h) + tau(a0 + (i + 1) as f64 * h)) * h).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn df_torque_is_a_cross_product(
        m_len in 0.015..0.04f64, l_m in 0.15..0.18f64, th_in in 20.0..35.0f64, r in 0.13..0.155f64,
        theta_a in -0.4..0.25f64, s in 0.0..1.0f64,
    ) {
        let g = design(m_len, l_m, th_in, r, 10.0, -20.0);
        prop_assume!(g.is_some());
        let g = g.unwrap();
        let soft = ParallelSpringPair::new(1000.0, 2000.0, 0.01, 1.0).unwrap();
        let t = df_torque(&g, &soft, &AnkleState::at_angle(theta_a).unwrap(), g.arc_angle_at(s)).unwrap();
        check_cross(&t)?;
    }

    #[test]
    fn ees_torque_is_a_cross_product(k in 1e3..1e5f64, x in 0.0..0.02f64, tr in 0.0..1.5f64) {
        let m = EesMechanism::new(k, 0.02, 0.15, 1.5, PlanarVector::new(-0.03, 0.25)).unwrap();
        check_cross(&ees_torque(&m, x, tr).unwrap())?;
    }

    #[test]
    fn reset_torque_is_a_cross_product(theta in -0.35..0.0f64, k in 100.0..5000.0f64) {
        let d = ResetSpringDesign {
            foot_mass: 0.8,
            l2: 0.0203,
            beta: 65f64.to_radians(),
            point_d: PlanarVector::new(0.03, 0.16),
            point_a: PlanarVector::ZERO,
            point_f: PlanarVector::new(0.05, 0.0),
            theta_pf: -0.35,
            k_reset: k,
        };
        check_cross(&reset_torque(&d, theta).unwrap())?;
    }

    #[test]
    fn arc_is_isometric_and_zeroes_at_toe_off(
        m_len in 0.015..0.04f64, l_m in 0.15..0.18f64, th_in in 20.0..35.0f64, r in 0.13..0.155f64,
        max_df in 6.0..12.0f64, toe in -24.0..-14.0f64,
    ) {
        let g = design(m_len, l_m, th_in, r, max_df, toe);
        prop_assume!(g.is_some());
        let g = g.unwrap();
        let th = max_df.to_radians();
        let l0 = df_attachment_position(&g, th, g.arc_theta_range[0]).unwrap().norm();
        for i in 0..=50 {
            let l = df_attachment_position(&g, th, g.arc_angle_at(i as f64 / 50.0)).unwrap().norm();
            prop_assert!((l - l0).abs() < 1e-9 * g.free_length);
        }
        prop_assert!(df_deflection(&g, toe.to_radians(), g.arc_theta_range[1]).unwrap() < 1e-9);
    }

    #[test]
    fn release_work_matches_stored_energy(
        m_len in 0.015..0.04f64, l_m in 0.15..0.18f64, th_in in 20.0..35.0f64, r in 0.13..0.155f64,
    ) {
        let g = design(m_len, l_m, th_in, r, 10.0, -20.0);
        prop_assume!(g.is_some());
        let g = g.unwrap();
        let th = 10f64.to_radians();
        let x = df_deflection(&g, th, g.arc_theta_range[0]).unwrap();
        let s = ParallelSpringPair::new(130_000.0, 390_000.0, 0.3 * x, 2.0 * x + 1e-3).unwrap();
        let stored = s.energy(x);
        prop_assume!(stored > 1e-3);
        let released = -work(&g, &s, g.arc_theta_range[1], th, -20f64.to_radians(), 1000);
        prop_assert!((released - stored).abs() < 0.01 * stored, "released {released} stored {stored}");
    }

    #[test]
    fn operations_are_pure(theta_a in -0.4..0.25f64, s in 0.0..1.0f64) {
        let g = design(0.03, 0.17, 30.0, 0.15, 10.0, -20.0).unwrap();
        let st = AnkleState::at_angle(theta_a).unwrap();
        let tr = g.arc_angle_at(s);
        let big = ParallelSpringPair::new(1000.0, 2000.0, 0.01, 1.0).unwrap();
        let a = df_torque(&g, &big, &st, tr).unwrap();
        let b = df_torque(&g, &big, &st, tr).unwrap();
        prop_assert_eq!(a.torque.to_bits(), b.torque.to_bits());
        prop_assert_eq!(df_deflection(&g, theta_a, tr).unwrap().to_bits(), df_deflection(&g, theta_a, tr).unwrap().to_bits());
    }
}

#[test]
fn spring_force_is_continuous_and_monotone() {
    let p = pair();
    let n = 10_000;
    let h = p.max_deflection / n as f64;
    let mut prev = spring_force(&p, 0.0).unwrap();
    for i in 1..=n {
        let x = if i == n { p.max_deflection } else { i as f64 * h };
        let f = spring_force(&p, x).unwrap();
        assert!(f >= prev);
        // Steepest slope bounds any jump between neighbours.
        assert!(f - prev <= (p.k1 + p.k2) * h * (1.0 + 1e-9));
        prev = f;
    }
    let e = p.engagement_offset;
    let below = spring_force(&p, e * (1.0 - 1e-12)).unwrap();
    let at = spring_force(&p, e).unwrap();
    assert!((at - below).abs() < 1e-6);
}

#[test]
fn load_and_release_balance_on_the_shipped_design() {
    let params = AnkleParams::fast_walk_default();
    let profile = params.builtin_profile().unwrap();
    let d = synthesize_design(&profile, &params.design_inputs(0).unwrap()).unwrap();
    let (g, s) = (&d.df.geometry, &d.df.springs);
    let (th, toe) = (d.schedule.theta_max_df, d.schedule.theta_toe_off);
    let stored = s.energy(df_deflection(g, th, g.arc_theta_range[0]).unwrap());
    let loaded = work(g, s, g.arc_theta_range[0], 0.0, th, 1000);
    let released = -work(g, s, g.arc_theta_range[1], th, toe, 1000);
    assert!((loaded - stored).abs() < 0.01 * stored, "loaded {loaded} stored {stored}");
    assert!((released - stored).abs() < 0.01 * stored, "released {released} stored {stored}");
}

#[test]
fn characterization_pose() {
    // Full compression at maximum dorsi-flexion: about 2150 N and 130 N·m.
    let params = AnkleParams::fast_walk_default();
    let profile = params.builtin_profile().unwrap();
    let d = synthesize_design(&profile, &params.design_inputs(0).unwrap()).unwrap();
    let g = &d.df.geometry;
    let st = AnkleState::at_angle(d.schedule.theta_max_df).unwrap();
    let t = df_torque(g, &d.df.springs, &st, g.arc_theta_range[0]).unwrap();
    let f = t.force.norm();
    assert!((f - 2150.0).abs() < 0.05 * 2150.0, "force {f}");
    assert!((t.torque - 130.0).abs() < 0.10 * 130.0, "torque {}", t.torque);
    let arm = t.perpendicular_arm().unwrap();
    assert!((arm - t.torque / f).abs() < 1e-12);
}

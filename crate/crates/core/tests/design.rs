//! Spring fitting, energy sizing and geometry calibration.

use ankle_core::design::*;
use ankle_core::gait::GaitProfile;
use ankle_core::mech::ParallelSpringPair;
use ankle_core::params::AnkleParams;
use proptest::prelude::*;

fn curve_of(p: &ParallelSpringPair, x_max: f64, n: usize) -> ForceDeflectionCurve {
    let pts = (0..n).map(|i| x_max * i as f64 / (n - 1) as f64).map(|x| (x, p.force_unchecked(x))).collect();
    ForceDeflectionCurve::new(pts).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spring_fit_is_a_projection(
        k1 in 5e3..2e5f64, k2 in 5e3..5e5f64, frac in 0.15..0.85f64, x_max in 0.005..0.03f64, n in 20usize..80,
    ) {
        let truth = ParallelSpringPair::new(k1, k2, frac * x_max, x_max * SOLID_MARGIN).unwrap();
        let fit = fit_parallel_springs(&curve_of(&truth, x_max, n)).unwrap();
        prop_assert!(rel(fit.k1, k1) < 1e-6, "k1 {} vs {k1}", fit.k1);
        prop_assert!(rel(fit.k2, k2) < 1e-6, "k2 {} vs {k2}", fit.k2);
        prop_assert!(rel(fit.engagement_offset, frac * x_max) < 1e-6);
        prop_assert!(fit_nrmse_percent(&curve_of(&truth, x_max, n), &fit) < 1e-6);
    }

    #[test]
    fn battery_is_linear(e in 0.1..50.0f64, n in 1.0..1e5f64, v in 3.0..60.0f64, s in 0.1..10.0f64) {
        let base = battery_capacity(e, n, v).unwrap();
        prop_assert!(rel(battery_capacity(s * e, n, v).unwrap(), s * base) < 1e-12);
        prop_assert!(rel(battery_capacity(e, s * n, v).unwrap(), s * base) < 1e-12);
        prop_assert!(rel(battery_capacity(e, n, v / 2.0).unwrap(), 2.0 * base) < 1e-12);
    }

    #[test]
    fn deficit_does_not_grow_with_df_work(natural in 0.0..30.0f64, df in 0.0..30.0f64, more in 0.0..10.0f64) {
        let a = EnergyBudget::from_energies(natural, df, 0.02).unwrap();
        let b = EnergyBudget::from_energies(natural, df + more, 0.02).unwrap();
        prop_assert!(b.deficit <= a.deficit);
        prop_assert!(a.deficit >= 0.0 && (a.deficit - (natural - df).max(0.0)).abs() < 1e-12);
        prop_assert!((a.ees_required_k - 2.0 * a.deficit / 0.0004).abs() <= 1e-9 * a.ees_required_k.max(1.0));
    }
}

#[test]
fn budget_examples() {
    let b = EnergyBudget::from_energies(4.5, 0.0, 0.020).unwrap();
    assert!((b.ees_required_k - 22_500.0).abs() < 1e-9);
    let none = EnergyBudget::from_energies(3.0, 5.0, 0.020).unwrap();
    assert_eq!((none.deficit, none.ees_required_k), (0.0, 0.0));
}

#[test]
fn battery_examples() {
    assert!((battery_capacity(10.0, 5000.0, 24.0).unwrap() - 0.5787).abs() < 1e-4);
    assert_eq!(battery_capacity(10.0, 0.0, 24.0).unwrap(), 0.0);
    let pack = BatterySpec::REFERENCE;
    assert!(pack.is_sufficient(0.5787));
    assert!((pack.pack_voltage() - pack.cells_in_series as f64 * pack.cell_voltage_nominal).abs() < 1e-12);
}

#[test]
fn zero_torque_profile_gives_zero_forces() {
    let p = AnkleParams::fast_walk_default();
    let mut profile = p.builtin_profile().unwrap();
    for s in &mut profile.samples {
        s.torque = 0.0;
    }
    let d = synthesize_design(&p.builtin_profile().unwrap(), &p.design_inputs(0).unwrap()).unwrap();
    let c = derive_force_deflection(&profile, &d.df.geometry).unwrap();
    assert!(c.points.iter().all(|p| p.1 == 0.0));
}

#[test]
fn shipped_curve_is_monotone_and_fits_well() {
    let p = AnkleParams::fast_walk_default();
    let profile = p.builtin_profile().unwrap();
    let d = synthesize_design(&profile, &p.design_inputs(0).unwrap()).unwrap();
    let c = &d.curve;
    assert!(c.points.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 >= w[0].1));
    // Hardening: the second spring engages inside the range.
    assert!(d.df.springs.k2 > 0.0 && d.df.springs.engagement_offset < c.max_deflection());
    assert!(fit_nrmse_percent(c, &d.df.springs) <= 5.0);
}

#[test]
fn shipped_deficit_band() {
    let p = AnkleParams::fast_walk_default();
    let d = synthesize_design(&p.builtin_profile().unwrap(), &p.design_inputs(0).unwrap()).unwrap();
    let b = d.budget.unwrap();
    assert!((4.0..=6.0).contains(&b.deficit), "{}", b.deficit);
}

fn calibration_case() -> (GaitProfile, DesignInputs, [f64; 5]) {
    let p = AnkleParams::fast_walk_default();
    let inputs = p.design_inputs(0).unwrap();
    let x0 = params_of(&inputs.geometry);
    (p.builtin_profile().unwrap(), inputs, x0)
}

#[test]
fn collapsed_bounds_return_the_point() {
    let (profile, inputs, x0) = calibration_case();
    let r = calibrate_geometry(&profile, &CalibrationBounds::point(x0), &inputs).unwrap();
    assert_eq!(r.params, x0);
    let direct = torque_nrmse(&synthesize_design(&profile, &inputs).unwrap().simulate(&profile, &inputs.schedule).unwrap())
        .unwrap();
    assert_eq!(r.residual, direct);
}

#[test]
fn widening_bounds_never_hurts() {
    let (profile, inputs, x0) = calibration_case();
    // Only the anchor distance and angle move, in 2 % and then 6 % boxes
    // below the shipped values (both sit on their packaging limits).
    let boxed = |w: f64| {
        let mut b = CalibrationBounds::point(x0);
        for i in [1, 2] {
            b.lo[i] = x0[i] * (1.0 - w);
        }
        b
    };
    let point = calibrate_geometry(&profile, &CalibrationBounds::point(x0), &inputs).unwrap().residual;
    let narrow = calibrate_geometry(&profile, &boxed(0.02), &inputs).unwrap().residual;
    let wide = calibrate_geometry(&profile, &boxed(0.06), &inputs).unwrap().residual;
    assert!(narrow <= point, "{narrow} > {point}");
    assert!(wide <= narrow, "{wide} > {narrow}");
    assert!(point <= 15.0);
}

#[test]
fn infeasible_bounds_are_reported() {
    let (profile, inputs, x0) = calibration_case();
    let mut x = x0;
    // Arc radius longer than the free length cannot be placed.
    x[3] = 2.0 * x[4];
    let e = calibrate_geometry(&profile, &CalibrationBounds::point(x), &inputs).unwrap_err();
    assert!(e.to_string().contains("no feasible geometry"), "{e}");
}

//! Acceptance report: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use ankle_core::control::{cubic_velocity_reference, DobScenario, RampScenario};
use ankle_core::design::*;
use ankle_core::gait::*;
use ankle_core::mech::*;
use ankle_core::params::AnkleParams;
use ankle_core::sysid::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::process::ExitCode;

type Check = Result<String, String>;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn shipped() -> (AnkleParams, GaitProfile, AnkleDesign) {
    let p = AnkleParams::fast_walk_default();
    let profile = p.builtin_profile().unwrap();
    let d = synthesize_design(&profile, &p.design_inputs(0).unwrap()).unwrap();
    (p, profile, d)
}

fn comparisons() -> (ComparisonMetrics, ComparisonMetrics) {
    let (p, profile, d) = shipped();
    let t = d.simulate(&profile, &p.schedule()).unwrap();
    let s = |v: &[f64]| Series::new(t.grid.clone(), v.to_vec(), t.cadence_period).unwrap();
    let torque = compare(&s(&t.natural_torque), &s(&t.torque_total)).unwrap();
    let power = compare(&s(&t.natural_power), &s(&t.power_total)).unwrap();
    (torque, power)
}

fn peak_torque() -> Check {
    let v = comparisons().0.peak_b.value;
    ensure((130.0..=154.0).contains(&v), format!("peak torque {v:.2} N·m in [130, 154]"))
}

fn power_match() -> Check {
    let m = comparisons().1;
    ensure(
        m.pearson_r >= 0.95 && m.nrmse_percent <= 15.0,
        format!("r = {:.4} (>= 0.95), NRMSE = {:.2} % (<= 15)", m.pearson_r, m.nrmse_percent),
    )
}

fn arc_isometry() -> Check {
    let (_, _, d) = shipped();
    let g = &d.df.geometry;
    let th = d.schedule.theta_max_df;
    let l0 = df_attachment_position(g, th, g.arc_theta_range[0]).unwrap().norm();
    let spread = (0..=1000)
        .map(|i| df_attachment_position(g, th, g.arc_angle_at(i as f64 / 1000.0)).unwrap().norm() - l0)
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let toe = df_deflection(g, d.schedule.theta_toe_off, g.arc_theta_range[1]).unwrap();
    ensure(
        spread < 1e-9 * g.free_length && toe.abs() < 1e-9,
        format!("|AP| spread {spread:.2e} m (< {:.2e}), toe-off deflection {toe:.2e} m (< 1e-9)", 1e-9 * g.free_length),
    )
}

fn energy_balance() -> Check {
    let (_, _, d) = shipped();
    let (g, s) = (&d.df.geometry, &d.df.springs);
    let (th, toe, n) = (d.schedule.theta_max_df, d.schedule.theta_toe_off, 1000);
    let stored = s.energy(df_deflection(g, th, g.arc_theta_range[0]).unwrap());
    let tau = |a: f64| df_torque(g, s, &AnkleState::at_angle(a).unwrap(), g.arc_theta_range[1]).unwrap().torque;
    let h = (toe - th) / n as f64;
    let released: f64 = -(0..n).map(|i| 0.5 * (tau(th + i as f64 * h) + tau(th + (i + 1) as f64 * h)) * h).sum::<f64>();
    let e = rel(released, stored);
    ensure(e < 0.01, format!("stored {stored:.4} J, released {released:.4} J, error {:.3} % (< 1)", 100.0 * e))
}

fn identify(tf: SecondOrderTf, sigma_fraction: f64) -> FitReport {
    let u = chirp_generate(&ChirpSpec::DEFAULT).unwrap();
    let clean = Signal::new(u.dt, tf_simulate(&tf, &u.values, u.dt).unwrap()).unwrap();
    let y = if sigma_fraction > 0.0 {
        add_white_noise(&clean, sigma_fraction * clean.full_scale(), 7).unwrap()
    } else {
        clean
    };
    fit_second_order(&u.values, &y.values, u.dt).unwrap()
}

fn worst_coeff(fit: &SecondOrderTf, truth: &SecondOrderTf) -> f64 {
    rel(fit.b0, truth.b0).max(rel(fit.a1, truth.a1)).max(rel(fit.a0, truth.a0))
}

fn sysid_round_trip() -> Check {
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, tf) in [("ball screw", SecondOrderTf::BALL_SCREW), ("replacer", SecondOrderTf::REPLACER)] {
        let r = identify(tf, 0.0);
        let w = worst_coeff(&r.tf, &tf);
        ok &= w <= 0.02 && r.fit_percent >= 99.0;
        parts.push(format!("{name} worst coeff {:.2e} %, fit {:.3} %", 100.0 * w, r.fit_percent));
    }
    let tf = SecondOrderTf::BALL_SCREW;
    let w = worst_coeff(&identify(tf, 0.01).tf, &tf);
    ok &= w <= 0.05;
    parts.push(format!("noisy worst coeff {:.3} % (<= 5)", 100.0 * w));
    ensure(ok, parts.join("; "))
}

fn chirp() -> Check {
    let spec = ChirpSpec::DEFAULT;
    let f0 = instantaneous_frequency(&spec, 0.0).unwrap();
    let f1 = instantaneous_frequency(&spec, spec.duration).unwrap();
    let h = 1e-4;
    let worst = (1..1000)
        .map(|k| {
            let t = spec.duration * k as f64 / 1000.0;
            let d = (chirp_phase(&spec, t + h) - chirp_phase(&spec, t - h)) / (2.0 * h) / std::f64::consts::TAU;
            rel(d, instantaneous_frequency(&spec, t).unwrap())
        })
        .fold(0.0f64, f64::max);
    ensure(
        f0 == spec.omega1 && f1 == spec.omega2 && worst <= 1e-6,
        format!("f(0) = {f0} Hz, f(M) = {f1} Hz, phase derivative error {worst:.2e} (<= 1e-6)"),
    )
}

fn ramp() -> Check {
    let t = RampScenario::default().run().unwrap();
    let ma = t.tracking_rmse() * 1e3;
    ensure(ma <= 10.0, format!("tracking RMSE {ma:.3} mA (<= 10)"))
}

fn dob() -> Check {
    let s = DobScenario::default();
    let r = s.run(true).unwrap().correlation();
    let ratio = s.rejection_ratio().unwrap();
    ensure(r >= 0.97 && ratio <= 0.1, format!("r = {r:.4} (>= 0.97), steady error ratio {ratio:.3e} (<= 0.1)"))
}

fn cubic() -> Check {
    let c = cubic_velocity_reference(0.0, 14.5, 0.0, 0.0, 1.0).unwrap();
    let coeffs = (c.a - -29.0).abs().max((c.b - 43.5).abs()).max(c.c.abs()).max(c.d.abs());
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (v0, vf) = (rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0));
        let (a0, af) = (rng.random_range(-100.0..100.0), rng.random_range(-100.0..100.0));
        let t: f64 = rng.random_range(0.05..5.0);
        let r = cubic_velocity_reference(v0, vf, a0, af, t).unwrap();
        let scale = 1.0 + v0.abs() + vf.abs() + (a0.abs() + af.abs()) * t;
        let errs = [
            (r.eval(0.0) - v0).abs(),
            (r.eval(t) - vf).abs(),
            (r.acceleration(0.0) - a0).abs() * t,
            (r.acceleration(t) - af).abs() * t,
        ];
        worst = worst.max(errs.iter().fold(0.0f64, |m, e| m.max(*e)) / scale);
    }
    ensure(
        coeffs <= 1e-12 && worst <= 1e-12,
        format!(
            "a = {}, b = {}, c = {}, d = {}; worst boundary error {worst:.2e} (<= 1e-12)",
            c.a, c.b, c.c, c.d
        ),
    )
}

fn battery() -> Check {
    let ah = battery_capacity(10.0, 5000.0, 24.0).unwrap();
    let ok = (ah - 0.5787).abs() <= 1e-4 && BatterySpec::REFERENCE.is_sufficient(ah);
    ensure(ok, format!("{ah:.5} Ah (0.5787 ± 1e-4), {} Ah cell sufficient", BatterySpec::REFERENCE.cell_capacity))
}

fn spring_fit() -> Check {
    let truth = ParallelSpringPair::new(30_000.0, 45_000.0, 0.004, 0.012).unwrap();
    let pts = (0..=40).map(|i| 0.01 * i as f64 / 40.0).map(|x| (x, truth.force_unchecked(x))).collect();
    let fit = fit_parallel_springs(&ForceDeflectionCurve::new(pts).unwrap()).unwrap();
    let w = rel(fit.k1, 30_000.0).max(rel(fit.k2, 45_000.0)).max(rel(fit.engagement_offset, 0.004));
    ensure(
        w <= 0.01,
        format!("k1 {:.1}, k2 {:.1} N/m, offset {:.5} m, worst {:.2e} % (<= 1)", fit.k1, fit.k2, fit.engagement_offset, 100.0 * w),
    )
}

fn properties() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut fails = Vec::new();

    // Cross product against |a||f| sin of the angle between them.
    let (p, profile, d) = shipped();
    let g = &d.df.geometry;
    for _ in 0..500 {
        let st = AnkleState::at_angle(rng.random_range(-0.35..0.17)).unwrap();
        let t = df_torque(g, &d.df.springs, &st, g.arc_angle_at(rng.random_range(0.0..1.0))).unwrap();
        let ang = t.force.y.atan2(t.force.x) - t.moment_arm.y.atan2(t.moment_arm.x);
        let scale = t.moment_arm.norm() * t.force.norm();
        if (t.torque - scale * ang.sin()).abs() > 1e-9 * scale.max(1e-300) {
            fails.push("cross product");
            break;
        }
    }

    // Akima: knots reproduced, segments away from a perturbed knot unchanged.
    for _ in 0..100 {
        let n = rng.random_range(6..30);
        let mut x = 0.0;
        let xs: Vec<f64> = (0..n).map(|_| { x += rng.random_range(0.05..2.0); x }).collect();
        let ys: Vec<f64> = (0..n).map(|_| rng.random_range(-50.0..50.0)).collect();
        let s = AkimaSpline::new(&xs, &ys).unwrap();
        if xs.iter().zip(&ys).any(|(x, y)| (s.eval(*x).unwrap() - y).abs() > 1e-12 * y.abs().max(1.0)) {
            fails.push("akima knots");
            break;
        }
        let j = rng.random_range(0..n);
        let mut ys2 = ys.clone();
        ys2[j] += 1.0;
        let s2 = AkimaSpline::new(&xs, &ys2).unwrap();
        let moved = (0..n - 1)
            .filter(|&i| i + 3 < j || i > j + 2)
            .any(|i| s.eval(0.5 * (xs[i] + xs[i + 1])).unwrap() != s2.eval(0.5 * (xs[i] + xs[i + 1])).unwrap());
        if moved {
            fails.push("akima locality");
            break;
        }
    }

    // Pearson under affine maps.
    for _ in 0..100 {
        let a: Vec<f64> = (0..40).map(|_| rng.random_range(-10.0..10.0)).collect();
        let b: Vec<f64> = (0..40).map(|_| rng.random_range(-10.0..10.0)).collect();
        let (al, be) = (rng.random_range(0.01..100.0), rng.random_range(-100.0..100.0));
        let up: Vec<f64> = a.iter().map(|x| al * x + be).collect();
        let b2: Vec<f64> = b.iter().map(|x| al * x + be).collect();
        if (pearson(&a, &up) - 1.0).abs() > 1e-12 || (pearson(&a, &b2) - pearson(&a, &b)).abs() > 1e-9 {
            fails.push("pearson");
            break;
        }
    }

    // Trace identities and bitwise reruns.
    let t = d.simulate(&profile, &p.schedule()).unwrap();
    let decomposes = (0..t.grid.len()).all(|i| {
        let sum = t.torque_df[i] + t.torque_ees[i] + t.torque_reset[i];
        (t.torque_total[i] - sum).abs() <= 1e-12 * sum.abs().max(1.0) && t.power_total[i] == t.torque_total[i] * t.omega[i]
    });
    if !decomposes {
        fails.push("trace identities");
    }
    let (_, _, d2) = shipped();
    let t2 = d2.simulate(&profile, &p.schedule()).unwrap();
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    let same_loop = {
        let s = DobScenario::default();
        s.run(true).unwrap().to_csv(1e3) == s.run(true).unwrap().to_csv(1e3)
    };
    if bits(&t.power_total) != bits(&t2.power_total) || !same_loop {
        fails.push("determinism");
    }

    ensure(
        fails.is_empty(),
        if fails.is_empty() {
            "cross product, Akima knots/locality, Pearson, trace identities, determinism".into()
        } else {
            format!("failed: {}", fails.join(", "))
        },
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 12] = [
        ("peak torque", peak_torque),
        ("power profile match", power_match),
        ("arc isometry and toe-off zeroing", arc_isometry),
        ("quasi-static energy conservation", energy_balance),
        ("identification round trip", sysid_round_trip),
        ("chirp correctness", chirp),
        ("PID current ramp", ramp),
        ("DOB velocity scenario", dob),
        ("cubic reference", cubic),
        ("battery sizing", battery),
        ("spring-fit round trip", spring_fit),
        ("property checks", properties),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {}: {tag} {name}: {detail}", i + 1);
    }
    println!("acceptance: {} of 12 passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

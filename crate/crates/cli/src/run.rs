//! One function per scenario kind. Each returns its metrics and artifact
//! contents; nothing is written here.

use std::collections::BTreeMap;
use std::path::Path;

use ankle_core::control::ClosedLoopTrace;
use ankle_core::design::{
    battery_capacity, calibrate_geometry, synthesize_design, AnkleDesign, ForceDeflectionCurve,
};
use ankle_core::gait::{compare, Series, SimulationTrace};
use ankle_core::sysid::{
    add_white_noise, chirp_generate, fit_second_order, io_from_csv_str, io_to_csv, tf_simulate, Signal,
};
use ankle_core::Error;

use crate::config::{load_profile, read_source, resolve_data, ControlKind, Kind, ScenarioConfig};
use crate::svg::{Line, Plot};

/// Failure of a run, split the way the exit code is.
#[derive(Debug)]
pub enum RunError {
    Config(String),
    Numeric(String),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        if e.is_config() {
            RunError::Config(e.to_string())
        } else {
            RunError::Numeric(e.to_string())
        }
    }
}

pub type RunResult<T> = Result<T, RunError>;

#[derive(Debug, Default)]
pub struct Outcome {
    pub metrics: BTreeMap<String, f64>,
    /// `(file name, contents)` in write order.
    pub artifacts: Vec<(String, String)>,
    /// Human-readable lines for stdout.
    pub summary: Vec<String>,
}

impl Outcome {
    fn metric(&mut self, k: &str, v: f64) {
        self.metrics.insert(k.to_string(), v);
    }

    fn file(&mut self, name: &str, contents: String) {
        self.artifacts.push((name.to_string(), contents));
    }
}

pub fn run(cfg: &ScenarioConfig, base: &Path) -> RunResult<Outcome> {
    match cfg.kind {
        Kind::Simulate => simulate(cfg, base, false),
        Kind::Design => simulate(cfg, base, true),
        Kind::Sysid => sysid(cfg, base),
        Kind::Control => control(cfg),
        Kind::Battery => battery(cfg),
    }
}

fn simulate(cfg: &ScenarioConfig, base: &Path, design_mode: bool) -> RunResult<Outcome> {
    let params = cfg.ankle().ok_or_else(|| RunError::Config("[gait] and [df] are required".into()))?;
    let profile = load_profile(&params.gait, base).map_err(RunError::Config)?;
    let inputs = params.design_inputs(cfg.seed)?;
    let mut out = Outcome::default();
    let design = match (&params.calibration, design_mode) {
        (Some(c), true) => {
            let r = calibrate_geometry(&profile, &c.to_bounds(), &inputs)?;
            out.metric("calibration_residual_percent", r.residual);
            out.metric("calibration_evaluations", r.evaluations as f64);
            r.design
        }
        _ => synthesize_design(&profile, &inputs)?,
    };
    let trace = design.simulate(&profile, &params.schedule())?;
    gait_metrics(&mut out, &design, &trace)?;
    out.file("trace.csv", trace_csv(&trace));
    out.file("torque.svg", torque_svg(&trace));
    out.file("power.svg", power_svg(&trace));
    if design_mode {
        let mut pinned = cfg.clone();
        let p = params.pinned(&design);
        pinned.kind = Kind::Simulate;
        pinned.out_dir = None;
        pinned.df = Some(p.df);
        pinned.ees = p.ees;
        pinned.reset = p.reset;
        pinned.calibration = None;
        out.file("design.toml", pinned.to_toml());
        out.file("force_deflection.csv", curve_csv(&design));
        out.file("force_deflection.svg", curve_svg(&design.curve, &design));
    }
    let m = &out.metrics;
    out.summary = vec![
        format!(
            "peak torque {:.1} N·m at {:.1} % (natural {:.1} N·m)",
            m["peak_torque_nm"], m["peak_torque_percent"], m["natural_peak_torque_nm"]
        ),
        format!(
            "power: r = {:.4}, NRMSE = {:.2} %; torque NRMSE = {:.2} %",
            m["power_pearson_r"], m["power_nrmse_percent"], m["torque_nrmse_percent"]
        ),
    ];
    Ok(out)
}

fn gait_metrics(out: &mut Outcome, design: &AnkleDesign, t: &SimulationTrace) -> RunResult<()> {
    let s = |v: &[f64]| Series::new(t.grid.clone(), v.to_vec(), t.cadence_period);
    let torque = compare(&s(&t.natural_torque)?, &s(&t.torque_total)?)?;
    let power = compare(&s(&t.natural_power)?, &s(&t.power_total)?)?;
    out.metric("peak_torque_nm", torque.peak_b.value);
    out.metric("peak_torque_percent", torque.peak_b.percent);
    out.metric("natural_peak_torque_nm", torque.peak_a.value);
    out.metric("torque_nrmse_percent", torque.nrmse_percent);
    out.metric("torque_pearson_r", torque.pearson_r);
    out.metric("peak_power_w", power.peak_b.value);
    out.metric("natural_peak_power_w", power.peak_a.value);
    out.metric("power_pearson_r", power.pearson_r);
    out.metric("power_nrmse_percent", power.nrmse_percent);
    out.metric("natural_positive_energy_j", power.energy_a);
    out.metric("energy_total_j", t.energies.total);
    out.metric("energy_df_j", t.energies.df);
    out.metric("energy_ees_j", t.energies.ees);
    out.metric("energy_reset_j", t.energies.reset);
    let sp = &design.df.springs;
    out.metric("df_k1_n_per_mm", sp.k1 * 1e-3);
    out.metric("df_k2_n_per_mm", sp.k2 * 1e-3);
    out.metric("df_engagement_offset_mm", sp.engagement_offset * 1e3);
    out.metric("df_max_deflection_mm", design.df.geometry.max_deflection() * 1e3);
    if let Some(e) = &design.ees {
        out.metric("ees_k_n_per_mm", e.k_es * 1e-3);
    }
    if let Some(b) = &design.budget {
        out.metric("pushoff_deficit_j", b.deficit);
    }
    if let Some(r) = &design.reset {
        out.metric("reset_k_n_per_mm", r.k_reset * 1e-3);
    }
    out.metric("onset_percent", t.schedule.onset);
    out.metric("end_percent", t.schedule.end);
    Ok(())
}

pub const GAIT_TRACE_HEADER: &str = "percent,angle_deg,omega_rad_s,df_deflection_mm,ees_deflection_mm,\
torque_df_nm,torque_ees_nm,torque_reset_nm,torque_total_nm,natural_torque_nm,power_total_w,natural_power_w";

fn trace_csv(t: &SimulationTrace) -> String {
    let mut s = format!("{GAIT_TRACE_HEADER}\n");
    for i in 0..t.grid.len() {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            t.grid[i],
            t.angle[i].to_degrees(),
            t.omega[i],
            t.df_deflection[i] * 1e3,
            t.ees_deflection[i] * 1e3,
            t.torque_df[i],
            t.torque_ees[i],
            t.torque_reset[i],
            t.torque_total[i],
            t.natural_torque[i],
            t.power_total[i],
            t.natural_power[i]
        ));
    }
    s
}

fn torque_svg(t: &SimulationTrace) -> String {
    Plot {
        title: "Ankle torque over the stride",
        x_label: "gait cycle (%)",
        y_label: "torque (N·m)",
        lines: vec![
            Line { label: "natural", x: &t.grid, y: &t.natural_torque },
            Line { label: "total", x: &t.grid, y: &t.torque_total },
            Line { label: "DF", x: &t.grid, y: &t.torque_df },
            Line { label: "EES", x: &t.grid, y: &t.torque_ees },
            Line { label: "reset", x: &t.grid, y: &t.torque_reset },
        ],
    }
    .render()
}

fn power_svg(t: &SimulationTrace) -> String {
    Plot {
        title: "Ankle power over the stride",
        x_label: "gait cycle (%)",
        y_label: "power (W)",
        lines: vec![
            Line { label: "natural", x: &t.grid, y: &t.natural_power },
            Line { label: "mechanisms", x: &t.grid, y: &t.power_total },
        ],
    }
    .render()
}

fn curve_csv(d: &AnkleDesign) -> String {
    let mut s = String::from("deflection_mm,required_force_n,spring_force_n\n");
    for &(x, f) in &d.curve.points {
        s.push_str(&format!("{},{},{}\n", x * 1e3, f, d.df.springs.force_unchecked(x)));
    }
    s
}

fn curve_svg(c: &ForceDeflectionCurve, d: &AnkleDesign) -> String {
    let x: Vec<f64> = c.points.iter().map(|p| p.0 * 1e3).collect();
    let f: Vec<f64> = c.points.iter().map(|p| p.1).collect();
    let fit: Vec<f64> = c.points.iter().map(|p| d.df.springs.force_unchecked(p.0)).collect();
    Plot {
        title: "DF spring force against deflection",
        x_label: "deflection (mm)",
        y_label: "force (N)",
        lines: vec![Line { label: "required", x: &x, y: &f }, Line { label: "spring pair", x: &x, y: &fit }],
    }
    .render()
}

fn sysid(cfg: &ScenarioConfig, base: &Path) -> RunResult<Outcome> {
    let section = cfg.sysid.clone().unwrap_or_default();
    let mut out = Outcome::default();
    let read = |name: &str| -> RunResult<String> {
        let src = resolve_data(name, base, false)
            .ok_or_else(|| RunError::Config(format!("data file `{name}` not found")))?;
        read_source(&src).map_err(RunError::Config)
    };
    let (u, y) = match (&section.input, &section.response) {
        (Some(i), Some(r)) => {
            let u = Signal::from_csv_str(&read(i)?)?;
            let y = Signal::from_csv_str(&read(r)?)?;
            if (u.dt - y.dt).abs() > 1e-9 * u.dt {
                return Err(RunError::Config(format!("input step {} s differs from response step {} s", u.dt, y.dt)));
            }
            (u, y)
        }
        (Some(i), None) => io_from_csv_str(&read(i)?)?,
        (None, _) => {
            let spec = section.chirp_spec();
            let u = chirp_generate(&spec)?;
            let clean = Signal::new(u.dt, tf_simulate(&section.plant_tf(), &u.values, u.dt)?)?;
            let pct = section.noise_percent.unwrap_or(0.0);
            let y = if pct > 0.0 {
                add_white_noise(&clean, pct / 100.0 * clean.full_scale(), section.noise_seed.unwrap_or(0))?
            } else {
                clean
            };
            out.file("chirp_io.csv", io_to_csv(&u, &y));
            (u, y)
        }
    };
    let report = fit_second_order(&u.values, &y.values, u.dt)?;
    let tf = report.tf;
    out.metric("b0", tf.b0);
    out.metric("a1", tf.a1);
    out.metric("a0", tf.a0);
    out.metric("dc_gain", tf.dc_gain());
    out.metric("fit_percent", report.fit_percent);
    out.metric("residual_rms_v", report.residual_rms);
    out.metric("samples", u.len() as f64);
    out.file("fit.json", serde_json::to_string_pretty(&report).expect("fit report serializes") + "\n");
    out.file("fitted_plant.toml", format!("[control.plant]\nb0 = {}\na1 = {}\na0 = {}\n", tf.b0, tf.a1, tf.a0));
    let yhat = tf_simulate(&tf, &u.values, u.dt)?;
    let t: Vec<f64> = (0..u.len()).map(|i| u.time(i)).collect();
    out.file(
        "fit.svg",
        Plot {
            title: "Measured and fitted response",
            x_label: "time (s)",
            y_label: "output (V)",
            lines: vec![
                Line { label: "input", x: &t, y: &u.values },
                Line { label: "measured", x: &t, y: &y.values },
                Line { label: "fitted", x: &t, y: &yhat },
            ],
        }
        .render(),
    );
    out.summary = vec![
        format!("G(s) = {:.6} / (s² + {:.6}·s + {:.6})", tf.b0, tf.a1, tf.a0),
        format!("fit {:.3} %, residual RMS {:.3e} V", report.fit_percent, report.residual_rms),
    ];
    Ok(out)
}

fn control(cfg: &ScenarioConfig) -> RunResult<Outcome> {
    let c = cfg.control.as_ref().ok_or_else(|| RunError::Config("[control] section is required".into()))?;
    let mut out = Outcome::default();
    match c.scenario {
        ControlKind::Ramp => {
            let s = c.ramp_scenario();
            let tr = s.run()?;
            out.metric("tracking_rmse_ma", tr.tracking_rmse() * 1e3);
            out.metric("pearson_r", tr.correlation());
            out.metric("peak_reference_a", tr.reference.iter().cloned().fold(0.0, f64::max));
            out.file("trace.csv", tr.to_csv(1.0));
            out.file("trace.svg", loop_svg(&tr, "Current tracking", "current (A)", 1.0));
            out.summary = vec![format!(
                "tracking RMSE {:.2} mA, r = {:.4}",
                out.metrics["tracking_rmse_ma"], out.metrics["pearson_r"]
            )];
        }
        ControlKind::Dob => {
            let s = c.dob_scenario();
            let on = s.run(true)?;
            let off = s.run(false)?;
            let rej_on = s.run_rejection(true)?;
            let rej_off = s.run_rejection(false)?;
            let w = (1.0 / s.gains.dt).round() as usize;
            out.metric("pearson_r", on.correlation());
            out.metric("pearson_r_without_dob", off.correlation());
            out.metric("tracking_rmse_mm_s", on.tracking_rmse() * 1e3);
            out.metric("steady_error_dob_mm_s", rej_on.tail_error(w) * 1e3);
            out.metric("steady_error_no_dob_mm_s", rej_off.tail_error(w) * 1e3);
            out.metric("rejection_ratio", rej_on.tail_error(w) / rej_off.tail_error(w));
            out.metric("dob_g_rad_s", s.dob.g);
            out.metric("dob_j_nominal", s.dob.j_nominal);
            out.file("trace.csv", on.to_csv(1e3));
            out.file("trace_no_dob.csv", off.to_csv(1e3));
            out.file("rejection.csv", rejection_csv(&rej_on, &rej_off));
            out.file("trace.svg", loop_svg(&on, "Velocity tracking with DOB", "velocity (mm/s)", 1e3));
            let to_mm = |v: &[f64]| v.iter().map(|x| x * 1e3).collect::<Vec<_>>();
            let (a, b) = (to_mm(&rej_on.measured), to_mm(&rej_off.measured));
            out.file(
                "rejection.svg",
                Plot {
                    title: "Step disturbance, zero reference",
                    x_label: "time (s)",
                    y_label: "velocity (mm/s)",
                    lines: vec![Line { label: "with DOB", x: &rej_on.t, y: &a }, Line { label: "without", x: &rej_off.t, y: &b }],
                }
                .render(),
            );
            let m = &out.metrics;
            out.summary = vec![
                format!("r = {:.4} (without DOB {:.4})", m["pearson_r"], m["pearson_r_without_dob"]),
                format!("steady error ratio with/without DOB {:.3e}", m["rejection_ratio"]),
            ];
        }
    }
    Ok(out)
}

fn loop_svg(tr: &ClosedLoopTrace, title: &str, unit: &str, scale: f64) -> String {
    let r: Vec<f64> = tr.reference.iter().map(|v| v * scale).collect();
    let m: Vec<f64> = tr.measured.iter().map(|v| v * scale).collect();
    Plot {
        title,
        x_label: "time (s)",
        y_label: unit,
        lines: vec![Line { label: "reference", x: &tr.t, y: &r }, Line { label: "measured", x: &tr.t, y: &m }],
    }
    .render()
}

fn rejection_csv(on: &ClosedLoopTrace, off: &ClosedLoopTrace) -> String {
    let mut s = String::from("t_s,meas_dob_mm_s,meas_no_dob_mm_s,dhat\n");
    for k in 0..on.len() {
        s.push_str(&format!(
            "{},{},{},{}\n",
            on.t[k],
            on.measured[k] * 1e3,
            off.measured[k] * 1e3,
            on.disturbance_estimate[k]
        ));
    }
    s
}

fn battery(cfg: &ScenarioConfig) -> RunResult<Outcome> {
    let b = cfg.battery.ok_or_else(|| RunError::Config("[battery] values are required".into()))?;
    let need = |v: Option<f64>, k: &str| v.ok_or_else(|| RunError::Config(format!("[battery] missing {k}")));
    let e = need(b.energy_per_step_j, "energy_per_step_j")?;
    let n = need(b.steps, "steps")?;
    let v = need(b.voltage_v, "voltage_v")?;
    let spec = b.spec();
    spec.validate()?;
    let ah = battery_capacity(e, n, v)?;
    let ok = spec.is_sufficient(ah);
    let mut out = Outcome::default();
    out.metric("required_ah", ah);
    out.metric("cell_capacity_ah", spec.cell_capacity);
    out.metric("pack_voltage_v", spec.pack_voltage());
    out.metric("pack_mass_kg", spec.pack_mass());
    out.metric("sufficient", if ok { 1.0 } else { 0.0 });
    out.summary = vec![format!(
        "{e} J × {n} steps at {v} V needs {ah:.4} Ah; {:.1} Ah pack ({} × {} V): {}",
        spec.cell_capacity,
        spec.cells_in_series,
        spec.cell_voltage_nominal,
        if ok { "sufficient" } else { "insufficient" }
    )];
    Ok(out)
}

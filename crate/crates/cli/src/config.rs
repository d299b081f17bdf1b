//! Scenario files: schema, diagnostics and data-file lookup.
//!
//! A scenario is one TOML document with a top-level `kind` and one table
//! per component. Every physical key carries its unit in the name.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ankle_core::control::{DobConfig, DobScenario, PidGains, RampScenario, LOOP_DT};
use ankle_core::design::BatterySpec;
use ankle_core::gait::{scan_gait_csv, GaitProfile};
use ankle_core::params::{
    builtin_profile, AnkleParams, CalibrationParams, DfParams, EesParams, GaitParams, ResetParams,
    ScheduleParams,
};
use ankle_core::sysid::{ChirpSpec, SecondOrderTf};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// Overrides the directory searched first for data files.
pub const DATA_ENV: &str = "ANKLE_KIT_DATA";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Simulate,
    Design,
    Sysid,
    Control,
    Battery,
}

impl Kind {
    pub const ALL: [Kind; 5] = [Kind::Simulate, Kind::Design, Kind::Sysid, Kind::Control, Kind::Battery];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Simulate => "simulate",
            Kind::Design => "design",
            Kind::Sysid => "sysid",
            Kind::Control => "control",
            Kind::Battery => "battery",
        }
    }

    fn parse(s: &str) -> Option<Kind> {
        Kind::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: Kind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gait: Option<GaitParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub df: Option<DfParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ees: Option<EesParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reset: Option<ResetParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<CalibrationParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sysid: Option<SysidSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control: Option<ControlSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub battery: Option<BatterySection>,
}

impl ScenarioConfig {
    pub fn empty(kind: Kind) -> Self {
        Self {
            kind,
            seed: 0,
            out_dir: None,
            gait: None,
            df: None,
            ees: None,
            reset: None,
            schedule: None,
            calibration: None,
            sysid: None,
            control: None,
            battery: None,
        }
    }

    /// Mechanism sections as core parameters. `None` without `[gait]`/`[df]`.
    pub fn ankle(&self) -> Option<AnkleParams> {
        Some(AnkleParams {
            gait: self.gait.clone()?,
            df: self.df.clone()?,
            ees: self.ees.clone(),
            reset: self.reset.clone(),
            schedule: self.schedule.unwrap_or_default(),
            calibration: self.calibration,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario config serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TfParams {
    pub b0: f64,
    pub a1: f64,
    pub a0: f64,
}

impl TfParams {
    pub fn tf(&self) -> SecondOrderTf {
        SecondOrderTf { b0: self.b0, a1: self.a1, a0: self.a0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChirpParams {
    pub amplitude_v: f64,
    pub offset_v: f64,
    pub start_hz: f64,
    pub end_hz: f64,
    pub duration_s: f64,
    pub dt_s: f64,
}

impl ChirpParams {
    pub fn spec(&self) -> ChirpSpec {
        ChirpSpec {
            amplitude: self.amplitude_v,
            offset: self.offset_v,
            omega1: self.start_hz,
            omega2: self.end_hz,
            duration: self.duration_s,
            dt: self.dt_s,
        }
    }
}

/// Identification input. Without `input` the record is synthesized by
/// driving `plant` with `chirp`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SysidSection {
    /// `t_s,input,output` CSV, or `t_s,value` when `response` is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chirp: Option<ChirpParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plant: Option<TfParams>,
    /// Noise σ as a percentage of the output's full scale.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_percent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_seed: Option<u64>,
}

impl SysidSection {
    pub fn chirp_spec(&self) -> ChirpSpec {
        self.chirp.map_or(ChirpSpec::DEFAULT, |c| c.spec())
    }

    pub fn plant_tf(&self) -> SecondOrderTf {
        self.plant.map_or(SecondOrderTf::BALL_SCREW, |p| p.tf())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControlKind {
    Ramp,
    Dob,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainParams {
    pub kp: f64,
    #[serde(default)]
    pub ki: f64,
    #[serde(default)]
    pub kd: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub saturation: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RampParams {
    pub peak_a: f64,
    pub start_s: f64,
    pub rise_s: f64,
    pub fall_s: f64,
    pub duration_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DobParams {
    pub g_rad_s: f64,
    pub k_t_nm_per_a: f64,
    /// Matched to the plant gain at `g` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_nominal_kg_m2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_p: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegParams {
    pub duration_s: f64,
    pub end_mm_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisturbanceParams {
    /// Input-referred step, A.
    pub step_a: f64,
    pub at_s: f64,
    pub duration_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSection {
    pub scenario: ControlKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plant: Option<TfParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gains: Option<GainParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramp: Option<RampParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dob: Option<DobParams>,
    /// Velocity legs from rest, in order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leg: Option<Vec<LegParams>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disturbance: Option<DisturbanceParams>,
}

impl ControlSection {
    fn dt(&self) -> f64 {
        self.dt_s.unwrap_or(LOOP_DT)
    }

    fn gains_or(&self, default: PidGains) -> PidGains {
        match self.gains {
            Some(g) => PidGains { kp: g.kp, ki: g.ki, kd: g.kd, dt: self.dt(), saturation: g.saturation },
            None => PidGains { dt: self.dt(), ..default },
        }
    }

    pub fn ramp_scenario(&self) -> RampScenario {
        let d = RampScenario::default();
        let mut s = RampScenario { gains: self.gains_or(d.gains), ..d };
        if let Some(p) = self.plant {
            s.plant = p.tf();
        }
        if let Some(r) = self.ramp {
            s.peak_a = r.peak_a;
            s.start_s = r.start_s;
            s.rise_s = r.rise_s;
            s.fall_s = r.fall_s;
            s.duration_s = r.duration_s;
        }
        s
    }

    pub fn dob_scenario(&self) -> DobScenario {
        let d = DobScenario::default();
        let dt = self.dt();
        let plant = self.plant.map_or(d.plant, |p| p.tf());
        let dob = match self.dob {
            Some(p) => {
                let matched = DobConfig::matched_to(&plant, p.g_rad_s, p.k_t_nm_per_a, dt);
                DobConfig {
                    j_nominal: p.j_nominal_kg_m2.unwrap_or(matched.j_nominal),
                    inner_p: p.inner_p.unwrap_or(1.0),
                    ..matched
                }
            }
            None => DobConfig::matched_to(&plant, d.dob.g, d.dob.k_t, dt),
        };
        let mut s = DobScenario { plant, gains: self.gains_or(d.gains), dob, ..d };
        if let Some(legs) = &self.leg {
            s.legs_mm_s = legs.iter().map(|l| (l.duration_s, l.end_mm_s)).collect();
        }
        if let Some(x) = self.disturbance {
            s.step_disturbance = x.step_a;
            s.step_at_s = x.at_s;
            s.rejection_duration_s = x.duration_s;
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellParams {
    pub voltage_v: f64,
    pub capacity_ah: f64,
    pub cells_in_series: u32,
    pub mass_kg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatterySection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_per_step_j: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub voltage_v: Option<f64>,
    /// Defaults to eight 3.7 V, 4.2 Ah cells.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell: Option<CellParams>,
}

impl BatterySection {
    pub fn spec(&self) -> BatterySpec {
        self.cell.map_or(BatterySpec::REFERENCE, |c| BatterySpec {
            cell_voltage_nominal: c.voltage_v,
            cell_capacity: c.capacity_ah,
            cells_in_series: c.cells_in_series,
            cell_mass: c.mass_kg,
        })
    }
}

/// Command-line values applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub grid_step: Option<f64>,
    pub energy_per_step: Option<f64>,
    pub steps: Option<f64>,
    pub voltage: Option<f64>,
    pub input: Option<String>,
    pub response: Option<String>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ScenarioConfig) {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(g) = self.grid_step {
            cfg.schedule.get_or_insert_with(Default::default).grid_step_percent = Some(g);
        }
        if self.energy_per_step.is_some() || self.steps.is_some() || self.voltage.is_some() {
            let b = cfg.battery.get_or_insert_with(Default::default);
            b.energy_per_step_j = self.energy_per_step.or(b.energy_per_step_j);
            b.steps = self.steps.or(b.steps);
            b.voltage_v = self.voltage.or(b.voltage_v);
        }
        if self.input.is_some() || self.response.is_some() {
            let s = cfg.sysid.get_or_insert_with(Default::default);
            if self.input.is_some() {
                s.input = self.input.clone();
            }
            if self.response.is_some() {
                s.response = self.response.clone();
            }
        }
    }
}

/// Where a named data file comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    File(PathBuf),
    Builtin(&'static str),
}

/// Looks up `name`: absolute paths as given; otherwise the
/// `ANKLE_KIT_DATA` directory, then `base`, then the bundled gait profiles.
pub fn resolve_data(name: &str, base: &Path, allow_builtin: bool) -> Option<DataSource> {
    let p = Path::new(name);
    if p.is_absolute() {
        return p.is_file().then(|| DataSource::File(p.to_path_buf()));
    }
    if let Some(dir) = std::env::var_os(DATA_ENV) {
        let c = Path::new(&dir).join(p);
        if c.is_file() {
            return Some(DataSource::File(c));
        }
    }
    let c = base.join(p);
    if c.is_file() {
        return Some(DataSource::File(c));
    }
    if allow_builtin {
        return builtin_profile(name).map(DataSource::Builtin);
    }
    None
}

fn not_found(name: &str, base: &Path) -> String {
    format!(
        "data file `{name}` not found (searched ${DATA_ENV}, {}, bundled profiles)",
        base.display()
    )
}

pub fn read_source(src: &DataSource) -> Result<String, String> {
    match src {
        DataSource::File(p) => std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display())),
        DataSource::Builtin(s) => Ok((*s).to_string()),
    }
}

pub fn load_profile(gait: &GaitParams, base: &Path) -> Result<GaitProfile, String> {
    let src = resolve_data(&gait.profile, base, true).ok_or_else(|| not_found(&gait.profile, base))?;
    let text = read_source(&src)?;
    gait.profile_from_str(&text).map_err(|e| format!("{}: {e}", gait.profile))
}

fn line_at(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn one_line(msg: &str) -> String {
    msg.trim().lines().map(str::trim).filter(|l| !l.is_empty()).collect::<Vec<_>>().join("; ")
}

/// Parses a scenario, collecting one diagnostic per failing key or
/// section rather than stopping at the first. The config is returned
/// whenever `kind` could be read, with failing sections left out.
pub fn parse_scenario(text: &str) -> (Option<ScenarioConfig>, Vec<String>) {
    let doc: BTreeMap<String, toml::Spanned<toml::Value>> = match toml::from_str(text) {
        Ok(d) => d,
        Err(e) => {
            let line = e.span().map_or(0, |s| line_at(text, s.start));
            return (None, vec![format!("line {line}: {}", one_line(e.message()))]);
        }
    };
    let mut diags = Vec::new();
    let line_of = |k: &str| doc.get(k).map_or(0, |v| line_at(text, v.span().start));

    let kind = match doc.get("kind").map(|v| v.get_ref()) {
        None => {
            diags.push("missing kind (expected one of simulate, design, sysid, control, battery)".to_string());
            None
        }
        Some(toml::Value::String(s)) => {
            let k = Kind::parse(s);
            if k.is_none() {
                diags.push(format!(
                    "line {}: unknown kind `{s}` (expected one of simulate, design, sysid, control, battery)",
                    line_of("kind")
                ));
            }
            k
        }
        Some(_) => {
            diags.push(format!("line {}: kind must be a string", line_of("kind")));
            None
        }
    };

    fn section<T: DeserializeOwned>(
        doc: &BTreeMap<String, toml::Spanned<toml::Value>>,
        key: &str,
        line: usize,
        diags: &mut Vec<String>,
    ) -> Option<T> {
        let v = doc.get(key)?;
        match v.get_ref().clone().try_into::<T>() {
            Ok(t) => Some(t),
            Err(e) => {
                diags.push(format!("line {line}: [{key}] {}", one_line(e.message())));
                None
            }
        }
    }

    const KNOWN: [&str; 12] = [
        "kind", "seed", "out_dir", "gait", "df", "ees", "reset", "schedule", "calibration", "sysid", "control",
        "battery",
    ];
    for k in doc.keys() {
        if !KNOWN.contains(&k.as_str()) {
            diags.push(format!("line {}: unknown key `{k}`", line_of(k)));
        }
    }
    let before = diags.len();
    let seed = section::<u64>(&doc, "seed", line_of("seed"), &mut diags).unwrap_or(0);
    let out_dir = section::<String>(&doc, "out_dir", line_of("out_dir"), &mut diags);
    let mut cfg = ScenarioConfig::empty(kind.unwrap_or(Kind::Simulate));
    cfg.seed = seed;
    cfg.out_dir = out_dir;
    cfg.gait = section(&doc, "gait", line_of("gait"), &mut diags);
    cfg.df = section(&doc, "df", line_of("df"), &mut diags);
    cfg.ees = section(&doc, "ees", line_of("ees"), &mut diags);
    cfg.reset = section(&doc, "reset", line_of("reset"), &mut diags);
    cfg.schedule = section(&doc, "schedule", line_of("schedule"), &mut diags);
    cfg.calibration = section(&doc, "calibration", line_of("calibration"), &mut diags);
    cfg.sysid = section(&doc, "sysid", line_of("sysid"), &mut diags);
    cfg.control = section(&doc, "control", line_of("control"), &mut diags);
    cfg.battery = section(&doc, "battery", line_of("battery"), &mut diags);
    // A section that failed to parse would read as missing to `check`.
    let sections_ok = diags.len() == before;
    (kind.filter(|_| sections_ok).map(|_| cfg), diags)
}

/// Invariant checks on a parsed config. `base` anchors relative file names.
pub fn check(cfg: &ScenarioConfig, base: &Path) -> Vec<String> {
    let mut d = Vec::new();
    match cfg.kind {
        Kind::Simulate | Kind::Design => check_ankle(cfg, base, &mut d),
        Kind::Sysid => check_sysid(cfg.sysid.as_ref(), base, &mut d),
        Kind::Control => match &cfg.control {
            Some(c) => check_control(c, &mut d),
            None => d.push("[control] section is required for kind = \"control\"".into()),
        },
        Kind::Battery => check_battery(cfg.battery.as_ref(), &mut d),
    }
    d
}

fn check_ankle(cfg: &ScenarioConfig, base: &Path, d: &mut Vec<String>) {
    let kind = cfg.kind.name();
    if cfg.gait.is_none() {
        d.push(format!("[gait] section is required for kind = \"{kind}\""));
    }
    if cfg.df.is_none() {
        d.push(format!("[df] section is required for kind = \"{kind}\""));
    }
    let mut profile = None;
    if let Some(g) = &cfg.gait {
        if !(g.body_mass_kg > 0.0) {
            d.push(format!("[gait] body_mass_kg must be positive, got {}", g.body_mass_kg));
        }
        if let Some(p) = g.cadence_period_s {
            if !(p > 0.0) {
                d.push(format!("[gait] cadence_period_s must be positive, got {p}"));
            }
        }
        match resolve_data(&g.profile, base, true) {
            None => d.push(format!("[gait] {}", not_found(&g.profile, base))),
            Some(src) => match read_source(&src) {
                Err(e) => d.push(format!("[gait] {e}")),
                Ok(text) => {
                    let (_, diags) = scan_gait_csv(&text);
                    d.extend(diags.iter().map(|x| format!("{}: {x}", g.profile)));
                    if diags.is_empty() && g.body_mass_kg > 0.0 {
                        match g.profile_from_str(&text) {
                            Ok(p) => profile = Some(p),
                            Err(e) => d.push(format!("{}: {e}", g.profile)),
                        }
                    }
                }
            },
        }
    }
    if let Some(df) = &cfg.df {
        if let Err(e) = df.partial_geometry().validate() {
            d.push(format!("[df] {e}"));
        }
        if let Some(s) = &df.springs {
            if let Err(e) = s.to_si() {
                d.push(format!("[df.springs] {e}"));
            }
        }
    }
    if let Some(e) = &cfg.ees {
        if let Err(err) = e.template().build(e.k_n_per_mm.map_or(1.0, |k| k * 1e3)) {
            d.push(format!("[ees] {err}"));
        }
    }
    if let Some(r) = &cfg.reset {
        if let Err(e) = r.to_si().validate() {
            d.push(format!("[reset] {e}"));
        }
    }
    let sched = cfg.schedule.unwrap_or_default().to_schedule();
    match profile.as_ref().map(|p| p.splines()) {
        Some(Ok(s)) => {
            if let Err(e) = sched.resolve(&s) {
                d.push(format!("[schedule] {e}"));
            }
        }
        Some(Err(e)) => d.push(format!("[gait] {e}")),
        None => {
            let step = sched.grid_step_percent;
            let n = (100.0 / step).round();
            if !(step > 0.0) || (n * step - 100.0).abs() > 1e-9 {
                d.push(format!("[schedule] grid step {step} must divide 100"));
            }
        }
    }
    if let Some(c) = &cfg.calibration {
        if let Err(e) = c.to_bounds().validate() {
            d.push(format!("[calibration] {e}"));
        }
    }
}

fn check_sysid(s: Option<&SysidSection>, base: &Path, d: &mut Vec<String>) {
    let default = SysidSection::default();
    let s = s.unwrap_or(&default);
    if s.response.is_some() && s.input.is_none() {
        d.push("[sysid] response given without input".into());
    }
    for name in [&s.input, &s.response].into_iter().flatten() {
        if resolve_data(name, base, false).is_none() {
            d.push(format!("[sysid] {}", not_found(name, base)));
        }
    }
    if s.input.is_none() {
        if let Err(e) = s.chirp_spec().validate() {
            d.push(format!("[sysid.chirp] {e}"));
        }
        if let Err(e) = s.plant_tf().validate() {
            d.push(format!("[sysid.plant] {e}"));
        }
    }
    if let Some(n) = s.noise_percent {
        if !(n >= 0.0 && n.is_finite()) {
            d.push(format!("[sysid] noise_percent must be >= 0, got {n}"));
        }
    }
}

fn check_control(c: &ControlSection, d: &mut Vec<String>) {
    if let Some(dt) = c.dt_s {
        if !(dt > 0.0) {
            d.push(format!("[control] dt_s must be positive, got {dt}"));
            return;
        }
    }
    if let Some(p) = &c.plant {
        if let Err(e) = p.tf().validate() {
            d.push(format!("[control.plant] {e}"));
        }
    }
    match c.scenario {
        ControlKind::Ramp => {
            let s = c.ramp_scenario();
            if let Err(e) = s.gains.validate() {
                d.push(format!("[control.gains] {e}"));
            }
            if !(s.rise_s > 0.0 && s.fall_s > 0.0 && s.start_s >= 0.0 && s.duration_s > s.start_s) {
                d.push("[control.ramp] need rise_s, fall_s > 0 and 0 <= start_s < duration_s".into());
            }
        }
        ControlKind::Dob => {
            let s = c.dob_scenario();
            if let Err(e) = s.gains.validate() {
                d.push(format!("[control.gains] {e}"));
            }
            if let Err(e) = s.dob.validate() {
                d.push(format!("[control.dob] {e}"));
            }
            for (i, (t, _)) in s.legs_mm_s.iter().enumerate() {
                if !(*t > 0.0) {
                    d.push(format!("[[control.leg]] #{}: duration_s must be positive, got {t}", i + 1));
                }
            }
            if s.legs_mm_s.is_empty() {
                d.push("[[control.leg]] need at least one leg".into());
            }
            if !(s.rejection_duration_s > s.step_at_s + 1.0 && s.step_at_s >= 0.0) {
                d.push("[control.disturbance] duration_s must exceed at_s by at least 1 s".into());
            }
        }
    }
}

fn check_battery(b: Option<&BatterySection>, d: &mut Vec<String>) {
    let Some(b) = b else {
        d.push("battery needs energy_per_step_j, steps and voltage_v ([battery] or flags)".into());
        return;
    };
    for (k, v) in [("energy_per_step_j", b.energy_per_step_j), ("steps", b.steps), ("voltage_v", b.voltage_v)] {
        match v {
            None => d.push(format!("[battery] missing {k}")),
            Some(x) if !(x.is_finite() && x >= 0.0) => d.push(format!("[battery] {k} must be >= 0, got {x}")),
            Some(x) if k == "voltage_v" && x == 0.0 => d.push("[battery] voltage_v must be positive".into()),
            _ => {}
        }
    }
    if let Err(e) = b.spec().validate() {
        d.push(format!("[battery.cell] {e}"));
    }
}

/// Replaces data-file names that resolve to disk with absolute paths so
/// that the config can be replayed from anywhere.
pub fn pin_paths(cfg: &mut ScenarioConfig, base: &Path) {
    let abs = |name: &mut String, builtin: bool| {
        if let Some(DataSource::File(p)) = resolve_data(name, base, builtin) {
            if let Ok(c) = p.canonicalize() {
                *name = c.display().to_string();
            }
        }
    };
    if let Some(g) = cfg.gait.as_mut() {
        abs(&mut g.profile, true);
    }
    if let Some(s) = cfg.sysid.as_mut() {
        if let Some(i) = s.input.as_mut() {
            abs(i, false);
        }
        if let Some(r) = s.response.as_mut() {
            abs(r, false);
        }
    }
}

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::akima::AkimaSpline;
use crate::error::{Error, Result};

/// Exact header of a gait CSV.
pub const GAIT_CSV_HEADER: &str = "percent,angle_deg,torque_nm_per_kg,power_w_per_kg";
/// Minimum samples in a profile.
pub const MIN_SAMPLES: usize = 20;

/// Bundled fast-walking reference (per kg, 1 % steps).
pub const FAST_WALK_CSV: &str = include_str!("../../data/gait_fast.csv");
/// Bundled normal-walking reference (per kg, 1 % steps).
pub const NORMAL_WALK_CSV: &str = include_str!("../../data/gait_normal.csv");

/// Default subject mass for the bundled references, kg.
pub const REFERENCE_BODY_MASS: f64 = 75.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Speed {
    Normal,
    Fast,
}

impl Speed {
    /// Walking speed, m/s.
    pub fn meters_per_second(self) -> f64 {
        match self {
            Speed::Normal => 1.3,
            Speed::Fast => 1.6,
        }
    }

    /// Default stride period, s.
    pub fn default_period(self) -> f64 {
        match self {
            Speed::Normal => 1.08,
            Speed::Fast => 0.95,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Speed::Normal => "normal",
            Speed::Fast => "fast",
        }
    }
}

/// One row of a natural gait profile, scaled to the subject.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaitSample {
    /// Percent of stride, `[0, 100]`.
    pub percent: f64,
    /// Ankle angle, rad, dorsi-flexion positive.
    pub angle: f64,
    /// Ankle torque, N·m, plantar-flexion positive.
    pub torque: f64,
    /// Ankle power, W.
    pub power: f64,
}

/// Natural ankle angle, torque and power over one stride.
#[derive(Debug, Clone, PartialEq)]
pub struct GaitProfile {
    pub samples: Vec<GaitSample>,
    pub body_mass: f64,
    pub cadence_period: f64,
    pub speed: Speed,
}

/// One parsed CSV row in file units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaitRow {
    pub line: usize,
    pub percent: f64,
    pub angle_deg: f64,
    pub torque_nm_per_kg: f64,
    pub power_w_per_kg: f64,
}

/// Parses a gait CSV and collects every problem instead of stopping at the
/// first one. Rows that fail to parse are skipped.
pub fn scan_gait_csv(text: &str) -> (Vec<GaitRow>, Vec<String>) {
    let mut diags = Vec::new();
    let mut rows = Vec::new();
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    match rdr.headers() {
        Ok(h) => {
            let got = h.iter().collect::<Vec<_>>().join(",");
            if got != GAIT_CSV_HEADER {
                diags.push(format!("line 1: header is `{got}`, expected `{GAIT_CSV_HEADER}`"));
            }
        }
        Err(e) => diags.push(format!("line 1: unreadable header: {e}")),
    }
    for rec in rdr.records() {
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line() as usize);
                diags.push(format!("line {line}: {e}"));
                continue;
            }
        };
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != 4 {
            diags.push(format!("line {line}: expected 4 fields, got {}", rec.len()));
            continue;
        }
        let mut vals = [0.0; 4];
        let mut ok = true;
        for (k, field) in rec.iter().enumerate() {
            match field.trim().parse::<f64>() {
                Ok(v) if v.is_finite() => vals[k] = v,
                _ => {
                    diags.push(format!("line {line}: field {} `{field}` is not a finite number", k + 1));
                    ok = false;
                }
            }
        }
        if ok {
            rows.push(GaitRow {
                line,
                percent: vals[0],
                angle_deg: vals[1],
                torque_nm_per_kg: vals[2],
                power_w_per_kg: vals[3],
            });
        }
    }
    for w in rows.windows(2) {
        if !(w[1].percent > w[0].percent) {
            diags.push(format!(
                "line {}: percent {} does not increase (previous {})",
                w[1].line, w[1].percent, w[0].percent
            ));
        }
    }
    if let Some(first) = rows.first() {
        if first.percent != 0.0 {
            diags.push(format!("line {}: first percent must be 0, got {}", first.line, first.percent));
        }
    }
    if let Some(last) = rows.last() {
        if last.percent != 100.0 {
            diags.push(format!("line {}: last percent must be 100, got {}", last.line, last.percent));
        }
    }
    if rows.len() < MIN_SAMPLES {
        diags.push(format!("need at least {MIN_SAMPLES} samples, got {}", rows.len()));
    }
    (rows, diags)
}

impl GaitProfile {
    pub fn new(samples: Vec<GaitSample>, body_mass: f64, cadence_period: f64, speed: Speed) -> Result<Self> {
        let p = Self { samples, body_mass, cadence_period, speed };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples.len() < MIN_SAMPLES {
            return Err(Error::InsufficientData { needed: MIN_SAMPLES, got: self.samples.len() });
        }
        if !(self.body_mass > 0.0 && self.cadence_period > 0.0) {
            return Err(Error::Config("body mass and cadence period must be positive".into()));
        }
        let first = self.samples[0].percent;
        let last = self.samples[self.samples.len() - 1].percent;
        if first != 0.0 || last != 100.0 {
            return Err(Error::Grid(format!("percent must span 0..100, got {first}..{last}")));
        }
        for (i, w) in self.samples.windows(2).enumerate() {
            if !(w[1].percent > w[0].percent) {
                return Err(Error::Grid(format!("sample {}: percent does not increase", i + 1)));
            }
        }
        Ok(())
    }

    /// Parses a gait CSV and scales the per-kg columns by `body_mass`.
    pub fn from_csv_str(text: &str, body_mass: f64, cadence_period: f64, speed: Speed) -> Result<Self> {
        let (rows, diags) = scan_gait_csv(text);
        if let Some(d) = diags.first() {
            let line = d
                .strip_prefix("line ")
                .and_then(|s| s.split(':').next())
                .and_then(|s| s.parse().ok())
                .unwrap_or(0);
            return Err(Error::Parse { line, msg: d.clone() });
        }
        let samples = rows
            .iter()
            .map(|r| GaitSample {
                percent: r.percent,
                angle: r.angle_deg.to_radians(),
                torque: r.torque_nm_per_kg * body_mass,
                power: r.power_w_per_kg * body_mass,
            })
            .collect();
        Self::new(samples, body_mass, cadence_period, speed)
    }

    pub fn from_csv_path(path: &Path, body_mass: f64, cadence_period: f64, speed: Speed) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_csv_str(&text, body_mass, cadence_period, speed)
    }

    /// Bundled fast-walking reference at 75 kg.
    pub fn fast_walk() -> Self {
        Self::from_csv_str(FAST_WALK_CSV, REFERENCE_BODY_MASS, Speed::Fast.default_period(), Speed::Fast)
            .expect("bundled fast-walk profile is valid")
    }

    /// Bundled normal-walking reference at 75 kg.
    pub fn normal_walk() -> Self {
        Self::from_csv_str(
            NORMAL_WALK_CSV,
            REFERENCE_BODY_MASS,
            Speed::Normal.default_period(),
            Speed::Normal,
        )
        .expect("bundled normal-walk profile is valid")
    }

    /// Serializes back to the per-kg CSV format.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(40 * self.samples.len());
        out.push_str(GAIT_CSV_HEADER);
        out.push('\n');
        for s in &self.samples {
            out.push_str(&format!(
                "{},{},{},{}\n",
                s.percent,
                s.angle.to_degrees(),
                s.torque / self.body_mass,
                s.power / self.body_mass
            ));
        }
        out
    }

    pub fn percents(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.percent).collect()
    }

    pub fn splines(&self) -> Result<ProfileSplines> {
        let x = self.percents();
        let col = |f: fn(&GaitSample) -> f64| self.samples.iter().map(f).collect::<Vec<_>>();
        Ok(ProfileSplines {
            angle: AkimaSpline::new(&x, &col(|s| s.angle))?,
            torque: AkimaSpline::new(&x, &col(|s| s.torque))?,
            power: AkimaSpline::new(&x, &col(|s| s.power))?,
            cadence_period: self.cadence_period,
        })
    }
}

/// Akima interpolants of the natural angle, torque and power.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSplines {
    pub angle: AkimaSpline,
    pub torque: AkimaSpline,
    pub power: AkimaSpline,
    pub cadence_period: f64,
}

impl ProfileSplines {
    /// Percent and value of the angle maximum (maximum dorsi-flexion).
    pub fn max_dorsi(&self) -> Result<(f64, f64)> {
        self.extremum(-1.0, 0.0, 100.0)
    }

    /// Percent and value of the angle minimum after `after` (maximum
    /// plantar-flexion, taken as toe-off).
    pub fn max_plantar_after(&self, after: f64) -> Result<(f64, f64)> {
        self.extremum(1.0, after, 100.0)
    }

    /// Minimum of `sign·angle` on `[lo, hi]`: best knot, then golden-section
    /// refinement between its neighbours.
    fn extremum(&self, sign: f64, lo: f64, hi: f64) -> Result<(f64, f64)> {
        let f = |p: f64| self.angle.eval(p).map(|v| sign * v);
        let knots: Vec<(f64, f64)> = self.angle.knots().filter(|(x, _)| *x >= lo && *x <= hi).collect();
        let pts: Vec<f64> = std::iter::once(lo)
            .chain(knots.iter().map(|k| k.0))
            .chain(std::iter::once(hi))
            .collect();
        let mut best = 0;
        let mut best_v = f64::INFINITY;
        for (i, &p) in pts.iter().enumerate() {
            let v = f(p)?;
            if v < best_v {
                best_v = v;
                best = i;
            }
        }
        let a = pts[best.saturating_sub(1)];
        let b = pts[(best + 1).min(pts.len() - 1)];
        let x = golden_min(&|p| f(p).unwrap_or(f64::INFINITY), a, b);
        let (x, v) = if f(x)? <= best_v { (x, f(x)?) } else { (pts[best], best_v) };
        Ok((x, sign * v))
    }
}

/// Golden-section minimum of a unimodal function on `[a, b]`.
pub(crate) fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-13 * (1.0 + a.abs() + b.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Joint velocity dθ/dt at `percent`, rad/s (dorsi-flexing positive).
pub fn angular_velocity(profile: &GaitProfile, spline: &AkimaSpline, percent: f64) -> Result<f64> {
    Ok(spline.derivative(percent)? * 100.0 / profile.cadence_period)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_profiles_load() {
        let f = GaitProfile::fast_walk();
        assert_eq!(f.samples.len(), 101);
        let n = GaitProfile::normal_walk();
        assert_eq!(n.speed, Speed::Normal);
    }

    #[test]
    fn nonmonotone_row_is_named() {
        let mut text = String::from(GAIT_CSV_HEADER);
        text.push('\n');
        for i in 0..=25 {
            let p = if i == 7 { 5.0 } else { i as f64 * 4.0 };
            text.push_str(&format!("{p},0,0,0\n"));
        }
        let (_, diags) = scan_gait_csv(&text);
        assert!(diags.iter().any(|d| d.starts_with("line 9:")), "{diags:?}");
        assert!(matches!(
            GaitProfile::from_csv_str(&text, 75.0, 1.0, Speed::Fast),
            Err(Error::Parse { line: 9, .. })
        ));
    }

    #[test]
    fn wrong_header_rejected() {
        let text = "pct,angle,t,p\n0,0,0,0\n";
        let (_, diags) = scan_gait_csv(text);
        assert!(diags[0].contains("header"));
    }

    #[test]
    fn constant_angle_has_zero_velocity() {
        let samples = (0..=20)
            .map(|i| GaitSample { percent: i as f64 * 5.0, angle: 0.1, torque: 0.0, power: 0.0 })
            .collect();
        let p = GaitProfile::new(samples, 70.0, 1.0, Speed::Normal).unwrap();
        let s = p.splines().unwrap();
        for k in 0..=100 {
            assert_eq!(angular_velocity(&p, &s.angle, k as f64).unwrap(), 0.0);
        }
    }

    #[test]
    fn linear_ramp_velocity() {
        let a = 0.002;
        let samples = (0..=20)
            .map(|i| {
                let pc = i as f64 * 5.0;
                GaitSample { percent: pc, angle: a * pc, torque: 0.0, power: 0.0 }
            })
            .collect();
        let p = GaitProfile::new(samples, 70.0, 1.2, Speed::Normal).unwrap();
        let s = p.splines().unwrap();
        let w = angular_velocity(&p, &s.angle, 37.3).unwrap();
        assert!((w - a * 100.0 / 1.2).abs() < 1e-12);
    }
}

//! Mechanism and schedule parameters in config units.
//!
//! Every physical key carries its unit in the name (`_mm`, `_deg`, `_kg`,
//! `_n_per_mm`, `_percent`, `_s`). Conversion to SI happens here and nowhere
//! else.

use serde::{Deserialize, Serialize};

use crate::design::{AnkleDesign, CalibrationBounds, DesignInputs, EesTemplate};
use crate::error::{Error, Result};
use crate::gait::{GaitProfile, Schedule, Speed, FAST_WALK_CSV, NORMAL_WALK_CSV};
use crate::mech::{DfGeometry, ParallelSpringPair, PlanarVector, ResetSpringDesign};

/// Shipped fast-walking scenario.
pub const FAST_WALK_TOML: &str = include_str!("../data/fast_walk.toml");

const MM: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaitParams {
    /// CSV file name. `gait_fast.csv` and `gait_normal.csv` are bundled.
    pub profile: String,
    pub speed: Speed,
    pub body_mass_kg: f64,
    /// Defaults to the speed's nominal stride period.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cadence_period_s: Option<f64>,
}

impl GaitParams {
    pub fn period(&self) -> f64 {
        self.cadence_period_s.unwrap_or_else(|| self.speed.default_period())
    }

    pub fn profile_from_str(&self, csv: &str) -> Result<GaitProfile> {
        GaitProfile::from_csv_str(csv, self.body_mass_kg, self.period(), self.speed)
    }
}

/// Bundled gait CSV by file name.
pub fn builtin_profile(name: &str) -> Option<&'static str> {
    match name {
        "gait_fast.csv" => Some(FAST_WALK_CSV),
        "gait_normal.csv" => Some(NORMAL_WALK_CSV),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpringParams {
    pub k1_n_per_mm: f64,
    pub k2_n_per_mm: f64,
    pub engagement_offset_mm: f64,
    pub max_deflection_mm: f64,
}

impl SpringParams {
    pub fn to_si(&self) -> Result<ParallelSpringPair> {
        ParallelSpringPair::new(
            self.k1_n_per_mm / MM,
            self.k2_n_per_mm / MM,
            self.engagement_offset_mm * MM,
            self.max_deflection_mm * MM,
        )
    }

    pub fn from_si(p: &ParallelSpringPair) -> Self {
        Self {
            k1_n_per_mm: p.k1 * MM,
            k2_n_per_mm: p.k2 * MM,
            engagement_offset_mm: p.engagement_offset / MM,
            max_deflection_mm: p.max_deflection / MM,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DfParams {
    pub m_len_mm: f64,
    pub l_m_mm: f64,
    pub theta_in_deg: f64,
    pub arc_radius_mm: f64,
    pub free_length_mm: f64,
    /// Fitted from the profile when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub springs: Option<SpringParams>,
}

impl DfParams {
    pub fn partial_geometry(&self) -> DfGeometry {
        DfGeometry::partial(
            self.m_len_mm * MM,
            self.l_m_mm * MM,
            self.theta_in_deg.to_radians(),
            self.arc_radius_mm * MM,
            self.free_length_mm * MM,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EesParams {
    pub stroke_mm: f64,
    pub orbital_radius_mm: f64,
    pub theta_r_final_deg: f64,
    pub attach_initial_mm: [f64; 2],
    /// Sized from the push-off energy deficit when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_n_per_mm: Option<f64>,
}

impl EesParams {
    pub fn template(&self) -> EesTemplate {
        EesTemplate {
            stroke: self.stroke_mm * MM,
            orbital_radius: self.orbital_radius_mm * MM,
            theta_r_final: self.theta_r_final_deg.to_radians(),
            attach_initial: mm_point(self.attach_initial_mm),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResetParams {
    pub foot_mass_kg: f64,
    pub l2_mm: f64,
    pub beta_deg: f64,
    pub point_a_mm: [f64; 2],
    pub point_d_mm: [f64; 2],
    pub point_f_mm: [f64; 2],
    /// Sized at maximum plantar-flexion when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_n_per_mm: Option<f64>,
}

impl ResetParams {
    /// `theta_pf` is a placeholder until the schedule is known.
    pub fn to_si(&self) -> ResetSpringDesign {
        ResetSpringDesign {
            foot_mass: self.foot_mass_kg,
            l2: self.l2_mm * MM,
            beta: self.beta_deg.to_radians(),
            point_d: mm_point(self.point_d_mm),
            point_a: mm_point(self.point_a_mm),
            point_f: mm_point(self.point_f_mm),
            theta_pf: -0.35,
            k_reset: self.k_n_per_mm.map_or(0.0, |k| k / MM),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub onset_percent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_percent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub df_slide_end_percent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ees_slide_end_percent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_step_percent: Option<f64>,
}

impl ScheduleParams {
    pub fn to_schedule(&self) -> Schedule {
        Schedule {
            onset_percent: self.onset_percent,
            end_percent: self.end_percent,
            df_slide_end_percent: self.df_slide_end_percent,
            ees_slide_end_percent: self.ees_slide_end_percent,
            grid_step_percent: self.grid_step_percent.unwrap_or(crate::gait::DEFAULT_GRID_STEP),
        }
    }
}

/// `[lo, hi]` per calibrated parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationParams {
    pub m_len_mm: [f64; 2],
    pub l_m_mm: [f64; 2],
    pub theta_in_deg: [f64; 2],
    pub arc_radius_mm: [f64; 2],
    pub free_length_mm: [f64; 2],
}

impl CalibrationParams {
    pub fn to_bounds(&self) -> CalibrationBounds {
        let r = [self.m_len_mm, self.l_m_mm, self.theta_in_deg, self.arc_radius_mm, self.free_length_mm];
        let conv = |i: usize, v: f64| if i == 2 { v.to_radians() } else { v * MM };
        CalibrationBounds {
            lo: std::array::from_fn(|i| conv(i, r[i][0])),
            hi: std::array::from_fn(|i| conv(i, r[i][1])),
        }
    }
}

/// Gait, mechanisms and schedule for one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnkleParams {
    pub gait: GaitParams,
    pub df: DfParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ees: Option<EesParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reset: Option<ResetParams>,
    #[serde(default)]
    pub schedule: ScheduleParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<CalibrationParams>,
}

impl AnkleParams {
    /// Parses the mechanism sections of a scenario file; other top-level
    /// keys are ignored here.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn fast_walk_default() -> Self {
        Self::from_toml_str(FAST_WALK_TOML).expect("shipped fast-walk scenario parses")
    }

    /// Loads the profile named in `[gait]` from the bundled set.
    pub fn builtin_profile(&self) -> Result<GaitProfile> {
        let csv = builtin_profile(&self.gait.profile)
            .ok_or_else(|| Error::Config(format!("no bundled profile `{}`", self.gait.profile)))?;
        self.gait.profile_from_str(csv)
    }

    pub fn schedule(&self) -> Schedule {
        self.schedule.to_schedule()
    }

    pub fn design_inputs(&self, seed: u64) -> Result<DesignInputs> {
        Ok(DesignInputs {
            schedule: self.schedule(),
            geometry: self.df.partial_geometry(),
            springs: self.df.springs.as_ref().map(SpringParams::to_si).transpose()?,
            ees: self.ees.as_ref().map(EesParams::template),
            ees_k: self.ees.as_ref().and_then(|e| e.k_n_per_mm).map(|k| k / MM),
            reset: self.reset.as_ref().map(ResetParams::to_si),
            seed,
        })
    }

    /// Copy with every fitted quantity of `design` pinned, so that a rerun
    /// reproduces it without refitting.
    pub fn pinned(&self, design: &AnkleDesign) -> Self {
        let mut p = self.clone();
        let g = &design.df.geometry;
        p.df.m_len_mm = g.m_len / MM;
        p.df.l_m_mm = g.l_m / MM;
        p.df.theta_in_deg = g.theta_in.to_degrees();
        p.df.arc_radius_mm = g.arc_radius / MM;
        p.df.free_length_mm = g.free_length / MM;
        p.df.springs = Some(SpringParams::from_si(&design.df.springs));
        if let (Some(e), Some(m)) = (p.ees.as_mut(), design.ees.as_ref()) {
            e.k_n_per_mm = Some(m.k_es * MM);
        }
        if let (Some(r), Some(d)) = (p.reset.as_mut(), design.reset.as_ref()) {
            r.k_n_per_mm = Some(d.k_reset * MM);
        }
        p
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }
}

fn mm_point(p: [f64; 2]) -> PlanarVector {
    PlanarVector::new(p[0] * MM, p[1] * MM)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_default_round_trips() {
        let p = AnkleParams::fast_walk_default();
        let back = AnkleParams::from_toml_str(&p.to_toml_string().unwrap()).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn unit_conversion() {
        let s = SpringParams { k1_n_per_mm: 20.0, k2_n_per_mm: 25.0, engagement_offset_mm: 5.0, max_deflection_mm: 20.0 };
        let p = s.to_si().unwrap();
        assert!((p.k1 - 20_000.0).abs() < 1e-9 && (p.engagement_offset - 0.005).abs() < 1e-15);
        let back = SpringParams::from_si(&p);
        assert!((back.k2_n_per_mm - 25.0).abs() < 1e-12);
    }
}

use super::metrics::positive_work;
use super::profile::{GaitProfile, ProfileSplines};
use crate::error::{Error, Result};
use crate::mech::{
    df_torque, ees_torque, reset_torque, AnkleState, DfMechanism, EesMechanism, ResetSpringDesign,
};

/// Default output grid step, percent of stride.
pub const DEFAULT_GRID_STEP: f64 = 0.5;
/// Sub-steps used to integrate the EES spring release.
const EES_SUBSTEPS: usize = 4000;

/// When each mechanism acts. `None` fields fall back to the defaults
/// described on [`Schedule::resolve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub onset_percent: Option<f64>,
    pub end_percent: Option<f64>,
    /// Percent at which the DF slider reaches the arc end.
    pub df_slide_end_percent: Option<f64>,
    /// Percent at which the EES anchor completes its orbital travel.
    pub ees_slide_end_percent: Option<f64>,
    pub grid_step_percent: f64,
}

impl Default for Schedule {
    fn default() -> Self {
        Self {
            onset_percent: None,
            end_percent: None,
            df_slide_end_percent: None,
            ees_slide_end_percent: None,
            grid_step_percent: DEFAULT_GRID_STEP,
        }
    }
}

/// A schedule with every percent fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedSchedule {
    pub onset: f64,
    pub end: f64,
    pub df_slide_end: f64,
    pub ees_slide_end: f64,
    pub grid_step: f64,
    /// Ankle angle at push-off onset (maximum dorsi-flexion), rad.
    pub theta_max_df: f64,
    /// Ankle angle at push-off end (toe-off), rad.
    pub theta_toe_off: f64,
}

impl Schedule {
    /// Fills defaults from the profile: onset at maximum dorsi-flexion, end
    /// at the following maximum plantar-flexion, and both slides finishing
    /// at the end.
    pub fn resolve(&self, splines: &ProfileSplines) -> Result<ResolvedSchedule> {
        let step = self.grid_step_percent;
        let n = (100.0 / step).round();
        if !(step > 0.0) || (n * step - 100.0).abs() > 1e-9 || n < 2.0 {
            return Err(Error::Grid(format!("grid step {step} must divide 100")));
        }
        let (onset, theta_max_df) = match self.onset_percent {
            Some(p) => (p, splines.angle.eval(p)?),
            None => splines.max_dorsi()?,
        };
        let (end, theta_toe_off) = match self.end_percent {
            Some(p) => (p, splines.angle.eval(p)?),
            None => splines.max_plantar_after(onset)?,
        };
        let df_slide_end = self.df_slide_end_percent.unwrap_or(end);
        let ees_slide_end = self.ees_slide_end_percent.unwrap_or(end);
        let ordered = 0.0 <= onset
            && onset < end
            && end <= 100.0
            && onset < df_slide_end
            && df_slide_end <= end
            && onset < ees_slide_end
            && ees_slide_end <= end;
        if !ordered {
            return Err(Error::Config(format!(
                "schedule out of order: need 0 <= onset ({onset}) < slide ends ({df_slide_end}, \
                 {ees_slide_end}) <= end ({end}) <= 100"
            )));
        }
        Ok(ResolvedSchedule {
            onset,
            end,
            df_slide_end,
            ees_slide_end,
            grid_step: step,
            theta_max_df,
            theta_toe_off,
        })
    }
}

impl ResolvedSchedule {
    pub fn in_pushoff(&self, p: f64) -> bool {
        p >= self.onset && p <= self.end
    }

    /// Fraction of the DF slide completed at `p`.
    pub fn df_progress(&self, p: f64) -> f64 {
        if self.in_pushoff(p) {
            ((p - self.onset) / (self.df_slide_end - self.onset)).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }

    /// Fraction of the EES orbital travel completed at `p`.
    pub fn ees_progress(&self, p: f64) -> f64 {
        ((p - self.onset) / (self.ees_slide_end - self.onset)).clamp(0.0, 1.0)
    }

    pub fn grid(&self) -> Vec<f64> {
        percent_grid(self.grid_step)
    }
}

/// `0, step, …, 100`.
pub fn percent_grid(step: f64) -> Vec<f64> {
    let n = (100.0 / step).round() as usize;
    (0..=n).map(|i| if i == n { 100.0 } else { i as f64 * step }).collect()
}

/// Positive work done by each source over the stride, J.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SourceEnergies {
    pub df: f64,
    pub ees: f64,
    pub reset: f64,
    pub total: f64,
}

/// Torque and power over one stride.
///
/// `omega` is the plantar-flexing joint velocity (`−dθ/dt`), so that power is
/// `torque · omega` with both positive during push-off.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace {
    pub grid: Vec<f64>,
    pub angle: Vec<f64>,
    pub omega: Vec<f64>,
    pub df_deflection: Vec<f64>,
    pub ees_deflection: Vec<f64>,
    pub torque_df: Vec<f64>,
    pub torque_ees: Vec<f64>,
    pub torque_reset: Vec<f64>,
    pub torque_total: Vec<f64>,
    pub power_total: Vec<f64>,
    pub natural_torque: Vec<f64>,
    pub natural_power: Vec<f64>,
    pub energies: SourceEnergies,
    pub schedule: ResolvedSchedule,
    pub cadence_period: f64,
}

impl SimulationTrace {
    /// Time between grid points, s.
    pub fn dt(&self) -> f64 {
        self.cadence_period * self.schedule.grid_step / 100.0
    }

    /// Indices of grid points inside the push-off window.
    pub fn pushoff_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.grid.len()).filter(|&i| self.schedule.in_pushoff(self.grid[i]))
    }

    /// Power of one torque series.
    pub fn power_of(&self, torque: &[f64]) -> Vec<f64> {
        torque.iter().zip(&self.omega).map(|(t, w)| t * w).collect()
    }
}

/// EES compression along the push-off window, tabulated on a fine grid.
struct EesRelease {
    onset: f64,
    h: f64,
    deflection: Vec<f64>,
}

impl EesRelease {
    fn new(mech: &EesMechanism, splines: &ProfileSplines, sched: &ResolvedSchedule) -> Result<Self> {
        let h = (sched.end - sched.onset) / EES_SUBSTEPS as f64;
        let rate = |p: f64| -> Result<f64> {
            let arm = mech.orbital_radius * (sched.ees_progress(p) * mech.theta_r_final).sin();
            let plantar = (-splines.angle.derivative(p)?).max(0.0);
            Ok(arm * plantar)
        };
        let mut deflection = Vec::with_capacity(EES_SUBSTEPS + 1);
        let mut x = mech.stroke;
        let mut prev = rate(sched.onset)?;
        deflection.push(x);
        for i in 1..=EES_SUBSTEPS {
            let p = if i == EES_SUBSTEPS { sched.end } else { sched.onset + i as f64 * h };
            let r = rate(p)?;
            x = (x - 0.5 * (prev + r) * h).max(0.0);
            prev = r;
            deflection.push(x);
        }
        Ok(Self { onset: sched.onset, h, deflection })
    }

    fn at(&self, p: f64) -> f64 {
        let u = ((p - self.onset) / self.h).max(0.0);
        let i = (u.floor() as usize).min(self.deflection.len() - 2);
        let f = (u - i as f64).min(1.0);
        self.deflection[i] + f * (self.deflection[i + 1] - self.deflection[i])
    }
}

/// Drives the mechanisms through one stride of `profile`.
///
/// - DF: slider held at the arc start outside push-off; inside it moves
///   linearly to the arc end, arriving at `df_slide_end`.
/// - EES: fully compressed at onset, released through the orbital arc
///   until `end`; the spring extends by `arm · dθ` as the ankle plantar-flexes.
/// - Reset: acts only after `end` (swing).
///
/// Any mechanism may be `None`.
pub fn simulate_gait_cycle(
    df: Option<&DfMechanism>,
    ees: Option<&EesMechanism>,
    reset: Option<&ResetSpringDesign>,
    profile: &GaitProfile,
    schedule: &Schedule,
) -> Result<SimulationTrace> {
    profile.validate()?;
    let splines = profile.splines()?;
    let sched = schedule.resolve(&splines)?;
    let grid = sched.grid();
    let n = grid.len();
    let ees_release = ees.map(|m| EesRelease::new(m, &splines, &sched)).transpose()?;

    let mut t = SimulationTrace {
        grid: grid.clone(),
        angle: Vec::with_capacity(n),
        omega: Vec::with_capacity(n),
        df_deflection: Vec::with_capacity(n),
        ees_deflection: Vec::with_capacity(n),
        torque_df: Vec::with_capacity(n),
        torque_ees: Vec::with_capacity(n),
        torque_reset: Vec::with_capacity(n),
        torque_total: Vec::with_capacity(n),
        power_total: Vec::with_capacity(n),
        natural_torque: Vec::with_capacity(n),
        natural_power: Vec::with_capacity(n),
        energies: SourceEnergies::default(),
        schedule: sched,
        cadence_period: profile.cadence_period,
    };

    for &p in &grid {
        let theta = splines.angle.eval(p)?;
        let omega = -splines.angle.derivative(p)? * 100.0 / profile.cadence_period;
        let state = AnkleState::new(theta, p / 100.0, omega)?;

        let (tau_df, x_df) = match df {
            Some(m) => {
                let g = &m.geometry;
                let tr = g.arc_angle_at(sched.df_progress(p));
                let r = df_torque(g, &m.springs, &state, tr)?;
                (r.torque, crate::mech::df_deflection(g, theta, tr)?)
            }
            None => (0.0, 0.0),
        };
        let (tau_ees, x_ees) = match (ees, &ees_release) {
            (Some(m), Some(rel)) if sched.in_pushoff(p) => {
                let x = rel.at(p).min(m.stroke);
                let tr = sched.ees_progress(p) * m.theta_r_final;
                (ees_torque(m, x, tr)?.torque, x)
            }
            (Some(m), _) if p < sched.onset => (0.0, m.stroke),
            _ => (0.0, 0.0),
        };
        let tau_reset = match reset {
            Some(r) if p > sched.end => reset_torque(r, theta)?.torque,
            _ => 0.0,
        };
        let total = tau_df + tau_ees + tau_reset;
        t.angle.push(theta);
        t.omega.push(omega);
        t.df_deflection.push(x_df);
        t.ees_deflection.push(x_ees);
        t.torque_df.push(tau_df);
        t.torque_ees.push(tau_ees);
        t.torque_reset.push(tau_reset);
        t.torque_total.push(total);
        t.power_total.push(total * omega);
        t.natural_torque.push(splines.torque.eval(p)?);
        t.natural_power.push(splines.power.eval(p)?);
    }

    let dt = t.dt();
    t.energies = SourceEnergies {
        df: positive_work(&t.power_of(&t.torque_df), dt),
        ees: positive_work(&t.power_of(&t.torque_ees), dt),
        reset: positive_work(&t.power_of(&t.torque_reset), dt),
        total: positive_work(&t.power_total, dt),
    };
    Ok(t)
}

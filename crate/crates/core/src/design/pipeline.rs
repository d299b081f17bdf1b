use super::curve::{derive_force_deflection, ForceDeflectionCurve};
use super::energy::{ees_energy_budget, EnergyBudget};
use super::spring_fit::{fit_parallel_springs_seeded, SOLID_MARGIN};
use crate::error::Result;
use crate::gait::{compare, simulate_gait_cycle, GaitProfile, ResolvedSchedule, Schedule, Series, SimulationTrace};
use crate::mech::{
    design_slider_arc, reset_spring_design, DfGeometry, DfMechanism, EesMechanism, ParallelSpringPair,
    PlanarVector, ResetSpringDesign,
};

/// EES mechanism before its spring rate is sized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EesTemplate {
    pub stroke: f64,
    pub orbital_radius: f64,
    pub theta_r_final: f64,
    pub attach_initial: PlanarVector,
}

impl EesTemplate {
    pub fn build(&self, k_es: f64) -> Result<EesMechanism> {
        EesMechanism::new(k_es, self.stroke, self.orbital_radius, self.theta_r_final, self.attach_initial)
    }
}

/// What to design, and what is already fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignInputs {
    pub schedule: Schedule,
    /// Arc placement is always recomputed from the profile.
    pub geometry: DfGeometry,
    /// Fitted from the profile when `None`.
    pub springs: Option<ParallelSpringPair>,
    pub ees: Option<EesTemplate>,
    /// Sized from the energy deficit when `None`.
    pub ees_k: Option<f64>,
    /// `k_reset == 0` means size it.
    pub reset: Option<ResetSpringDesign>,
    pub seed: u64,
}

/// A complete mechanism set for one profile.
#[derive(Debug, Clone, PartialEq)]
pub struct AnkleDesign {
    pub df: DfMechanism,
    pub ees: Option<EesMechanism>,
    pub reset: Option<ResetSpringDesign>,
    pub curve: ForceDeflectionCurve,
    pub budget: Option<EnergyBudget>,
    pub schedule: ResolvedSchedule,
}

impl AnkleDesign {
    pub fn simulate(&self, profile: &GaitProfile, schedule: &Schedule) -> Result<SimulationTrace> {
        simulate_gait_cycle(Some(&self.df), self.ees.as_ref(), self.reset.as_ref(), profile, schedule)
    }
}

/// Arc placement, spring fit, EES sizing and reset sizing in sequence.
pub fn synthesize_design(profile: &GaitProfile, inputs: &DesignInputs) -> Result<AnkleDesign> {
    let splines = profile.splines()?;
    let sched = inputs.schedule.resolve(&splines)?;
    let geometry = design_slider_arc(&inputs.geometry, sched.theta_max_df, sched.theta_toe_off)?;
    let curve = derive_force_deflection(profile, &geometry)?;
    let springs = match inputs.springs {
        Some(s) => s,
        None => {
            let mut s = fit_parallel_springs_seeded(&curve, inputs.seed)?;
            s.max_deflection = s.max_deflection.max(geometry.max_deflection() * SOLID_MARGIN);
            s
        }
    };
    let df = DfMechanism { geometry, springs };
    let (ees, budget) = match inputs.ees {
        Some(tpl) => {
            let df_only = simulate_gait_cycle(Some(&df), None, None, profile, &inputs.schedule)?;
            let budget = ees_energy_budget(profile, &df_only, tpl.stroke)?;
            let k = inputs.ees_k.unwrap_or(budget.ees_required_k);
            (Some(tpl.build(k)?), Some(budget))
        }
        None => (None, None),
    };
    let reset = match inputs.reset {
        Some(r) if r.k_reset > 0.0 => Some(ResetSpringDesign { theta_pf: sched.theta_toe_off, ..r }),
        Some(r) => {
            let out = reset_spring_design(&r, sched.theta_toe_off)?;
            Some(ResetSpringDesign { theta_pf: sched.theta_toe_off, k_reset: out.k, ..r })
        }
        None => None,
    };
    Ok(AnkleDesign { df, ees, reset, curve, budget, schedule: sched })
}

/// Torque NRMSE (percent of natural peak) of a full run.
pub fn torque_nrmse(trace: &SimulationTrace) -> Result<f64> {
    let a = Series::new(trace.grid.clone(), trace.natural_torque.clone(), trace.cadence_period)?;
    let b = Series::new(trace.grid.clone(), trace.torque_total.clone(), trace.cadence_period)?;
    Ok(compare(&a, &b)?.nrmse_percent)
}

//! The two reference closed-loop experiments with their default settings.

use serde::{Deserialize, Serialize};

use super::dob::DobConfig;
use super::pid::PidGains;
use super::reference::{sample_references, velocity_profile, CubicVelocityRef};
use super::sim::{simulate_velocity_loop, ClosedLoopTrace};
use crate::error::Result;
use crate::sysid::SecondOrderTf;

/// Loop rate, s.
pub const LOOP_DT: f64 = 1e-3;

/// Current ramp: rise over `rise_s` from `start_s`, fall over `fall_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RampScenario {
    pub plant: SecondOrderTf,
    pub gains: PidGains,
    pub peak_a: f64,
    pub start_s: f64,
    pub rise_s: f64,
    pub fall_s: f64,
    pub duration_s: f64,
}

impl Default for RampScenario {
    fn default() -> Self {
        Self {
            plant: SecondOrderTf::BALL_SCREW,
            gains: PidGains::pd(1000.0, 1000.0, LOOP_DT),
            peak_a: 1.31,
            start_s: 2.0,
            rise_s: 0.4,
            fall_s: 0.6,
            duration_s: 5.0,
        }
    }
}

impl RampScenario {
    pub fn reference(&self) -> Vec<f64> {
        let dt = self.gains.dt;
        let n = (self.duration_s / dt).round() as usize + 1;
        let top = self.start_s + self.rise_s;
        (0..n)
            .map(|k| {
                let t = k as f64 * dt;
                if t < self.start_s {
                    0.0
                } else if t < top {
                    self.peak_a * (t - self.start_s) / self.rise_s
                } else {
                    (self.peak_a * (1.0 - (t - top) / self.fall_s)).max(0.0)
                }
            })
            .collect()
    }

    pub fn run(&self) -> Result<ClosedLoopTrace> {
        simulate_velocity_loop(&self.plant, &self.gains, None, &self.reference(), &[])
    }
}

/// Velocity tracking with cubic legs, in mm/s at the interface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DobScenario {
    pub plant: SecondOrderTf,
    pub gains: PidGains,
    pub dob: DobConfig,
    /// `(duration_s, end velocity mm/s)` from rest.
    pub legs_mm_s: Vec<(f64, f64)>,
    /// Input-referred step disturbance for the rejection check.
    pub step_disturbance: f64,
    pub step_at_s: f64,
    pub rejection_duration_s: f64,
}

impl Default for DobScenario {
    fn default() -> Self {
        Self {
            plant: SecondOrderTf::BALL_SCREW,
            gains: PidGains::pd(100.0, 100.0, LOOP_DT),
            dob: DobConfig::matched_to(&SecondOrderTf::BALL_SCREW, 10.0, 0.0254, LOOP_DT),
            legs_mm_s: vec![(1.0, 14.5), (0.5, 14.5), (0.5, -28.0), (0.5, -28.0), (0.5, 0.0)],
            step_disturbance: 0.4,
            step_at_s: 1.0,
            rejection_duration_s: 6.0,
        }
    }
}

impl DobScenario {
    pub fn segments_mm_s(&self) -> Result<Vec<CubicVelocityRef>> {
        velocity_profile(0.0, &self.legs_mm_s)
    }

    /// Reference in m/s.
    pub fn reference(&self) -> Result<Vec<f64>> {
        Ok(sample_references(&self.segments_mm_s()?, self.gains.dt).into_iter().map(|v| v * 1e-3).collect())
    }

    pub fn run(&self, with_dob: bool) -> Result<ClosedLoopTrace> {
        let dob = with_dob.then_some(&self.dob);
        simulate_velocity_loop(&self.plant, &self.gains, dob, &self.reference()?, &[])
    }

    /// Zero reference with a step disturbance; returns the trace.
    pub fn run_rejection(&self, with_dob: bool) -> Result<ClosedLoopTrace> {
        let dt = self.gains.dt;
        let n = (self.rejection_duration_s / dt).round() as usize + 1;
        let dist: Vec<f64> =
            (0..n).map(|k| if k as f64 * dt >= self.step_at_s { self.step_disturbance } else { 0.0 }).collect();
        simulate_velocity_loop(&self.plant, &self.gains, with_dob.then_some(&self.dob), &vec![0.0; n], &dist)
    }

    /// Steady error with the observer over steady error without, measured
    /// over the last second.
    pub fn rejection_ratio(&self) -> Result<f64> {
        let w = (1.0 / self.gains.dt).round() as usize;
        Ok(self.run_rejection(true)?.tail_error(w) / self.run_rejection(false)?.tail_error(w))
    }
}

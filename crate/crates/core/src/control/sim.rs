use super::dob::{dob_update, DobConfig, DobState};
use super::pid::{pid_update, PidGains, PidState};
use crate::error::{Error, Result};
use crate::gait::pearson;
use crate::sysid::SecondOrderTf;

pub const TRACE_CSV_HEADER: &str = "t_s,ref,meas,u,dhat";
/// Output magnitude treated as divergence.
pub const BLOW_UP: f64 = 1e9;

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLoopTrace {
    pub t: Vec<f64>,
    pub reference: Vec<f64>,
    pub measured: Vec<f64>,
    /// Command applied to the plant, disturbance excluded.
    pub control_effort: Vec<f64>,
    /// Observer estimate, torque units; zero without a DOB.
    pub disturbance_estimate: Vec<f64>,
}

impl ClosedLoopTrace {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn errors(&self) -> impl Iterator<Item = f64> + '_ {
        self.reference.iter().zip(&self.measured).map(|(r, y)| r - y)
    }

    pub fn tracking_rmse(&self) -> f64 {
        (self.errors().map(|e| e * e).sum::<f64>() / self.len() as f64).sqrt()
    }

    pub fn correlation(&self) -> f64 {
        pearson(&self.reference, &self.measured)
    }

    /// Mean `|ref − meas|` over the last `window` samples.
    pub fn tail_error(&self, window: usize) -> f64 {
        let w = window.min(self.len()).max(1);
        self.errors().skip(self.len() - w).map(f64::abs).sum::<f64>() / w as f64
    }

    /// `scale` multiplies reference and measurement (e.g. m/s to mm/s).
    pub fn to_csv(&self, scale: f64) -> String {
        let mut s = format!("{TRACE_CSV_HEADER}\n");
        for k in 0..self.len() {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                self.t[k],
                self.reference[k] * scale,
                self.measured[k] * scale,
                self.control_effort[k],
                self.disturbance_estimate[k]
            ));
        }
        s
    }
}

/// Fixed-step loop at `gains.dt`.
///
/// Each step reads the plant output produced by the previous command,
/// forms the PID command from the tracking error, optionally corrects it
/// with the observer, and advances the plant by one step with the
/// input-referred `disturbance` added. An empty `disturbance` means zero.
pub fn simulate_velocity_loop(
    plant: &SecondOrderTf,
    gains: &PidGains,
    dob: Option<&DobConfig>,
    reference: &[f64],
    disturbance: &[f64],
) -> Result<ClosedLoopTrace> {
    gains.validate()?;
    if let Some(c) = dob {
        c.validate()?;
        if (c.dt - gains.dt).abs() > 1e-15 {
            return Err(Error::Domain(format!("DOB dt {} differs from loop dt {}", c.dt, gains.dt)));
        }
    }
    if !disturbance.is_empty() && disturbance.len() != reference.len() {
        return Err(Error::Domain(format!(
            "{} disturbance samples for {} reference samples",
            disturbance.len(),
            reference.len()
        )));
    }
    let mut p = plant.discretize(gains.dt)?;
    let n = reference.len();
    let mut tr = ClosedLoopTrace {
        t: (0..n).map(|k| k as f64 * gains.dt).collect(),
        reference: reference.to_vec(),
        measured: Vec::with_capacity(n),
        control_effort: Vec::with_capacity(n),
        disturbance_estimate: Vec::with_capacity(n),
    };
    let (mut pid, mut obs, mut y) = (PidState::default(), DobState::default(), 0.0);
    for k in 0..n {
        let (cmd, ps) = pid_update(gains, reference[k] - y, pid);
        pid = ps;
        let (dhat, u) = match dob {
            Some(c) => {
                let (dh, i, s) = dob_update(c, y, cmd, obs);
                obs = s;
                (dh, i)
            }
            None => (0.0, cmd),
        };
        tr.measured.push(y);
        tr.control_effort.push(u);
        tr.disturbance_estimate.push(dhat);
        y = p.step(u + disturbance.get(k).copied().unwrap_or(0.0));
        if !(y.abs() <= BLOW_UP) {
            let mut label = gains.label();
            if let Some(c) = dob {
                label.push_str(&format!(" g={} inner_p={}", c.g, c.inner_p));
            }
            return Err(Error::Instability { gains: label, magnitude: y.abs(), t: (k + 1) as f64 * gains.dt });
        }
    }
    Ok(tr)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_in_zero_out() {
        let g = PidGains { kp: 5.0, ki: 1.0, kd: 1.0, dt: 1e-3, saturation: None };
        let dob = DobConfig::matched_to(&SecondOrderTf::BALL_SCREW, 10.0, 0.0254, 1e-3);
        let tr = simulate_velocity_loop(&SecondOrderTf::BALL_SCREW, &g, Some(&dob), &[0.0; 500], &[]).unwrap();
        assert!(tr.measured.iter().chain(&tr.control_effort).chain(&tr.disturbance_estimate).all(|v| *v == 0.0));
    }

    #[test]
    fn blow_up_names_gains() {
        let unstable = SecondOrderTf { b0: -50.0, a1: 0.1, a0: 0.1 };
        let g = PidGains::pd(1000.0, 0.0, 1e-3);
        match simulate_velocity_loop(&unstable, &g, None, &vec![1.0; 20_000], &[]) {
            Err(Error::Instability { gains, .. }) => assert!(gains.contains("kp=1000")),
            other => panic!("{other:?}"),
        }
    }
}

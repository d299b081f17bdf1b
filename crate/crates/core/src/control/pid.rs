use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    pub dt: f64,
    /// Symmetric output clamp; off when `None`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub saturation: Option<f64>,
}

impl PidGains {
    pub fn pd(kp: f64, kd: f64, dt: f64) -> Self {
        Self { kp, ki: 0.0, kd, dt, saturation: None }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if !(ok(self.kp) && ok(self.ki) && ok(self.kd)) {
            return Err(Error::Domain(format!(
                "gains must be non-negative: kp={} ki={} kd={}",
                self.kp, self.ki, self.kd
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Domain(format!("dt must be positive, got {}", self.dt)));
        }
        if let Some(s) = self.saturation {
            if !(s > 0.0) {
                return Err(Error::Domain(format!("saturation must be positive, got {s}")));
            }
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        format!("kp={} ki={} kd={}", self.kp, self.ki, self.kd)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PidState {
    pub integral: f64,
    pub prev_error: f64,
}

/// One controller step. Trapezoidal integral, backward-difference
/// derivative; the previous error starts at zero.
pub fn pid_update(gains: &PidGains, error: f64, state: PidState) -> (f64, PidState) {
    let integral = state.integral + 0.5 * (error + state.prev_error) * gains.dt;
    let derivative = (error - state.prev_error) / gains.dt;
    let mut u = gains.kp * error + gains.ki * integral + gains.kd * derivative;
    if let Some(s) = gains.saturation {
        u = u.clamp(-s, s);
    }
    (u, PidState { integral, prev_error: error })
}

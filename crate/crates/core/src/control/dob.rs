use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sysid::SecondOrderTf;

/// Disturbance observer around a nominal rigid-body model `J·dω/dt = Kt·i + d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DobConfig {
    /// Cutoff of `Q(s) = g/(s+g)`, rad/s.
    pub g: f64,
    /// Nominal inertia referred to the output axis.
    pub j_nominal: f64,
    /// Torque constant, N·m/A.
    pub k_t: f64,
    /// Gain on the compensation path, 1 for full cancellation.
    #[serde(default = "unit")]
    pub inner_p: f64,
    pub dt: f64,
}

fn unit() -> f64 {
    1.0
}

impl DobConfig {
    pub fn validate(&self) -> Result<()> {
        for (n, v) in [("g", self.g), ("j_nominal", self.j_nominal), ("k_t", self.k_t), ("dt", self.dt)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("DOB {n} must be positive, got {v}")));
            }
        }
        if !self.inner_p.is_finite() {
            return Err(Error::Domain(format!("DOB inner_p is not finite ({})", self.inner_p)));
        }
        Ok(())
    }

    /// Nominal inertia chosen so that `Kt/(J·s)` has the plant's gain at
    /// the cutoff `g`.
    pub fn matched_to(plant: &SecondOrderTf, g: f64, k_t: f64, dt: f64) -> Self {
        Self { g, j_nominal: k_t / (g * plant.magnitude(g)), k_t, inner_p: 1.0, dt }
    }
}

/// Observer memory. `i_prev`/`i_prev2` are the last two applied currents.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DobState {
    pub omega_prev: f64,
    pub i_prev: f64,
    pub i_prev2: f64,
    pub dhat: f64,
}

/// One observer step.
///
/// `d̂ = Q·(J·s·ω − Kt·i)` with `Q` bilinear and the current delayed one
/// sample, since the measured `omega` is the response to the previous
/// command. Returns `(d̂, i)` where `i = command − inner_p·d̂/Kt` is the
/// current to apply now.
pub fn dob_update(cfg: &DobConfig, omega: f64, command: f64, state: DobState) -> (f64, f64, DobState) {
    let c = 2.0 / cfg.dt;
    let drive = cfg.g * (cfg.j_nominal * c * (omega - state.omega_prev) - cfg.k_t * (state.i_prev + state.i_prev2));
    let dhat = (drive - (cfg.g - c) * state.dhat) / (c + cfg.g);
    let i = command - cfg.inner_p * dhat / cfg.k_t;
    (dhat, i, DobState { omega_prev: omega, i_prev: i, i_prev2: state.i_prev, dhat })
}

/// Plant that matches the observer's model exactly: trapezoidal
/// integration of `J·dω/dt = Kt·u` with a one-sample input delay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NominalPlant {
    pub j: f64,
    pub k_t: f64,
    pub dt: f64,
    pub omega: f64,
    u_prev: f64,
}

impl NominalPlant {
    pub fn new(cfg: &DobConfig) -> Self {
        Self { j: cfg.j_nominal, k_t: cfg.k_t, dt: cfg.dt, omega: 0.0, u_prev: 0.0 }
    }

    /// Applies current `u` (disturbance folded in); returns the next
    /// measured velocity.
    pub fn step(&mut self, u: f64) -> f64 {
        self.omega += 0.5 * self.dt * self.k_t / self.j * (u + self.u_prev);
        self.u_prev = u;
        self.omega
    }
}

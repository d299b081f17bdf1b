use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `G(s) = b0 / (s² + a1·s + a0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderTf {
    pub b0: f64,
    pub a1: f64,
    pub a0: f64,
}

impl SecondOrderTf {
    /// Ball-screw actuator, voltage in to voltage out.
    pub const BALL_SCREW: SecondOrderTf = SecondOrderTf { b0: 0.1829, a1: 0.5079, a0: 0.1751 };
    /// Replacer motor.
    pub const REPLACER: SecondOrderTf = SecondOrderTf { b0: 0.3963, a1: 0.9563, a0: 0.4228 };

    pub fn new(b0: f64, a1: f64, a0: f64) -> Result<Self> {
        let tf = Self { b0, a1, a0 };
        tf.validate()?;
        Ok(tf)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.b0.is_finite() {
            return Err(Error::Domain(format!("b0 is not finite ({})", self.b0)));
        }
        if !(self.a1 > 0.0 && self.a0 > 0.0 && self.a1.is_finite() && self.a0.is_finite()) {
            return Err(Error::Unstable(format!(
                "s² + {}·s + {} needs both coefficients positive",
                self.a1, self.a0
            )));
        }
        Ok(())
    }

    pub fn dc_gain(&self) -> f64 {
        self.b0 / self.a0
    }

    /// Natural frequency, rad/s.
    pub fn omega_n(&self) -> f64 {
        self.a0.sqrt()
    }

    pub fn damping(&self) -> f64 {
        self.a1 / (2.0 * self.a0.sqrt())
    }

    /// `|G(jω)|`.
    pub fn magnitude(&self, omega: f64) -> f64 {
        let re = self.a0 - omega * omega;
        let im = self.a1 * omega;
        self.b0.abs() / re.hypot(im)
    }

    /// Bilinear (Tustin) discretization at step `dt`.
    pub fn discretize(&self, dt: f64) -> Result<DiscreteTf> {
        self.validate()?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Domain(format!("dt must be positive, got {dt}")));
        }
        let c = 2.0 / dt;
        let d0 = c * c + self.a1 * c + self.a0;
        let d1 = 2.0 * (self.a0 - c * c);
        let d2 = c * c - self.a1 * c + self.a0;
        let g = self.b0 / d0;
        Ok(DiscreteTf { num: [g, 2.0 * g, g], den: [d1 / d0, d2 / d0], state: [0.0; 2] })
    }
}

/// Second-order difference equation in transposed direct form II.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteTf {
    pub num: [f64; 3],
    /// `[d1, d2]` with `d0 = 1`.
    pub den: [f64; 2],
    state: [f64; 2],
}

impl DiscreteTf {
    pub fn step(&mut self, u: f64) -> f64 {
        let y = self.num[0] * u + self.state[0];
        self.state[0] = self.num[1] * u - self.den[0] * y + self.state[1];
        self.state[1] = self.num[2] * u - self.den[1] * y;
        y
    }

    pub fn reset(&mut self) {
        self.state = [0.0; 2];
    }
}

/// Response to `input` from rest.
pub fn tf_simulate(tf: &SecondOrderTf, input: &[f64], dt: f64) -> Result<Vec<f64>> {
    let mut d = tf.discretize(dt)?;
    Ok(input.iter().map(|&u| d.step(u)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_in_zero_out() {
        let y = tf_simulate(&SecondOrderTf::BALL_SCREW, &[0.0; 100], 1e-3).unwrap();
        assert!(y.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn step_settles_at_dc_gain() {
        let tf = SecondOrderTf::BALL_SCREW;
        let y = tf_simulate(&tf, &vec![1.0; 200_000], 1e-3).unwrap();
        assert!((y.last().unwrap() - 0.1829 / 0.1751).abs() < 1e-4, "{}", y.last().unwrap());
    }

    #[test]
    fn halving_dt_barely_moves_rms() {
        let tf = SecondOrderTf::BALL_SCREW;
        let rms = |dt: f64| {
            let n = (30.0 / dt) as usize + 1;
            let u: Vec<f64> = (0..n).map(|i| (3.0 * i as f64 * dt).sin() + 1.0).collect();
            let y = tf_simulate(&tf, &u, dt).unwrap();
            (y.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt()
        };
        let (a, b) = (rms(1e-3), rms(5e-4));
        assert!(((a - b) / b).abs() < 1e-3, "{a} vs {b}");
    }

    #[test]
    fn rejects_unstable() {
        let tf = SecondOrderTf { b0: 1.0, a1: -0.1, a0: 1.0 };
        assert!(matches!(tf_simulate(&tf, &[1.0], 1e-3), Err(Error::Unstable(_))));
    }
}

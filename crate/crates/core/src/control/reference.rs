use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `v(t) = a·t³ + b·t² + c·t + d` on `[0, duration]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicVelocityRef {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub duration: f64,
}

impl CubicVelocityRef {
    pub fn eval(&self, t: f64) -> f64 {
        ((self.a * t + self.b) * t + self.c) * t + self.d
    }

    pub fn acceleration(&self, t: f64) -> f64 {
        (3.0 * self.a * t + 2.0 * self.b) * t + self.c
    }
}

/// The cubic meeting velocity and acceleration at both ends.
pub fn cubic_velocity_reference(v0: f64, vf: f64, acc0: f64, accf: f64, duration: f64) -> Result<CubicVelocityRef> {
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::Singularity(format!("cubic reference needs a positive duration, got {duration}")));
    }
    let t = duration;
    // remaining two conditions after d = v0, c = acc0
    let p = vf - v0 - acc0 * t;
    let q = accf - acc0;
    Ok(CubicVelocityRef {
        a: (q * t - 2.0 * p) / (t * t * t),
        b: (3.0 * p - q * t) / (t * t),
        c: acc0,
        d: v0,
        duration,
    })
}

/// Samples consecutive segments at step `dt`; each segment contributes
/// `round(duration/dt)` samples and the last endpoint closes the sequence.
pub fn sample_references(segments: &[CubicVelocityRef], dt: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for s in segments {
        let n = (s.duration / dt).round() as usize;
        out.extend((0..n).map(|k| s.eval(k as f64 * dt)));
    }
    if let Some(last) = segments.last() {
        out.push(last.eval(last.duration));
    }
    out
}

/// Piecewise-cubic profile through `(duration, v_end)` waypoints starting
/// at `v_start`, at rest in acceleration at every joint.
pub fn velocity_profile(v_start: f64, legs: &[(f64, f64)]) -> Result<Vec<CubicVelocityRef>> {
    let mut v = v_start;
    legs.iter()
        .map(|&(t, vf)| {
            let seg = cubic_velocity_reference(v, vf, 0.0, 0.0, t);
            v = vf;
            seg
        })
        .collect()
}

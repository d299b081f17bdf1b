use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::signal::Signal;
use crate::error::{ensure_finite, Error, Result};

/// Linear chirp `offset + A·sin(2π(f₁t + (f₂−f₁)t²/2M))`.
///
/// Frequencies are in Hz here and everywhere at the interface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirpSpec {
    pub amplitude: f64,
    pub offset: f64,
    /// Start frequency, Hz.
    pub omega1: f64,
    /// End frequency, Hz.
    pub omega2: f64,
    /// Sweep length M, s.
    pub duration: f64,
    pub dt: f64,
}

impl ChirpSpec {
    /// 0 to 30 Hz over 30 s at 1 kHz, spanning 0.45 to 4.54 V.
    pub const DEFAULT: ChirpSpec =
        ChirpSpec { amplitude: 2.045, offset: 2.495, omega1: 0.0, omega2: 30.0, duration: 30.0, dt: 1e-3 };

    /// Same sweep read with a 1.35 V amplitude about the same offset.
    pub const LOW_AMPLITUDE: ChirpSpec = ChirpSpec { amplitude: 1.35, ..Self::DEFAULT };

    pub fn validate(&self) -> Result<()> {
        for (n, v) in [
            ("amplitude", self.amplitude),
            ("offset", self.offset),
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("duration", self.duration),
            ("dt", self.dt),
        ] {
            ensure_finite(n, v)?;
        }
        if !(self.omega1 >= 0.0 && self.omega2 >= self.omega1) {
            return Err(Error::Domain(format!(
                "chirp needs 0 <= omega1 <= omega2, got {} and {}",
                self.omega1, self.omega2
            )));
        }
        if !(self.duration > 0.0 && self.dt > 0.0) {
            return Err(Error::Domain(format!(
                "chirp duration ({}) and dt ({}) must be positive",
                self.duration, self.dt
            )));
        }
        if self.omega2 > 0.0 && self.dt > 0.5 / self.omega2 {
            return Err(Error::Sampling(format!(
                "dt = {} s cannot carry {} Hz (Nyquist needs dt <= {} s)",
                self.dt,
                self.omega2,
                0.5 / self.omega2
            )));
        }
        Ok(())
    }

    /// Number of samples on `[0, M]`.
    pub fn len(&self) -> usize {
        (self.duration / self.dt).round() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Phase in radians at `t`.
pub fn chirp_phase(spec: &ChirpSpec, t: f64) -> f64 {
    TAU * (spec.omega1 * t + (spec.omega2 - spec.omega1) * t * t / (2.0 * spec.duration))
}

/// `f₁ + (f₂−f₁)·t/M`, Hz.
pub fn instantaneous_frequency(spec: &ChirpSpec, t: f64) -> Result<f64> {
    if !(0.0..=spec.duration).contains(&t) {
        return Err(Error::Range { value: t, min: 0.0, max: spec.duration });
    }
    Ok(spec.omega1 + (spec.omega2 - spec.omega1) * t / spec.duration)
}

pub fn chirp_generate(spec: &ChirpSpec) -> Result<Signal> {
    spec.validate()?;
    let values = (0..spec.len())
        .map(|i| spec.offset + spec.amplitude * chirp_phase(spec, i as f64 * spec.dt).sin())
        .collect();
    Signal::new(spec.dt, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn starts_at_offset_and_stays_bounded() {
        let spec = ChirpSpec::LOW_AMPLITUDE;
        let u = chirp_generate(&spec).unwrap();
        assert_eq!(u.values[0], spec.offset);
        assert_eq!(u.len(), 30_001);
        assert!(u.values.iter().all(|v| (v - spec.offset).abs() <= spec.amplitude + 1e-12));
    }

    #[test]
    fn frequency_endpoints_and_midpoint() {
        let spec = ChirpSpec::DEFAULT;
        assert_eq!(instantaneous_frequency(&spec, 0.0).unwrap(), 0.0);
        assert_eq!(instantaneous_frequency(&spec, 30.0).unwrap(), 30.0);
        assert_eq!(instantaneous_frequency(&spec, 15.0).unwrap(), 15.0);
        assert!(matches!(instantaneous_frequency(&spec, 30.1), Err(Error::Range { .. })));
    }

    #[test]
    fn zero_crossings_get_denser() {
        let u = chirp_generate(&ChirpSpec::DEFAULT).unwrap();
        let off = ChirpSpec::DEFAULT.offset;
        let counts: Vec<usize> = u.values[1..]
            .chunks(3000)
            .map(|w| w.windows(2).filter(|p| (p[0] - off) * (p[1] - off) < 0.0).count())
            .collect();
        assert!(counts.windows(2).all(|c| c[1] > c[0]), "{counts:?}");
    }

    #[test]
    fn nyquist_guard() {
        let spec = ChirpSpec { dt: 0.02, ..ChirpSpec::DEFAULT };
        assert!(matches!(chirp_generate(&spec), Err(Error::Sampling(_))));
    }
}

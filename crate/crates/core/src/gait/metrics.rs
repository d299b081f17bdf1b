use super::sim::SimulationTrace;
use crate::error::{Error, Result};

/// A series sampled on a percent-of-stride grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub percent: Vec<f64>,
    pub values: Vec<f64>,
    /// Stride period, s; converts percent steps to time.
    pub cadence_period: f64,
}

impl Series {
    pub fn new(percent: Vec<f64>, values: Vec<f64>, cadence_period: f64) -> Result<Self> {
        if percent.len() != values.len() {
            return Err(Error::Grid(format!(
                "{} grid points but {} values",
                percent.len(),
                values.len()
            )));
        }
        if percent.len() < 2 {
            return Err(Error::InsufficientData { needed: 2, got: percent.len() });
        }
        Ok(Self { percent, values, cadence_period })
    }

    /// Positive work of this series read as power, J. Assumes a uniform grid.
    pub fn positive_energy(&self) -> f64 {
        let dt = (self.percent[1] - self.percent[0]) * self.cadence_period / 100.0;
        positive_work(&self.values, dt)
    }

    pub fn peak(&self) -> Peak {
        let mut i = 0;
        for (k, v) in self.values.iter().enumerate() {
            if *v > self.values[i] {
                i = k;
            }
        }
        Peak { value: self.values[i], percent: self.percent[i] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub value: f64,
    pub percent: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonMetrics {
    pub rmse: f64,
    /// RMSE as a percentage of `max |a|`.
    pub nrmse_percent: f64,
    pub pearson_r: f64,
    pub peak_a: Peak,
    pub peak_b: Peak,
    /// Positive work of each series read as power, J.
    pub energy_a: f64,
    pub energy_b: f64,
}

/// Compares `b` against the reference `a`; both must share a grid.
pub fn compare(a: &Series, b: &Series) -> Result<ComparisonMetrics> {
    if a.percent != b.percent {
        return Err(Error::Grid(format!(
            "series grids differ ({} vs {} points)",
            a.percent.len(),
            b.percent.len()
        )));
    }
    let n = a.values.len() as f64;
    let mse = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / n;
    let rmse = mse.sqrt();
    let scale = a.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let nrmse_percent = if scale > 0.0 { 100.0 * rmse / scale } else { f64::INFINITY };
    Ok(ComparisonMetrics {
        rmse,
        nrmse_percent,
        pearson_r: pearson(&a.values, &b.values),
        peak_a: a.peak(),
        peak_b: b.peak(),
        energy_a: a.positive_energy(),
        energy_b: b.positive_energy(),
    })
}

/// Pearson correlation. A constant series correlates 1 with an identical
/// series and 0 with anything else.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return if a == b { 1.0 } else { 0.0 };
    }
    (sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0)
}

/// Trapezoidal integral of the positive part of `p` at uniform step `dt`.
pub fn positive_work(p: &[f64], dt: f64) -> f64 {
    p.windows(2).map(|w| 0.5 * (w[0].max(0.0) + w[1].max(0.0)) * dt).sum()
}

/// Total mechanism power over the trace, W.
pub fn power_profile(trace: &SimulationTrace) -> Vec<f64> {
    trace.power_total.clone()
}

/// Positive work of the total mechanism power over the stride, J.
pub fn energy(trace: &SimulationTrace) -> f64 {
    positive_work(&trace.power_total, trace.dt())
}

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tf::{tf_simulate, SecondOrderTf};
use crate::error::{Error, Result};
use crate::search::par_argmin_by;

pub const MIN_FIT_SAMPLES: usize = 1000;
const GRID: usize = 5;
const ZETA_RANGE: (f64, f64) = (0.3, 2.0);
/// Upper end of the natural-frequency grid as a fraction of Nyquist.
const OMEGA_HI_FRACTION: f64 = 0.8;
/// Starts carried into the fine refinement.
const REFINED: usize = 3;
const COARSE_TOL: f64 = 1e-3;
const FINE_TOL: f64 = 1e-10;
const MAX_EVALS: usize = 4000;
/// Box on `(ln a1, ln a0)`.
const LOG_LO: f64 = -25.0;
const LOG_HI: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub tf: SecondOrderTf,
    /// `100·(1 − ‖y−ŷ‖/‖y−ȳ‖)`.
    pub fit_percent: f64,
    pub residual_rms: f64,
    pub evaluations: usize,
}

/// `100·(1 − ‖y−ŷ‖/‖y−ȳ‖)`. A constant `y` scores 100 only when matched
/// exactly, 0 otherwise.
pub fn fit_percent(y: &[f64], yhat: &[f64]) -> f64 {
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let res = y.iter().zip(yhat).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let spread = y.iter().map(|a| (a - mean).powi(2)).sum::<f64>().sqrt();
    if spread == 0.0 {
        return if res == 0.0 { 100.0 } else { 0.0 };
    }
    100.0 * (1.0 - res / spread)
}

/// Output-error least squares over `(b0, a1, a0)`.
///
/// `b0` enters the response linearly, so it is solved in closed form for
/// every `(a1, a0)`; the search itself runs over `(ln a1, ln a0)`. Starts
/// form a 5×5 grid over damping ratio and natural frequency; every start
/// gets a coarse pattern search, the best three are then refined.
pub fn fit_second_order(input: &[f64], output: &[f64], dt: f64) -> Result<FitReport> {
    if input.len() != output.len() {
        return Err(Error::Identification(format!(
            "input has {} samples, output {}",
            input.len(),
            output.len()
        )));
    }
    if input.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientData { needed: MIN_FIT_SAMPLES, got: input.len() });
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    if input.iter().chain(output).any(|v| !v.is_finite()) {
        return Err(Error::Identification("signals contain non-finite samples".into()));
    }

    let obj = Objective { input, output, dt };
    let span = dt * (input.len() - 1) as f64;
    let (w_lo, w_hi) = (2.0 * PI / span, OMEGA_HI_FRACTION * PI / dt);
    let mut starts = Vec::with_capacity(GRID * GRID);
    for i in 0..GRID {
        let zeta = ZETA_RANGE.0 + (ZETA_RANGE.1 - ZETA_RANGE.0) * i as f64 / (GRID - 1) as f64;
        for j in 0..GRID {
            let wn = w_lo * (w_hi / w_lo).powf(j as f64 / (GRID - 1) as f64);
            starts.push([(2.0 * zeta * wn).ln(), (wn * wn).ln()]);
        }
    }

    let coarse: Vec<([f64; 2], f64, usize)> = starts
        .par_iter()
        .map(|x0| pattern_search(&obj, *x0, 0.5, COARSE_TOL))
        .collect();
    let mut evaluations: usize = coarse.iter().map(|c| c.2).sum();
    let mut order: Vec<usize> = (0..coarse.len()).filter(|&i| coarse[i].1.is_finite()).collect();
    if order.is_empty() {
        return Err(Error::Identification(format!(
            "all {} starts diverged (natural frequency grid {w_lo:.3e}..{w_hi:.3e} rad/s)",
            starts.len()
        )));
    }
    order.sort_by(|&a, &b| coarse[a].1.total_cmp(&coarse[b].1).then(a.cmp(&b)));
    order.truncate(REFINED);
    let seeds: Vec<[f64; 2]> = order.iter().map(|&i| coarse[i].0).collect();
    let (_, _, (x, n)) = par_argmin_by(&seeds, 0, |x0| {
        let (x, v, n) = pattern_search(&obj, *x0, 4.0 * COARSE_TOL, FINE_TOL);
        (v, (x, n))
    })
    .expect("at least one seed");
    evaluations += n;

    let (a1, a0) = (x[0].exp(), x[1].exp());
    let unit = tf_simulate(&SecondOrderTf { b0: 1.0, a1, a0 }, input, dt)?;
    let b0 = Objective::gain(output, &unit)
        .ok_or_else(|| Error::Identification("fitted model has no response".into()))?;
    let tf = SecondOrderTf::new(b0, a1, a0)?;
    let yhat: Vec<f64> = unit.iter().map(|g| b0 * g).collect();
    let residual_rms = (output.iter().zip(&yhat).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
        / output.len() as f64)
        .sqrt();
    Ok(FitReport { tf, fit_percent: fit_percent(output, &yhat), residual_rms, evaluations })
}

struct Objective<'a> {
    input: &'a [f64],
    output: &'a [f64],
    dt: f64,
}

impl Objective<'_> {
    fn gain(y: &[f64], g: &[f64]) -> Option<f64> {
        let gg: f64 = g.iter().map(|v| v * v).sum();
        let gy: f64 = g.iter().zip(y).map(|(a, b)| a * b).sum();
        (gg > 0.0 && gg.is_finite() && gy.is_finite()).then(|| gy / gg)
    }

    fn sse(&self, x: [f64; 2]) -> f64 {
        let tf = SecondOrderTf { b0: 1.0, a1: x[0].exp(), a0: x[1].exp() };
        let Ok(g) = tf_simulate(&tf, self.input, self.dt) else { return f64::INFINITY };
        let Some(b0) = Self::gain(self.output, &g) else { return f64::INFINITY };
        let s: f64 = self.output.iter().zip(&g).map(|(y, g)| (y - b0 * g).powi(2)).sum();
        if s.is_finite() {
            s
        } else {
            f64::INFINITY
        }
    }
}

/// Compass search on axes and diagonals with step doubling on success.
fn pattern_search(obj: &Objective, x0: [f64; 2], step0: f64, tol: f64) -> ([f64; 2], f64, usize) {
    const DIRS: [[f64; 2]; 8] = [
        [1.0, 0.0],
        [-1.0, 0.0],
        [0.0, 1.0],
        [0.0, -1.0],
        [1.0, 1.0],
        [-1.0, -1.0],
        [1.0, -1.0],
        [-1.0, 1.0],
    ];
    let clamp = |x: [f64; 2]| [x[0].clamp(LOG_LO, LOG_HI), x[1].clamp(LOG_LO, LOG_HI)];
    let mut x = clamp(x0);
    let mut fx = obj.sse(x);
    let mut evals = 1;
    let mut step = step0;
    while step > tol && evals < MAX_EVALS {
        let mut moved = false;
        for d in DIRS {
            let y = clamp([x[0] + step * d[0], x[1] + step * d[1]]);
            if y == x {
                continue;
            }
            let fy = obj.sse(y);
            evals += 1;
            if fy < fx {
                x = y;
                fx = fy;
                moved = true;
                break;
            }
        }
        step = if moved { (2.0 * step).min(step0.max(1.0)) } else { 0.5 * step };
    }
    (x, fx, evals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sysid::{add_white_noise, chirp_generate, ChirpSpec};

    fn round_trip(tf: SecondOrderTf) -> FitReport {
        let u = chirp_generate(&ChirpSpec::DEFAULT).unwrap();
        let y = tf_simulate(&tf, &u.values, u.dt).unwrap();
        fit_second_order(&u.values, &y, u.dt).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn recovers_ball_screw() {
        let t = SecondOrderTf::BALL_SCREW;
        let r = round_trip(t);
        assert!(rel(r.tf.b0, t.b0) < 0.02 && rel(r.tf.a1, t.a1) < 0.02 && rel(r.tf.a0, t.a0) < 0.02, "{r:?}");
        assert!(r.fit_percent >= 99.0);
    }

    #[test]
    fn recovers_replacer() {
        let t = SecondOrderTf::REPLACER;
        let r = round_trip(t);
        assert!(rel(r.tf.b0, t.b0) < 0.02 && rel(r.tf.a1, t.a1) < 0.02 && rel(r.tf.a0, t.a0) < 0.02, "{r:?}");
    }

    #[test]
    fn noisy_ball_screw() {
        let t = SecondOrderTf::BALL_SCREW;
        let u = chirp_generate(&ChirpSpec::DEFAULT).unwrap();
        let y = crate::sysid::Signal::new(u.dt, tf_simulate(&t, &u.values, u.dt).unwrap()).unwrap();
        let noisy = add_white_noise(&y, 0.01 * y.full_scale(), 7).unwrap();
        let r = fit_second_order(&u.values, &noisy.values, u.dt).unwrap();
        assert!(rel(r.tf.b0, t.b0) < 0.05 && rel(r.tf.a1, t.a1) < 0.05 && rel(r.tf.a0, t.a0) < 0.05, "{r:?}");
    }

    #[test]
    fn identity_data_does_not_crash() {
        let u = chirp_generate(&ChirpSpec::DEFAULT).unwrap();
        let r = fit_second_order(&u.values, &u.values, u.dt).unwrap();
        assert!(r.residual_rms.is_finite() && r.fit_percent <= 100.0, "{r:?}");
    }

    #[test]
    fn short_input_rejected() {
        assert!(matches!(
            fit_second_order(&[0.0; 10], &[0.0; 10], 1e-3),
            Err(Error::InsufficientData { .. })
        ));
    }
}

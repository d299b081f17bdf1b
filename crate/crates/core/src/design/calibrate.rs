use super::pipeline::{synthesize_design, torque_nrmse, AnkleDesign, DesignInputs};
use crate::error::{Error, Result};
use crate::gait::GaitProfile;
use crate::mech::DfGeometry;
use crate::search::par_argmin_by;

/// Number of coordinate-descent restarts.
pub const RESTARTS: usize = 8;
/// Initial step as a fraction of each parameter range.
const INITIAL_STEP: f64 = 0.1;
/// Stop when every step is below this fraction of its range.
const STEP_TOL: f64 = 1e-4;
const MAX_EVALS_PER_RESTART: usize = 600;

/// Order of the calibrated parameters.
pub const PARAM_NAMES: [&str; 5] = ["m_len", "l_m", "theta_in", "arc_radius", "free_length"];

/// Box bounds on `(m_len, l_m, theta_in, arc_radius, free_length)`, SI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationBounds {
    pub lo: [f64; 5],
    pub hi: [f64; 5],
}

impl CalibrationBounds {
    pub fn validate(&self) -> Result<()> {
        for i in 0..5 {
            if !(self.lo[i].is_finite() && self.hi[i].is_finite() && self.lo[i] <= self.hi[i]) {
                return Err(Error::Config(format!(
                    "bounds for {}: [{}, {}] are not an interval",
                    PARAM_NAMES[i], self.lo[i], self.hi[i]
                )));
            }
        }
        Ok(())
    }

    /// A single point.
    pub fn point(x: [f64; 5]) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn center(&self) -> [f64; 5] {
        std::array::from_fn(|i| 0.5 * (self.lo[i] + self.hi[i]))
    }

    fn clamp(&self, x: [f64; 5]) -> [f64; 5] {
        std::array::from_fn(|i| x[i].clamp(self.lo[i], self.hi[i]))
    }

    /// Fixed restart points: `start`, then Halton points in the box.
    fn restarts(&self, start: [f64; 5]) -> Vec<[f64; 5]> {
        const BASES: [u32; 5] = [2, 3, 5, 7, 11];
        let mut pts = vec![self.clamp(start)];
        for k in 1..RESTARTS as u32 {
            pts.push(std::array::from_fn(|i| {
                self.lo[i] + radical_inverse(k, BASES[i]) * (self.hi[i] - self.lo[i])
            }));
        }
        pts
    }
}

fn radical_inverse(mut k: u32, base: u32) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while k > 0 {
        f /= base as f64;
        r += f * (k % base) as f64;
        k /= base;
    }
    r
}

pub fn geometry_from_params(x: &[f64; 5]) -> DfGeometry {
    DfGeometry::partial(x[0], x[1], x[2], x[3], x[4])
}

pub fn params_of(g: &DfGeometry) -> [f64; 5] {
    [g.m_len, g.l_m, g.theta_in, g.arc_radius, g.free_length]
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationResult {
    pub design: AnkleDesign,
    /// Torque NRMSE at the optimum, percent.
    pub residual: f64,
    pub params: [f64; 5],
    pub evaluations: usize,
}

/// Coordinate-descent search for the geometry whose design best reproduces
/// the natural torque.
///
/// `inputs.geometry` supplies the first restart point; seven more come from
/// a fixed Halton sequence over the box. Each evaluation reruns the full
/// design pipeline, so springs and the EES rate are refitted every step
/// unless pinned in `inputs`.
pub fn calibrate_geometry(
    profile: &GaitProfile,
    bounds: &CalibrationBounds,
    inputs: &DesignInputs,
) -> Result<CalibrationResult> {
    bounds.validate()?;
    let objective = |x: &[f64; 5]| -> f64 {
        let mut inp = inputs.clone();
        inp.geometry = geometry_from_params(x);
        synthesize_design(profile, &inp)
            .and_then(|d| d.simulate(profile, &inputs.schedule))
            .and_then(|t| torque_nrmse(&t))
            .unwrap_or(f64::INFINITY)
    };
    let starts = bounds.restarts(params_of(&inputs.geometry));
    let (_, residual, (params, evaluations)) = par_argmin_by(&starts, inputs.seed, |x0| {
        let (x, v, n) = coordinate_descent(&objective, bounds, *x0);
        (v, (x, n))
    })
    .expect("restarts are non-empty");
    if !residual.is_finite() {
        return Err(Error::Calibration {
            reason: "no feasible geometry inside the bounds".into(),
            residual,
        });
    }
    let mut inp = inputs.clone();
    inp.geometry = geometry_from_params(&params);
    let design = synthesize_design(profile, &inp)?;
    Ok(CalibrationResult { design, residual, params, evaluations })
}

fn coordinate_descent(
    f: &dyn Fn(&[f64; 5]) -> f64,
    bounds: &CalibrationBounds,
    x0: [f64; 5],
) -> ([f64; 5], f64, usize) {
    let range: [f64; 5] = std::array::from_fn(|i| bounds.hi[i] - bounds.lo[i]);
    let mut step: [f64; 5] = std::array::from_fn(|i| INITIAL_STEP * range[i]);
    let mut x = x0;
    let mut fx = f(&x);
    let mut evals = 1;
    while evals < MAX_EVALS_PER_RESTART {
        if (0..5).all(|i| step[i] <= STEP_TOL * range[i]) {
            break;
        }
        let mut improved = false;
        for i in 0..5 {
            if step[i] <= STEP_TOL * range[i] {
                continue;
            }
            for dir in [1.0, -1.0] {
                let mut y = x;
                y[i] = (x[i] + dir * step[i]).clamp(bounds.lo[i], bounds.hi[i]);
                if y[i] == x[i] {
                    continue;
                }
                let fy = f(&y);
                evals += 1;
                if fy < fx {
                    x = y;
                    fx = fy;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            for s in &mut step {
                *s *= 0.5;
            }
        }
    }
    (x, fx, evals)
}

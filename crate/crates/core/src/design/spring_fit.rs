use super::curve::ForceDeflectionCurve;
use crate::error::{Error, Result};
use crate::gait::golden_min;
use crate::mech::ParallelSpringPair;
use crate::search::par_argmin_by;

/// Engagement-offset candidates across the deflection range.
pub const OFFSET_CANDIDATES: usize = 200;
/// Solid height of a fitted pair relative to the largest fitted deflection.
pub const SOLID_MARGIN: f64 = 1.25;
/// Minimum points for a fit.
pub const MIN_FIT_POINTS: usize = 5;

#[derive(Debug, Clone, Copy)]
struct LinearFit {
    k1: f64,
    k2: f64,
    sse: f64,
}

/// Closed-form least squares for `(k1, k2)` at a fixed engagement offset.
fn solve_at(points: &[(f64, f64)], e: f64) -> LinearFit {
    let (mut suu, mut suv, mut svv, mut suf, mut svf) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x, f) in points {
        let v = (x - e).max(0.0);
        suu += x * x;
        suv += x * v;
        svv += v * v;
        suf += x * f;
        svf += v * f;
    }
    let det = suu * svv - suv * suv;
    let (k1, k2) = if svv == 0.0 || det <= 1e-12 * suu * svv {
        (suf / suu, 0.0)
    } else {
        ((svv * suf - suv * svf) / det, (suu * svf - suv * suf) / det)
    };
    let sse = points
        .iter()
        .map(|&(x, f)| (k1 * x + k2 * (x - e).max(0.0) - f).powi(2))
        .sum();
    LinearFit { k1, k2, sse }
}

fn admissible(fit: &LinearFit) -> f64 {
    if fit.k1 >= 0.0 && fit.k2 >= 0.0 {
        fit.sse
    } else {
        f64::INFINITY
    }
}

/// Least-squares two-spring fit with seed 0 for candidate ordering.
pub fn fit_parallel_springs(curve: &ForceDeflectionCurve) -> Result<ParallelSpringPair> {
    fit_parallel_springs_seeded(curve, 0)
}

/// Least-squares fit of `(k1, k2, engagement_offset)`.
///
/// Grid search over 200 offsets in `[0, x_max]` with closed-form stiffnesses
/// at each, then golden-section refinement between the winner's neighbours.
/// Candidates with a negative stiffness are discarded. `seed` only changes
/// the evaluation order.
pub fn fit_parallel_springs_seeded(curve: &ForceDeflectionCurve, seed: u64) -> Result<ParallelSpringPair> {
    let pts = &curve.points;
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData { needed: MIN_FIT_POINTS, got: pts.len() });
    }
    let x_max = curve.max_deflection();
    let step = x_max / (OFFSET_CANDIDATES - 1) as f64;
    let offsets: Vec<f64> = (0..OFFSET_CANDIDATES)
        .map(|j| if j == OFFSET_CANDIDATES - 1 { x_max } else { j as f64 * step })
        .collect();
    let (j, best_sse, grid_fit) = par_argmin_by(&offsets, seed, |&e| {
        let f = solve_at(pts, e);
        (admissible(&f), f)
    })
    .expect("non-empty grid");
    if !best_sse.is_finite() {
        let raw = offsets
            .iter()
            .map(|&e| (e, solve_at(pts, e)))
            .min_by(|a, b| a.1.sse.total_cmp(&b.1.sse))
            .expect("non-empty grid");
        return Err(Error::Fit(format!(
            "every candidate has a negative stiffness; best unconstrained k1 = {:.4e}, k2 = {:.4e} \
             N/m at offset {:.4e} m",
            raw.1.k1, raw.1.k2, raw.0
        )));
    }
    let lo = offsets[j.saturating_sub(1)];
    let hi = offsets[(j + 1).min(offsets.len() - 1)];
    let e_ref = golden_min(&|e| admissible(&solve_at(pts, e)), lo, hi);
    let refined = solve_at(pts, e_ref);
    let (e, fit) = if admissible(&refined) <= best_sse {
        (e_ref, refined)
    } else {
        (offsets[j], grid_fit)
    };
    ParallelSpringPair::new(fit.k1.max(0.0), fit.k2.max(0.0), e, x_max * SOLID_MARGIN)
}

/// Fit residual as a percentage of the largest data force.
pub fn fit_nrmse_percent(curve: &ForceDeflectionCurve, pair: &ParallelSpringPair) -> f64 {
    let n = curve.points.len() as f64;
    let sse: f64 = curve
        .points
        .iter()
        .map(|&(x, f)| (pair.force_unchecked(x) - f).powi(2))
        .sum();
    let scale = curve.points.iter().fold(0.0_f64, |m, p| m.max(p.1));
    100.0 * (sse / n).sqrt() / scale
}

//! Deterministic parallel candidate evaluation.
//!
//! Candidates are visited in a seed-dependent order across the rayon pool,
//! but the winner is always the lowest value with ties going to the lowest
//! index, so the seed never changes the result.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Evaluates `f` on every candidate and returns `(index, value)` of the
/// minimum. NaN counts as +∞. `None` only for an empty slice.
pub fn par_argmin<T, F>(candidates: &[T], seed: u64, f: F) -> Option<(usize, f64)>
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync,
{
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut scored: Vec<(usize, f64)> = order
        .par_iter()
        .map(|&i| {
            let v = f(&candidates[i]);
            (i, if v.is_nan() { f64::INFINITY } else { v })
        })
        .collect();
    scored.sort_unstable_by_key(|&(i, _)| i);
    scored
        .into_iter()
        .reduce(|best, c| if c.1 < best.1 { c } else { best })
}

/// Same as [`par_argmin`] for candidates that produce a payload.
pub fn par_argmin_by<T, R, F>(candidates: &[T], seed: u64, f: F) -> Option<(usize, f64, R)>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> (f64, R) + Sync,
{
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut scored: Vec<(usize, f64, R)> = order
        .par_iter()
        .map(|&i| {
            let (v, r) = f(&candidates[i]);
            (i, if v.is_nan() { f64::INFINITY } else { v }, r)
        })
        .collect();
    scored.sort_unstable_by_key(|c| c.0);
    scored
        .into_iter()
        .reduce(|best, c| if c.1 < best.1 { c } else { best })
}

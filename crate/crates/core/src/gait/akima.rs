use crate::error::{Error, Result};

/// Minimum number of knots.
pub const MIN_KNOTS: usize = 5;

/// Akima (1970) piecewise-cubic interpolant.
///
/// Each knot slope is a weighted mean of the neighbouring secant slopes, so a
/// segment only depends on the two knots either side of it.
#[derive(Debug, Clone, PartialEq)]
pub struct AkimaSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Knot derivatives.
    ts: Vec<f64>,
}

impl AkimaSpline {
    pub fn new(xs: &[f64], ys: &[f64]) -> Result<Self> {
        let n = xs.len();
        if ys.len() != n {
            return Err(Error::Grid(format!("{} x values but {} y values", n, ys.len())));
        }
        if n < MIN_KNOTS {
            return Err(Error::InsufficientData { needed: MIN_KNOTS, got: n });
        }
        for i in 1..n {
            if !(xs[i] > xs[i - 1]) {
                return Err(Error::Grid(format!("knot {i}: x = {} does not increase", xs[i])));
            }
        }
        if xs.iter().chain(ys).any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite knot".into()));
        }
        // Secants padded with two extrapolated slopes at each end.
        let mut m = vec![0.0; n + 3];
        for i in 0..n - 1 {
            m[i + 2] = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
        }
        m[1] = 2.0 * m[2] - m[3];
        m[0] = 2.0 * m[1] - m[2];
        m[n + 1] = 2.0 * m[n] - m[n - 1];
        m[n + 2] = 2.0 * m[n + 1] - m[n];

        let ts = (0..n)
            .map(|i| {
                let (m0, m1, m2, m3) = (m[i], m[i + 1], m[i + 2], m[i + 3]);
                let w1 = (m3 - m2).abs();
                let w2 = (m1 - m0).abs();
                if w1 + w2 == 0.0 {
                    0.5 * (m1 + m2)
                } else {
                    (w1 * m1 + w2 * m2) / (w1 + w2)
                }
            })
            .collect();
        Ok(Self { xs: xs.to_vec(), ys: ys.to_vec(), ts })
    }

    /// Builds from `(x, y)` pairs.
    pub fn from_knots(knots: &[(f64, f64)]) -> Result<Self> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = knots.iter().copied().unzip();
        Self::new(&xs, &ys)
    }

    pub fn x_min(&self) -> f64 {
        self.xs[0]
    }

    pub fn x_max(&self) -> f64 {
        self.xs[self.xs.len() - 1]
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    fn segment(&self, x: f64) -> Result<usize> {
        if !(x >= self.x_min() && x <= self.x_max()) {
            return Err(Error::Range { value: x, min: self.x_min(), max: self.x_max() });
        }
        let i = self.xs.partition_point(|&k| k <= x);
        Ok(i.saturating_sub(1).min(self.xs.len() - 2))
    }

    /// Cubic coefficients of segment `i` in powers of `x − x_i`.
    fn coeffs(&self, i: usize) -> [f64; 4] {
        let h = self.xs[i + 1] - self.xs[i];
        let m = (self.ys[i + 1] - self.ys[i]) / h;
        let (t0, t1) = (self.ts[i], self.ts[i + 1]);
        [self.ys[i], t0, (3.0 * m - 2.0 * t0 - t1) / h, (t0 + t1 - 2.0 * m) / (h * h)]
    }

    fn eval_segment(&self, i: usize, x: f64) -> f64 {
        let [a, b, c, d] = self.coeffs(i);
        let u = x - self.xs[i];
        a + u * (b + u * (c + u * d))
    }

    fn deriv_segment(&self, i: usize, x: f64) -> f64 {
        let [_, b, c, d] = self.coeffs(i);
        let u = x - self.xs[i];
        b + u * (2.0 * c + u * 3.0 * d)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let i = self.segment(x)?;
        if x == self.x_max() {
            return Ok(self.ys[self.ys.len() - 1]);
        }
        Ok(self.eval_segment(i, x))
    }

    /// First derivative, taken analytically from the segment cubic.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        let i = self.segment(x)?;
        Ok(self.deriv_segment(i, x))
    }

    /// Derivative of the segment to the left of `x` (at a knot, the limit
    /// from below).
    pub fn derivative_from_left(&self, x: f64) -> Result<f64> {
        let mut i = self.segment(x)?;
        if i > 0 && x == self.xs[i] {
            i -= 1;
        }
        Ok(self.deriv_segment(i, x))
    }
}

/// Builds an Akima spline through `knots`.
pub fn akima_build(knots: &[(f64, f64)]) -> Result<AkimaSpline> {
    AkimaSpline::from_knots(knots)
}

/// Evaluates `spline` at `x`; no extrapolation.
pub fn akima_eval(spline: &AkimaSpline, x: f64) -> Result<f64> {
    spline.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_computed_weights() {
        // Secants 0, 0, 1, 1. At x = 2 both weights vanish, so t = (0 + 1)/2;
        // at x = 3 the weights give t = 1. Hermite at the segment midpoint:
        // 0.125·0.5 + 0.5·1 − 0.125·1 = 0.4375.
        let s = akima_build(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 1.0), (4.0, 2.0)]).unwrap();
        assert!((akima_eval(&s, 2.5).unwrap() - 0.4375).abs() < 1e-15);
    }

    #[test]
    fn reproduces_a_line() {
        let knots: Vec<_> = (0..8).map(|i| (i as f64 * 0.7, 3.0 - 2.0 * i as f64 * 0.7)).collect();
        let s = akima_build(&knots).unwrap();
        for k in 0..=100 {
            let x = s.x_max() * k as f64 / 100.0;
            assert!((s.eval(x).unwrap() - (3.0 - 2.0 * x)).abs() < 1e-12);
            assert!((s.derivative(x).unwrap() + 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(
            akima_build(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]),
            Err(Error::InsufficientData { needed: 5, got: 4 })
        ));
        let s = akima_build(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0), (3.0, 1.0), (4.0, 0.0)]).unwrap();
        assert!(matches!(s.eval(4.0001), Err(Error::Range { .. })));
        assert!(matches!(s.eval(-1e-9), Err(Error::Range { .. })));
        assert!(akima_build(&[(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (3.0, 1.0), (4.0, 0.0)]).is_err());
    }
}

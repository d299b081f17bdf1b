use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sagittal-plane vector: x toward the toe, y up.
///
/// Used for positions (m) and forces (N) alike.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanarVector {
    pub x: f64,
    pub y: f64,
}

impl PlanarVector {
    pub const ZERO: PlanarVector = PlanarVector { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Checked constructor; rejects NaN and infinities.
    pub fn try_new(x: f64, y: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() {
            Ok(Self { x, y })
        } else {
            Err(Error::Domain(format!("non-finite vector ({x}, {y})")))
        }
    }

    pub fn polar(r: f64, angle: f64) -> Self {
        Self::new(r * angle.cos(), r * angle.sin())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3-D cross product `self × o`.
    pub fn cross(self, o: Self) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Unit vector, or `None` for the zero vector.
    pub fn unit(self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| self * (1.0 / n))
    }

    /// Counter-clockwise rotation by `angle` rad.
    pub fn rotate(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn distance(self, o: Self) -> f64 {
        (self - o).norm()
    }
}

impl Add for PlanarVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for PlanarVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for PlanarVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

impl Mul<f64> for PlanarVector {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_is_antisymmetric() {
        let a = PlanarVector::new(1.5, -2.0);
        let b = PlanarVector::new(0.3, 4.0);
        assert_eq!(a.cross(b), -b.cross(a));
        assert_eq!(a.cross(a), 0.0);
    }

    #[test]
    fn rotation_by_quarter_turn() {
        let v = PlanarVector::new(1.0, 0.0).rotate(std::f64::consts::FRAC_PI_2);
        assert!(v.x.abs() < 1e-15 && (v.y - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_nan() {
        assert!(PlanarVector::try_new(f64::NAN, 0.0).is_err());
        assert!(PlanarVector::try_new(0.0, f64::INFINITY).is_err());
    }
}

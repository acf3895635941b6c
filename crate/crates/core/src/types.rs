//! Small domain types shared by every module.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimension `n` of the self-shrinking hypersurface in `R^{n+1}`.
///
/// Always at least 2; the profile-curve reduction degenerates for `n = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Dimension(u64);

impl Dimension {
    pub fn new(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        Ok(Dimension(n))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    /// `n - 1`, the exponent of `r` in the length element.
    #[inline]
    pub fn minus_one(self) -> f64 {
        (self.0 - 1) as f64
    }

    /// Radius `sqrt(2(n-1))` of the shrinking cylinder.
    ///
    /// Every code path that needs the cylinder radius goes through here, so a
    /// start at exactly this value stays on the cylinder in floating point.
    #[inline]
    pub fn cylinder_radius(self) -> f64 {
        (2.0 * self.minus_one()).sqrt()
    }

    /// Radius `sqrt(2n)` of the shrinking sphere.
    #[inline]
    pub fn sphere_radius(self) -> f64 {
        (2.0 * self.as_f64()).sqrt()
    }
}

impl TryFrom<u64> for Dimension {
    type Error = Error;

    fn try_from(n: u64) -> Result<Self> {
        Dimension::new(n)
    }
}

impl From<Dimension> for u64 {
    fn from(n: Dimension) -> u64 {
        n.0
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A point `(x, r)` of the open upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    x: f64,
    r: f64,
}

impl ProfilePoint {
    pub fn new(x: f64, r: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::domain("x", x));
        }
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::domain("r", r));
        }
        Ok(ProfilePoint { x, r })
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.x
    }

    #[inline]
    pub fn r(&self) -> f64 {
        self.r
    }
}

/// Position plus Euclidean tangent angle of a profile geodesic.
///
/// `theta` is kept unwrapped along a trajectory; it is never reduced mod 2π.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicState {
    pub x: f64,
    pub r: f64,
    pub theta: f64,
}

impl GeodesicState {
    pub fn new(x: f64, r: f64, theta: f64) -> Self {
        GeodesicState { x, r, theta }
    }

    pub fn point(&self) -> Result<ProfilePoint> {
        ProfilePoint::new(self.x, self.r)
    }

    pub(crate) fn check(&self) -> Result<()> {
        if !self.theta.is_finite() {
            return Err(Error::domain("theta", self.theta));
        }
        self.point().map(|_| ())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_rejects_small_values() {
        assert_eq!(Dimension::new(1), Err(Error::InvalidDimension(1)));
        assert_eq!(Dimension::new(0), Err(Error::InvalidDimension(0)));
        assert_eq!(Dimension::new(2).unwrap().get(), 2);
    }

    #[test]
    fn special_radii() {
        let n = Dimension::new(2).unwrap();
        assert_eq!(n.cylinder_radius(), 2f64.sqrt());
        assert_eq!(n.sphere_radius(), 2.0);
        assert_eq!(Dimension::new(3).unwrap().cylinder_radius(), 2.0);
    }

    #[test]
    fn profile_point_domain() {
        assert!(ProfilePoint::new(0.0, 0.0).is_err());
        assert!(ProfilePoint::new(0.0, -1.0).is_err());
        assert!(ProfilePoint::new(0.0, f64::NAN).is_err());
        assert!(ProfilePoint::new(f64::INFINITY, 1.0).is_err());
        assert!(ProfilePoint::new(-3.0, 1e-300).is_ok());
    }

    #[test]
    fn dimension_serde_validates() {
        let n: Dimension = serde_json::from_str("3").unwrap();
        assert_eq!(n.get(), 3);
        assert!(serde_json::from_str::<Dimension>("1").is_err());
    }
}

//! Closed-form quantities of the Angenent metric
//! `g = r^{2(n-1)} exp(-(x^2 + r^2)/2) (dx^2 + dr^2)` on the upper half-plane.
//!
//! Profile curves are oriented by their Euclidean tangent angle `theta`, and
//! the hypersurface normal is `nu = (sin theta, -cos theta * omega)` with
//! `omega` the unit vector of the rotated fibre. With this convention the
//! mean curvature of a surface of revolution is
//! `H = theta' - (n-1) cos(theta) / r` and the support function is
//! `<p, nu> = x sin(theta) - r cos(theta)`; the sphere traversed
//! counter-clockwise gets the outward normal and `H = n / sqrt(2n) > 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Dimension, GeodesicState, ProfilePoint};

/// Minimum of the Gauss curvature over the half-plane, attained at
/// `x = 0, r^2 = y_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureMinimum {
    pub y_n: f64,
    /// Underflows to zero for `n` beyond ~170; use `ln_kappa_n` there.
    pub kappa_n: f64,
    pub ln_kappa_n: f64,
}

/// `ln` of the conformal factor. Finite for every point of the half-plane.
pub fn ln_conformal_factor(n: Dimension, p: ProfilePoint) -> f64 {
    let (x, r) = (p.x(), p.r());
    2.0 * n.minus_one() * r.ln() - 0.5 * (x * x + r * r)
}

/// `r^{2(n-1)} exp(-(x^2 + r^2)/2)`, evaluated in log space so that large `n`
/// or large `|x|, r` underflow to zero rather than producing NaN.
pub fn conformal_factor(n: Dimension, p: ProfilePoint) -> f64 {
    ln_conformal_factor(n, p).exp()
}

/// Line element `r^{n-1} exp(-(x^2 + r^2)/4)`; the square root of the
/// conformal factor.
pub fn length_element(n: Dimension, p: ProfilePoint) -> f64 {
    (0.5 * ln_conformal_factor(n, p)).exp()
}

pub fn ln_gauss_curvature(n: Dimension, p: ProfilePoint) -> f64 {
    let (x, r) = (p.x(), p.r());
    (r * r + n.minus_one()).ln() - 2.0 * n.as_f64() * r.ln() + 0.5 * (x * x + r * r)
}

/// Gauss curvature `(r^2 + n - 1) / r^{2n} * exp((x^2 + r^2)/2)`.
pub fn gauss_curvature(n: Dimension, p: ProfilePoint) -> f64 {
    ln_gauss_curvature(n, p).exp()
}

/// Minimiser `y_n = (n-1 + sqrt(9(n-1)^2 + 8(n-1)))/2` of `r^2 -> K(0, r)`
/// and the minimum value `kappa_n = (y_n + n - 1) / y_n^n * exp(y_n / 2)`.
pub fn kappa_min(n: Dimension) -> CurvatureMinimum {
    let m = n.minus_one();
    let y_n = 0.5 * (m + (9.0 * m * m + 8.0 * m).sqrt());
    let ln_kappa_n = (y_n + m).ln() - n.as_f64() * y_n.ln() + 0.5 * y_n;
    CurvatureMinimum {
        y_n,
        kappa_n: ln_kappa_n.exp(),
        ln_kappa_n,
    }
}

/// Bracket `(n-1)/r - r/2` written as `(c - r)(c + r) / (2r)` with
/// `c = sqrt(2(n-1))`, so it vanishes exactly on the cylinder radius.
#[inline]
pub(crate) fn radial_balance(n: Dimension, r: f64) -> f64 {
    let c = n.cylinder_radius();
    (c - r) * (c + r) / (2.0 * r)
}

/// Right-hand side of the unit-speed geodesic equations
///
/// ```text
/// x' = cos(theta),  r' = sin(theta),
/// theta' = (x/2) sin(theta) + ((n-1)/r - r/2) cos(theta).
/// ```
pub fn geodesic_rhs(n: Dimension, s: &GeodesicState) -> Result<[f64; 3]> {
    s.check()?;
    let (sin, cos) = s.theta.sin_cos();
    Ok([cos, sin, 0.5 * s.x * sin + radial_balance(n, s.r) * cos])
}

/// Residual `H - <p, nu>/2` of the shrinker equation for the surface of
/// revolution generated by the curve through `s` with turning rate
/// `theta_prime`. Zero exactly on solutions of the geodesic equations.
pub fn shrinker_residual(n: Dimension, s: &GeodesicState, theta_prime: f64) -> Result<f64> {
    s.check()?;
    if !theta_prime.is_finite() {
        return Err(Error::domain("theta_prime", theta_prime));
    }
    let (sin, cos) = s.theta.sin_cos();
    let mean_curvature = theta_prime - n.minus_one() * cos / s.r;
    let support = s.x * sin - s.r * cos;
    Ok(mean_curvature - 0.5 * support)
}

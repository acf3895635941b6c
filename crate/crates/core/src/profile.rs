//! Profile curves as integration domains.
//!
//! Integrals over a hypersurface of revolution reduce to arc-length integrals
//! over its profile curve. [`Profile`] is implemented by integrated geodesic
//! paths and by the exact solutions (lines and circles).

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::quadrature::adaptive_gauss;
use crate::types::Dimension;

/// Disc of the given radius centred on the axis point `(x0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub x0: f64,
    pub radius: f64,
}

impl Window {
    #[inline]
    pub fn distance(&self, x: f64, r: f64) -> f64 {
        (x - self.x0).hypot(r)
    }

    #[inline]
    pub fn contains(&self, x: f64, r: f64) -> bool {
        self.distance(x, r) <= self.radius
    }
}

pub trait Profile {
    /// `∫ f(x, r) ds` over the part of the curve inside `window`, using the
    /// curve's native parametrisation and Gauss–Legendre panels.
    fn arc_integral(&self, f: &mut dyn FnMut(f64, f64) -> f64, window: Window) -> f64;

    /// Arc-length intervals of the curve lying inside `window`.
    fn arc_intervals(&self, window: Window) -> Vec<(f64, f64)>;

    /// Point `(x, r)` at arc length `s`.
    fn point_at(&self, s: f64) -> (f64, f64);

    /// Largest distance of the curve from `(x0, 0)`; `None` if unbounded.
    fn max_distance(&self, x0: f64) -> Option<f64>;

    /// Natural log of an upper bound for
    /// `∫ r^{n-1} exp(-((x-x0)^2 + r^2)/(4 t0)) ds` over the part of the
    /// curve outside `window`.
    fn ln_gaussian_tail(&self, n: Dimension, window: Window, t0: f64) -> f64;

    /// Window used for Angenent lengths: the whole curve if bounded,
    /// otherwise a disc beyond which the length element is negligible.
    fn length_window(&self, n: Dimension) -> Window {
        let radius = match self.max_distance(0.0) {
            Some(d) => d * (1.0 + 1e-12) + 1e-12,
            None => 40.0 + 2.0 * n.sphere_radius(),
        };
        Window { x0: 0.0, radius }
    }
}

/// `ln sup_{rho >= t} rho^m exp(-rho^2 / (4 t0))`.
pub(crate) fn ln_shell_sup(m: f64, t0: f64, t: f64) -> f64 {
    let peak2 = 2.0 * m * t0;
    if t * t >= peak2 {
        m * t.ln() - t * t / (4.0 * t0)
    } else {
        0.5 * m * peak2.ln() - 0.5 * m
    }
}

/// Exact rotationally symmetric shrinker profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AnalyticProfile {
    /// The part with `r > 0` of the line through `(x, r)` with direction
    /// `angle`; arc length is measured from `(x, r)`.
    Line { x: f64, r: f64, angle: f64 },
    /// Upper half of the circle of the given radius centred at
    /// `(center_x, 0)`, traversed counter-clockwise from the right end.
    Circle { center_x: f64, radius: f64 },
}

/// Panel length for pre-splitting unbounded integrals.
const PANEL: f64 = 1.0;

fn integrate_panels<F: FnMut(f64) -> f64>(mut g: F, a: f64, b: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let pieces = ((b - a) / PANEL).ceil().clamp(1.0, 1e5) as usize;
    let w = (b - a) / pieces as f64;
    let mut sum = 0.0;
    for i in 0..pieces {
        let lo = a + w * i as f64;
        let hi = if i + 1 == pieces { b } else { lo + w };
        let rough = crate::quadrature::gl7().integrate(&mut g, lo, hi);
        let tol = 1e-15 * rough.abs().max(f64::MIN_POSITIVE);
        sum += adaptive_gauss(&mut g, lo, hi, tol);
    }
    sum
}

impl AnalyticProfile {
    /// Vertical line through the origin (the plane).
    pub fn plane() -> Self {
        AnalyticProfile::Line {
            x: 0.0,
            r: 1.0,
            angle: FRAC_PI_2,
        }
    }

    /// Horizontal line at the cylinder radius.
    pub fn cylinder(n: Dimension) -> Self {
        AnalyticProfile::Line {
            x: 0.0,
            r: n.cylinder_radius(),
            angle: 0.0,
        }
    }

    /// Semicircle of the sphere radius.
    pub fn sphere(n: Dimension) -> Self {
        AnalyticProfile::Circle {
            center_x: 0.0,
            radius: n.sphere_radius(),
        }
    }

    /// Arc-length domain of the curve.
    fn domain(&self) -> (f64, f64) {
        match *self {
            AnalyticProfile::Line { r, angle, .. } => {
                let sin = angle.sin();
                if sin.abs() < 1e-15 {
                    (f64::NEG_INFINITY, f64::INFINITY)
                } else if sin > 0.0 {
                    (-r / sin, f64::INFINITY)
                } else {
                    (f64::NEG_INFINITY, -r / sin)
                }
            }
            AnalyticProfile::Circle { radius, .. } => (0.0, PI * radius),
        }
    }

    fn window_interval(&self, w: Window) -> Option<(f64, f64)> {
        let (lo, hi) = self.domain();
        let (a, b) = match *self {
            AnalyticProfile::Line { x, r, angle } => {
                let (sin, cos) = angle.sin_cos();
                let dx = x - w.x0;
                let b = dx * cos + r * sin;
                let c = dx * dx + r * r - w.radius * w.radius;
                let disc = b * b - c;
                if disc < 0.0 {
                    return None;
                }
                let sq = disc.sqrt();
                (-b - sq, -b + sq)
            }
            AnalyticProfile::Circle { center_x, radius } => {
                let d = center_x - w.x0;
                // distance^2 = d^2 + rho^2 + 2 rho d cos(phi)
                let base = d * d + radius * radius;
                let t2 = w.radius * w.radius;
                if d == 0.0 {
                    if base <= t2 {
                        (0.0, PI * radius)
                    } else {
                        return None;
                    }
                } else {
                    let c = ((t2 - base) / (2.0 * radius * d)).clamp(-1.0, 1.0);
                    let phi = c.acos();
                    if d > 0.0 {
                        // distance decreases with phi
                        (phi * radius, PI * radius)
                    } else {
                        (0.0, phi * radius)
                    }
                }
            }
        };
        let (a, b) = (a.max(lo), b.min(hi));
        (a < b).then_some((a, b))
    }
}

impl Profile for AnalyticProfile {
    fn arc_integral(&self, f: &mut dyn FnMut(f64, f64) -> f64, window: Window) -> f64 {
        let Some((a, b)) = self.window_interval(window) else {
            return 0.0;
        };
        let this = *self;
        integrate_panels(
            |s| {
                let (x, r) = this.point_at(s);
                if r > 0.0 {
                    f(x, r)
                } else {
                    0.0
                }
            },
            a,
            b,
        )
    }

    fn arc_intervals(&self, window: Window) -> Vec<(f64, f64)> {
        self.window_interval(window).into_iter().collect()
    }

    fn point_at(&self, s: f64) -> (f64, f64) {
        match *self {
            AnalyticProfile::Line { x, r, angle } => {
                let (sin, cos) = angle.sin_cos();
                (x + s * cos, r + s * sin)
            }
            AnalyticProfile::Circle { center_x, radius } => {
                let (sin, cos) = (s / radius).sin_cos();
                (center_x + radius * cos, radius * sin)
            }
        }
    }

    fn max_distance(&self, x0: f64) -> Option<f64> {
        match *self {
            AnalyticProfile::Line { .. } => None,
            AnalyticProfile::Circle { center_x, radius } => Some((center_x - x0).abs() + radius),
        }
    }

    fn ln_gaussian_tail(&self, n: Dimension, window: Window, t0: f64) -> f64 {
        let m = n.minus_one();
        match *self {
            AnalyticProfile::Circle { radius, .. } => {
                let inside: f64 = self.arc_intervals(window).iter().map(|(a, b)| b - a).sum();
                let outside = PI * radius - inside;
                if outside <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                outside.ln() + ln_shell_sup(m, t0, window.radius)
            }
            AnalyticProfile::Line { x, r, angle } => {
                let (sin, cos) = angle.sin_cos();
                let dx = x - window.x0;
                // perpendicular distance from the centre
                let d = (dx * sin - r * cos).abs();
                let Some((a, b)) = self.window_interval(window) else {
                    return f64::INFINITY;
                };
                let (lo, hi) = self.domain();
                let open = usize::from(a > lo) + usize::from(b < hi);
                if open == 0 {
                    return f64::NEG_INFINITY;
                }
                // g(u) = (u^2 + d^2)^{m/2} exp(-(u^2 + d^2)/(4 t0)) is log-concave
                // for u >= d, so its tail is bounded by g(u*) / |(ln g)'(u*)|.
                let u = (window.radius * window.radius - d * d).max(0.0).sqrt();
                let rho2 = u * u + d * d;
                let slope = m * u / rho2 - u / (2.0 * t0);
                if u < d || slope >= 0.0 {
                    return f64::INFINITY;
                }
                let ln_g = 0.5 * m * rho2.ln() - rho2 / (4.0 * t0);
                (open as f64).ln() + ln_g - (-slope).ln()
            }
        }
    }
}

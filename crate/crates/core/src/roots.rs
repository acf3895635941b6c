//! Bracketing helpers shared by the crossing refiner and the shooting scans.

use std::f64::consts::{PI, TAU};

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut w = theta.rem_euclid(TAU);
    if w > PI {
        w -= TAU;
    }
    w
}

/// `count` evenly spaced values covering `[a, b]` inclusive.
pub fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let step = (b - a) / (count - 1) as f64;
            (0..count)
                .map(|i| {
                    if i == count - 1 {
                        b
                    } else {
                        a + step * i as f64
                    }
                })
                .collect()
        }
    }
}

/// Opposite (or zero) signs.
#[inline]
pub(crate) fn brackets(fa: f64, fb: f64) -> bool {
    fa == 0.0 || fb == 0.0 || (fa < 0.0) != (fb < 0.0)
}

/// Plain bisection on a bracketing interval. Returns the midpoint of the final
/// interval once it is narrower than `xtol`, or an exact zero if one is hit.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> Option<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if !brackets(fa, fb) {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= xtol || m == a || m == b {
            return Some(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Some(m);
        }
        if brackets(fa, fm) {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    Some(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(-2.0 * PI)).abs() < 1e-15);
        assert!((wrap_angle(0.5) - 0.5).abs() < 1e-16);
        assert!((wrap_angle(TAU + 0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(0.5, 3.5, 4);
        assert_eq!(v, vec![0.5, 1.5, 2.5, 3.5]);
        assert_eq!(linspace(1.0, 2.0, 1), vec![1.0]);
    }

    #[test]
    fn bisection_linear_root() {
        let root = bisect(|s| s - 1.0, 0.5, 1.5, 1e-14).unwrap();
        assert!((root - 1.0).abs() < 1e-14);
        assert!(bisect(|s| s * s + 1.0, -1.0, 1.0, 1e-12).is_none());
    }
}

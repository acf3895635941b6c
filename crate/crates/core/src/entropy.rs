//! Gaussian entropy: sphere areas and entropies, the length–entropy
//! correspondence for profiles, direct F-functional quadrature and the
//! explicit upper bounds `E_n` with their two-sided estimates.
//!
//! Everything dimension dependent is computed in log space; `(4π)^{n/2}` and
//! `ω_{n-1}` overflow long before their ratio does.

use std::f64::consts::{E, PI};
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesic::angenent_length;
use crate::io::fmt_f64;
use crate::metric::kappa_min;
use crate::profile::{Profile, Window};
use crate::quadrature::adaptive_simpson;
use crate::special::ln_gamma_half;
use crate::types::Dimension;

const LN_2: f64 = std::f64::consts::LN_2;

/// `ln ω_m`, the log of the area of the unit sphere `S^m`.
pub fn ln_sphere_area(m: u64) -> f64 {
    LN_2 + 0.5 * (m + 1) as f64 * PI.ln() - ln_gamma_half(m + 1)
}

/// `ω_m = 2 π^{(m+1)/2} / Γ((m+1)/2)`.
pub fn sphere_area(m: u64) -> f64 {
    ln_sphere_area(m).exp()
}

pub fn ln_sphere_entropy(m: u64) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("sphere dimension", 0.0));
    }
    let mf = m as f64;
    Ok(0.5 * mf * (mf.ln() - (2.0 * PI).ln() - 1.0) + ln_sphere_area(m))
}

/// `λ(S^m) = (m / (2πe))^{m/2} ω_m`.
pub fn sphere_entropy(m: u64) -> Result<f64> {
    ln_sphere_entropy(m).map(f64::exp)
}

/// `ln((4π)^{-n/2} ω_{n-1})`.
fn ln_length_to_entropy(n: Dimension) -> f64 {
    -0.5 * n.as_f64() * (4.0 * PI).ln() + ln_sphere_area(n.get() - 1)
}

/// Entropy of the hypersurface generated by a closed or complete profile of
/// Angenent length `length_a`.
pub fn entropy_from_length(n: Dimension, length_a: f64) -> Result<f64> {
    if !(length_a >= 0.0) || !length_a.is_finite() {
        return Err(Error::domain("Angenent length", length_a));
    }
    if length_a == 0.0 {
        return Ok(0.0);
    }
    Ok((ln_length_to_entropy(n) + length_a.ln()).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FEstimate {
    pub value: f64,
    /// Bound on the contribution of the curve outside the truncation disc.
    pub tail_bound: f64,
}

/// `F_{x0,t0}` of the hypersurface generated by `profile`, for a centre
/// `(x0, 0)` on the rotation axis.
///
/// The integral runs over the part of the profile within distance
/// `truncation` of the centre (default `max(40 sqrt(t0), extent)`) by adaptive
/// Simpson in arc length, which shares no code path with
/// [`angenent_length`].
pub fn f_functional<P: Profile + ?Sized>(
    n: Dimension,
    profile: &P,
    x0: f64,
    t0: f64,
    truncation: Option<f64>,
) -> Result<FEstimate> {
    if !(t0 > 0.0) || !t0.is_finite() {
        return Err(Error::domain("t0", t0));
    }
    if !x0.is_finite() {
        return Err(Error::domain("x0", x0));
    }
    let radius = match truncation {
        Some(t) if t > 0.0 && t.is_finite() => t,
        Some(t) => return Err(Error::domain("truncation", t)),
        None => {
            let base = 40.0 * t0.sqrt();
            profile
                .max_distance(x0)
                .map_or(base, |d| base.max(d * (1.0 + 1e-12)))
        }
    };
    let window = Window { x0, radius };
    let m = n.minus_one();
    let ln_pref = -0.5 * n.as_f64() * (4.0 * PI * t0).ln() + ln_sphere_area(n.get() - 1);
    let integrand = |s: f64| {
        let (x, r) = profile.point_at(s);
        if r <= 0.0 {
            return 0.0;
        }
        let dx = x - x0;
        (ln_pref + m * r.ln() - (dx * dx + r * r) / (4.0 * t0)).exp()
    };
    let mut value = 0.0;
    for (a, b) in profile.arc_intervals(window) {
        value += adaptive_simpson(integrand, a, b, 1e-13);
    }
    let tail_bound = (ln_pref + profile.ln_gaussian_tail(n, window, t0)).exp();
    Ok(FEstimate { value, tail_bound })
}

/// `ln E_n`.
pub fn ln_entropy_bound(n: Dimension) -> f64 {
    (2.0 * PI).ln() + ln_length_to_entropy(n) - 0.5 * kappa_min(n).ln_kappa_n
}

/// `E_n = 2π ω_{n-1} / ((4π)^{n/2} sqrt(κ_n))`.
pub fn entropy_bound(n: Dimension) -> f64 {
    ln_entropy_bound(n).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sandwich {
    pub lower: f64,
    pub upper: f64,
}

/// Explicit two-sided estimate of `E_n`:
/// `sqrt(4π/3) e^{-1/(36(n-1))} < E_n <
///  sqrt(2π(3 + 1/(n-1)))/3 · e^{1/(162(n-1)^2)} · λ(S^{n-1})`.
pub fn bound_sandwich(n: Dimension) -> Sandwich {
    let m = n.minus_one();
    let lower = (4.0 * PI / 3.0).sqrt() * (-1.0 / (36.0 * m)).exp();
    let ln_upper = 0.5 * (2.0 * PI * (3.0 + 1.0 / m)).ln() - 3f64.ln()
        + 1.0 / (162.0 * m * m)
        + ln_sphere_entropy(n.get() - 1).expect("n >= 2");
    Sandwich {
        lower,
        upper: ln_upper.exp(),
    }
}

/// `a_n = y_n - 2(n-1)` without the cancellation of the direct difference.
pub fn a_n(n: Dimension) -> f64 {
    let m = n.minus_one();
    4.0 * m / ((9.0 * m * m + 8.0 * m).sqrt() + 3.0 * m)
}

/// `E_n` through the sphere-entropy form
/// `sqrt((2π/3)(1+x)/(1+2x/3)) (e^{-1}(1+x)^{1/x})^{a/4} λ(S^{n-1})`
/// with `a = a_n`, `x = a_n/(2(n-1))`.
pub fn ln_entropy_bound_via_spheres(n: Dimension) -> f64 {
    let a = a_n(n);
    let x = a / (2.0 * n.minus_one());
    0.5 * ((2.0 * PI / 3.0) * (1.0 + x) / (1.0 + 2.0 * x / 3.0)).ln()
        + 0.25 * a * (x.ln_1p() / x - 1.0)
        + ln_sphere_entropy(n.get() - 1).expect("n >= 2")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SequenceRow {
    pub n: Dimension,
    pub y_n: f64,
    /// Underflows to zero for large `n`; `E_n` is computed from `ln κ_n`.
    pub kappa_n: f64,
    #[serde(rename = "E_n")]
    pub e_n: f64,
    /// `E_n` by the sphere-entropy form.
    #[serde(rename = "E_n_alt")]
    pub e_n_alt: f64,
    pub rel_disagreement: f64,
    pub a_n: f64,
    pub x_n: f64,
    pub lambda_sphere_prev: f64,
    pub lower: f64,
    pub upper: f64,
}

impl SequenceRow {
    pub fn new(n: Dimension) -> Self {
        let km = kappa_min(n);
        let ln_e = ln_entropy_bound(n);
        let ln_alt = ln_entropy_bound_via_spheres(n);
        let a = a_n(n);
        let sw = bound_sandwich(n);
        SequenceRow {
            n,
            y_n: km.y_n,
            kappa_n: km.kappa_n,
            e_n: ln_e.exp(),
            e_n_alt: ln_alt.exp(),
            rel_disagreement: (ln_e - ln_alt).exp_m1().abs(),
            a_n: a,
            x_n: a / (2.0 * n.minus_one()),
            lambda_sphere_prev: sphere_entropy(n.get() - 1).expect("n >= 2"),
            lower: sw.lower,
            upper: sw.upper,
        }
    }
}

/// One row per `n` in `2..=n_max`, computed on `jobs` threads; row order
/// does not depend on `jobs`.
pub fn sequence_report(n_max: u64, jobs: usize) -> Result<Vec<SequenceRow>> {
    if n_max < 2 {
        return Err(Error::InvalidDimension(n_max));
    }
    let ns: Vec<Dimension> = (2..=n_max)
        .map(|n| Dimension::new(n).expect("n >= 2"))
        .collect();
    Ok(crate::par::map(&ns, jobs, |&n| SequenceRow::new(n)))
}

pub const SEQUENCE_CSV_HEADER: &str = "n,y_n,kappa_n,E_n,a_n,x_n,lambda_sphere_prev,lower,upper";

pub fn write_sequence_csv<W: Write>(rows: &[SequenceRow], mut w: W) -> io::Result<()> {
    writeln!(w, "{SEQUENCE_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.n,
            fmt_f64(r.y_n),
            fmt_f64(r.kappa_n),
            fmt_f64(r.e_n),
            fmt_f64(r.a_n),
            fmt_f64(r.x_n),
            fmt_f64(r.lambda_sphere_prev),
            fmt_f64(r.lower),
            fmt_f64(r.upper)
        )?;
    }
    Ok(())
}

/// Entropy of a closed profile computed twice: from its Angenent length and
/// by direct quadrature of `F_{0,1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub n: Dimension,
    #[serde(rename = "length_A")]
    pub length_a: f64,
    pub lambda_from_length: f64,
    pub f_direct: f64,
    pub discrepancy: f64,
}

pub fn entropy_report<P: Profile + ?Sized>(n: Dimension, profile: &P) -> Result<EntropyReport> {
    let length_a = angenent_length(n, profile);
    let lambda_from_length = entropy_from_length(n, length_a)?;
    let f_direct = f_functional(n, profile, 0.0, 1.0, None)?.value;
    Ok(EntropyReport {
        n,
        length_a,
        lambda_from_length,
        f_direct,
        discrepancy: (lambda_from_length - f_direct).abs(),
    })
}

/// `sqrt(2π/e)`, the entropy of the circle and of every cylinder `S^1 × R^k`.
pub fn circle_entropy() -> f64 {
    (2.0 * PI / E).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::AnalyticProfile;
    use approx::assert_relative_eq;

    fn dim(n: u64) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(sphere_area(0), 2.0, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(1), 2.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(2), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(3), 2.0 * PI * PI, max_relative = 1e-15);
        // recursion ω_{m+2} = 2π ω_m / (m+1)
        for m in [10u64, 77, 78, 79, 300] {
            let lhs = ln_sphere_area(m + 2);
            let rhs = (2.0 * PI).ln() + ln_sphere_area(m) - ((m + 1) as f64).ln();
            assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
        }
    }

    #[test]
    fn sphere_entropies() {
        assert_relative_eq!(
            sphere_entropy(1).unwrap(),
            circle_entropy(),
            max_relative = 1e-15
        );
        assert!((sphere_entropy(1).unwrap() - 1.52035).abs() < 5e-6);
        assert_relative_eq!(sphere_entropy(2).unwrap(), 4.0 / E, max_relative = 1e-15);
        assert!(sphere_entropy(0).is_err());
    }

    #[test]
    fn length_entropy_examples() {
        let n = dim(2);
        assert_relative_eq!(
            entropy_from_length(n, 8.0 / E).unwrap(),
            4.0 / E,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            entropy_from_length(n, 2.0).unwrap(),
            1.0,
            max_relative = 1e-15
        );
        assert_eq!(entropy_from_length(dim(7), 0.0).unwrap(), 0.0);
        assert!(entropy_from_length(n, -1.0).is_err());
    }

    #[test]
    fn e2_value() {
        assert!((entropy_bound(dim(2)) - 2.24759).abs() < 5e-6);
    }

    #[test]
    fn sandwich_n4() {
        let s = bound_sandwich(dim(4));
        assert!((s.upper - 2.21823).abs() < 5e-5);
        assert!((s.lower - 2.02780).abs() < 5e-5);
        // sqrt(10) π / e^{1093/729}
        let closed = 10f64.sqrt() * PI / (1093.0f64 / 729.0).exp();
        assert_relative_eq!(s.upper, closed, max_relative = 1e-14);
    }

    #[test]
    fn a_n_matches_direct_difference() {
        for n in 2..40 {
            let n = dim(n);
            let direct = kappa_min(n).y_n - 2.0 * n.minus_one();
            assert!((a_n(n) - direct).abs() < 1e-13);
        }
    }

    #[test]
    fn f_functional_plane_and_sphere() {
        let n = dim(2);
        let plane = f_functional(n, &AnalyticProfile::plane(), 0.0, 1.0, None).unwrap();
        assert!((plane.value - 1.0).abs() < 1e-8);
        let sphere = f_functional(n, &AnalyticProfile::sphere(n), 0.0, 1.0, None).unwrap();
        assert!((sphere.value - 4.0 / E).abs() < 1e-8);
        assert_eq!(sphere.tail_bound, 0.0);
        assert!(f_functional(n, &AnalyticProfile::plane(), 0.0, 0.0, None).is_err());
    }

    #[test]
    fn report_rows_ordered() {
        let rows = sequence_report(30, 3).unwrap();
        assert_eq!(rows.len(), 29);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.n.get(), i as u64 + 2);
        }
        assert_eq!(rows, sequence_report(30, 1).unwrap());
        assert!(sequence_report(1, 1).is_err());
    }

    #[test]
    fn csv_header() {
        let rows = sequence_report(3, 1).unwrap();
        let mut buf = Vec::new();
        write_sequence_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,y_n,kappa_n,E_n,a_n,x_n,lambda_sphere_prev,lower,upper\n2,"));
        assert_eq!(text.lines().count(), 3);
    }
}

//! Return maps on the section `x = 0` and the symmetric shooting solver for
//! closed geodesics.
//!
//! A geodesic launched horizontally from `(0, R)` that meets the section
//! again with a horizontal tangent is symmetric about the `r`-axis twice over,
//! hence closed. The solver therefore works with the scalar
//! `miss(R) = wrap(theta_return - π)` and never matches full periods.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::entropy::{entropy_bound, entropy_from_length, entropy_report, EntropyReport};
use crate::error::{Error, Result};
use crate::geodesic::{
    angenent_length, integrate, residual_profile, Fate, GeodesicPath, IntegratorConfig,
};
use crate::metric::kappa_min;
use crate::par;
use crate::roots::{bisect, linspace, wrap_angle};
use crate::types::{Dimension, GeodesicState};

pub const DEFAULT_GRID: usize = 512;

/// Paths whose closest approach to the axis is below this fraction of the
/// launch radius are treated as axis reflections, not embedded loops.
const DEGENERATE_RATIO: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ReturnOutcome {
    Returned { r: f64, theta: f64, s: f64 },
    AxisCollapse,
    Escaped,
    Exhausted,
}

fn single_crossing(cfg: &IntegratorConfig, crossings: usize) -> IntegratorConfig {
    IntegratorConfig {
        max_axis_crossings: crossings,
        ..cfg.clone()
    }
}

fn launch(
    n: Dimension,
    r: f64,
    theta0: f64,
    cfg: &IntegratorConfig,
    crossings: usize,
) -> Result<GeodesicPath> {
    integrate(
        n,
        GeodesicState::new(0.0, r, theta0),
        &single_crossing(cfg, crossings),
    )
}

fn outcome(path: &GeodesicPath) -> ReturnOutcome {
    match path.fate() {
        Fate::CrossingLimitReached => {
            let c = path.crossings().last().expect("crossing recorded");
            ReturnOutcome::Returned {
                r: c.r,
                theta: c.theta,
                s: c.s,
            }
        }
        Fate::AxisCollapse => ReturnOutcome::AxisCollapse,
        Fate::Escaped => ReturnOutcome::Escaped,
        Fate::ArcLengthExhausted => ReturnOutcome::Exhausted,
    }
}

/// First crossing of `x = 0` after the start (which counts as the first).
pub fn first_return(
    n: Dimension,
    r: f64,
    theta0: f64,
    cfg: &IntegratorConfig,
) -> Result<ReturnOutcome> {
    if !(r > cfg.r_min) {
        return Err(Error::domain("R", r));
    }
    Ok(outcome(&launch(n, r, theta0, cfg, 1)?))
}

fn fate_of(o: ReturnOutcome) -> Fate {
    match o {
        ReturnOutcome::Returned { .. } => Fate::CrossingLimitReached,
        ReturnOutcome::AxisCollapse => Fate::AxisCollapse,
        ReturnOutcome::Escaped => Fate::Escaped,
        ReturnOutcome::Exhausted => Fate::ArcLengthExhausted,
    }
}

/// `P(R, θ)`: radius and unwrapped tangent angle at the first return.
pub fn poincare_map(
    n: Dimension,
    r: f64,
    theta: f64,
    cfg: &IntegratorConfig,
) -> Result<(f64, f64)> {
    match first_return(n, r, theta, cfg)? {
        ReturnOutcome::Returned { r, theta, .. } => Ok((r, theta)),
        o => Err(Error::NoReturn(fate_of(o))),
    }
}

/// `P_f(R)`: return radius for a horizontal launch.
pub fn poincare_f(n: Dimension, r: f64, cfg: &IntegratorConfig) -> Result<f64> {
    poincare_map(n, r, 0.0, cfg).map(|(r, _)| r)
}

/// `wrap(theta_return - π)` in `(-π, π]` for a horizontal launch; zero
/// exactly when the return tangent is horizontal again.
pub fn miss_angle(n: Dimension, r: f64, cfg: &IntegratorConfig) -> Result<f64> {
    poincare_map(n, r, 0.0, cfg).map(|(_, th)| wrap_angle(th - PI))
}

/// Default launch interval for the shooting solver: inside the cylinder,
/// where the lower crossing of the closed loop lies.
pub fn default_bracket(n: Dimension) -> (f64, f64) {
    let c = n.cylinder_radius();
    (0.1 * c, 0.95 * c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    #[serde(rename = "R")]
    pub r: f64,
    /// `None` where the trajectory does not return.
    pub value: Option<f64>,
}

/// `miss_angle` on an evenly spaced grid.
pub fn miss_angle_scan(
    n: Dimension,
    lo: f64,
    hi: f64,
    grid: usize,
    cfg: &IntegratorConfig,
    jobs: usize,
) -> Vec<ScanPoint> {
    let rs = linspace(lo, hi, grid);
    par::map(&rs, jobs, |&r| ScanPoint {
        r,
        value: miss_angle(n, r, cfg).ok(),
    })
}

/// Sign changes between neighbouring returned grid points. Jumps of the
/// wrapped angle across `±π` are discontinuities, not roots.
fn brackets_of(scan: &[ScanPoint], wrapped: bool) -> Vec<(ScanPoint, ScanPoint)> {
    scan.windows(2)
        .filter_map(|w| match (w[0].value, w[1].value) {
            (Some(a), Some(b)) if crate::roots::brackets(a, b) => {
                if wrapped && (a - b).abs() >= PI {
                    None
                } else {
                    Some((w[0], w[1]))
                }
            }
            _ => None,
        })
        .collect()
}

/// Bisection followed by safeguarded secant steps.
fn refine_root<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    mut a: f64,
    mut fa: f64,
    mut b: f64,
    mut fb: f64,
    ftol: f64,
) -> Result<(f64, f64)> {
    let stall = |x: f64, e: Error| {
        Error::BisectionStalled(format!("trajectory from R = {x} lost its return ({e})"))
    };
    while (b - a).abs() > 1e-9 * a.abs().max(1.0) {
        let m = 0.5 * (a + b);
        let fm = f(m).map_err(|e| stall(m, e))?;
        if fm == 0.0 {
            return Ok((m, 0.0));
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    let (mut best, mut fbest) = if fa.abs() < fb.abs() {
        (a, fa)
    } else {
        (b, fb)
    };
    for _ in 0..60 {
        if fbest.abs() <= ftol {
            break;
        }
        let mut x = b - fb * (b - a) / (fb - fa);
        if !(x > a.min(b) && x < a.max(b)) {
            x = 0.5 * (a + b);
        }
        if x == a || x == b {
            break;
        }
        let fx = f(x).map_err(|e| stall(x, e))?;
        if fx.abs() < fbest.abs() {
            best = x;
            fbest = fx;
        }
        if (fx < 0.0) == (fa < 0.0) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    Ok((best, fbest))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    #[serde(rename = "E_n")]
    pub e_n: f64,
    pub two_pi_over_sqrt_kappa: f64,
}

impl Bounds {
    pub fn new(n: Dimension) -> Self {
        Bounds {
            e_n: entropy_bound(n),
            two_pi_over_sqrt_kappa: 2.0 * PI * (-0.5 * kappa_min(n).ln_kappa_n).exp(),
        }
    }
}

/// A closed geodesic symmetric about the `r`-axis.
#[derive(Debug, Clone)]
pub struct DoughnutResult {
    pub n: Dimension,
    pub r_top: f64,
    pub r_bot: f64,
    /// Launch radius of the solved half orbit.
    pub r_launch: f64,
    pub miss: f64,
    /// One full loop: the integrated half orbit and its mirror image.
    pub path: GeodesicPath,
    pub length_a: f64,
    pub lambda: f64,
    /// Mismatch after integrating the whole loop from the launch point.
    pub close_up_error: f64,
    pub residual_max: f64,
    pub bounds: Bounds,
    pub entropy: EntropyReport,
    /// `P_f(R_top)` and `P_f(P_f(R_top))`.
    pub pf_top: Option<f64>,
    pub pf_pf_top: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DoughnutReport {
    pub n: Dimension,
    #[serde(rename = "R_top")]
    pub r_top: f64,
    #[serde(rename = "R_bot")]
    pub r_bot: f64,
    #[serde(rename = "length_A")]
    pub length_a: f64,
    pub lambda: f64,
    pub close_up_error: f64,
    pub residual_max: f64,
    pub bounds: Bounds,
    pub miss: f64,
    pub f_direct: f64,
    pub pf_top: Option<f64>,
    pub pf_pf_top: Option<f64>,
    /// Which of `P_f`, `P_f ∘ P_f` maps `R_top` to itself (within 1e-8).
    pub fixed_point_of: Vec<String>,
}

impl DoughnutResult {
    pub fn report(&self) -> DoughnutReport {
        let mut fixed = Vec::new();
        let near = |v: Option<f64>| v.is_some_and(|v| (v - self.r_top).abs() <= 1e-8);
        if near(self.pf_top) {
            fixed.push("P_f".to_string());
        }
        if near(self.pf_pf_top) {
            fixed.push("P_f∘P_f".to_string());
        }
        DoughnutReport {
            n: self.n,
            r_top: self.r_top,
            r_bot: self.r_bot,
            length_a: self.length_a,
            lambda: self.lambda,
            close_up_error: self.close_up_error,
            residual_max: self.residual_max,
            bounds: self.bounds,
            miss: self.miss,
            f_direct: self.entropy.f_direct,
            pf_top: self.pf_top,
            pf_pf_top: self.pf_pf_top,
            fixed_point_of: fixed,
        }
    }
}

/// Scans `miss_angle` over `[lo, hi]`, refines the first sign change that
/// yields an embedded loop and assembles the closed geodesic.
pub fn find_symmetric_closed_geodesic(
    n: Dimension,
    lo: f64,
    hi: f64,
    grid: usize,
    cfg: &IntegratorConfig,
    jobs: usize,
) -> Result<DoughnutResult> {
    cfg.validate()?;
    if !(lo > 0.0 && hi > lo) || grid < 2 {
        return Err(Error::Config(format!(
            "bad bracket [{lo}, {hi}] or grid {grid}"
        )));
    }
    let scan = miss_angle_scan(n, lo, hi, grid, cfg, jobs);
    let candidates = brackets_of(&scan, true);
    let mut last_err = None;
    for (a, b) in candidates {
        let (root, miss) = match refine_root(
            |r| miss_angle(n, r, cfg),
            a.r,
            a.value.expect("returned"),
            b.r,
            b.value.expect("returned"),
            1e-12,
        ) {
            Ok(v) => v,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        if miss.abs() > 1e-6 {
            // a discontinuity of the return map, not a zero
            continue;
        }
        let half = launch(n, root, 0.0, cfg, 1)?;
        if half.min_r() < DEGENERATE_RATIO * root {
            continue;
        }
        return assemble(n, root, miss, half, cfg);
    }
    Err(last_err.unwrap_or_else(|| {
        Error::NoBracket(format!(
            "miss angle has no usable sign change on [{lo}, {hi}] ({grid} points)"
        ))
    }))
}

fn assemble(
    n: Dimension,
    root: f64,
    miss: f64,
    half: GeodesicPath,
    cfg: &IntegratorConfig,
) -> Result<DoughnutResult> {
    let ret = *half.crossings().last().expect("returned");
    let path = half.reflected_loop();

    let full = launch(n, root, 0.0, cfg, 2)?;
    let close_up_error = match (full.fate(), full.crossings().get(1)) {
        (Fate::CrossingLimitReached, Some(c)) => {
            c.x.abs()
                .max((c.r - root).abs())
                .max(wrap_angle(c.theta).abs())
        }
        _ => f64::INFINITY,
    };

    let length_a = angenent_length(n, &path);
    let lambda = entropy_from_length(n, length_a)?;
    let residual_max = residual_profile(n, &path)?;
    let entropy = entropy_report(n, &path)?;
    let (r_top, r_bot) = if ret.r > root {
        (ret.r, root)
    } else {
        (root, ret.r)
    };
    let pf_top = poincare_f(n, r_top, cfg).ok();
    let pf_pf_top = pf_top.and_then(|r| poincare_f(n, r, cfg).ok());
    Ok(DoughnutResult {
        n,
        r_top,
        r_bot,
        r_launch: root,
        miss,
        path,
        length_a,
        lambda,
        close_up_error,
        residual_max,
        bounds: Bounds::new(n),
        entropy,
        pf_top,
        pf_pf_top,
    })
}

/// Fixed points of `P_f` on `[lo, hi]`: sign changes of `P_f(R) - R` between
/// neighbouring returned grid points, bisected to 1e-10. Candidates where the
/// map jumps rather than crosses are dropped.
pub fn scan_fixed_points(
    n: Dimension,
    lo: f64,
    hi: f64,
    grid: usize,
    cfg: &IntegratorConfig,
    jobs: usize,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    if grid < 2 || !(lo > 0.0 && hi > lo) {
        return Err(Error::Config(format!(
            "bad range [{lo}, {hi}] or grid {grid}"
        )));
    }
    let rs = linspace(lo, hi, grid);
    let f = |r: f64| poincare_f(n, r, cfg).map(|p| p - r);
    let scan: Vec<ScanPoint> = par::map(&rs, jobs, |&r| ScanPoint {
        r,
        value: f(r).ok(),
    });
    let pairs = brackets_of(&scan, false);
    let roots = par::map(&pairs, jobs, |(a, b)| {
        let mut broken = false;
        let root = bisect(
            |r| match f(r) {
                Ok(v) => v,
                Err(_) => {
                    broken = true;
                    0.0
                }
            },
            a.r,
            b.r,
            1e-10,
        )?;
        if broken {
            return None;
        }
        match f(root) {
            Ok(v) if v.abs() <= 1e-6 => Some(root),
            _ => None,
        }
    });
    let mut out: Vec<f64> = roots.into_iter().flatten().collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}

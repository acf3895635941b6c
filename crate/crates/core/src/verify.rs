//! Acceptance checks with fixed reference values. Each check reports its
//! measured quantities and whether it stayed inside its time budget.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::entropy::{bound_sandwich, circle_entropy, entropy_bound, sphere_entropy};
use crate::geodesic::{integrate, residual_profile, GeodesicPath, IntegratorConfig};
use crate::metric::{gauss_curvature, kappa_min, ln_conformal_factor};
use crate::orbit::{
    default_bracket, find_symmetric_closed_geodesic, scan_fixed_points, DoughnutResult,
    DEFAULT_GRID,
};
use crate::par;
use crate::roots::wrap_angle;
use crate::types::{Dimension, GeodesicState, ProfilePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Closed forms and exact solutions only.
    Fast,
    Full,
}

impl Suite {
    pub fn criteria(self) -> &'static [u8] {
        match self {
            Suite::Fast => &[1, 2, 3, 4, 6, 9],
            Suite::Full => &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub time_limit_s: Option<f64>,
    pub within_time: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl Check {
    /// One `PASS`/`FAIL` line for terminal output.
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:>2} {:<28} {:>9.3} s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

fn dim(n: u64) -> Dimension {
    Dimension::new(n).expect("n >= 2")
}

fn pt(x: f64, r: f64) -> ProfilePoint {
    ProfilePoint::new(x, r).expect("r > 0")
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn check(
    id: u8,
    name: &'static str,
    ok: bool,
    detail: String,
    limit: Option<f64>,
    elapsed: Duration,
) -> Check {
    let within_time = limit.is_none_or(|l| elapsed.as_secs_f64() < l);
    Check {
        id,
        name,
        passed: ok && within_time,
        detail,
        time_limit_s: limit,
        within_time,
        elapsed,
    }
}

fn c1() -> Check {
    let (e2, t) = timed(|| entropy_bound(dim(2)));
    let err = (e2 - 2.24759).abs();
    check(
        1,
        "E_2",
        err <= 5e-6,
        format!("E_2 = {e2:.10} |diff| = {err:.2e}"),
        Some(1e-3),
        t,
    )
}

fn c2() -> Check {
    let (v, t) = timed(|| (circle_entropy(), sphere_entropy(1)));
    let (closed, via_area) = (v.0, v.1.unwrap_or(f64::NAN));
    let err = (closed - 1.52035).abs().max((via_area - 1.52035).abs());
    check(
        2,
        "entropy of S^1",
        err <= 5e-6,
        format!("sqrt(2pi/e) = {closed:.10} lambda(S^1) = {via_area:.10} |diff| = {err:.2e}"),
        Some(1e-3),
        t,
    )
}

fn c3() -> Check {
    let (e, t) = timed(|| entropy_bound(dim(1_000_000)));
    let err = (e - 2.04665).abs();
    let limit = (4.0 * PI / 3.0).sqrt();
    check(
        3,
        "E_n limit",
        err <= 1e-4,
        format!("E_1e6 = {e:.10} sqrt(4pi/3) = {limit:.10} |diff| = {err:.2e}"),
        Some(1.0),
        t,
    )
}

fn c4() -> Check {
    let ((sw, range_ok, worst), t) = timed(|| {
        let sw = bound_sandwich(dim(4));
        let e2 = entropy_bound(dim(2));
        let mut ok = true;
        let mut worst = (0, 0.0);
        for n in 2..=10_000 {
            let e = entropy_bound(dim(n));
            if !(e > 2.0 && e <= e2) {
                ok = false;
                worst = (n, e);
            }
        }
        (sw, ok, worst)
    });
    let (du, dl) = ((sw.upper - 2.21823).abs(), (sw.lower - 2.02780).abs());
    let mut detail = format!(
        "upper = {:.7} lower = {:.7} 2 < E_n <= E_2 on 2..1e4: {range_ok}",
        sw.upper, sw.lower
    );
    if !range_ok {
        detail.push_str(&format!(" (violated at n = {} E = {})", worst.0, worst.1));
    }
    check(
        4,
        "sandwich at n = 4",
        du <= 5e-5 && dl <= 5e-5 && range_ok,
        detail,
        None,
        t,
    )
}

fn solve(n: u64, jobs: usize) -> crate::Result<DoughnutResult> {
    let d = dim(n);
    let (lo, hi) = default_bracket(d);
    find_symmetric_closed_geodesic(d, lo, hi, DEFAULT_GRID, &IntegratorConfig::default(), jobs)
}

fn c5(sol: &crate::Result<DoughnutResult>, t: Duration) -> Check {
    match sol {
        Ok(d) => {
            let err = (d.lambda - 1.85122).abs();
            check(
                5,
                "doughnut n = 2",
                err <= 1e-3,
                format!("lambda = {:.10} |diff| = {err:.2e}", d.lambda),
                Some(30.0),
                t,
            )
        }
        Err(e) => check(5, "doughnut n = 2", false, e.to_string(), Some(30.0), t),
    }
}

/// Largest deviation from the exact sphere, cylinder and plane profiles.
fn exact_solutions() -> crate::Result<(f64, f64, f64, f64)> {
    let n = dim(2);
    let base = IntegratorConfig::default();
    let loop_len = 2.0 * PI * n.sphere_radius();

    let cfg = IntegratorConfig {
        max_arclength: loop_len,
        ..base.clone()
    };
    let sphere = integrate(n, GeodesicState::new(0.0, n.sphere_radius(), 0.0), &cfg)?;
    let mut dev_sphere = path_dev(&sphere, |st| (st.x.hypot(st.r) - n.sphere_radius()).abs());
    let end = sphere.last().state;
    dev_sphere = dev_sphere
        .max(end.x.abs())
        .max((end.r - n.sphere_radius()).abs())
        .max(wrap_angle(end.theta).abs());

    let cfg = IntegratorConfig {
        max_arclength: 100.0,
        ..base.clone()
    };
    let cyl = integrate(n, GeodesicState::new(0.0, n.cylinder_radius(), 0.0), &cfg)?;
    let dev_cyl = path_dev(&cyl, |st| {
        (st.r - n.cylinder_radius()).abs().max(st.theta.abs())
    });

    let cfg = IntegratorConfig {
        max_arclength: 20.0,
        ..base
    };
    let plane = integrate(n, GeodesicState::new(0.0, 1.0, PI / 2.0), &cfg)?;
    let dev_plane = path_dev(&plane, |st| st.x.abs().max((st.theta - PI / 2.0).abs()));

    let residual = residual_profile(n, &sphere)?
        .max(residual_profile(n, &cyl)?)
        .max(residual_profile(n, &plane)?);
    Ok((dev_sphere, dev_cyl, dev_plane, residual))
}

fn path_dev(path: &GeodesicPath, f: impl Fn(&GeodesicState) -> f64) -> f64 {
    path.samples()
        .iter()
        .map(|s| f(&s.state))
        .fold(0.0, f64::max)
}

fn c6() -> Check {
    let (res, t) = timed(exact_solutions);
    match res {
        Ok((ds, dc, dp, res)) => check(
            6,
            "exact solutions",
            ds <= 1e-8 && dc <= 1e-8 && dp <= 1e-8 && res <= 1e-7,
            format!("sphere {ds:.2e} cylinder {dc:.2e} plane {dp:.2e} residual {res:.2e}"),
            Some(5.0),
            t,
        ),
        Err(e) => check(6, "exact solutions", false, e.to_string(), Some(5.0), t),
    }
}

fn c7(sols: &[(u64, crate::Result<DoughnutResult>)]) -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, sol) in sols.iter().filter(|(n, _)| *n <= 4) {
        match sol {
            Ok(d) => {
                let disc = d.entropy.discrepancy;
                ok &= disc <= 1e-6;
                parts.push(format!("n={n}: {disc:.2e}"));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("n={n}: {e}"));
            }
        }
    }
    check(
        7,
        "length vs F_{0,1}",
        ok,
        parts.join(" "),
        None,
        Duration::ZERO,
    )
}

/// Entropy and length bounds that every solved loop must satisfy.
pub fn loop_invariants(d: &DoughnutResult) -> (bool, String) {
    let lower = circle_entropy();
    let ok = d.lambda >= 1.0
        && d.lambda <= d.bounds.e_n
        && d.lambda >= lower
        && d.length_a <= d.bounds.two_pi_over_sqrt_kappa;
    (
        ok,
        format!(
            "n={}: {:.6} <= {:.6} <= {:.6}, L_A {:.6} <= {:.6}",
            d.n.get(),
            lower,
            d.lambda,
            d.bounds.e_n,
            d.length_a,
            d.bounds.two_pi_over_sqrt_kappa
        ),
    )
}

fn c8(sols: &[(u64, crate::Result<DoughnutResult>)]) -> Check {
    let mut ok = !sols.is_empty();
    let mut parts = Vec::new();
    for (n, sol) in sols {
        match sol {
            Ok(d) => {
                let (good, text) = loop_invariants(d);
                ok &= good;
                parts.push(text);
            }
            Err(e) => {
                ok = false;
                parts.push(format!("n={n}: {e}"));
            }
        }
    }
    check(
        8,
        "entropy and length bounds",
        ok,
        parts.join("; "),
        None,
        Duration::ZERO,
    )
}

/// `K = -Δ ln λ / (2λ)` with a five-point Laplacian of `ln λ`.
pub fn fd_curvature(n: Dimension, x: f64, r: f64, h: f64) -> f64 {
    let l = |x: f64, r: f64| ln_conformal_factor(n, pt(x, r));
    let c = l(x, r);
    let lap = (l(x + h, r) + l(x - h, r) + l(x, r + h) + l(x, r - h) - 4.0 * c) / (h * h);
    -0.5 * lap * (-c).exp()
}

/// Minimum of `K(0, r)` over two nested log grids of `points` each: the
/// first over `[1e-3, 1e3]`, the second over the cells next to its argmin.
pub fn grid_kappa_min(n: Dimension, points: usize) -> f64 {
    let k = |r: f64| gauss_curvature(n, pt(0.0, r));
    let scan = |lo: f64, hi: f64| {
        let step = (hi / lo).ln() / (points - 1) as f64;
        (0..points)
            .map(|i| {
                let r = lo * (step * i as f64).exp();
                (r, k(r))
            })
            .fold(
                (lo, f64::INFINITY),
                |best, p| if p.1 < best.1 { p } else { best },
            )
    };
    let (lo, hi) = (1e-3, 1e3);
    let (r0, _) = scan(lo, hi);
    let cell = ((hi / lo).ln() / (points - 1) as f64).exp();
    scan(r0 / cell, r0 * cell).1
}

fn c9() -> Check {
    let ((fd_worst, kappa_worst), t) = timed(|| {
        let mut fd_worst: f64 = 0.0;
        for n in [2, 3, 5] {
            let d = dim(n);
            for i in 0..100 {
                for j in 0..100 {
                    let x = -2.0 + 4.0 * i as f64 / 99.0;
                    let r = 0.3 + 2.7 * j as f64 / 99.0;
                    let exact = gauss_curvature(d, pt(x, r));
                    let rel = (fd_curvature(d, x, r, 1e-4) - exact).abs() / exact;
                    fd_worst = fd_worst.max(rel);
                }
            }
        }
        let mut kappa_worst: f64 = 0.0;
        for n in 2..=50 {
            let d = dim(n);
            let k = kappa_min(d).kappa_n;
            kappa_worst = kappa_worst.max((grid_kappa_min(d, 10_000) - k).abs() / k);
        }
        (fd_worst, kappa_worst)
    });
    check(
        9,
        "curvature oracle",
        fd_worst <= 1e-5 && kappa_worst <= 1e-6,
        format!("FD rel err {fd_worst:.2e} over 3x1e4 points, kappa_n grid rel err {kappa_worst:.2e} (n = 2..50)"),
        None,
        t,
    )
}

fn c10(jobs: usize) -> Check {
    let cfg = IntegratorConfig::default();
    let (res, t) = timed(|| {
        let a = scan_fixed_points(dim(2), 0.5, 3.5, 512, &cfg, jobs)?;
        let b = scan_fixed_points(dim(2), 0.5, 3.5, 1024, &cfg, jobs)?;
        Ok::<_, crate::Error>((a, b))
    });
    match res {
        Ok((a, b)) => {
            let nearest = |v: &[f64], x: f64| {
                v.iter()
                    .map(|r| (r - x).abs())
                    .fold(f64::INFINITY, f64::min)
            };
            let apex = nearest(&a, 2.0);
            let drift = if a.len() == b.len() {
                a.iter()
                    .zip(&b)
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max)
            } else {
                f64::INFINITY
            };
            let roots: Vec<String> = a.iter().map(|r| format!("{r:.10}")).collect();
            check(
                10,
                "P_f fixed points",
                apex <= 1e-8 && drift <= 1e-8,
                format!(
                    "roots [{}] |R - 2| = {apex:.2e} grid doubling drift {drift:.2e}",
                    roots.join(", ")
                ),
                None,
                t,
            )
        }
        Err(e) => check(10, "P_f fixed points", false, e.to_string(), None, t),
    }
}

/// Runs every criterion of `suite` in order.
pub fn run(suite: Suite, jobs: usize) -> Vec<Check> {
    let wanted = suite.criteria();
    let mut out = vec![c1(), c2(), c3(), c4()];
    let mut sols = Vec::new();
    if wanted.contains(&5) {
        let (first, t) = timed(|| solve(2, jobs));
        sols.push((2, first));
        sols.extend(par::map(&[3u64, 4, 5], jobs, |&n| (n, solve(n, 1))));
        out.push(c5(&sols[0].1, t));
    }
    out.push(c6());
    if wanted.contains(&7) {
        out.push(c7(&sols));
        out.push(c8(&sols));
    }
    out.push(c9());
    if wanted.contains(&10) {
        out.push(c10(jobs));
    }
    out.retain(|c| wanted.contains(&c.id));
    out
}

//! Adaptive integration of profile geodesics with event detection.
//!
//! Paths are integrated in the desingularised parameter described in
//! [`dopri`]; everything exposed here is parametrised by Euclidean arc length.

pub(crate) mod dopri;
mod path;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::shrinker_residual;
use crate::profile::Profile;
use crate::roots::{bisect, brackets};
use crate::types::{Dimension, GeodesicState};

use dopri::{Controller, Field, Segment, Vec4, R, S, THETA, X};

pub use dopri::Segment as DenseSegment;
pub use path::GeodesicPath;

/// Largest step in `tau`; keeps the dense output well conditioned where
/// `r` is large and `ds = r dtau` would otherwise allow long steps.
const TAU_CAP: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Largest Euclidean arc length covered by one step.
    pub max_step: f64,
    /// A trajectory whose radius drops below this is reported as
    /// [`Fate::AxisCollapse`]. Transversal axis hits are integrated through
    /// (the profile reflects), so only near-degenerate starts trip this.
    pub r_min: f64,
    pub escape_radius: f64,
    pub max_arclength: f64,
    pub max_axis_crossings: usize,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-12,
            abs_tol: 1e-13,
            max_step: 0.05,
            r_min: 1e-100,
            escape_radius: 1e3,
            max_arclength: 1e3,
            max_axis_crossings: 64,
            max_steps: 2_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return bad("rel_tol must lie in (0, 1)");
        }
        if !(self.abs_tol > 0.0) || !self.abs_tol.is_finite() {
            return bad("abs_tol must be positive");
        }
        if !(self.max_step > 0.0) || !self.max_step.is_finite() {
            return bad("max_step must be positive");
        }
        if !(self.r_min > 0.0 && self.r_min < self.escape_radius) || !self.escape_radius.is_finite()
        {
            return bad("need 0 < r_min < escape_radius < inf");
        }
        if !(self.max_arclength > 0.0) || !self.max_arclength.is_finite() {
            return bad("max_arclength must be positive");
        }
        if self.max_axis_crossings == 0 {
            return bad("max_axis_crossings must be at least 1");
        }
        if self.max_steps == 0 {
            return bad("max_steps must be at least 1");
        }
        Ok(())
    }

    /// Both tolerances scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        IntegratorConfig {
            rel_tol: self.rel_tol * factor,
            abs_tol: self.abs_tol * factor,
            ..self.clone()
        }
    }
}

/// Why an integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Fate {
    AxisCollapse,
    Escaped,
    ArcLengthExhausted,
    CrossingLimitReached,
}

impl fmt::Display for Fate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Fate::AxisCollapse => "AxisCollapse",
            Fate::Escaped => "Escaped",
            Fate::ArcLengthExhausted => "ArcLengthExhausted",
            Fate::CrossingLimitReached => "CrossingLimitReached",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub s: f64,
    /// Value of the internal integration parameter; only meaningful
    /// relative to other samples of the same path.
    pub tau: f64,
    pub state: GeodesicState,
}

/// A refined crossing of the section `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingRecord {
    pub s: f64,
    pub r: f64,
    pub theta: f64,
    /// Residual `x` left after refinement.
    pub x: f64,
}

fn to_vec(state: &GeodesicState, s: f64) -> Vec4 {
    [state.x, state.r, state.theta, s]
}

fn to_sample(y: &Vec4, tau: f64) -> Sample {
    Sample {
        s: y[S],
        tau,
        state: GeodesicState::new(y[X], y[R], y[THETA]),
    }
}

struct Stepper<'a> {
    field: Field,
    cfg: &'a IntegratorConfig,
    ctrl: Controller,
    y: Vec4,
    k: Vec4,
    tau: f64,
    h: f64,
    steps: usize,
}

/// One accepted step.
struct Accepted {
    y0: Vec4,
    y1: Vec4,
    seg: Segment,
}

impl<'a> Stepper<'a> {
    fn new(n: Dimension, y: Vec4, cfg: &'a IntegratorConfig) -> Self {
        let field = Field::new(n);
        let k = field.eval(&y);
        let h_max = Self::h_max_at(cfg, &y);
        let h = dopri::initial_step(&field, &y, &k, cfg.rel_tol, cfg.abs_tol, h_max);
        Stepper {
            field,
            cfg,
            ctrl: Controller::new(),
            y,
            k,
            tau: 0.0,
            h,
            steps: 0,
        }
    }

    fn h_max_at(cfg: &IntegratorConfig, y: &Vec4) -> f64 {
        (cfg.max_step / y[R]).min(TAU_CAP)
    }

    fn step(&mut self) -> Result<Accepted> {
        loop {
            self.steps += 1;
            if self.steps > self.cfg.max_steps {
                return Err(Error::StepBudget(self.cfg.max_steps));
            }
            let h = self.h.min(Self::h_max_at(self.cfg, &self.y));
            if h < 1e-14 * self.tau.abs().max(1.0) {
                return Err(Error::StepSizeUnderflow {
                    s: self.y[S],
                    step: h,
                });
            }
            let trial = dopri::trial_step(&self.field, &self.y, &self.k, h);
            if !trial.y1.iter().all(|v| v.is_finite()) || trial.y1[R] <= 0.0 {
                self.ctrl.reject_hard();
                self.h = 0.25 * h;
                continue;
            }
            let err = dopri::error_norm(
                &trial.err,
                &self.y,
                &trial.y1,
                self.cfg.rel_tol,
                self.cfg.abs_tol,
            );
            let (ok, h_next) = self.ctrl.propose(err, h);
            self.h = h_next;
            if !ok {
                continue;
            }
            let acc = Accepted {
                y0: self.y,
                y1: trial.y1,
                seg: Segment::from_cont(self.tau, h, &trial.cont),
            };
            self.y = trial.y1;
            self.k = trial.k7;
            self.tau += h;
            return Ok(acc);
        }
    }
}

/// Locates `y[idx] = target` inside an accepted step: bisection on the dense
/// output, then Newton on genuinely integrated single steps from the step
/// start. Returns the local parameter and the polished state.
fn locate(field: &Field, acc: &Accepted, idx: usize, target: f64) -> (f64, Vec4) {
    let g = |t: f64| acc.seg.eval(t)[idx] - target;
    let t0 = bisect(g, 0.0, 1.0, 1e-15).unwrap_or(1.0);
    let mut best_t = t0;
    let mut best_y = acc.seg.eval(t0);
    let mut best_res = (best_y[idx] - target).abs();
    if best_res == 0.0 {
        return (best_t, best_y);
    }
    let h = acc.seg.h;
    let scale = if target == 0.0 { 1.0 } else { target.abs() };
    let k0 = field.eval(&acc.y0);
    let mut delta = t0 * h;
    for _ in 0..8 {
        let trial = dopri::trial_step(field, &acc.y0, &k0, delta);
        let y = trial.y1;
        let res = y[idx] - target;
        if !res.is_finite() {
            break;
        }
        if res.abs() < best_res {
            best_res = res.abs();
            best_t = delta / h;
            best_y = y;
        }
        if res.abs() <= 1e-16 * scale {
            break;
        }
        let d = field.eval(&y)[idx];
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = delta - res / d;
        if !(next > 0.0 && next <= 1.5 * h) || next == delta {
            break;
        }
        delta = next;
    }
    (best_t.clamp(0.0, 1.0), best_y)
}

fn sign_of(x: f64) -> Option<bool> {
    if x > 0.0 {
        Some(true)
    } else if x < 0.0 {
        Some(false)
    } else {
        None
    }
}

/// Integrates the geodesic through `initial` until one of the stop
/// conditions in `cfg` fires.
pub fn integrate(
    n: Dimension,
    initial: GeodesicState,
    cfg: &IntegratorConfig,
) -> Result<GeodesicPath> {
    cfg.validate()?;
    initial.check()?;
    if initial.r <= cfg.r_min {
        return Err(Error::domain("initial r (must exceed r_min)", initial.r));
    }
    let mut st = Stepper::new(n, to_vec(&initial, 0.0), cfg);
    let mut path = GeodesicPath::start(n, to_sample(&st.y, 0.0));
    let mut last_sign = sign_of(initial.x);
    let esc2 = cfg.escape_radius * cfg.escape_radius;

    let fate = loop {
        let acc = st.step()?;

        let crossing = match (last_sign, sign_of(acc.y1[X])) {
            (Some(a), Some(b)) if a != b => Some(locate(&st.field, &acc, X, 0.0)),
            _ => None,
        };
        let arc = if acc.y1[S] >= cfg.max_arclength {
            Some(locate(&st.field, &acc, S, cfg.max_arclength))
        } else {
            None
        };

        if let Some((tc, yc)) = crossing {
            if arc.as_ref().is_none_or(|(ta, _)| tc <= *ta) {
                path.push_crossing(CrossingRecord {
                    s: yc[S],
                    r: yc[R],
                    theta: yc[THETA],
                    x: yc[X],
                });
                if path.crossings().len() >= cfg.max_axis_crossings {
                    path.push_segment(
                        acc.seg.truncated(tc),
                        to_sample(&yc, acc.seg.tau0 + tc * acc.seg.h),
                    );
                    break Fate::CrossingLimitReached;
                }
                path.push_sample(to_sample(&yc, acc.seg.tau0 + tc * acc.seg.h));
            }
        }
        if let Some((ta, mut ya)) = arc {
            ya[S] = cfg.max_arclength;
            path.push_segment(
                acc.seg.truncated(ta),
                to_sample(&ya, acc.seg.tau0 + ta * acc.seg.h),
            );
            break Fate::ArcLengthExhausted;
        }

        path.push_segment(acc.seg, to_sample(&acc.y1, st.tau));
        if let Some(sg) = sign_of(acc.y1[X]) {
            last_sign = Some(sg);
        }
        if acc.y1[X] * acc.y1[X] + acc.y1[R] * acc.y1[R] > esc2 {
            break Fate::Escaped;
        }
        if acc.y1[R] < cfg.r_min {
            break Fate::AxisCollapse;
        }
    };
    path.finish(fate);
    Ok(path)
}

/// Refines the section crossing between two samples of one trajectory by
/// re-integrating from `a` over the parameter span up to `b`.
pub fn refine_crossing(
    n: Dimension,
    a: &Sample,
    b: &Sample,
    cfg: &IntegratorConfig,
) -> Result<CrossingRecord> {
    cfg.validate()?;
    if !brackets(a.state.x, b.state.x) {
        return Err(Error::NoBracket(format!(
            "x = {} and x = {} have the same sign",
            a.state.x, b.state.x
        )));
    }
    if a.state.x == 0.0 {
        return Ok(CrossingRecord {
            s: a.s,
            r: a.state.r,
            theta: a.state.theta,
            x: 0.0,
        });
    }
    a.state.check()?;
    let span = b.tau - a.tau;
    if !(span > 0.0) {
        return Err(Error::NoBracket(
            "samples are not in increasing order".into(),
        ));
    }
    let mut st = Stepper::new(n, to_vec(&a.state, a.s), cfg);
    let sign_a = a.state.x > 0.0;
    loop {
        let remaining = span - st.tau;
        if st.h > remaining {
            st.h = remaining.max(1e-300);
        }
        let acc = st.step()?;
        let x1 = acc.y1[X];
        if x1 == 0.0 || (x1 > 0.0) != sign_a {
            let (_, yc) = locate(&st.field, &acc, X, 0.0);
            return Ok(CrossingRecord {
                s: yc[S],
                r: yc[R],
                theta: yc[THETA],
                x: yc[X],
            });
        }
        if st.tau >= span * (1.0 - 1e-12) {
            return Err(Error::NoBracket(
                "re-integration between the samples found no crossing".into(),
            ));
        }
    }
}

/// Advances `initial` by `steps` fixed steps of size `tau_end / steps` in the
/// internal parameter, without error control. Returns the final state and
/// arc length. Intended for convergence studies.
pub fn integrate_fixed_tau(
    n: Dimension,
    initial: GeodesicState,
    tau_end: f64,
    steps: usize,
) -> Result<(GeodesicState, f64)> {
    initial.check()?;
    if steps == 0 || !tau_end.is_finite() {
        return Err(Error::Config("need at least one finite step".into()));
    }
    let field = Field::new(n);
    let h = tau_end / steps as f64;
    let mut y = to_vec(&initial, 0.0);
    let mut k = field.eval(&y);
    for _ in 0..steps {
        let trial = dopri::trial_step(&field, &y, &k, h);
        y = trial.y1;
        k = trial.k7;
    }
    Ok((GeodesicState::new(y[X], y[R], y[THETA]), y[S]))
}

/// Angenent length `∫ r^{n-1} exp(-(x^2 + r^2)/4) ds` of a profile.
pub fn angenent_length<P: Profile + ?Sized>(n: Dimension, profile: &P) -> f64 {
    let m = n.minus_one();
    let mut integrand = |x: f64, r: f64| (m * r.ln() - 0.25 * (x * x + r * r)).exp();
    profile.arc_integral(&mut integrand, profile.length_window(n))
}

/// Step of the finite-difference stencil used by [`residual_profile`].
const FD_STEP: f64 = 1e-3;

/// Largest shrinker residual along the path, with `theta'` estimated by
/// fourth-order central differences of the dense output in arc length.
/// Samples whose stencil comes within 0.01 of the axis are skipped.
pub fn residual_profile(n: Dimension, path: &GeodesicPath) -> Result<f64> {
    const NEED: usize = 5;
    let samples = path.samples();
    if samples.len() < NEED {
        return Err(Error::TooFewSamples {
            got: samples.len(),
            need: NEED,
        });
    }
    let (s_lo, s_hi) = (path.s_start() + 2.0 * FD_STEP, path.s_end() - 2.0 * FD_STEP);
    let mut worst: f64 = 0.0;
    for smp in &samples[1..samples.len() - 1] {
        if smp.s < s_lo || smp.s > s_hi {
            continue;
        }
        let mut th = [0.0; 4];
        let mut near_axis = smp.state.r < 0.01;
        for (slot, k) in th.iter_mut().zip([-2.0, -1.0, 1.0, 2.0]) {
            let q = path
                .state_at_s(smp.s + k * FD_STEP)
                .expect("inside path range");
            near_axis |= q.state.r < 0.01;
            *slot = q.state.theta;
        }
        if near_axis {
            continue;
        }
        let theta_prime = (th[0] - 8.0 * th[1] + 8.0 * th[2] - th[3]) / (12.0 * FD_STEP);
        let res = shrinker_residual(n, &smp.state, theta_prime)?;
        worst = worst.max(res.abs());
    }
    Ok(worst)
}

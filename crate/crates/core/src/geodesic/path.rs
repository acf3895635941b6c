use std::io::{self, Write};

use crate::io::fmt_f64;
use crate::profile::{ln_shell_sup, Profile, Window};
use crate::quadrature::{adaptive_gauss, gl7};
use crate::roots::bisect;
use crate::types::{Dimension, GeodesicState};

use super::dopri::{Segment, R, S, THETA, X};
use super::{CrossingRecord, Fate, Sample};

/// An integrated geodesic: accepted-step samples, refined event points,
/// the dense output between them and the reason integration stopped.
#[derive(Debug, Clone)]
pub struct GeodesicPath {
    n: Dimension,
    samples: Vec<Sample>,
    segments: Vec<Segment>,
    crossings: Vec<CrossingRecord>,
    fate: Option<Fate>,
}

impl GeodesicPath {
    pub(crate) fn start(n: Dimension, first: Sample) -> Self {
        GeodesicPath {
            n,
            samples: vec![first],
            segments: Vec::new(),
            crossings: Vec::new(),
            fate: None,
        }
    }

    pub(crate) fn push_sample(&mut self, s: Sample) {
        if self.samples.last().is_none_or(|l| s.s > l.s) {
            self.samples.push(s);
        }
    }

    pub(crate) fn push_segment(&mut self, seg: Segment, end: Sample) {
        self.segments.push(seg);
        self.push_sample(end);
    }

    pub(crate) fn push_crossing(&mut self, c: CrossingRecord) {
        self.crossings.push(c);
    }

    pub(crate) fn finish(&mut self, fate: Fate) {
        self.fate = Some(fate);
    }

    pub fn dimension(&self) -> Dimension {
        self.n
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn crossings(&self) -> &[CrossingRecord] {
        &self.crossings
    }

    pub fn fate(&self) -> Fate {
        self.fate.expect("path finished")
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn first(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("non-empty")
    }

    pub fn s_start(&self) -> f64 {
        self.samples[0].s
    }

    pub fn s_end(&self) -> f64 {
        self.last().s
    }

    /// Euclidean arc length covered.
    pub fn arc_length(&self) -> f64 {
        self.s_end() - self.s_start()
    }

    pub fn min_r(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.state.r)
            .fold(f64::INFINITY, f64::min)
    }

    /// Dense-output state at arc length `s`, or `None` outside the path.
    pub fn state_at_s(&self, s: f64) -> Option<Sample> {
        let (lo, hi) = (self.s_start(), self.s_end());
        if !(s >= lo && s <= hi) {
            return None;
        }
        if self.segments.is_empty() {
            return Some(self.samples[0]);
        }
        let idx = self
            .segments
            .partition_point(|g| g.s_end() < s)
            .min(self.segments.len() - 1);
        let seg = &self.segments[idx];
        let t = invert_s(seg, s);
        let y = seg.eval(t);
        Some(Sample {
            s,
            tau: seg.tau0 + t * seg.h,
            state: GeodesicState::new(y[X], y[R], y[THETA]),
        })
    }

    /// Writes `s,x,r,theta` rows, one per sample.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(b"s,x,r,theta\n")?;
        for smp in &self.samples {
            writeln!(
                w,
                "{},{},{},{}",
                fmt_f64(smp.s),
                fmt_f64(smp.state.x),
                fmt_f64(smp.state.r),
                fmt_f64(smp.state.theta)
            )?;
        }
        Ok(())
    }

    /// Closes a path that ends on the section `x = 0` by appending its mirror
    /// image `x -> -x` traversed backwards.
    pub(crate) fn reflected_loop(&self) -> GeodesicPath {
        let end = *self.last();
        let (s_e, tau_e, th_e) = (end.s, end.tau, end.state.theta);
        let sign = [-1.0, 1.0, -1.0, -1.0];
        let offset = [0.0, 0.0, 2.0 * th_e, 2.0 * s_e];
        let mirror = |smp: &Sample| Sample {
            s: 2.0 * s_e - smp.s,
            tau: 2.0 * tau_e - smp.tau,
            state: GeodesicState::new(-smp.state.x, smp.state.r, 2.0 * th_e - smp.state.theta),
        };

        let mut out = self.clone();
        for seg in self.segments.iter().rev() {
            out.segments.push(seg.reversed_affine(sign, offset, tau_e));
        }
        for smp in self.samples.iter().rev().skip(1) {
            out.push_sample(mirror(smp));
        }
        let start = mirror(self.first());
        out.crossings.push(CrossingRecord {
            s: start.s,
            r: start.state.r,
            theta: start.state.theta,
            x: start.state.x,
        });
        out.fate = Some(Fate::CrossingLimitReached);
        out
    }

    /// Largest gap in arc length between consecutive samples.
    fn max_gap(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| w[1].s - w[0].s)
            .fold(0.0, f64::max)
    }
}

/// Solves `s(t) = target` on one segment.
fn invert_s(seg: &Segment, target: f64) -> f64 {
    let (s0, s1) = (seg.s_start(), seg.s_end());
    if target <= s0 {
        return 0.0;
    }
    if target >= s1 {
        return 1.0;
    }
    let mut t = ((target - s0) / (s1 - s0)).clamp(0.0, 1.0);
    for _ in 0..20 {
        let g = seg.eval(t)[S] - target;
        let d = seg.deriv(t)[S];
        if g == 0.0 {
            return t;
        }
        if !(d > 0.0) {
            break;
        }
        let next = t - g / d;
        if !(0.0..=1.0).contains(&next) {
            break;
        }
        if (next - t).abs() <= 1e-16 {
            return next;
        }
        t = next;
    }
    bisect(|t| seg.eval(t)[S] - target, 0.0, 1.0, 1e-16).unwrap_or(t)
}

impl Profile for GeodesicPath {
    fn arc_integral(&self, f: &mut dyn FnMut(f64, f64) -> f64, window: Window) -> f64 {
        let mut total = 0.0;
        for seg in &self.segments {
            let mut g = |t: f64| {
                let y = seg.eval(t);
                if y[R] > 0.0 {
                    f(y[X], y[R]) * seg.deriv(t)[S]
                } else {
                    0.0
                }
            };
            for (a, b) in inside_pieces(seg, window) {
                let rough = gl7().integrate(&mut g, a, b);
                let tol = 1e-15 * rough.abs().max(f64::MIN_POSITIVE);
                total += adaptive_gauss(&mut g, a, b, tol);
            }
        }
        total
    }

    fn arc_intervals(&self, window: Window) -> Vec<(f64, f64)> {
        let inside = |s: f64| {
            let p = self.state_at_s(s).expect("in range");
            window.distance(p.state.x, p.state.r) - window.radius
        };
        let mut out = Vec::new();
        let mut open: Option<f64> = None;
        let mut prev: Option<(f64, f64)> = None;
        for smp in &self.samples {
            let d = window.distance(smp.state.x, smp.state.r) - window.radius;
            match prev {
                None => {
                    if d <= 0.0 {
                        open = Some(smp.s);
                    }
                }
                Some((ps, pd)) => {
                    if (pd <= 0.0) != (d <= 0.0) {
                        let edge = bisect(inside, ps, smp.s, 1e-14).unwrap_or(smp.s);
                        match open.take() {
                            Some(a) => out.push((a, edge)),
                            None => open = Some(edge),
                        }
                    }
                }
            }
            prev = Some((smp.s, d));
        }
        if let Some(a) = open {
            out.push((a, self.s_end()));
        }
        out
    }

    fn point_at(&self, s: f64) -> (f64, f64) {
        let p = self
            .state_at_s(s.clamp(self.s_start(), self.s_end()))
            .expect("clamped");
        (p.state.x, p.state.r)
    }

    fn max_distance(&self, x0: f64) -> Option<f64> {
        let far = self
            .samples
            .iter()
            .map(|s| (s.state.x - x0).hypot(s.state.r))
            .fold(0.0, f64::max);
        Some(far + self.max_gap())
    }

    fn ln_gaussian_tail(&self, n: Dimension, window: Window, t0: f64) -> f64 {
        if self.max_distance(window.x0).unwrap_or(f64::INFINITY) <= window.radius {
            return f64::NEG_INFINITY;
        }
        self.arc_length().max(f64::MIN_POSITIVE).ln()
            + ln_shell_sup(n.minus_one(), t0, window.radius)
    }
}

/// Sub-intervals of `[0, 1]` on which the segment lies inside the window.
fn inside_pieces(seg: &Segment, w: Window) -> Vec<(f64, f64)> {
    const PROBES: usize = 8;
    let dist = |t: f64| {
        let y = seg.eval(t);
        w.distance(y[X], y[R]) - w.radius
    };
    let mut out = Vec::new();
    let mut open: Option<f64> = None;
    let mut prev_t = 0.0;
    let mut prev_d = dist(0.0);
    if prev_d <= 0.0 {
        open = Some(0.0);
    }
    for i in 1..=PROBES {
        let t = i as f64 / PROBES as f64;
        let d = dist(t);
        if (prev_d <= 0.0) != (d <= 0.0) {
            let edge = bisect(dist, prev_t, t, 1e-15).unwrap_or(t);
            match open.take() {
                Some(a) => out.push((a, edge)),
                None => open = Some(edge),
            }
        }
        prev_t = t;
        prev_d = d;
    }
    if let Some(a) = open {
        out.push((a, 1.0));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesic::{integrate, IntegratorConfig};
    use approx::assert_relative_eq;

    fn dim(n: u64) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn arc(n: Dimension, r0: f64, len: f64) -> GeodesicPath {
        let cfg = IntegratorConfig {
            max_arclength: len,
            ..Default::default()
        };
        integrate(n, GeodesicState::new(0.0, r0, 0.3), &cfg).unwrap()
    }

    #[test]
    fn state_at_s_hits_samples() {
        let p = arc(dim(2), 1.0, 2.0);
        for smp in p.samples() {
            let q = p.state_at_s(smp.s).unwrap();
            assert!((q.state.x - smp.state.x).abs() < 1e-12);
            assert!((q.state.r - smp.state.r).abs() < 1e-12);
            assert!((q.state.theta - smp.state.theta).abs() < 1e-12);
        }
        assert!(p.state_at_s(-0.1).is_none());
        assert!(p.state_at_s(2.5).is_none());
    }

    #[test]
    fn euclidean_length_integral() {
        let p = arc(dim(3), 1.2, 1.7);
        let w = p.length_window(dim(3));
        assert_relative_eq!(
            p.arc_integral(&mut |_, _| 1.0, w),
            1.7,
            max_relative = 1e-13
        );
        let iv = p.arc_intervals(w);
        assert_eq!(iv.len(), 1);
        assert_relative_eq!(iv[0].1 - iv[0].0, 1.7, max_relative = 1e-13);
    }

    #[test]
    fn csv_layout() {
        let p = arc(dim(2), 1.0, 0.2);
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("s,x,r,theta"));
        assert_eq!(lines.count(), p.samples().len());
        assert!(!text.contains('\r'));
    }

    #[test]
    fn samples_strictly_increase() {
        let p = arc(dim(2), 0.5, 12.0);
        for w in p.samples().windows(2) {
            assert!(w[1].s > w[0].s);
        }
    }
}

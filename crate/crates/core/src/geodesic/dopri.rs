//! Dormand–Prince 5(4) stepper for the desingularised geodesic field.
//!
//! The integrator runs in the parameter `tau` with `ds = r dtau`:
//!
//! ```text
//! x_tau = r cos(theta)          r_tau = r sin(theta)
//! theta_tau = (x r / 2) sin(theta) + ((n-1) - r^2/2) cos(theta)
//! s_tau = r
//! ```
//!
//! Dividing by `r` recovers the unit-speed equations. The field is smooth
//! up to `r = 0`, where the axis becomes a line of saddle points; a profile
//! that meets the axis at a right angle approaches one saddle and leaves
//! along the reflected branch instead of blowing up.

use crate::types::Dimension;

pub(crate) const DIM: usize = 4;
pub(crate) const X: usize = 0;
pub(crate) const R: usize = 1;
pub(crate) const THETA: usize = 2;
pub(crate) const S: usize = 3;

pub(crate) type Vec4 = [f64; DIM];

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Geodesic vector field for a fixed dimension.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Field {
    cylinder: f64,
}

impl Field {
    pub(crate) fn new(n: Dimension) -> Self {
        Field {
            cylinder: n.cylinder_radius(),
        }
    }

    #[inline]
    pub(crate) fn eval(&self, y: &Vec4) -> Vec4 {
        let (sin, cos) = y[THETA].sin_cos();
        let r = y[R];
        let c = self.cylinder;
        [
            r * cos,
            r * sin,
            0.5 * y[X] * r * sin + 0.5 * (c - r) * (c + r) * cos,
            r,
        ]
    }
}

/// Result of one trial step.
pub(crate) struct Trial {
    pub y1: Vec4,
    pub k7: Vec4,
    pub err: Vec4,
    /// Hairer's continuous-extension coefficients.
    pub cont: [Vec4; 5],
}

#[inline]
fn axpy(y: &Vec4, h: f64, terms: &[(f64, &Vec4)]) -> Vec4 {
    let mut out = *y;
    for i in 0..DIM {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

pub(crate) fn trial_step(field: &Field, y: &Vec4, k1: &Vec4, h: f64) -> Trial {
    let k2 = field.eval(&axpy(y, h, &[(A21, k1)]));
    let k3 = field.eval(&axpy(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = field.eval(&axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = field.eval(&axpy(
        y,
        h,
        &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)],
    ));
    let k6 = field.eval(&axpy(
        y,
        h,
        &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
    ));
    let y1 = axpy(
        y,
        h,
        &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
    );
    let k7 = field.eval(&y1);

    let mut err = [0.0; DIM];
    let mut cont = [[0.0; DIM]; 5];
    for i in 0..DIM {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let ydiff = y1[i] - y[i];
        let bspl = h * k1[i] - ydiff;
        cont[0][i] = y[i];
        cont[1][i] = ydiff;
        cont[2][i] = bspl;
        cont[3][i] = ydiff - h * k7[i] - bspl;
        cont[4][i] =
            h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
    }
    Trial { y1, k7, err, cont }
}

/// Degree-4 dense-output polynomial of one accepted step, in monomial form
/// on the local parameter `t in [0, 1]` (`tau = tau0 + t h`).
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub(crate) tau0: f64,
    pub(crate) h: f64,
    pub(crate) coef: [[f64; 5]; DIM],
}

impl Segment {
    pub(crate) fn from_cont(tau0: f64, h: f64, cont: &[Vec4; 5]) -> Self {
        // y(t) = c0 + t(c1 + (1-t)(c2 + t(c3 + (1-t)c4))) expanded in powers of t
        let mut coef = [[0.0; 5]; DIM];
        for (i, row) in coef.iter_mut().enumerate() {
            let [c0, c1, c2, c3, c4] = [cont[0][i], cont[1][i], cont[2][i], cont[3][i], cont[4][i]];
            *row = [c0, c1 + c2, c3 + c4 - c2, -c3 - 2.0 * c4, c4];
        }
        Segment { tau0, h, coef }
    }

    #[inline]
    pub(crate) fn eval(&self, t: f64) -> Vec4 {
        let mut out = [0.0; DIM];
        for (o, c) in out.iter_mut().zip(&self.coef) {
            *o = c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * c[4])));
        }
        out
    }

    /// Derivative with respect to the local parameter `t`.
    #[inline]
    pub(crate) fn deriv(&self, t: f64) -> Vec4 {
        let mut out = [0.0; DIM];
        for (o, c) in out.iter_mut().zip(&self.coef) {
            *o = c[1] + t * (2.0 * c[2] + t * (3.0 * c[3] + t * 4.0 * c[4]));
        }
        out
    }

    pub(crate) fn s_start(&self) -> f64 {
        self.coef[S][0]
    }

    pub(crate) fn s_end(&self) -> f64 {
        self.coef[S].iter().sum()
    }

    /// The same polynomial restricted to `[0, t_end]` and rescaled to `[0, 1]`.
    pub(crate) fn truncated(&self, t_end: f64) -> Segment {
        let mut coef = self.coef;
        for row in coef.iter_mut() {
            let mut p = 1.0;
            for c in row.iter_mut() {
                *c *= p;
                p *= t_end;
            }
        }
        Segment {
            tau0: self.tau0,
            h: self.h * t_end,
            coef,
        }
    }

    /// Segment traversed backwards (`t -> 1 - t`) with each component mapped
    /// by `y -> offset + sign * y`; `tau` is reflected about `tau_pivot`.
    pub(crate) fn reversed_affine(&self, sign: Vec4, offset: Vec4, tau_pivot: f64) -> Segment {
        const BINOM: [[f64; 5]; 5] = [
            [1.0, 0.0, 0.0, 0.0, 0.0],
            [1.0, 1.0, 0.0, 0.0, 0.0],
            [1.0, 2.0, 1.0, 0.0, 0.0],
            [1.0, 3.0, 3.0, 1.0, 0.0],
            [1.0, 4.0, 6.0, 4.0, 1.0],
        ];
        let mut coef = [[0.0; 5]; DIM];
        for i in 0..DIM {
            // p(1 - t) = sum_k t^k (-1)^k sum_{j >= k} C(j, k) m_j
            for k in 0..5 {
                let mut acc = 0.0;
                #[allow(clippy::needless_range_loop)]
                for j in k..5 {
                    acc += BINOM[j][k] * self.coef[i][j];
                }
                let alt = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
                coef[i][k] = sign[i] * alt * acc;
            }
            coef[i][0] += offset[i];
        }
        Segment {
            tau0: 2.0 * tau_pivot - (self.tau0 + self.h),
            h: self.h,
            coef,
        }
    }
}

/// Hairer's step-size controller with Lund stabilisation (a PI controller).
#[derive(Debug, Clone)]
pub(crate) struct Controller {
    fac_old: f64,
    rejected: bool,
}

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

impl Controller {
    pub(crate) fn new() -> Self {
        Controller {
            fac_old: 1e-4,
            rejected: false,
        }
    }

    /// Returns `(accepted, next_h)` given the scaled error norm.
    pub(crate) fn propose(&mut self, err: f64, h: f64) -> (bool, f64) {
        let fac11 = err.powf(EXPO1);
        if err <= 1.0 {
            let fac =
                (fac11 / self.fac_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = h / fac;
            if self.rejected {
                h_new = h_new.min(h);
            }
            self.fac_old = err.max(1e-4);
            self.rejected = false;
            (true, h_new)
        } else {
            self.rejected = true;
            (false, h / (fac11 / SAFETY).min(1.0 / FAC_MIN))
        }
    }

    pub(crate) fn reject_hard(&mut self) {
        self.rejected = true;
    }
}

/// Per-component error weights. `r` is controlled purely relatively so that
/// excursions towards the axis keep their relative accuracy.
#[inline]
pub(crate) fn error_norm(err: &Vec4, y0: &Vec4, y1: &Vec4, rel_tol: f64, abs_tol: f64) -> f64 {
    let mut sum = 0.0;
    for i in 0..DIM {
        let scale_y = y0[i].abs().max(y1[i].abs());
        let sc = if i == R {
            (rel_tol * scale_y).max(f64::MIN_POSITIVE)
        } else {
            abs_tol + rel_tol * scale_y
        };
        let e = err[i] / sc;
        sum += e * e;
    }
    (sum / DIM as f64).sqrt()
}

/// Hairer's starting-step heuristic.
pub(crate) fn initial_step(
    field: &Field,
    y0: &Vec4,
    f0: &Vec4,
    rel_tol: f64,
    abs_tol: f64,
    h_max: f64,
) -> f64 {
    let sc = |i: usize, v: f64| {
        if i == R {
            rel_tol * v.abs()
        } else {
            abs_tol + rel_tol * v.abs()
        }
    };
    let norm = |v: &Vec4| -> f64 {
        let mut sum = 0.0;
        for i in 0..DIM {
            let e = v[i] / sc(i, y0[i]);
            sum += e * e;
        }
        (sum / DIM as f64).sqrt()
    };
    let d0 = norm(y0);
    let d1 = norm(f0);
    let mut h0 = if d0 < 1e-10 || d1 < 1e-10 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h0 = h0.min(h_max);
    let y1 = axpy(y0, h0, &[(1.0, f0)]);
    let f1 = field.eval(&y1);
    let mut diff = [0.0; DIM];
    for i in 0..DIM {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = norm(&diff) / h0;
    let big = d1.max(d2);
    let h1 = if big <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / big).powf(0.2)
    };
    (100.0 * h0).min(h1).min(h_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(n: u64) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn monomial_form_matches_hairer_form() {
        let field = Field::new(dim(2));
        let y = [0.3, 1.1, 0.4, 0.0];
        let k1 = field.eval(&y);
        let h = 0.2;
        let trial = trial_step(&field, &y, &k1, h);
        let seg = Segment::from_cont(0.0, h, &trial.cont);
        for &t in &[0.0, 0.13, 0.5, 0.77, 1.0] {
            let t1 = 1.0 - t;
            let got = seg.eval(t);
            for (i, g) in got.iter().enumerate() {
                let c = |j: usize| trial.cont[j][i];
                let hairer = c(0) + t * (c(1) + t1 * (c(2) + t * (c(3) + t1 * c(4))));
                assert!((g - hairer).abs() < 1e-15);
            }
        }
        let end = seg.eval(1.0);
        for (e, y1) in end.iter().zip(&trial.y1) {
            assert!((e - y1).abs() < 1e-15);
        }
        // dense output matches the field at both ends
        let d0 = seg.deriv(0.0);
        let d1 = seg.deriv(1.0);
        for i in 0..DIM {
            assert!((d0[i] - h * k1[i]).abs() < 1e-14);
            assert!((d1[i] - h * trial.k7[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn truncation_and_reversal() {
        let field = Field::new(dim(3));
        let y = [-0.2, 0.9, 0.1, 2.0];
        let k1 = field.eval(&y);
        let trial = trial_step(&field, &y, &k1, 0.3);
        let seg = Segment::from_cont(1.5, 0.3, &trial.cont);

        let tr = seg.truncated(0.4);
        for &u in &[0.0, 0.25, 1.0] {
            let a = tr.eval(u);
            let b = seg.eval(0.4 * u);
            for i in 0..DIM {
                assert!((a[i] - b[i]).abs() < 1e-14);
            }
        }

        let sign = [-1.0, 1.0, -1.0, -1.0];
        let offset = [0.0, 0.0, 6.0, 10.0];
        let rev = seg.reversed_affine(sign, offset, 2.0);
        assert!((rev.tau0 - (4.0 - 1.8)).abs() < 1e-15);
        for &t in &[0.0, 0.3, 1.0] {
            let a = rev.eval(t);
            let b = seg.eval(1.0 - t);
            for i in 0..DIM {
                assert!((a[i] - (offset[i] + sign[i] * b[i])).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn field_is_exactly_stationary_on_cylinder() {
        for n in 2..10 {
            let n = dim(n);
            let f = Field::new(n);
            let d = f.eval(&[3.7, n.cylinder_radius(), 0.0, 1.0]);
            assert_eq!(d[R], 0.0);
            assert_eq!(d[THETA], 0.0);
        }
    }

    #[test]
    fn controller_shrinks_on_rejection() {
        let mut c = Controller::new();
        let (ok, h) = c.propose(4.0, 0.1);
        assert!(!ok && h < 0.1);
        let (ok, h2) = c.propose(0.5, h);
        assert!(ok && h2 <= h);
    }
}

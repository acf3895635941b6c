//! Double-double arithmetic (about 32 significant digits) for the constant
//! tables: `y_n`, `κ_n` and `E_n` in extended precision.
//!
//! Only what those formulas need is implemented: the four operations,
//! `sqrt`, `exp`, `ln` and `ln Γ` at half-integers.
//!
//! `ln E_n` is a difference of logarithms of size about `n ln n`, so the
//! relative accuracy of `E_n` degrades from ~1e-29 at small `n` to ~1e-24
//! at `n = 10^6`; still far beyond double precision.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::types::Dimension;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: Self = DoubleDouble { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = DoubleDouble { hi: 1.0, lo: 0.0 };
    pub const PI: Self = DoubleDouble {
        hi: std::f64::consts::PI,
        lo: 1.2246467991473532e-16,
    };
    pub const LN_2: Self = DoubleDouble {
        hi: std::f64::consts::LN_2,
        lo: 2.3190468138462996e-17,
    };

    pub const fn new(hi: f64, lo: f64) -> Self {
        DoubleDouble { hi, lo }
    }

    pub fn from_f64(v: f64) -> Self {
        DoubleDouble { hi: v, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn scale_pow2(self, k: i32) -> Self {
        let f = 2f64.powi(k);
        DoubleDouble {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    pub fn recip(self) -> Self {
        Self::ONE / self
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 {
                Self::ZERO
            } else {
                Self::from_f64(f64::NAN)
            };
        }
        let s = self.hi.sqrt();
        let (p, e) = two_prod(s, s);
        let diff = (self.hi - p - e + self.lo) / (2.0 * s);
        let (hi, lo) = quick_two_sum(s, diff);
        DoubleDouble { hi, lo }
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Self::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Self::ZERO;
        }
        const SQUARINGS: i32 = 10;
        let k = (self.hi / Self::LN_2.hi).round();
        let r = (self - Self::LN_2 * Self::from_f64(k)).scale_pow2(-SQUARINGS);
        // Taylor series; |r| < 4e-4 so 14 terms exceed double-double accuracy
        let mut term = Self::ONE;
        let mut sum = Self::ONE;
        for i in 1..=14 {
            term = term * r / Self::from_f64(i as f64);
            sum = sum + term;
        }
        for _ in 0..SQUARINGS {
            sum = sum * sum;
        }
        // split the power of two so neither factor overflows on its own
        let k = k as i32;
        sum.scale_pow2(k / 2).scale_pow2(k - k / 2)
    }

    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return Self::from_f64(f64::NAN);
        }
        let mut y = Self::from_f64(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - Self::ONE;
        }
        y
    }

    /// Seventeen-plus significant digits in scientific notation.
    pub fn to_sci_string(self, digits: usize) -> String {
        let v = self.to_f64();
        if v == 0.0 || !v.is_finite() {
            return format!("{v:e}");
        }
        let neg = v < 0.0;
        let mut x = if neg { -self } else { self };
        let mut e10 = x.hi.log10().floor() as i32;
        x = x / pow10(e10);
        if x.hi >= 10.0 {
            x = x / Self::from_f64(10.0);
            e10 += 1;
        } else if x.hi < 1.0 {
            x = x * Self::from_f64(10.0);
            e10 -= 1;
        }
        let mut out = Vec::with_capacity(digits);
        for _ in 0..digits {
            let d = x.hi.floor().clamp(0.0, 9.0);
            out.push(d as u8);
            x = (x - Self::from_f64(d)) * Self::from_f64(10.0);
        }
        let mut s = String::new();
        if neg {
            s.push('-');
        }
        s.push((b'0' + out[0]) as char);
        s.push('.');
        for &d in &out[1..] {
            s.push((b'0' + d) as char);
        }
        s.push_str(&format!("e{e10}"));
        s
    }
}

fn pow10(e: i32) -> DoubleDouble {
    let mut base = DoubleDouble::from_f64(10.0);
    let mut acc = DoubleDouble::ONE;
    let mut k = e.unsigned_abs();
    while k > 0 {
        if k & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        k >>= 1;
    }
    if e < 0 {
        acc.recip()
    } else {
        acc
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sci_string(32))
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b * Self::from_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * Self::from_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo } + Self::from_f64(q3)
    }
}

type Dd = DoubleDouble;

fn dd(v: f64) -> Dd {
    Dd::from_f64(v)
}

const PRODUCT_LIMIT: u64 = 300;

/// `ln Γ(k/2)` in double-double.
pub fn ln_gamma_half(k: u64) -> Dd {
    assert!(k >= 1);
    if k <= PRODUCT_LIMIT {
        let (mut z, mut acc) = if k.is_multiple_of(2) {
            (1.0, Dd::ONE)
        } else {
            (0.5, Dd::PI.sqrt())
        };
        let target = k as f64 / 2.0;
        while z < target {
            acc = acc * dd(z);
            z += 1.0;
        }
        return acc.ln();
    }
    // Stirling series with Bernoulli numbers B_2 .. B_24
    const B: [(f64, f64); 12] = [
        (1.0, 6.0),
        (-1.0, 30.0),
        (1.0, 42.0),
        (-1.0, 30.0),
        (5.0, 66.0),
        (-691.0, 2730.0),
        (7.0, 6.0),
        (-3617.0, 510.0),
        (43867.0, 798.0),
        (-174611.0, 330.0),
        (854513.0, 138.0),
        (-236364091.0, 2730.0),
    ];
    let z = dd(k as f64) / dd(2.0);
    let zinv = z.recip();
    let zinv2 = zinv * zinv;
    let mut pow = zinv;
    let mut series = Dd::ZERO;
    for (j, &(num, den)) in B.iter().enumerate() {
        let two_j = 2.0 * (j as f64 + 1.0);
        let coef = dd(num) / (dd(den) * dd(two_j) * dd(two_j - 1.0));
        series = series + coef * pow;
        pow = pow * zinv2;
    }
    let half_ln_2pi = (dd(2.0) * Dd::PI).ln() / dd(2.0);
    (z - dd(0.5)) * z.ln() - z + half_ln_2pi + series
}

/// `y_n` and `ln κ_n` in double-double.
pub fn kappa_min_extended(n: Dimension) -> (Dd, Dd) {
    let m = dd(n.minus_one());
    let y = (m + (dd(9.0) * m * m + dd(8.0) * m).sqrt()) / dd(2.0);
    let ln_kappa = (y + m).ln() - dd(n.as_f64()) * y.ln() + y / dd(2.0);
    (y, ln_kappa)
}

/// `ln E_n` in double-double.
pub fn ln_entropy_bound_extended(n: Dimension) -> Dd {
    let (_, ln_kappa) = kappa_min_extended(n);
    let half_n = dd(n.as_f64()) / dd(2.0);
    let two_pi = dd(2.0) * Dd::PI;
    let ln_omega = Dd::LN_2 + half_n * Dd::PI.ln() - ln_gamma_half(n.get());
    two_pi.ln() + ln_omega - half_n * (dd(2.0) * two_pi).ln() - ln_kappa / dd(2.0)
}

/// Extended-precision row of the constants table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedConstants {
    pub y_n: Dd,
    pub ln_kappa_n: Dd,
    pub e_n: Dd,
}

pub fn extended_constants(n: Dimension) -> ExtendedConstants {
    let (y_n, ln_kappa_n) = kappa_min_extended(n);
    ExtendedConstants {
        y_n,
        ln_kappa_n,
        e_n: ln_entropy_bound_extended(n).exp(),
    }
}

//! Double-double arithmetic (an unevaluated sum `hi + lo` carrying ~32
//! significant digits), used only where the Hartman–Watson integral cancels
//! beyond what `f64` can resolve.
//!
//! Only the operations that integral needs are provided: the four arithmetic
//! operations, `exp`, `sin` and `sinh`/`cosh`.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const LN2: Dd = Dd {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};
pub(crate) const PI: Dd = Dd {
    hi: std::f64::consts::PI,
    lo: 1.224_646_799_147_353_2e-16,
};
const TWO_PI: Dd = Dd {
    hi: 2.0 * std::f64::consts::PI,
    lo: 2.449_293_598_294_706_4e-16,
};
const FRAC_PI_2: Dd = Dd {
    hi: std::f64::consts::FRAC_PI_2,
    lo: 6.123_233_995_736_766e-17,
};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
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

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add_f64(self, b: f64) -> Self {
        let (s, e) = two_sum(self.hi, b);
        let e = e + self.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    /// Multiplication by an exact power of two.
    #[inline]
    fn ldexp(self, k: i32) -> Self {
        let f = 2f64.powi(k);
        Dd {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        // a = k ln2 + r, then exp(r) = (1 + s)^(2^9) with s = expm1(r / 2^9).
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2.mul_f64(k)).ldexp(-9);
        let mut term = r;
        let mut s = r;
        for n in 2..=12 {
            term = (term * r) / Dd::from_f64(n as f64);
            s = s + term;
            if term.hi.abs() < 1e-34 {
                break;
            }
        }
        for _ in 0..9 {
            s = s.mul_f64(2.0) + s * s;
        }
        (s + Dd::ONE).ldexp(k as i32)
    }

    /// Sine; argument reduced modulo 2π and then to an octant around a
    /// multiple of π/2.
    pub fn sin(self) -> Self {
        let k = (self.hi / TWO_PI.hi).round();
        let r = self - TWO_PI.mul_f64(k);
        let j = (r.hi / FRAC_PI_2.hi).round();
        let r = r - FRAC_PI_2.mul_f64(j);
        match (j as i64).rem_euclid(4) {
            0 => sin_taylor(r),
            1 => cos_taylor(r),
            2 => -sin_taylor(r),
            _ => -cos_taylor(r),
        }
    }

    /// Returns `(sinh x, cosh x)`.
    pub fn sinh_cosh(self) -> (Self, Self) {
        let e = self.exp();
        let inv = Dd::ONE / e;
        ((e - inv).mul_f64(0.5), (e + inv).mul_f64(0.5))
    }
}

fn sin_taylor(x: Dd) -> Dd {
    let x2 = x * x;
    let mut term = x;
    let mut s = x;
    let mut n = 1.0;
    loop {
        term = -((term * x2) / Dd::from_f64((n + 1.0) * (n + 2.0)));
        s = s + term;
        n += 2.0;
        if term.hi.abs() < 1e-34 || n > 60.0 {
            break;
        }
    }
    s
}

fn cos_taylor(x: Dd) -> Dd {
    let x2 = x * x;
    let mut term = Dd::ONE;
    let mut s = Dd::ONE;
    let mut n = 0.0;
    loop {
        term = -((term * x2) / Dd::from_f64((n + 1.0) * (n + 2.0)));
        s = s + term;
        n += 2.0;
        if term.hi.abs() < 1e-34 || n > 60.0 {
            break;
        }
    }
    s
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let e = e + t;
        let (s, e) = quick_two_sum(s, e);
        let e = e + f;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add_f64(q3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference digits below were produced with 50-digit arithmetic.

    #[test]
    fn exp_of_one_matches_e_to_32_digits() {
        let e = Dd::ONE.exp();
        assert_eq!(e.hi, std::f64::consts::E);
        assert!((e.lo - 1.445_646_891_729_250_2e-16).abs() < 1e-31);
    }

    #[test]
    fn sin_of_pi_is_tiny() {
        let s = PI.sin();
        // sin(π_dd) equals the truncation error of π_dd, below 1e-32.
        assert!(s.to_f64().abs() < 1e-31, "{s:?}");
    }

    #[test]
    fn exp_and_log_identities_hold_to_dd_precision() {
        for &x in &[-30.0, -2.5, -1e-3, 0.3, 7.0, 40.0] {
            let a = Dd::from_f64(x);
            let prod = a.exp() * (-a).exp();
            assert!((prod - Dd::ONE).to_f64().abs() < 1e-30, "x={x}");
        }
    }

    #[test]
    fn pythagorean_identity_for_large_arguments() {
        for &x in &[0.1, 1.0, 3.0, 17.25, 123.456, 600.0] {
            let a = Dd::from_f64(x);
            let s = a.sin();
            let c = (a + FRAC_PI_2).sin();
            let one = s * s + c * c;
            assert!((one - Dd::ONE).to_f64().abs() < 1e-29, "x={x}");
            assert!((s.to_f64() - x.sin()).abs() < 1e-13);
        }
    }

    #[test]
    fn division_round_trips() {
        let a = Dd::from_f64(1.0) / Dd::from_f64(3.0);
        let back = a.mul_f64(3.0);
        assert!((back - Dd::ONE).to_f64().abs() < 1e-31);
    }
}

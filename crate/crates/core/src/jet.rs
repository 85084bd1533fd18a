//! Truncated Taylor series ("jets") in one variable.
//!
//! A [`Jet`] stores normalized Taylor coefficients `c[k] = f^(k)(x0) / k!`
//! up to order [`JET_ORDER`]. Arithmetic on jets propagates derivatives
//! exactly (up to rounding), which is how the frame module obtains curvature
//! derivatives without differencing.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Highest Taylor order carried by a [`Jet`].
pub const JET_ORDER: usize = 4;
const LEN: usize = JET_ORDER + 1;

/// Numeric type the expression evaluator and the wedge product are generic
/// over. Implemented for `f64` and [`Jet`].
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn constant(v: f64) -> Self;
    /// Value part (the 0th Taylor coefficient for jets).
    fn value(&self) -> f64;
    fn scale(self, k: f64) -> Self;
    /// True when every carried coefficient is finite.
    fn all_finite(&self) -> bool;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn tan(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn tanh(self) -> Self;
    fn exp(self) -> Self;
    /// Caller guarantees `value() > 0`.
    fn ln(self) -> Self;
    /// Caller guarantees `value() >= 0` (and `> 0` for jets).
    fn sqrt(self) -> Self;
    /// Caller guarantees the power is defined at `value()`.
    fn powf(self, exponent: f64) -> Self;
}

impl Scalar for f64 {
    fn constant(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn tan(self) -> Self {
        f64::tan(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn powf(self, exponent: f64) -> Self {
        if exponent.fract() == 0.0 && exponent.abs() <= i32::MAX as f64 {
            self.powi(exponent as i32)
        } else {
            f64::powf(self, exponent)
        }
    }
}

/// Truncated Taylor expansion `f(x0 + h) = sum_k c[k] h^k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub c: [f64; LEN],
}

impl Default for Jet {
    fn default() -> Self {
        Jet::constant(0.0)
    }
}

const FACTORIAL: [f64; 8] = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0, 5040.0];

impl Jet {
    pub fn from_coeffs(c: [f64; LEN]) -> Self {
        Jet { c }
    }

    /// The identity jet `x0 + h`.
    pub fn variable(x0: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = x0;
        c[1] = 1.0;
        Jet { c }
    }

    /// Jet from plain derivative values `f(x0), f'(x0), ..., f^(K)(x0)`.
    pub fn from_derivatives(d: &[f64]) -> Self {
        let mut c = [0.0; LEN];
        for (k, v) in d.iter().take(LEN).enumerate() {
            c[k] = v / FACTORIAL[k];
        }
        Jet { c }
    }

    /// k-th derivative at the expansion point.
    pub fn derivative_at(&self, k: usize) -> f64 {
        self.c[k] * FACTORIAL[k]
    }

    /// Jet of `f'`. The top coefficient becomes unknown and is set to zero,
    /// so the result is valid to one order less than `self`.
    pub fn derivative(&self) -> Jet {
        let mut c = [0.0; LEN];
        for k in 0..LEN - 1 {
            c[k] = (k as f64 + 1.0) * self.c[k + 1];
        }
        Jet { c }
    }

    /// Jet of the antiderivative with value `c0` at the expansion point.
    pub fn integral(&self, c0: f64) -> Jet {
        let mut c = [0.0; LEN];
        c[0] = c0;
        for k in 1..LEN {
            c[k] = self.c[k - 1] / k as f64;
        }
        Jet { c }
    }

    /// `self` re-expanded along `inner`: if `self` is the expansion of `f`
    /// about `inner.c[0]`, returns the expansion of `f(inner(h))`.
    pub fn compose(&self, inner: &Jet) -> Jet {
        let mut delta = *inner;
        delta.c[0] = 0.0;
        let mut acc = Jet::constant(self.c[LEN - 1]);
        for k in (0..LEN - 1).rev() {
            acc = acc * delta;
            acc.c[0] += self.c[k];
        }
        acc
    }

    fn recip(self) -> Jet {
        Jet::constant(1.0) / self
    }

    fn sin_cos(self) -> (Jet, Jet) {
        let a = self.c;
        let mut s = [0.0; LEN];
        let mut co = [0.0; LEN];
        s[0] = a[0].sin();
        co[0] = a[0].cos();
        for k in 1..LEN {
            let mut ss = 0.0;
            let mut cc = 0.0;
            for j in 1..=k {
                let w = j as f64 * a[j];
                ss += w * co[k - j];
                cc += w * s[k - j];
            }
            s[k] = ss / k as f64;
            co[k] = -cc / k as f64;
        }
        (Jet { c: s }, Jet { c: co })
    }

    fn sinh_cosh(self) -> (Jet, Jet) {
        let a = self.c;
        let mut s = [0.0; LEN];
        let mut co = [0.0; LEN];
        s[0] = a[0].sinh();
        co[0] = a[0].cosh();
        for k in 1..LEN {
            let mut ss = 0.0;
            let mut cc = 0.0;
            for j in 1..=k {
                let w = j as f64 * a[j];
                ss += w * co[k - j];
                cc += w * s[k - j];
            }
            s[k] = ss / k as f64;
            co[k] = cc / k as f64;
        }
        (Jet { c: s }, Jet { c: co })
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut c = self.c;
        for (x, y) in c.iter_mut().zip(o.c) {
            *x += y;
        }
        Jet { c }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        let mut c = self.c;
        for (x, y) in c.iter_mut().zip(o.c) {
            *x -= y;
        }
        Jet { c }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut c = [0.0; LEN];
        for k in 0..LEN {
            let mut acc = 0.0;
            for i in 0..=k {
                acc += self.c[i] * o.c[k - i];
            }
            c[k] = acc;
        }
        Jet { c }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        let mut q = [0.0; LEN];
        for k in 0..LEN {
            let mut acc = self.c[k];
            for i in 1..=k {
                acc -= o.c[i] * q[k - i];
            }
            q[k] = acc / o.c[0];
        }
        Jet { c: q }
    }
}

impl Scalar for Jet {
    fn constant(v: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = v;
        Jet { c }
    }

    fn value(&self) -> f64 {
        self.c[0]
    }

    fn scale(self, k: f64) -> Self {
        let mut c = self.c;
        for x in c.iter_mut() {
            *x *= k;
        }
        Jet { c }
    }

    fn all_finite(&self) -> bool {
        self.c.iter().all(|v| v.is_finite())
    }

    fn sin(self) -> Self {
        self.sin_cos().0
    }

    fn cos(self) -> Self {
        self.sin_cos().1
    }

    fn tan(self) -> Self {
        let (s, c) = self.sin_cos();
        s / c
    }

    fn sinh(self) -> Self {
        self.sinh_cosh().0
    }

    fn cosh(self) -> Self {
        self.sinh_cosh().1
    }

    fn tanh(self) -> Self {
        let (s, c) = self.sinh_cosh();
        s / c
    }

    fn exp(self) -> Self {
        let a = self.c;
        let mut e = [0.0; LEN];
        e[0] = a[0].exp();
        for k in 1..LEN {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * a[j] * e[k - j];
            }
            e[k] = acc / k as f64;
        }
        Jet { c: e }
    }

    fn ln(self) -> Self {
        let a = self.c;
        let mut l = [0.0; LEN];
        l[0] = a[0].ln();
        for k in 1..LEN {
            let mut acc = 0.0;
            for j in 1..k {
                acc += j as f64 * l[j] * a[k - j];
            }
            l[k] = (a[k] - acc / k as f64) / a[0];
        }
        Jet { c: l }
    }

    fn sqrt(self) -> Self {
        let a = self.c;
        let mut r = [0.0; LEN];
        r[0] = a[0].sqrt();
        for k in 1..LEN {
            let mut acc = a[k];
            for j in 1..k {
                acc -= r[j] * r[k - j];
            }
            r[k] = acc / (2.0 * r[0]);
        }
        Jet { c: r }
    }

    fn powf(self, exponent: f64) -> Self {
        // Small non-negative integer powers by repeated multiplication: valid
        // even where the base vanishes.
        if exponent.fract() == 0.0 && (0.0..=16.0).contains(&exponent) {
            let mut n = exponent as u32;
            let mut base = self;
            let mut acc = Jet::constant(1.0);
            while n > 0 {
                if n & 1 == 1 {
                    acc = acc * base;
                }
                base = base * base;
                n >>= 1;
            }
            return acc;
        }
        if exponent.fract() == 0.0 && (-16.0..0.0).contains(&exponent) {
            return self.powf(-exponent).recip();
        }
        let a = self.c;
        let mut p = [0.0; LEN];
        p[0] = a[0].powf(exponent);
        for k in 1..LEN {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += ((exponent + 1.0) * j as f64 - k as f64) * a[j] * p[k - j];
            }
            p[k] = acc / (k as f64 * a[0]);
        }
        Jet { c: p }
    }
}

//! Complex numbers over MPFR floats.

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

#[derive(Clone, PartialEq)]
pub struct XComplex {
    pub re: Float,
    pub im: Float,
}

impl fmt::Debug for XComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:e} {:+e}i)", self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Display for XComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        write!(f, "{},{}", float_to_string(&self.re, digits), float_to_string(&self.im, digits))
    }
}

/// Scientific notation with `digits` significant digits.
pub fn float_to_string(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(digits.max(1)))
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

impl XComplex {
    pub fn from_floats(re: Float, im: Float) -> Self {
        Self { re, im }
    }

    pub fn new(prec: u32, re: f64, im: f64) -> Self {
        Self { re: Float::with_val(prec, re), im: Float::with_val(prec, im) }
    }

    pub fn real(prec: u32, re: f64) -> Self {
        Self::new(prec, re, 0.0)
    }

    pub fn int(prec: u32, n: i64) -> Self {
        Self { re: Float::with_val(prec, n), im: Float::new(prec) }
    }

    pub fn from_real(re: Float) -> Self {
        let prec = re.prec();
        Self { re, im: Float::new(prec) }
    }

    pub fn zero(prec: u32) -> Self {
        Self { re: Float::new(prec), im: Float::new(prec) }
    }

    pub fn one(prec: u32) -> Self {
        Self::int(prec, 1)
    }

    pub fn i(prec: u32) -> Self {
        Self { re: Float::new(prec), im: Float::with_val(prec, 1) }
    }

    /// Exact decimal parse of real and imaginary parts.
    pub fn parse(prec: u32, re: &str, im: &str) -> Option<Self> {
        let r = Float::parse(re.trim()).ok()?;
        let i = Float::parse(im.trim()).ok()?;
        Some(Self { re: Float::with_val(prec, r), im: Float::with_val(prec, i) })
    }

    /// Parses `"re"` or `"re,im"`.
    pub fn parse_pair(prec: u32, s: &str) -> Option<Self> {
        match s.split_once(',') {
            Some((a, b)) => Self::parse(prec, a, b),
            None => Self::parse(prec, s, "0"),
        }
    }

    pub fn dec(prec: u32, s: &str) -> Self {
        Self::parse_pair(prec, s).unwrap_or_else(|| panic!("bad decimal literal {s}"))
    }

    /// e^{i theta}.
    pub fn cis(theta: &Float) -> Self {
        let p = theta.prec();
        let (s, c) = Float::with_val(p, theta).sin_cos(Float::new(p));
        Self { re: c, im: s }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Self { re: Float::with_val(prec, &self.re), im: Float::with_val(prec, &self.im) }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: Float::with_val(self.im.prec(), -&self.im) }
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }

    pub fn abs(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.hypot_ref(&self.im))
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn arg(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.im.atan2_ref(&self.re))
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn scale(&self, x: &Float) -> Self {
        let p = self.prec().max(x.prec());
        Self { re: Float::with_val(p, &self.re * x), im: Float::with_val(p, &self.im * x) }
    }

    pub fn mul_i(&self) -> Self {
        Self { re: Float::with_val(self.im.prec(), -&self.im), im: self.re.clone() }
    }

    pub fn recip(&self) -> Self {
        let d = self.norm_sqr();
        let p = self.prec();
        Self { re: Float::with_val(p, &self.re / &d), im: Float::with_val(p, -Float::with_val(p, &self.im / &d)) }
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        let m = Float::with_val(p, self.re.exp_ref());
        let (s, c) = Float::with_val(p, &self.im).sin_cos(Float::new(p));
        Self { re: Float::with_val(p, &m * &c), im: Float::with_val(p, &m * &s) }
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        let p = self.prec();
        Self { re: Float::with_val(p, self.abs().ln_ref()), im: self.arg() }
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        if self.is_zero() {
            return Self::zero(p);
        }
        let r = self.abs();
        let mut a = Float::with_val(p, &r + &self.re);
        a /= 2;
        let a = a.sqrt();
        if a.is_zero() {
            let mut b = Float::with_val(p, &r - &self.re);
            b /= 2;
            let b = b.sqrt();
            let b = if self.im.is_sign_negative() { -b } else { b };
            return Self { re: a, im: b };
        }
        let mut b = Float::with_val(p, &self.im / &a);
        b /= 2;
        Self { re: a, im: b }
    }

    /// Principal power z^w; 0^w = 0 for Re w > 0.
    pub fn powc(&self, w: &XComplex) -> Self {
        if self.is_zero() {
            return if w.is_zero() { Self::one(self.prec()) } else { Self::zero(self.prec()) };
        }
        (&self.ln() * w).exp()
    }

    pub fn powi(&self, n: i64) -> Self {
        let p = self.prec();
        if n == 0 {
            return Self::one(p);
        }
        let mut base = if n < 0 { self.recip() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one(p);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// sin(pi z), reduced by the nearest integer for accuracy near zeros.
    pub fn sin_pi(&self) -> Self {
        let p = self.prec();
        let n = self.re.to_f64().round();
        let sign = if (n as i64).rem_euclid(2) == 0 { 1 } else { -1 };
        let x = Float::with_val(p, &self.re - n) * pi(p);
        let y = Float::with_val(p, &self.im * pi(p));
        let (s, c) = x.sin_cos(Float::new(p));
        let ch = Float::with_val(p, y.cosh_ref());
        let sh = Float::with_val(p, y.sinh_ref());
        let v = Self { re: Float::with_val(p, &s * &ch), im: Float::with_val(p, &c * &sh) };
        if sign < 0 {
            -v
        } else {
            v
        }
    }

    pub fn sin(&self) -> Self {
        let p = self.prec();
        let (s, c) = Float::with_val(p, &self.re).sin_cos(Float::new(p));
        let ch = Float::with_val(p, self.im.cosh_ref());
        let sh = Float::with_val(p, self.im.sinh_ref());
        Self { re: Float::with_val(p, &s * &ch), im: Float::with_val(p, &c * &sh) }
    }

    pub fn cos(&self) -> Self {
        let p = self.prec();
        let (s, c) = Float::with_val(p, &self.re).sin_cos(Float::new(p));
        let ch = Float::with_val(p, self.im.cosh_ref());
        let sh = Float::with_val(p, self.im.sinh_ref());
        Self { re: Float::with_val(p, &c * &ch), im: Float::with_val(p, -(s * sh)) }
    }

    /// Nearest integer when within `tol` (absolute) of one.
    pub fn near_integer(&self, tol: f64) -> Option<i64> {
        if self.im.to_f64().abs() > tol {
            return None;
        }
        let r = self.re.to_f64();
        if !r.is_finite() || r.abs() > 1e15 {
            return None;
        }
        let n = r.round();
        let d = Float::with_val(self.prec(), &self.re - n);
        if d.to_f64().abs() <= tol {
            Some(n as i64)
        } else {
            None
        }
    }

    pub fn is_nonpositive_integer(&self, tol: f64) -> Option<i64> {
        self.near_integer(tol).filter(|n| *n <= 0)
    }

    /// |a - b| / max(|b|, tiny).
    pub fn rel_diff(&self, other: &XComplex) -> f64 {
        let d = (self - other).abs();
        let s = other.abs();
        if s.is_zero() {
            d.to_f64()
        } else {
            Float::with_val(self.prec(), &d / &s).to_f64()
        }
    }

    pub fn abs_diff(&self, other: &XComplex) -> f64 {
        (self - other).abs().to_f64()
    }

    /// log10 of |z| without underflow to f64 zero.
    pub fn log10_abs(&self) -> f64 {
        let a = self.abs();
        if a.is_zero() {
            return f64::NEG_INFINITY;
        }
        Float::with_val(53, a.log10_ref()).to_f64()
    }
}

/// log10 of a nonnegative float, -inf at zero.
pub fn log10_float(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    Float::with_val(53, x.log10_ref()).to_f64()
}

pub fn float_pow_f(x: &Float, y: &Float) -> Float {
    let p = x.prec().max(y.prec());
    Float::with_val(p, x.pow(y))
}

fn add_parts(a: &XComplex, b: &XComplex) -> XComplex {
    let p = a.prec().max(b.prec());
    XComplex { re: Float::with_val(p, &a.re + &b.re), im: Float::with_val(p, &a.im + &b.im) }
}

fn sub_parts(a: &XComplex, b: &XComplex) -> XComplex {
    let p = a.prec().max(b.prec());
    XComplex { re: Float::with_val(p, &a.re - &b.re), im: Float::with_val(p, &a.im - &b.im) }
}

fn mul_parts(a: &XComplex, b: &XComplex) -> XComplex {
    let p = a.prec().max(b.prec());
    let rr = Float::with_val(p, &a.re * &b.re);
    let ii = Float::with_val(p, &a.im * &b.im);
    let ri = Float::with_val(p, &a.re * &b.im);
    let ir = Float::with_val(p, &a.im * &b.re);
    XComplex { re: rr - ii, im: ri + ir }
}

fn div_parts(a: &XComplex, b: &XComplex) -> XComplex {
    let p = a.prec().max(b.prec());
    if b.im.is_zero() {
        return XComplex { re: Float::with_val(p, &a.re / &b.re), im: Float::with_val(p, &a.im / &b.re) };
    }
    let d = b.norm_sqr();
    let rr = Float::with_val(p, &a.re * &b.re) + Float::with_val(p, &a.im * &b.im);
    let ii = Float::with_val(p, &a.im * &b.re) - Float::with_val(p, &a.re * &b.im);
    XComplex { re: Float::with_val(p, &rr / &d), im: Float::with_val(p, &ii / &d) }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr<&XComplex> for &XComplex {
            type Output = XComplex;
            fn $m(self, rhs: &XComplex) -> XComplex {
                $f(self, rhs)
            }
        }
        impl $tr<XComplex> for XComplex {
            type Output = XComplex;
            fn $m(self, rhs: XComplex) -> XComplex {
                $f(&self, &rhs)
            }
        }
        impl $tr<&XComplex> for XComplex {
            type Output = XComplex;
            fn $m(self, rhs: &XComplex) -> XComplex {
                $f(&self, rhs)
            }
        }
        impl $tr<XComplex> for &XComplex {
            type Output = XComplex;
            fn $m(self, rhs: XComplex) -> XComplex {
                $f(self, &rhs)
            }
        }
    };
}

binop!(Add, add, add_parts);
binop!(Sub, sub, sub_parts);
binop!(Mul, mul, mul_parts);
binop!(Div, div, div_parts);

macro_rules! scalar_ops {
    ($t:ty) => {
        impl Add<$t> for &XComplex {
            type Output = XComplex;
            fn add(self, rhs: $t) -> XComplex {
                XComplex { re: Float::with_val(self.re.prec(), &self.re + rhs), im: self.im.clone() }
            }
        }
        impl Add<$t> for XComplex {
            type Output = XComplex;
            fn add(self, rhs: $t) -> XComplex {
                &self + rhs
            }
        }
        impl Sub<$t> for &XComplex {
            type Output = XComplex;
            fn sub(self, rhs: $t) -> XComplex {
                XComplex { re: Float::with_val(self.re.prec(), &self.re - rhs), im: self.im.clone() }
            }
        }
        impl Sub<$t> for XComplex {
            type Output = XComplex;
            fn sub(self, rhs: $t) -> XComplex {
                &self - rhs
            }
        }
        impl Mul<$t> for &XComplex {
            type Output = XComplex;
            fn mul(self, rhs: $t) -> XComplex {
                XComplex { re: Float::with_val(self.re.prec(), &self.re * rhs), im: Float::with_val(self.im.prec(), &self.im * rhs) }
            }
        }
        impl Mul<$t> for XComplex {
            type Output = XComplex;
            fn mul(self, rhs: $t) -> XComplex {
                &self * rhs
            }
        }
        impl Div<$t> for &XComplex {
            type Output = XComplex;
            fn div(self, rhs: $t) -> XComplex {
                XComplex { re: Float::with_val(self.re.prec(), &self.re / rhs), im: Float::with_val(self.im.prec(), &self.im / rhs) }
            }
        }
        impl Div<$t> for XComplex {
            type Output = XComplex;
            fn div(self, rhs: $t) -> XComplex {
                &self / rhs
            }
        }
        impl Add<&XComplex> for $t {
            type Output = XComplex;
            fn add(self, rhs: &XComplex) -> XComplex {
                rhs + self
            }
        }
        impl Add<XComplex> for $t {
            type Output = XComplex;
            fn add(self, rhs: XComplex) -> XComplex {
                &rhs + self
            }
        }
        impl Sub<&XComplex> for $t {
            type Output = XComplex;
            fn sub(self, rhs: &XComplex) -> XComplex {
                -(rhs - self)
            }
        }
        impl Sub<XComplex> for $t {
            type Output = XComplex;
            fn sub(self, rhs: XComplex) -> XComplex {
                -(&rhs - self)
            }
        }
        impl Mul<&XComplex> for $t {
            type Output = XComplex;
            fn mul(self, rhs: &XComplex) -> XComplex {
                rhs * self
            }
        }
        impl Mul<XComplex> for $t {
            type Output = XComplex;
            fn mul(self, rhs: XComplex) -> XComplex {
                &rhs * self
            }
        }
        impl Div<&XComplex> for $t {
            type Output = XComplex;
            fn div(self, rhs: &XComplex) -> XComplex {
                rhs.recip() * self
            }
        }
        impl Div<XComplex> for $t {
            type Output = XComplex;
            fn div(self, rhs: XComplex) -> XComplex {
                rhs.recip() * self
            }
        }
    };
}

scalar_ops!(f64);
scalar_ops!(i64);
scalar_ops!(i32);
scalar_ops!(u32);

impl Mul<&Float> for &XComplex {
    type Output = XComplex;
    fn mul(self, rhs: &Float) -> XComplex {
        self.scale(rhs)
    }
}

impl Neg for XComplex {
    type Output = XComplex;
    fn neg(self) -> XComplex {
        XComplex { re: -self.re, im: -self.im }
    }
}

impl Neg for &XComplex {
    type Output = XComplex;
    fn neg(self) -> XComplex {
        -(self.clone())
    }
}

impl AddAssign<&XComplex> for XComplex {
    fn add_assign(&mut self, rhs: &XComplex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl AddAssign<XComplex> for XComplex {
    fn add_assign(&mut self, rhs: XComplex) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}

impl SubAssign<&XComplex> for XComplex {
    fn sub_assign(&mut self, rhs: &XComplex) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&XComplex> for XComplex {
    fn mul_assign(&mut self, rhs: &XComplex) {
        *self = mul_parts(self, rhs);
    }
}

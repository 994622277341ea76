//! Gamma function, reciprocal gamma and Pochhammer symbols.

use crate::ctx::PrecisionContext;
use crate::error::{Error, Result};
use crate::xc::{pi, XComplex};
use rug::ops::Pow;
use rug::Float;

/// Spouge's approximation for Re(z) >= 1/2, evaluated with doubled precision.
fn gamma_spouge(z: &XComplex, prec: u32) -> XComplex {
    let wp = 2 * prec + 64;
    let two_pi = Float::with_val(wp, pi(wp) * 2);
    let a = ((prec as f64) * std::f64::consts::LN_2 / two_pi.to_f64().ln()).ceil() as i64 + 2;
    let zm1 = z.with_prec(wp) - 1i64;
    let af = Float::with_val(wp, a);
    let mut sum = XComplex::from_real(Float::with_val(wp, two_pi.sqrt_ref()));
    let mut fact = Float::with_val(wp, 1);
    for k in 1..a {
        if k > 1 {
            fact *= k - 1;
        }
        let base = Float::with_val(wp, &af - k);
        let expo = Float::with_val(wp, k) - 0.5f64;
        let mut ck = Float::with_val(wp, (&base).pow(&expo));
        ck *= Float::with_val(wp, base.exp_ref());
        ck /= &fact;
        if k % 2 == 0 {
            ck = -ck;
        }
        let term = (&zm1 + k).recip().scale(&ck);
        sum += term;
    }
    let zpa = &zm1 + a;
    let half = XComplex::from_real(Float::with_val(wp, 0.5));
    let expo = &zm1 + &half;
    let v = zpa.powc(&expo) * (-&zpa).exp() * sum;
    v.with_prec(prec)
}

fn real_gamma(x: &Float, prec: u32) -> Float {
    Float::with_val(prec, x.gamma_ref())
}

/// Gamma function with the reflection formula for Re(z) < 1/2.
pub fn gamma(z: &XComplex, ctx: &PrecisionContext) -> Result<XComplex> {
    let prec = ctx.prec();
    if let Some(n) = z.is_nonpositive_integer(ctx.tolerance) {
        return Err(Error::Pole(format!("gamma at nonpositive integer {n}")));
    }
    if z.im.is_zero() {
        return Ok(XComplex::from_real(real_gamma(&z.re, prec)));
    }
    Ok(gamma_complex(z, prec))
}

fn gamma_complex(z: &XComplex, prec: u32) -> XComplex {
    if z.re < 0.5 {
        let one_minus = 1i64 - z;
        let g = gamma_complex(&one_minus, prec);
        let s = z.sin_pi();
        return XComplex::from_real(pi(prec)) / (s * g);
    }
    if z.re < 1.5 {
        return gamma_spouge(&(z + 1i64), prec) / z;
    }
    gamma_spouge(z, prec)
}

/// 1/Gamma(z), entire; exactly zero at nonpositive integers.
pub fn rgamma(z: &XComplex, ctx: &PrecisionContext) -> XComplex {
    let prec = ctx.prec();
    if z.im.is_zero() {
        if let Some(n) = z.near_integer(0.0) {
            if n <= 0 {
                return XComplex::zero(prec);
            }
        }
        return XComplex::from_real(Float::with_val(prec, real_gamma(&z.re, prec + 32).recip_ref()));
    }
    if z.re < 0.5 {
        let one_minus = 1i64 - z;
        let g = gamma_complex(&one_minus, prec);
        return z.sin_pi() * g / XComplex::from_real(pi(prec));
    }
    gamma_complex(z, prec).recip()
}

/// (a)_n = a(a+1)...(a+n-1).
pub fn pochhammer(a: &XComplex, n: u64, ctx: &PrecisionContext) -> XComplex {
    let prec = ctx.prec();
    let mut acc = XComplex::one(prec);
    for k in 0..n {
        acc = &acc * &(a + k as i64);
    }
    acc
}

/// (a)_n for a real floating argument.
pub fn pochhammer_real(a: &Float, n: u64) -> Float {
    let mut acc = Float::with_val(a.prec(), 1);
    for k in 0..n {
        acc *= Float::with_val(a.prec(), a + k);
    }
    acc
}

pub fn factorial(n: u64, prec: u32) -> Float {
    let mut f = Float::with_val(prec, 1);
    for k in 2..=n {
        f *= k;
    }
    f
}

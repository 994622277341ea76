//! Gauss hypergeometric function on the closed unit disc.
//!
//! Inside |z| <= 0.75 the defining series is summed directly. Closer to the
//! boundary the value is carried along a straight path by Taylor re-expansion
//! of the hypergeometric differential equation.

use crate::ctx::PrecisionContext;
use crate::error::{Error, Result};
use crate::special::{gamma, pochhammer, rgamma};
use crate::xc::XComplex;
use rug::Float;

const DIRECT_RADIUS: f64 = 0.75;

fn terminating_length(a: &XComplex, b: &XComplex, tol: f64) -> Option<u64> {
    let ma = a.is_nonpositive_integer(tol).map(|n| (-n) as u64);
    let mb = b.is_nonpositive_integer(tol).map(|n| (-n) as u64);
    match (ma, mb) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) => Some(x),
        (None, Some(y)) => Some(y),
        _ => None,
    }
}

/// Sum of the series with value and derivative, term count capped.
fn series(
    a: &XComplex,
    b: &XComplex,
    c: &XComplex,
    z: &XComplex,
    limit: Option<u64>,
    ctx: &PrecisionContext,
) -> Result<(XComplex, XComplex)> {
    let prec = ctx.prec();
    let eps = ctx.series_eps();
    let mut term = XComplex::one(prec);
    let mut sum = XComplex::one(prec);
    let mut dsum = XComplex::zero(prec);
    let mut small = 0;
    let cap = limit.map(|m| m as usize).unwrap_or(ctx.max_series_terms);
    let mut k: u64 = 0;
    loop {
        if let Some(m) = limit {
            if k >= m {
                break;
            }
        } else if k as usize >= cap {
            return Err(Error::Convergence(format!("2F1 series exceeded {cap} terms")));
        }
        let num = (a + k as i64) * (b + k as i64);
        let den = (c + k as i64) * (k as i64 + 1);
        if den.is_zero() {
            return Err(Error::Pole("2F1 lower parameter hits a nonpositive integer".into()));
        }
        let prev = term.clone();
        term = &(&prev * &num) / &den;
        term = &term * z;
        // derivative term: (k+1) * term_{k+1} / z, computed without dividing by z
        let dterm = &prev * &num / &den * (k as i64 + 1);
        sum += &term;
        dsum += &dterm;
        k += 1;
        if limit.is_none() {
            let s = sum.abs();
            let ds = dsum.abs();
            let scale = s.to_f64().max(1e-300);
            let dscale = ds.to_f64().max(1e-300);
            let tsz = term.abs().to_f64();
            let dsz = dterm.abs().to_f64();
            if tsz <= eps * scale && dsz <= eps * dscale {
                small += 1;
                if small >= 3 {
                    break;
                }
            } else {
                small = 0;
            }
        }
    }
    Ok((sum, dsum))
}

/// Carries (F, F') from z0 to z1 along the segment by Taylor steps of the ODE.
fn continue_ode(
    a: &XComplex,
    b: &XComplex,
    c: &XComplex,
    z0: &XComplex,
    f0: XComplex,
    df0: XComplex,
    z1: &XComplex,
    ctx: &PrecisionContext,
) -> Result<(XComplex, XComplex)> {
    let prec = ctx.prec();
    let eps = ctx.series_eps();
    let ab = a * b;
    let apb1 = a + b + 1i64;
    let mut zc = z0.clone();
    let mut f = f0;
    let mut df = df0;
    for _ in 0..200 {
        let remaining = z1 - &zc;
        let rem = remaining.abs().to_f64();
        if rem == 0.0 {
            return Ok((f, df));
        }
        let dist0 = zc.abs().to_f64();
        let dist1 = (1i64 - &zc).abs().to_f64();
        let hmax = 0.5 * dist0.min(dist1);
        let h = if rem <= hmax { remaining.clone() } else { remaining.scale(&Float::with_val(prec, hmax / rem)) };
        let p0 = &zc * &(1i64 - &zc);
        let p1 = 1i64 - &zc * 2i64;
        let q0 = c - &(&apb1 * &zc);
        let q1 = -&apb1;
        let mut ck_prev = f.clone();
        let mut ck = df.clone();
        let mut hp = XComplex::one(prec);
        let mut sum = f.clone();
        let mut dsum = df.clone();
        let mut small = 0;
        let mut k: i64 = 0;
        loop {
            // ck_prev = c_k, ck = c_{k+1}; produce c_{k+2}
            let t1 = (&(&p1 * k) + &q0) * (k + 1) * &ck;
            let coef = &(&q1 * k) - &ab - (k * (k - 1)) as i64;
            let t2 = &coef * &ck_prev;
            let next = -(t1 + t2) / (&p0 * ((k + 2) * (k + 1)));
            // hp currently h^{k}; value term c_{k+2} h^{k+2}, derivative (k+2) c_{k+2} h^{k+1}
            let hk1 = &hp * &h;
            let hk2 = &hk1 * &h;
            let vt = &next * &hk2;
            let dt = &(&next * &hk1) * (k + 2);
            sum += &vt;
            // first-order term of the value series enters once
            if k == 0 {
                sum += &(&ck * &h);
            }
            dsum += &dt;
            let scale = sum.abs().to_f64().max(1e-300);
            let dscale = dsum.abs().to_f64().max(1e-300);
            if vt.abs().to_f64() <= eps * scale && dt.abs().to_f64() <= eps * dscale {
                small += 1;
                if small >= 3 {
                    break;
                }
            } else {
                small = 0;
            }
            ck_prev = ck;
            ck = next;
            hp = hk1;
            k += 1;
            if k as usize > ctx.max_series_terms {
                return Err(Error::Convergence("2F1 continuation step did not converge".into()));
            }
        }
        f = sum;
        df = dsum;
        zc = &zc + &h;
    }
    Err(Error::Convergence("2F1 continuation used too many steps".into()))
}

fn check_lower(c: &XComplex, limit: Option<u64>, tol: f64) -> Result<()> {
    if let Some(n) = c.is_nonpositive_integer(tol) {
        let n = (-n) as u64;
        match limit {
            Some(m) if m <= n => Ok(()),
            _ => Err(Error::Pole(format!("2F1 with lower parameter {}", -(n as i64)))),
        }
    } else {
        Ok(())
    }
}

/// Value and z-derivative of 2F1(a,b;c;z).
pub fn gauss_2f1_with_derivative(
    a: &XComplex,
    b: &XComplex,
    c: &XComplex,
    z: &XComplex,
    ctx: &PrecisionContext,
) -> Result<(XComplex, XComplex)> {
    let tol = ctx.tolerance;
    let limit = terminating_length(a, b, tol);
    check_lower(c, limit, tol)?;
    let prec = ctx.prec();
    if z.is_zero() {
        let d = if limit == Some(0) { XComplex::zero(prec) } else { a * b / c };
        return Ok((XComplex::one(prec), d));
    }
    if limit.is_some() {
        return series(a, b, c, z, limit, ctx);
    }
    let r = z.abs().to_f64();
    if r <= DIRECT_RADIUS {
        return series(a, b, c, z, None, ctx);
    }
    if r > 1.0 + 1e-12 {
        return Err(Error::Precondition(format!("2F1 argument outside the unit disc (|z| = {r})")));
    }
    let one_minus = 1i64 - z;
    if one_minus.abs().to_f64() < tol {
        let s = c - a - b;
        if s.re.to_f64() <= 0.0 {
            return Err(Error::Convergence("2F1 at z = 1 requires Re(c-a-b) > 0".into()));
        }
        let v = gamma(c, ctx)? * gamma(&s, ctx)? * rgamma(&(c - a), ctx) * rgamma(&(c - b), ctx);
        return Ok((v, XComplex::zero(prec)));
    }
    let start = z.scale(&Float::with_val(prec, 0.5 / r));
    let (f0, df0) = series(a, b, c, &start, None, ctx)?;
    continue_ode(a, b, c, &start, f0, df0, z, ctx)
}

pub fn gauss_2f1(a: &XComplex, b: &XComplex, c: &XComplex, z: &XComplex, ctx: &PrecisionContext) -> Result<XComplex> {
    Ok(gauss_2f1_with_derivative(a, b, c, z, ctx)?.0)
}

/// d/dz 2F1(a,b;c;z) = (ab/c) 2F1(a+1,b+1;c+1;z).
pub fn gauss_2f1_derivative(a: &XComplex, b: &XComplex, c: &XComplex, z: &XComplex, ctx: &PrecisionContext) -> Result<XComplex> {
    let prec = ctx.prec();
    let ab = a * b;
    if ab.is_zero() {
        return Ok(XComplex::zero(prec));
    }
    let v = gauss_2f1(&(a + 1i64), &(b + 1i64), &(c + 1i64), z, ctx)?;
    Ok(&ab / c * v)
}

/// Regularized 2F1(a,b;c;z)/Gamma(c) and its z-derivative; finite for every c.
pub fn gauss_2f1_reg_with_derivative(
    a: &XComplex,
    b: &XComplex,
    c: &XComplex,
    z: &XComplex,
    ctx: &PrecisionContext,
) -> Result<(XComplex, XComplex)> {
    let tol = ctx.tolerance;
    let prec = ctx.prec();
    if let Some(n) = c.is_nonpositive_integer(tol) {
        let limit = terminating_length(a, b, tol);
        let m = (-n) as u64;
        if limit.map_or(true, |l| l > m) {
            // F/Gamma(c) = (a)_{m+1}(b)_{m+1}/(m+1)! z^{m+1} F(a+m+1, b+m+1; m+2; z)
            let k = m + 1;
            let mut pre = pochhammer(a, k, ctx) * pochhammer(b, k, ctx);
            let mut fact = Float::with_val(prec, 1);
            for j in 2..=k {
                fact *= j;
            }
            pre = pre.scale(&Float::with_val(prec, fact.recip_ref()));
            let a2 = a + k as i64;
            let b2 = b + k as i64;
            let c2 = XComplex::int(prec, k as i64 + 1);
            let (f, df) = gauss_2f1_with_derivative(&a2, &b2, &c2, z, ctx)?;
            let zk = z.powi(k as i64);
            let zk1 = if k >= 1 { z.powi(k as i64 - 1) } else { XComplex::zero(prec) };
            let val = &pre * &(&zk * &f);
            let der = &pre * &(&(&zk1 * &f) * k as i64 + &zk * &df);
            return Ok((val, der));
        }
        // the series terminates before the pole: plain sum, then 1/Gamma(c) = 0
        return Ok((XComplex::zero(prec), XComplex::zero(prec)));
    }
    let rg = rgamma(c, ctx);
    let (f, df) = gauss_2f1_with_derivative(a, b, c, z, ctx)?;
    Ok((&rg * &f, &rg * &df))
}

pub fn gauss_2f1_reg(a: &XComplex, b: &XComplex, c: &XComplex, z: &XComplex, ctx: &PrecisionContext) -> Result<XComplex> {
    Ok(gauss_2f1_reg_with_derivative(a, b, c, z, ctx)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn x(p: u32, s: &str) -> XComplex {
        XComplex::dec(p, s)
    }

    #[test]
    fn value_at_zero_is_one() {
        let c = ctx();
        let p = c.prec();
        let v = gauss_2f1(&x(p, "0.3,0.2"), &x(p, "1.7"), &x(p, "2.1"), &XComplex::zero(p), &c).unwrap();
        assert!(v.abs_diff(&XComplex::one(p)) < 1e-60);
    }

    #[test]
    fn terminating_linear() {
        let c = ctx();
        let p = c.prec();
        let b = x(p, "0.4,0.1");
        let cc = x(p, "1.3");
        let z = x(p, "0.9,-0.3");
        let v = gauss_2f1(&XComplex::int(p, -1), &b, &cc, &z, &c).unwrap();
        let expect = 1i64 - &(&b * &z) / &cc;
        assert!(v.abs_diff(&expect) < 1e-60);
    }

    #[test]
    fn gauss_sum_terminating_mu_one() {
        let c = ctx();
        let p = c.prec();
        let m1 = XComplex::int(p, -1);
        let v = gauss_2f1(&m1, &m1, &XComplex::one(p), &XComplex::one(p), &c).unwrap();
        assert!(v.abs_diff(&XComplex::int(p, 2)) < 1e-60);
    }

    #[test]
    fn binomial_series_inside_and_on_boundary() {
        let c = ctx();
        let p = c.prec();
        let a = x(p, "0.37,0.21");
        let b = x(p, "1.9");
        for zs in ["0.3,0.1", "0.6,0.6", "-0.95,0.2", "0.2,0.97"] {
            let z = x(p, zs);
            let v = gauss_2f1(&a, &b, &b, &z, &c).unwrap();
            let expect = (1i64 - &z).powc(&-&a);
            assert!(v.rel_diff(&expect) < 1e-55, "z={zs}: {}", v.rel_diff(&expect));
        }
    }

    #[test]
    fn log_identity_near_circle() {
        // z 2F1(1,1;2;z) = -ln(1-z)
        let c = ctx();
        let p = c.prec();
        let one = XComplex::one(p);
        let z = XComplex::cis(&Float::with_val(p, 1.1));
        let v = &z * &gauss_2f1(&one, &one, &XComplex::int(p, 2), &z, &c).unwrap();
        let expect = -(1i64 - &z).ln();
        assert!(v.rel_diff(&expect) < 1e-50);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let c = ctx();
        let p = c.prec();
        let (a, b, cc) = (x(p, "0.3,0.4"), x(p, "-0.7"), x(p, "1.6,0.2"));
        let z = x(p, "0.3");
        let d = gauss_2f1_derivative(&a, &b, &cc, &z, &c).unwrap();
        let h = x(p, "1e-15");
        let fp = gauss_2f1(&a, &b, &cc, &(&z + &h), &c).unwrap();
        let fm = gauss_2f1(&a, &b, &cc, &(&z - &h), &c).unwrap();
        let fd = (fp - fm) / (&h * 2i64);
        assert!(d.rel_diff(&fd) < 1e-25);
        let (_, d2) = gauss_2f1_with_derivative(&a, &b, &cc, &z, &c).unwrap();
        assert!(d.rel_diff(&d2) < 1e-55);
    }

    #[test]
    fn symmetric_in_upper_parameters() {
        let c = ctx();
        let p = c.prec();
        let (a, b, cc) = (x(p, "0.3,0.4"), x(p, "-0.7,1.1"), x(p, "1.6,0.2"));
        let z = x(p, "0.5,-0.4");
        let v1 = gauss_2f1(&a, &b, &cc, &z, &c).unwrap();
        let v2 = gauss_2f1(&b, &a, &cc, &z, &c).unwrap();
        assert_eq!(v1, v2);
    }

    #[test]
    fn regularized_at_nonpositive_c_is_limit() {
        let c = ctx();
        let p = c.prec();
        let a = x(p, "0.3,0.1");
        let b = x(p, "1.2");
        let z = x(p, "0.4,0.2");
        let exact = gauss_2f1_reg(&a, &b, &XComplex::int(p, -2), &z, &c).unwrap();
        let eps = x(p, "1e-25");
        let near = gauss_2f1_reg(&a, &b, &(XComplex::int(p, -2) + &eps), &z, &c).unwrap();
        assert!(exact.rel_diff(&near) < 1e-20);
        assert!(matches!(gauss_2f1(&a, &b, &XComplex::int(p, -2), &z, &c), Err(Error::Pole(_))));
    }

    #[test]
    fn regularized_continuation_agrees_with_direct() {
        let c = ctx();
        let p = c.prec();
        let (a, b, cc) = (x(p, "-0.6"), x(p, "-0.5,-0.15"), x(p, "0.7,-0.15"));
        let z = XComplex::cis(&Float::with_val(p, 2.0));
        let (v, d) = gauss_2f1_reg_with_derivative(&a, &b, &cc, &z, &c).unwrap();
        let h = x(p, "1e-20");
        let vp = gauss_2f1_reg(&a, &b, &cc, &(&z + &h), &c).unwrap();
        let vm = gauss_2f1_reg(&a, &b, &cc, &(&z - &h), &c).unwrap();
        let fd = (vp - vm) / (&h * 2i64);
        assert!(d.rel_diff(&fd) < 1e-30);
        assert!(v.is_finite());
    }
}

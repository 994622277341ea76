//! Complete elliptic integrals by the arithmetic-geometric mean.

use crate::ctx::PrecisionContext;
use crate::error::{Error, Result};
use crate::xc::{pi, XComplex};
use rug::Float;

/// Runs the AGM from (1, k') and returns (M, sum of 2^{n-1} c_n^2).
fn agm_with_sum(k: &XComplex, ctx: &PrecisionContext) -> Result<(XComplex, XComplex)> {
    let prec = ctx.prec();
    let k2 = k.square();
    let kp = (1i64 - &k2).sqrt();
    let mut a = XComplex::one(prec);
    let mut b = kp;
    let mut sum = &k2 * 0.5f64;
    let mut pow2 = Float::with_val(prec, 0.5);
    let eps = ctx.series_eps();
    for _ in 0..200 {
        let c = (&a - &b) * 0.5f64;
        let scale = a.abs_f64().max(1e-300);
        if c.abs_f64() <= eps * scale {
            return Ok((a, sum));
        }
        let an = (&a + &b) * 0.5f64;
        let mut bn = (&a * &b).sqrt();
        // keep the root on the side of the arithmetic mean
        if (&an - &bn).abs_f64() > (&an + &bn).abs_f64() {
            bn = -bn;
        }
        pow2 *= 2;
        let cn = (&a - &b) * 0.5f64;
        sum += &(cn.square().scale(&pow2));
        a = an;
        b = bn;
    }
    Err(Error::Convergence("AGM iteration did not settle".into()))
}

/// K(k) = integral of 1/sqrt(1 - k^2 sin^2) over [0, pi/2].
pub fn elliptic_k(k: &XComplex, ctx: &PrecisionContext) -> Result<XComplex> {
    let k2 = k.square();
    if (1i64 - &k2).abs_f64() < ctx.tolerance {
        return Err(Error::SingularModulus("K diverges at k^2 = 1".into()));
    }
    let (m, _) = agm_with_sum(k, ctx)?;
    let half_pi = XComplex::from_real(pi(ctx.prec()) / 2u32);
    Ok(half_pi / m)
}

/// E(k) = integral of sqrt(1 - k^2 sin^2) over [0, pi/2].
pub fn elliptic_e(k: &XComplex, ctx: &PrecisionContext) -> Result<XComplex> {
    let k2 = k.square();
    if (1i64 - &k2).abs_f64() < ctx.tolerance {
        return Ok(XComplex::one(ctx.prec()));
    }
    let (m, s) = agm_with_sum(k, ctx)?;
    let half_pi = XComplex::from_real(pi(ctx.prec()) / 2u32);
    Ok(half_pi / m * (1i64 - &s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_zero() {
        let c = PrecisionContext::default();
        let p = c.prec();
        let hp = XComplex::from_real(pi(p) / 2u32);
        assert!(elliptic_k(&XComplex::zero(p), &c).unwrap().rel_diff(&hp) < 1e-60);
        assert!(elliptic_e(&XComplex::zero(p), &c).unwrap().rel_diff(&hp) < 1e-60);
        assert!(elliptic_e(&XComplex::one(p), &c).unwrap().abs_diff(&XComplex::one(p)) < 1e-60);
        assert!(matches!(elliptic_k(&XComplex::one(p), &c), Err(Error::SingularModulus(_))));
    }

    #[test]
    fn legendre_relation() {
        let c = PrecisionContext::default();
        let p = c.prec();
        for ks in ["0.1", "0.5", "0.9"] {
            let k = XComplex::dec(p, ks);
            let kp = (1i64 - &k.square()).sqrt();
            let (ek, kk) = (elliptic_e(&k, &c).unwrap(), elliptic_k(&k, &c).unwrap());
            let (ekp, kkp) = (elliptic_e(&kp, &c).unwrap(), elliptic_k(&kp, &c).unwrap());
            let lhs = &ek * &kkp + &ekp * &kk - &kk * &kkp;
            let hp = XComplex::from_real(pi(p) / 2u32);
            assert!(lhs.rel_diff(&hp) < 1e-55, "k={ks}");
        }
    }

    #[test]
    fn known_value_k_half() {
        // K(1/sqrt 2) = Gamma(1/4)^2 / (4 sqrt(pi))
        let c = PrecisionContext::default();
        let p = c.prec();
        let k = XComplex::from_real(Float::with_val(p, 0.5f64).sqrt());
        let g = Float::with_val(p, Float::with_val(p, 0.25f64).gamma_ref());
        let expect = Float::with_val(p, &g * &g) / (pi(p).sqrt() * 4u32);
        let v = elliptic_k(&k, &c).unwrap();
        assert!(v.rel_diff(&XComplex::from_real(expect)) < 1e-58);
    }
}

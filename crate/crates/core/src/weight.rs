//! Weight parameters and Toeplitz matrix elements.

use crate::ctx::PrecisionContext;
use crate::error::{Error, Result};
use crate::hyp2f1::{gauss_2f1, gauss_2f1_reg_with_derivative};
use crate::special::{gamma, rgamma};
use crate::xc::{pi, XComplex};
use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// The tuple (mu, omega1, omega2, xi, t) with the angle used for powers of t.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightParams {
    pub mu: XComplex,
    pub omega1: XComplex,
    pub omega2: XComplex,
    pub xi: XComplex,
    pub t: XComplex,
    /// arg t, taken in [0, 2pi) on the unit circle and principal elsewhere
    pub phi: Float,
}

impl WeightParams {
    pub fn new(mu: XComplex, omega1: XComplex, omega2: XComplex, xi: XComplex, t: XComplex, ctx: &PrecisionContext) -> Result<Self> {
        let prec = ctx.prec();
        let on_circle = (t.abs() - 1u32).abs().to_f64() < ctx.tolerance.sqrt();
        if !xi.is_zero() && !on_circle {
            return Err(Error::Precondition("xi != 0 requires |t| = 1".into()));
        }
        let mut phi = if t.is_zero() { Float::new(prec) } else { t.arg() };
        if on_circle && phi.is_sign_negative() && !phi.is_zero() {
            phi += pi(prec) * 2u32;
        }
        Ok(Self { mu, omega1, omega2, xi, t, phi })
    }

    /// t = e^{i phi} with phi reduced into [0, 2pi).
    pub fn on_circle(mu: XComplex, omega1: XComplex, omega2: XComplex, xi: XComplex, phi: &Float, ctx: &PrecisionContext) -> Result<Self> {
        let prec = ctx.prec();
        let two_pi = pi(prec) * 2u32;
        let mut ph = Float::with_val(prec, phi);
        ph %= &two_pi;
        if ph.is_sign_negative() && !ph.is_zero() {
            ph += &two_pi;
        }
        let t = XComplex::cis(&ph);
        Ok(Self { mu, omega1, omega2, xi, t, phi: ph })
    }

    pub fn omega(&self) -> XComplex {
        &self.omega1 + &self.omega2.mul_i()
    }

    pub fn omega_bar(&self) -> XComplex {
        &self.omega1 - &self.omega2.mul_i()
    }

    pub fn prec(&self) -> u32 {
        self.t.prec()
    }

    pub fn is_on_circle(&self, tol: f64) -> bool {
        (self.t.abs() - 1u32).abs().to_f64() < tol
    }

    /// Same parameters with every field carried at another precision.
    pub fn with_prec(&self, prec: u32) -> Self {
        Self {
            mu: self.mu.with_prec(prec),
            omega1: self.omega1.with_prec(prec),
            omega2: self.omega2.with_prec(prec),
            xi: self.xi.with_prec(prec),
            t: self.t.with_prec(prec),
            phi: Float::with_val(prec, &self.phi),
        }
    }

    /// log t on the branch fixed by `phi`.
    pub fn log_t(&self) -> XComplex {
        let p = self.prec();
        XComplex::from_floats(Float::with_val(p, self.t.abs().ln_ref()), Float::with_val(p, &self.phi))
    }

    /// t^{-mu} on the branch fixed by `phi`.
    pub fn t_pow_neg_mu(&self) -> XComplex {
        (-(&self.log_t() * &self.mu)).exp()
    }
}

/// Which formula produced a moment table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentSource {
    General,
    CueGap,
    CueCharpoly,
    IsingLow,
    IsingHigh,
    Quadrature,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IsingPhase {
    Low,
    High,
}

/// Value of t^mu w_n together with its t-derivative.
type Scaled = (XComplex, XComplex);

fn sin_degenerate(a: &XComplex, ctx: &PrecisionContext) -> bool {
    let thresh = 10f64.powi(-(ctx.decimal_digits as i32) / 4);
    a.near_integer(thresh).is_some()
}

/// First term, common to both analytic forms.
fn term_a(n: i64, p: &WeightParams, ctx: &PrecisionContext) -> Result<Scaled> {
    let (mu, om, ob) = (&p.mu, p.omega(), p.omega_bar());
    let pre = gamma(&(&p.omega1 * 2i64 + 1i64), ctx)? * rgamma(&(&(mu + &om) + (1 + n)), ctx);
    let a = mu * -2i64;
    let b = -(mu + &om) - n;
    let c = (&ob - mu) + (1 - n);
    let (f, df) = gauss_2f1_reg_with_derivative(&a, &b, &c, &p.t, ctx)?;
    Ok((&pre * &f, &pre * &df))
}

/// t^a (1-t)^s with its t-derivative, t^a on the branch of `phi_used`.
fn power_pair(p: &WeightParams, a: &XComplex, s: &XComplex, phi_used: &Float) -> Scaled {
    let prec = p.prec();
    let logt = XComplex::from_floats(Float::with_val(prec, p.t.abs().ln_ref()), Float::with_val(prec, phi_used));
    let ta = (&logt * a).exp();
    let omt = 1i64 - &p.t;
    let os = omt.powc(s);
    let v = &ta * &os;
    let dv = &v * &(a / &p.t - s / &omt);
    (v, dv)
}

/// Second analytic form, valid off the integer lattice of n+mu-omega_bar.
fn scaled_form2(n: i64, p: &WeightParams, ctx: &PrecisionContext) -> Result<Scaled> {
    let (av, ad) = term_a(n, p, ctx)?;
    if p.xi.is_zero() {
        return Ok((av, ad));
    }
    let (mu, om, ob) = (&p.mu, p.omega(), p.omega_bar());
    let a = (mu - &ob) + n;
    let s = (mu + &p.omega1) * 2i64 + 1i64;
    let pre = gamma(&(mu * 2i64 + 1i64), ctx)? * rgamma(&(&(mu + &ob) + (1 - n)), ctx);
    let (pw, dpw) = power_pair(p, &a, &s, &p.phi);
    let (f, df) = gauss_2f1_reg_with_derivative(&(mu * 2i64 + 1i64), &(&(mu + &om) + (1 + n)), &(&a + 1i64), &p.t, ctx)?;
    let bv = &pre * &(&pw * &f);
    let bd = &pre * &(&(&dpw * &f) + &(&pw * &df));
    let sin = a.sin_pi();
    if sin.is_zero() {
        return Err(Error::Pole("sin(pi(n+mu-omega_bar)) vanishes".into()));
    }
    let phase = (&a * &XComplex::from_real(pi(ctx.prec()))).mul_i();
    let e = (-phase).exp() / (sin.mul_i() * 2i64);
    let coef = &p.xi * &e;
    let v = &av + &(&coef * &(&av - &bv));
    let d = &ad + &(&coef * &(&ad - &bd));
    Ok((v, d))
}

/// First analytic form, with the hypergeometric factor at 1-t.
fn scaled_form1(n: i64, p: &WeightParams, ctx: &PrecisionContext) -> Result<Scaled> {
    let (av, ad) = term_a(n, p, ctx)?;
    if p.xi.is_zero() {
        return Ok((av, ad));
    }
    let prec = ctx.prec();
    let (mu, om, ob) = (&p.mu, p.omega(), p.omega_bar());
    let a = (mu - &ob) + n;
    let s = (mu + &p.omega1) * 2i64 + 1i64;
    let k = gamma(&(mu * 2i64 + 1i64), ctx)? * gamma(&(&p.omega1 * 2i64 + 1i64), ctx)? * rgamma(&(&s + 1i64), ctx);
    let upper = p.t.im.is_sign_positive() || p.t.im.is_zero();
    let phi_used = if upper { Float::with_val(prec, &p.phi) } else { Float::with_val(prec, &p.phi - pi(prec) * 2u32) };
    let (pw, dpw) = power_pair(p, &a, &s, &phi_used);
    let z = 1i64 - &p.t;
    let (f, dfz) = gauss_2f1_reg_with_derivative(&(mu * 2i64 + 1i64), &(&(mu + &om) + (1 + n)), &(&s + 1i64), &z, ctx)?;
    // regularized at c = s+1, restore the plain function
    let gs = gamma(&(&s + 1i64), ctx)?;
    let f = &f * &gs;
    let df = -(&dfz * &gs);
    let sign = if upper { -1i64 } else { 1 };
    let phase = (&a * &XComplex::from_real(pi(prec))).mul_i() * sign;
    let pref = &k * &phase.exp() / (XComplex::from_real(pi(prec) * 2u32).mul_i());
    let bv = &pref * &(&pw * &f);
    let bd = &pref * &(&(&dpw * &f) + &(&pw * &df));
    if upper {
        Ok((&av + &(&p.xi * &bv), &ad + &(&p.xi * &bd)))
    } else {
        // the jump arc is the complement of the one this form describes
        Ok((&av - &(&p.xi * &(&av - &bv)), &ad - &(&p.xi * &(&ad - &bd))))
    }
}

fn perturbed(n: i64, p: &WeightParams, ctx: &PrecisionContext) -> Result<Scaled> {
    let extra = ctx.decimal_digits / 3 + 10;
    let hi = ctx.rescaled(ctx.decimal_digits + extra);
    let hp = hi.prec();
    let base = p.with_prec(hp);
    let eps = Float::with_val(hp, 10f64).pow_ref_i(-((ctx.decimal_digits / 3) as i32));
    let at = |h: &Float| -> Result<Scaled> {
        let mut q = base.clone();
        q.mu = &q.mu + &XComplex::from_real(Float::with_val(hp, h));
        scaled_form2(n, &q, &hi)
    };
    let mut sums = Vec::new();
    for m in [1u32, 2] {
        let h = Float::with_val(hp, &eps * m);
        let (vp, dp) = at(&h)?;
        let (vm, dm) = at(&Float::with_val(hp, -&h))?;
        sums.push(((&vp + &vm) * 0.5f64, (&dp + &dm) * 0.5f64));
    }
    let v = (&sums[0].0 * 4i64 - &sums[1].0) / 3i64;
    let d = (&sums[0].1 * 4i64 - &sums[1].1) / 3i64;
    let prec = ctx.prec();
    Ok((v.with_prec(prec), d.with_prec(prec)))
}

trait PowI {
    fn pow_ref_i(&self, e: i32) -> Float;
}

impl PowI for Float {
    fn pow_ref_i(&self, e: i32) -> Float {
        use rug::ops::Pow;
        Float::with_val(self.prec(), self.pow(e))
    }
}

/// t^mu w_n and d/dt of it, choosing the evaluable analytic form.
pub fn moment_scaled_with_derivative(n: i64, p: &WeightParams, ctx: &PrecisionContext) -> Result<Scaled> {
    if p.xi.is_zero() || p.phi.is_zero() {
        return term_a(n, p, ctx);
    }
    if p.t.im.is_zero() {
        return Err(Error::BranchAmbiguity("xi != 0 with real t leaves the jump arc undefined".into()));
    }
    let a = (&p.mu - &p.omega_bar()) + n;
    if !sin_degenerate(&a, ctx) {
        return scaled_form2(n, p, ctx);
    }
    if (1i64 - &p.t).abs_f64() <= 0.9 {
        return scaled_form1(n, p, ctx);
    }
    perturbed(n, p, ctx)
}

/// t^mu w_n from the second analytic form alone.
pub fn moment_scaled_form2(n: i64, p: &WeightParams, ctx: &PrecisionContext) -> Result<XComplex> {
    Ok(scaled_form2(n, p, ctx)?.0)
}

/// t^mu w_n from the first analytic form alone; needs |1-t| <= 1.
pub fn moment_scaled_form1(n: i64, p: &WeightParams, ctx: &PrecisionContext) -> Result<XComplex> {
    Ok(scaled_form1(n, p, ctx)?.0)
}

/// Toeplitz element w_n of the general weight.
pub fn moment_general(n: i64, p: &WeightParams, ctx: &PrecisionContext) -> Result<XComplex> {
    if p.t.is_zero() && !p.mu.is_zero() {
        return Err(Error::Precondition("t^{-mu} is singular at t = 0".into()));
    }
    let (v, _) = moment_scaled_with_derivative(n, p, ctx)?;
    Ok(&v * &p.t_pow_neg_mu())
}

/// dw_n/dphi with t = e^{i phi}, extended holomorphically as i t d/dt.
pub fn moment_general_dphi(n: i64, p: &WeightParams, ctx: &PrecisionContext) -> Result<XComplex> {
    let (v, d) = moment_scaled_with_derivative(n, p, ctx)?;
    let tm = p.t_pow_neg_mu();
    let dt = &(&d * &tm) - &(&(&v * &tm) * &(&p.mu / &p.t));
    Ok((&dt * &p.t).mul_i())
}

/// w_n = delta_{n0} + (xi/2 pi i)(-1)^{n+1}(t^n - 1)/n, with w_0 = 1 - xi phi/2pi.
pub fn moment_cue_gap(n: i64, xi: &XComplex, phi: &Float, ctx: &PrecisionContext) -> XComplex {
    let prec = ctx.prec();
    let two_pi = XComplex::from_real(pi(prec) * 2u32);
    if n == 0 {
        let ph = XComplex::from_real(Float::with_val(prec, phi));
        return 1i64 - &(xi * &ph) / &two_pi;
    }
    let t = XComplex::cis(&Float::with_val(prec, phi));
    let sign = if n % 2 == 0 { -1i64 } else { 1 };
    let num = (t.powi(n) - 1i64) * sign;
    xi * &num / &(two_pi.mul_i() * n)
}

/// Moments of |u+z|^{2 mu} on the circle.
pub fn moment_cue_charpoly(n: i64, mu: &XComplex, u: &XComplex, ctx: &PrecisionContext) -> Result<XComplex> {
    let prec = ctx.prec();
    let m = n.unsigned_abs() as i64;
    let x = XComplex::from_real(u.norm_sqr());
    // Gamma(mu+1)/(m! Gamma(mu+1-m)) as a falling product
    let mut pre = XComplex::one(prec);
    for j in 0..m {
        pre = &pre * &(mu - j) / (j + 1);
    }
    let f = gauss_2f1(&-mu, &(m - mu), &XComplex::int(prec, m + 1), &x, ctx)?;
    let wm = &pre * &f;
    if n <= 0 {
        Ok(wm)
    } else {
        Ok(&wm * &x.powi(n))
    }
}

/// Ising Toeplitz elements of the low (k > 1) and high (k < 1) phases.
pub fn moment_ising(n: i64, k: &Float, phase: IsingPhase, ctx: &PrecisionContext) -> Result<XComplex> {
    let prec = ctx.prec();
    match phase {
        IsingPhase::Low if *k <= 1 => return Err(Error::Phase(format!("low phase needs k > 1, got {}", k.to_f64()))),
        IsingPhase::High if *k >= 1 || *k <= 0 => return Err(Error::Phase(format!("high phase needs 0 < k < 1, got {}", k.to_f64()))),
        _ => {}
    }
    let half = XComplex::dec(prec, "0.5");
    let three_half = XComplex::dec(prec, "1.5");
    let kx = XComplex::from_real(Float::with_val(prec, k));
    let pif = XComplex::from_real(pi(prec));
    let m = n.abs();
    let sign = |e: i64| if e.rem_euclid(2) == 0 { 1i64 } else { -1 };
    let g = |z: &XComplex| gamma(z, ctx);
    match phase {
        IsingPhase::Low => {
            let x = kx.powi(-2);
            if n <= 0 {
                let pre = g(&(&half + m))? * g(&half)? / g(&XComplex::int(prec, m + 1))? / &pif * sign(m);
                Ok(&pre * &gauss_2f1(&-&half, &(&half + m), &XComplex::int(prec, m + 1), &x, ctx)?)
            } else {
                let pre = g(&(m - &half))? * g(&three_half)? / g(&XComplex::int(prec, m + 1))? / &pif * sign(m + 1) * &kx.powi(-2 * m);
                Ok(&pre * &gauss_2f1(&half, &(m - &half), &XComplex::int(prec, m + 1), &x, ctx)?)
            }
        }
        IsingPhase::High => {
            let x = kx.square();
            if n <= 0 {
                let pre = g(&(&half + m))? * g(&three_half)? / g(&XComplex::int(prec, m + 2))? / &pif * sign(m) * &kx.powi(2 * m + 1);
                Ok(&pre * &gauss_2f1(&half, &(&half + m), &XComplex::int(prec, m + 2), &x, ctx)?)
            } else {
                let pre = g(&(m - &half))? * g(&half)? / g(&XComplex::int(prec, m))? / (&pif * &kx) * sign(m - 1);
                Ok(&pre * &gauss_2f1(&-&half, &(m - &half), &XComplex::int(prec, m), &x, ctx)?)
            }
        }
    }
}

/// Everything needed to generate one family of moments.
#[derive(Clone, Debug)]
pub enum MomentSpec {
    General(WeightParams),
    CueGap { xi: XComplex, phi: Float },
    CueCharpoly { mu: XComplex, u: XComplex },
    Ising { k: Float, phase: IsingPhase },
    Quadrature(WeightParams),
}

impl MomentSpec {
    pub fn source(&self) -> MomentSource {
        match self {
            MomentSpec::General(_) => MomentSource::General,
            MomentSpec::CueGap { .. } => MomentSource::CueGap,
            MomentSpec::CueCharpoly { .. } => MomentSource::CueCharpoly,
            MomentSpec::Ising { phase: IsingPhase::Low, .. } => MomentSource::IsingLow,
            MomentSpec::Ising { phase: IsingPhase::High, .. } => MomentSource::IsingHigh,
            MomentSpec::Quadrature(_) => MomentSource::Quadrature,
        }
    }

    /// The general-weight parameters this family specializes.
    pub fn params(&self, ctx: &PrecisionContext) -> Result<WeightParams> {
        let prec = ctx.prec();
        let z = || XComplex::zero(prec);
        match self {
            MomentSpec::General(p) | MomentSpec::Quadrature(p) => Ok(p.clone()),
            MomentSpec::CueGap { xi, phi } => WeightParams::on_circle(z(), z(), z(), xi.clone(), phi, ctx),
            MomentSpec::CueCharpoly { mu, u } => {
                let half = mu * 0.5f64;
                WeightParams::new(half.clone(), half, z(), z(), XComplex::from_real(u.norm_sqr()), ctx)
            }
            MomentSpec::Ising { k, phase } => {
                let kx = XComplex::from_real(Float::with_val(prec, k));
                let q = XComplex::dec(prec, "0.25");
                let (w2, t) = match phase {
                    IsingPhase::Low => (XComplex::dec(prec, "0,0.5"), kx.powi(-2)),
                    IsingPhase::High => (XComplex::dec(prec, "0,-0.5"), kx.square()),
                };
                WeightParams::new(q.clone(), -q, w2, z(), t, ctx)
            }
        }
    }

    /// Same family with every parameter carried at another precision.
    pub fn with_prec(&self, prec: u32) -> Self {
        match self {
            MomentSpec::General(p) => MomentSpec::General(p.with_prec(prec)),
            MomentSpec::Quadrature(p) => MomentSpec::Quadrature(p.with_prec(prec)),
            MomentSpec::CueGap { xi, phi } => MomentSpec::CueGap { xi: xi.with_prec(prec), phi: Float::with_val(prec, phi) },
            MomentSpec::CueCharpoly { mu, u } => MomentSpec::CueCharpoly { mu: mu.with_prec(prec), u: u.with_prec(prec) },
            MomentSpec::Ising { k, phase } => MomentSpec::Ising { k: Float::with_val(prec, k), phase: *phase },
        }
    }

    pub fn moment(&self, n: i64, ctx: &PrecisionContext) -> Result<XComplex> {
        match self {
            MomentSpec::General(p) => moment_general(n, p, ctx),
            MomentSpec::CueGap { xi, phi } => Ok(moment_cue_gap(n, xi, phi, ctx)),
            MomentSpec::CueCharpoly { mu, u } => moment_cue_charpoly(n, mu, u, ctx),
            MomentSpec::Ising { k, phase } => moment_ising(n, k, *phase, ctx),
            MomentSpec::Quadrature(p) => crate::quad::moment_quadrature(n, p, ctx),
        }
    }
}

/// Moments w_n for a contiguous index range, immutable once built.
#[derive(Clone, Debug)]
pub struct MomentTable {
    pub params: WeightParams,
    pub values: BTreeMap<i64, XComplex>,
    pub source: MomentSource,
}

impl MomentTable {
    /// Fills indices lo..=hi in parallel; order of evaluation does not affect values.
    pub fn build(spec: &MomentSpec, lo: i64, hi: i64, ctx: &PrecisionContext) -> Result<Self> {
        let params = spec.params(ctx)?;
        let vals: Vec<Result<(i64, XComplex)>> = (lo..=hi).into_par_iter().map(|n| spec.moment(n, ctx).map(|v| (n, v))).collect();
        let mut values = BTreeMap::new();
        for r in vals {
            let (n, v) = r?;
            values.insert(n, v);
        }
        Ok(Self { params, values, source: spec.source() })
    }

    /// Table for determinants of size up to `n_max` with shifts -1, 0, 1.
    pub fn for_size(spec: &MomentSpec, n_max: usize, ctx: &PrecisionContext) -> Result<Self> {
        let m = n_max as i64;
        Self::build(spec, -m, m, ctx)
    }

    pub fn from_values(params: WeightParams, values: BTreeMap<i64, XComplex>, source: MomentSource) -> Self {
        Self { params, values, source }
    }

    pub fn get(&self, n: i64) -> Result<&XComplex> {
        self.values.get(&n).ok_or_else(|| Error::Precondition(format!("moment table lacks index {n}")))
    }

    /// Multiplies w_n by c^n; determinants are unchanged, reflection coefficients rescale.
    pub fn gauged(&self, c: &XComplex) -> Self {
        let values = self.values.iter().map(|(n, v)| (*n, v * &c.powi(*n))).collect();
        Self { params: self.params.clone(), values, source: self.source }
    }

    pub fn to_json(&self, digits: usize) -> serde_json::Value {
        let pair = |z: &XComplex| serde_json::json!([crate::xc::float_to_string(&z.re, digits), crate::xc::float_to_string(&z.im, digits)]);
        let p = &self.params;
        let entries: Vec<_> = self
            .values
            .iter()
            .map(|(n, v)| {
                serde_json::json!({
                    "n": n,
                    "re": crate::xc::float_to_string(&v.re, digits),
                    "im": crate::xc::float_to_string(&v.im, digits),
                })
            })
            .collect();
        serde_json::json!({
            "params": {
                "mu": pair(&p.mu),
                "omega1": pair(&p.omega1),
                "omega2": pair(&p.omega2),
                "xi": pair(&p.xi),
                "t": pair(&p.t),
                "phi": crate::xc::float_to_string(&p.phi, digits),
            },
            "entries": entries,
            "source": self.source,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn d(p: u32, s: &str) -> XComplex {
        XComplex::dec(p, s)
    }

    #[test]
    fn half_omega_constant_moment() {
        let c = ctx();
        let p = c.prec();
        let wp = WeightParams::new(XComplex::zero(p), d(p, "0.5"), XComplex::zero(p), XComplex::zero(p), d(p, "0.3,0.2"), &c).unwrap();
        let v = moment_general(0, &wp, &c).unwrap();
        let four_over_pi = XComplex::from_real(Float::with_val(p, 4u32) / pi(p));
        assert!(v.rel_diff(&four_over_pi) < 1e-58);
    }

    #[test]
    fn t_zero_scaled_moment_is_gamma_ratio() {
        let c = ctx();
        let p = c.prec();
        let wp = WeightParams::new(d(p, "0.3,0.1"), d(p, "0.2"), d(p, "0.15"), XComplex::zero(p), XComplex::zero(p), &c).unwrap();
        for n in [-2i64, 0, 3] {
            let (v, _) = moment_scaled_with_derivative(n, &wp, &c).unwrap();
            let e = gamma(&(&wp.omega1 * 2i64 + 1i64), &c).unwrap()
                * rgamma(&(&(&wp.mu + &wp.omega()) + (1 + n)), &c)
                * rgamma(&(&(&wp.omega_bar() - &wp.mu) + (1 - n)), &c);
            assert!(v.rel_diff(&e) < 1e-58, "n={n}");
        }
        assert!(moment_general(0, &wp, &c).is_err());
    }

    #[test]
    fn cue_gap_elementary_values() {
        let c = ctx();
        let p = c.prec();
        let xi = d(p, "0.7");
        let phi = Float::with_val(p, 1.3);
        let w0 = moment_cue_gap(0, &xi, &phi, &c);
        let e = 1i64 - &(&xi * &XComplex::from_real(Float::with_val(p, &phi))) / &XComplex::from_real(pi(p) * 2u32);
        assert!(w0.abs_diff(&e) < 1e-60);
        let w1 = moment_cue_gap(1, &xi, &phi, &c);
        let e1 = &xi * &(XComplex::cis(&phi) - 1i64) / &XComplex::from_real(pi(p) * 2u32).mul_i();
        assert!(w1.abs_diff(&e1) < 1e-60);
        let z = moment_cue_gap(3, &XComplex::zero(p), &phi, &c);
        assert!(z.is_zero());
    }

    #[test]
    fn general_form_reduces_to_cue_gap() {
        let c = ctx();
        let p = c.prec();
        let xi = d(p, "0.6");
        for phi in [0.7f64, 2.5, 4.4] {
            let ph = Float::with_val(p, phi);
            let wp = WeightParams::on_circle(XComplex::zero(p), XComplex::zero(p), XComplex::zero(p), xi.clone(), &ph, &c).unwrap();
            for n in [-2i64, -1, 0, 1, 3] {
                let g = moment_general(n, &wp, &c).unwrap();
                let e = moment_cue_gap(n, &xi, &wp.phi, &c);
                assert!(g.abs_diff(&e) < 1e-40, "phi={phi} n={n}: {}", g.abs_diff(&e));
            }
        }
    }

    #[test]
    fn two_analytic_forms_agree() {
        let c = ctx();
        let p = c.prec();
        for phi in [0.5f64, 0.9, 5.6, 6.0] {
            let wp = WeightParams::on_circle(d(p, "0.3"), d(p, "0.2"), d(p, "0.15"), d(p, "0.4"), &Float::with_val(p, phi), &c).unwrap();
            for n in [-1i64, 0, 2] {
                let f1 = moment_scaled_form1(n, &wp, &c).unwrap();
                let f2 = moment_scaled_form2(n, &wp, &c).unwrap();
                assert!(f1.rel_diff(&f2) < 1e-45, "phi={phi} n={n}: {}", f1.rel_diff(&f2));
            }
        }
    }

    #[test]
    fn branch_ambiguity_on_real_axis() {
        let c = ctx();
        let p = c.prec();
        let wp = WeightParams::on_circle(d(p, "0.3"), d(p, "0.2"), d(p, "0.1"), d(p, "0.4"), &pi(p), &c).unwrap();
        let mut q = wp.clone();
        q.t = XComplex::int(p, -1);
        assert!(matches!(moment_general(0, &q, &c), Err(Error::BranchAmbiguity(_))));
    }

    #[test]
    fn phi_derivative_matches_difference() {
        let c = ctx();
        let p = c.prec();
        let h = Float::with_val(p, Float::parse("1e-20").unwrap());
        let phi0 = Float::with_val(p, 1.1);
        for xi in ["0", "0.35"] {
            let mk = |phi: Float| WeightParams::on_circle(d(p, "0.3"), d(p, "0.2"), d(p, "0.15"), d(p, xi), &phi, &c).unwrap();
            let base = mk(phi0.clone());
            let dv = moment_general_dphi(1, &base, &c).unwrap();
            let fp = moment_general(1, &mk(Float::with_val(p, &phi0 + &h)), &c).unwrap();
            let fm = moment_general(1, &mk(Float::with_val(p, &phi0 - &h)), &c).unwrap();
            let fd = (fp - fm) / XComplex::from_real(Float::with_val(p, &h * 2u32));
            assert!(dv.rel_diff(&fd) < 1e-25, "xi={xi}: {}", dv.rel_diff(&fd));
        }
    }

    #[test]
    fn charpoly_first_moments() {
        let c = ctx();
        let p = c.prec();
        let mu = d(p, "0.37");
        let u = d(p, "0.6");
        assert!(moment_cue_charpoly(0, &mu, &XComplex::zero(p), &c).unwrap().abs_diff(&XComplex::one(p)) < 1e-60);
        let x = XComplex::from_real(u.norm_sqr());
        let wm1 = moment_cue_charpoly(-1, &mu, &u, &c).unwrap();
        let e = &mu * &gauss_2f1(&-&mu, &(1i64 - &mu), &XComplex::int(p, 2), &x, &c).unwrap();
        assert!(wm1.rel_diff(&e) < 1e-58);
        let w1 = moment_cue_charpoly(1, &mu, &u, &c).unwrap();
        assert!(w1.rel_diff(&(&wm1 * &x)) < 1e-58);
    }

    #[test]
    fn charpoly_is_general_weight_without_t_prefactor() {
        let c = ctx();
        let p = c.prec();
        let mu = d(p, "0.8");
        let u = d(p, "0.5,0.3");
        let spec = MomentSpec::CueCharpoly { mu: mu.clone(), u: u.clone() };
        let wp = spec.params(&c).unwrap();
        for n in [-2i64, 0, 1] {
            let g = moment_general(n, &wp, &c).unwrap() / wp.t_pow_neg_mu();
            let e = moment_cue_charpoly(n, &mu, &u, &c).unwrap();
            assert!(g.rel_diff(&e) < 1e-55, "n={n}");
        }
    }

    #[test]
    fn ising_low_zero_moment_is_elliptic_e() {
        let c = ctx();
        let p = c.prec();
        let k = Float::with_val(p, 2);
        let w0 = moment_ising(0, &k, IsingPhase::Low, &c).unwrap();
        let kinv = XComplex::from_real(Float::with_val(p, 0.5));
        let e = crate::elliptic::elliptic_e(&kinv, &c).unwrap() * 2i64 / XComplex::from_real(pi(p));
        assert!(w0.rel_diff(&e) < 1e-58);
        assert!(matches!(moment_ising(0, &Float::with_val(p, 0.5), IsingPhase::Low, &c), Err(Error::Phase(_))));
        assert!(matches!(moment_ising(0, &Float::with_val(p, 2), IsingPhase::High, &c), Err(Error::Phase(_))));
    }

    #[test]
    fn ising_low_is_general_weight_over_root_k() {
        let c = ctx();
        let p = c.prec();
        let k = Float::with_val(p, 2);
        let spec = MomentSpec::Ising { k: k.clone(), phase: IsingPhase::Low };
        let wp = spec.params(&c).unwrap();
        let rk = XComplex::from_real(Float::with_val(p, k.sqrt_ref()));
        for n in [-2i64, 0, 1, 2] {
            let g = moment_general(n, &wp, &c).unwrap();
            let e = &moment_ising(n, &k, IsingPhase::Low, &c).unwrap() * &rk;
            assert!(g.rel_diff(&e) < 1e-55, "n={n}: {} vs {}", g, e);
        }
    }

    #[test]
    fn table_json_round_shape() {
        let c = ctx();
        let p = c.prec();
        let spec = MomentSpec::CueGap { xi: d(p, "0.5"), phi: Float::with_val(p, 1.0) };
        let t = MomentTable::build(&spec, -2, 2, &c).unwrap();
        let j = t.to_json(20);
        assert_eq!(j["entries"].as_array().unwrap().len(), 5);
        assert_eq!(j["source"], "cue-gap");
        assert!(t.get(3).is_err());
    }
}

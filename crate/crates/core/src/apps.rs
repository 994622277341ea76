//! CUE characteristic-polynomial moments, CUE gap probabilities and Ising diagonal correlations.

use crate::ctx::PrecisionContext;
use crate::elliptic::{elliptic_e, elliptic_k};
use crate::error::{Error, Result};
use crate::hyp2f1::gauss_2f1;
use crate::partition::{hyp_2f1_partition, ising_limit_eval};
use crate::recurrence::{run_checked, StepKind};
use crate::report::ResidualReport;
use crate::special::{factorial, gamma, pochhammer};
use crate::toeplitz::oracle_sequence;
use crate::weight::{moment_cue_gap, moment_ising, IsingPhase, MomentSpec, MomentTable, WeightParams};
use crate::xc::{pi, XComplex};
use rug::Float;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Recurrence,
    ClosedForm,
    DetOracle,
    Hyp,
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::Recurrence => "recurrence",
            Method::ClosedForm => "closed-form",
            Method::DetOracle => "det-oracle",
            Method::Hyp => "hyp",
        }
    }
}

/// F_N = < prod |u + z_l|^{2 mu} > for N = 0..=n_max.
#[derive(Clone, Debug)]
pub struct CueMomentRun {
    pub mu: XComplex,
    pub u: XComplex,
    pub f_values: Vec<XComplex>,
    /// Reflection coefficients of the weight at the reduced point |u| <= 1.
    pub r_values: Vec<XComplex>,
    pub method: Method,
}

fn gamma_product(mu: &XComplex, n: usize, ctx: &PrecisionContext) -> Result<XComplex> {
    let prec = ctx.prec();
    let mut f = XComplex::one(prec);
    for j in 0..n as i64 {
        let num = gamma(&(mu * 2i64 + (j + 1)), ctx)?;
        let den = gamma(&(mu + (j + 1)), ctx)?.square();
        f = (&f * &num / &den).scale(&factorial(j as u64, prec));
    }
    Ok(f)
}

/// Products F_{N+1} = F_N^2 / F_{N-1} * ratio_N, starting from F_0 = 1 and F_1.
fn ratio_products(f1: XComplex, ratios: impl Fn(usize) -> XComplex, n_max: usize) -> Vec<XComplex> {
    let mut f = vec![XComplex::one(f1.prec()), f1];
    for n in 1..n_max {
        let next = f[n].square() / &f[n - 1] * &ratios(n);
        f.push(next);
    }
    f.truncate(n_max + 1);
    f
}

pub fn cue_moment_sequence(mu: &XComplex, u: &XComplex, n_max: usize, ctx: &PrecisionContext) -> Result<CueMomentRun> {
    let prec = ctx.prec();
    if mu.re.to_f64() <= -0.5 {
        return Err(Error::Precondition("Re mu > -1/2 required".into()));
    }
    if n_max < 1 {
        return Err(Error::Precondition("n_max >= 1 required".into()));
    }
    let mu = mu.with_prec(prec);
    let x = u.with_prec(prec).norm_sqr();
    let x_f = x.to_f64();
    if (x_f - 1.0).abs() < ctx.tolerance {
        let f_values = (0..=n_max).map(|n| gamma_product(&mu, n, ctx)).collect::<Result<Vec<_>>>()?;
        let r_values = (0..=n_max as i64).map(|n| (&mu / &(&mu + n)) * if n % 2 == 0 { 1i64 } else { -1 }).collect();
        return Ok(CueMomentRun { mu, u: u.clone(), f_values, r_values, method: Method::ClosedForm });
    }
    if x_f > 1.0 {
        let inv = u.with_prec(prec).recip();
        let mut run = cue_moment_sequence(&mu, &inv, n_max, ctx)?;
        let scale = XComplex::from_real(x).powc(&mu);
        let mut s = XComplex::one(prec);
        for f in run.f_values.iter_mut() {
            *f = &*f * &s;
            s = &s * &scale;
        }
        run.u = u.clone();
        return Ok(run);
    }
    let xc = XComplex::from_real(x.clone());
    let f1 = gauss_2f1(&-&mu, &-&mu, &XComplex::one(prec), &xc, ctx)?;
    if xc.is_zero() {
        let r_values = (0..=n_max as u64)
            .map(|n| pochhammer(&mu, n, ctx).scale(&factorial(n, prec).recip()) * if n % 2 == 0 { 1i64 } else { -1 })
            .collect();
        let f_values = vec![XComplex::one(prec); n_max + 1];
        return Ok(CueMomentRun { mu, u: u.clone(), f_values, r_values, method: Method::ClosedForm });
    }
    let r1 = -(&mu * &gauss_2f1(&-&mu, &(1i64 - &mu), &XComplex::int(prec, 2), &xc, ctx)?) / &f1;
    match cue_moment_recurrence(&mu, &xc, r1, n_max) {
        Ok(r) => {
            let f_values = ratio_products(f1, |n| 1i64 - &(xc.powi(n as i64) * &r[n].square()), n_max);
            Ok(CueMomentRun { mu, u: u.clone(), f_values, r_values: r, method: Method::Recurrence })
        }
        Err(Error::ZeroPivot(_)) => {
            let spec = MomentSpec::CueCharpoly { mu: mu.clone(), u: u.with_prec(prec) };
            let table = MomentTable::for_size(&spec, n_max + 1, ctx)?;
            let ora = oracle_sequence(n_max, &table, ctx)?;
            Ok(CueMomentRun { mu, u: u.clone(), f_values: ora.tau, r_values: ora.r, method: Method::DetOracle })
        }
        Err(e) => Err(e),
    }
}

fn cue_moment_recurrence(mu: &XComplex, x: &XComplex, r1: XComplex, n_max: usize) -> Result<Vec<XComplex>> {
    let prec = mu.prec();
    let mut r = vec![XComplex::one(prec), r1];
    let zero = XComplex::zero(prec);
    for n in 1..n_max {
        let ni = n as i64;
        let (rn, rm) = (&r[n], &r[n - 1]);
        let rmm = if n >= 2 { r[n - 2].clone() } else { zero.clone() };
        if rn.is_zero() {
            return Err(Error::ZeroPivot(format!("r_{n} vanishes")));
        }
        let xn = x.powi(ni);
        let lhs = (&xn * rn * rm * 2i64) - x - 1i64;
        // (1 - x^{N-1} r_{N-1}^2)/r_{N-1} vanishes identically at N = 1
        let back = if n == 1 {
            zero.clone()
        } else {
            (1i64 - &(x.powi(ni - 1) * &rm.square())) / rm * ((mu + ni) * x * rn + (mu + (ni - 2)) * &rmm)
        };
        let front = (1i64 - &(&xn * &rn.square())) / rn;
        if front.is_zero() {
            return Err(Error::ZeroPivot(format!("1 - x^N r_N^2 vanishes at N = {n}")));
        }
        let next = ((lhs + back) / front - (mu + (ni - 1)) * rm) / ((mu + (ni + 1)) * x);
        r.push(next);
    }
    r.truncate(n_max + 1);
    Ok(r)
}

/// E_N((pi - phi, pi); xi) for N = 0..=n_max with the auxiliary x_N.
#[derive(Clone, Debug)]
pub struct CueGapRun {
    pub xi: XComplex,
    pub phi: Float,
    pub e_values: Vec<XComplex>,
    /// x_0..=x_{n_max}
    pub x_values: Vec<XComplex>,
    pub residuals: ResidualReport,
}

fn quadratic_terms(n: i64, c: &XComplex, xm: &XComplex, x: &XComplex, xp: &XComplex) -> Vec<XComplex> {
    let x2 = x.square();
    let a = 1i64 - &x2;
    vec![
        a.square() * &((xp.square() * ((n + 1) * (n + 1))) + xm.square() * ((n - 1) * (n - 1))),
        (1i64 - &x2.square()) * xp * xm * (2 * (n * n - 1)),
        c * x * &a * &(xp * (n + 1) + xm * (n - 1)) * (4 * n),
        x2.clone() * (c.square() - &x2) * (4 * n * n),
    ]
}

pub fn cue_gap_sequence(xi: &XComplex, phi: &Float, n_max: usize, ctx: &PrecisionContext) -> Result<CueGapRun> {
    let prec = ctx.prec();
    let two_pi = pi(prec) * 2u32;
    if !(*phi > 0 && *phi < two_pi) {
        return Err(Error::Precondition("phi must lie in (0, 2 pi)".into()));
    }
    if n_max < 1 {
        return Err(Error::Precondition("n_max >= 1 required".into()));
    }
    let wide = ctx.rescaled(ctx.decimal_digits * 2);
    let wp = wide.prec();
    let xi_w = xi.with_prec(wp);
    let ph = Float::with_val(wp, phi);
    let e1 = moment_cue_gap(0, &xi_w, &ph, &wide);
    if e1.abs_f64() < ctx.tolerance {
        return Err(Error::Precondition("1 - xi phi / 2 pi must not vanish".into()));
    }
    let half = XComplex::from_real(Float::with_val(wp, &ph / 2u32));
    let c = half.cos();
    let pif = XComplex::from_real(pi(wp));
    let x1 = -(&xi_w / &pif * &half.sin()) / &e1;
    let zero = XComplex::zero(wp);
    // xs[i] = x_{i-1}
    let mut xs = vec![zero.clone(), XComplex::one(wp), x1];
    let mut residuals = ResidualReport::new();
    if xs[2].is_zero() {
        xs.resize(n_max + 2, zero.clone());
    } else {
        for n in 1..n_max as i64 {
            let i = n as usize + 1;
            let (x, xm, xmm) = (&xs[i], &xs[i - 1], &xs[i - 2]);
            let a = 1i64 - &x.square();
            if a.is_zero() || x.is_zero() {
                return Err(Error::ZeroPivot(format!("(1 - x_N^2)/x_N degenerates at N = {n}")));
            }
            let lhs = x * xm * 2i64 - &c * 2i64;
            let back = (1i64 - &xm.square()) / xm * (x * n + xmm * (n - 2));
            let next = ((lhs + back) * x / &a - xm * (n - 1)) / (n + 1);
            xs.push(next);
        }
    }
    let x_values: Vec<XComplex> = xs[1..].iter().map(|v| v.with_prec(prec)).collect();
    for n in 1..n_max.saturating_sub(1) as i64 {
        let i = n as usize + 1;
        residuals.push_terms("cue_quadratic", n as usize, &quadratic_terms(n, &c, &xs[i - 1], &xs[i], &xs[i + 1]));
    }
    let e = ratio_products(e1, |n| 1i64 - &xs[n + 1].square(), n_max);
    let e_values = e.iter().map(|v| v.with_prec(prec)).collect();
    Ok(CueGapRun { xi: xi.clone(), phi: Float::with_val(prec, phi), e_values, x_values, residuals })
}

/// <sigma_{00} sigma_{NN}> for N = 0..=n_max with reflection coefficients in the gauge of the recurrences.
#[derive(Clone, Debug)]
pub struct IsingRun {
    pub k: Float,
    pub phase: IsingPhase,
    pub correlations: Vec<XComplex>,
    pub r_values: Vec<XComplex>,
    pub rbar_values: Vec<XComplex>,
    /// l_N = sum_{n <= N} r_n rbar_{n-1}
    pub l_values: Vec<XComplex>,
    pub method: Method,
}

fn cumulative_l(r: &[XComplex], rb: &[XComplex]) -> Vec<XComplex> {
    let mut l = vec![XComplex::zero(r[0].prec())];
    for n in 1..r.len() {
        let v = &l[n - 1] + &(&r[n] * &rb[n - 1]);
        l.push(v);
    }
    l
}

fn sgn(n: usize) -> i64 {
    if n % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Quasi-linear 2/1 and 1/2 steps in x = k^{-2} (low) or k^2 (high).
fn ising_recurrence(x: &XComplex, r1: XComplex, rb1: XComplex, n_max: usize) -> Result<(Vec<XComplex>, Vec<XComplex>)> {
    let prec = x.prec();
    let mut r = vec![XComplex::one(prec), r1];
    let mut rb = vec![XComplex::one(prec), rb1];
    for n in 1..n_max {
        let ni = n as i64;
        let prod = &r[n] * &rb[n];
        let a = 1i64 - &prod;
        if a.abs_f64() == 0.0 {
            return Err(Error::ZeroPivot(format!("1 - r_N rbar_N vanishes at N = {n}")));
        }
        let den_r = x * &a * (2 * ni + 3);
        if den_r.is_zero() {
            return Err(Error::ZeroPivot("the r step has a vanishing leading coefficient".into()));
        }
        let t1 = (x + 1i64 - &(x * &r[n] * &rb[n - 1] * (2 * ni - 1))) * &r[n] * (2 * ni);
        let t2 = (&prod * (2 * ni - 1) + 1i64) * &r[n - 1] * (2 * ni - 3);
        let rn1 = -(t1 + t2) / den_r;
        let s1 = (&rb[n] * &r[n - 1] * (2 * ni - 3) + x + 1i64) * &rb[n] * (2 * ni);
        let s2 = x * &(1i64 - &(&prod * (2 * ni + 1))) * &rb[n - 1] * (2 * ni - 1);
        let rbn1 = -(s1 + s2) / (&a * (2 * ni + 1));
        r.push(rn1);
        rb.push(rbn1);
    }
    r.truncate(n_max + 1);
    rb.truncate(n_max + 1);
    Ok((r, rb))
}

fn ising_constants(k: &Float, phase: IsingPhase, n_max: usize, ctx: &PrecisionContext) -> IsingRun {
    let prec = ctx.prec();
    let nhalf = XComplex::dec(prec, "-0.5");
    let half = XComplex::dec(prec, "0.5");
    let zero_temp = phase == IsingPhase::Low;
    let mut r = vec![];
    let mut rb = vec![];
    let mut c = vec![];
    for n in 0..=n_max {
        let p = pochhammer(&nhalf, n as u64, ctx) * sgn(n);
        if zero_temp {
            r.push(p.scale(&factorial(n as u64, prec).recip()));
            rb.push(if n == 0 { XComplex::one(prec) } else { XComplex::zero(prec) });
            c.push(XComplex::one(prec));
        } else {
            r.push(p.scale(&factorial(n as u64 + 1, prec).recip()));
            rb.push(XComplex::from_real(factorial(n as u64, prec)) / pochhammer(&half, n as u64, ctx) * sgn(n));
            c.push(if n == 0 { XComplex::one(prec) } else { XComplex::zero(prec) });
        }
    }
    let l = cumulative_l(&r, &rb);
    IsingRun { k: k.clone(), phase, correlations: c, r_values: r, rbar_values: rb, l_values: l, method: Method::ClosedForm }
}

/// Critical-point correlations prod_{j<=N} Gamma(j)^2 / (Gamma(j+1/2) Gamma(j-1/2)).
pub fn ising_critical_correlation(n: usize, ctx: &PrecisionContext) -> Result<XComplex> {
    let prec = ctx.prec();
    let half = XComplex::dec(prec, "0.5");
    let mut c = XComplex::one(prec);
    for j in 1..=n as i64 {
        let g = gamma(&XComplex::int(prec, j), ctx)?.square();
        c = &c * &g / &gamma(&(&half + j), ctx)? / &gamma(&(j - &half), ctx)?;
    }
    Ok(c)
}

/// k = +inf gives the zero-temperature constants; k = 0 in the high phase the infinite-temperature ones.
pub fn ising_diagonal(k: &Float, phase: IsingPhase, n_max: usize, ctx: &PrecisionContext) -> Result<IsingRun> {
    let prec = ctx.prec();
    if n_max < 1 {
        return Err(Error::Precondition("n_max >= 1 required".into()));
    }
    if k.is_nan() || *k < 0 {
        return Err(Error::Phase("k must be a nonnegative number".into()));
    }
    let critical = *k == 1;
    match phase {
        IsingPhase::Low if k.is_infinite() => return Ok(ising_constants(k, phase, n_max, ctx)),
        IsingPhase::High if k.is_zero() => return Ok(ising_constants(k, phase, n_max, ctx)),
        IsingPhase::Low if *k < 1 => return Err(Error::Phase(format!("low phase needs k >= 1, got {}", k.to_f64()))),
        IsingPhase::High if *k > 1 || k.is_infinite() => {
            return Err(Error::Phase(format!("high phase needs 0 <= k <= 1, got {}", k.to_f64())))
        }
        _ => {}
    }
    let wide = ctx.rescaled(ctx.decimal_digits + 20);
    let wp = wide.prec();
    let kf = Float::with_val(wp, k);
    let kx = XComplex::from_real(kf.clone());
    let third = |v: XComplex| v / 3i64;
    let (x, r1, rb1, c1) = if critical {
        let c1 = XComplex::from_real(pi(wp)).recip() * 2i64;
        (XComplex::one(wp), third(XComplex::one(wp)), -XComplex::one(wp), c1)
    } else if phase == IsingPhase::Low {
        let k2 = kx.square();
        let m = kx.recip();
        let ratio = elliptic_k(&m, &wide)? / elliptic_e(&m, &wide)?;
        let r1 = third(2i64 - &k2) + third(&k2 - 1i64) * &ratio;
        let rb1 = (&k2 - 1i64) / &k2 * &ratio - 1i64;
        (k2.recip(), r1, rb1, moment_ising(0, &kf, phase, &wide)?)
    } else {
        let k2 = kx.square();
        let (kk, ee) = (elliptic_k(&kx, &wide)?, elliptic_e(&kx, &wide)?);
        let den = (&k2 - 1i64) * &kk + &ee;
        let r1 = third(k2.recip() * 2i64 - &(&ee / &den));
        let rb1 = -(&k2 * &ee / &den);
        (k2, r1, rb1, moment_ising(0, &kf, phase, &wide)?)
    };
    let (r, rb) = ising_recurrence(&x, r1, rb1, n_max)?;
    let corr = ratio_products(c1, |n| 1i64 - &(&r[n] * &rb[n]), n_max);
    let down = |v: Vec<XComplex>| v.into_iter().map(|z| z.with_prec(prec)).collect::<Vec<_>>();
    let l = cumulative_l(&r, &rb);
    Ok(IsingRun {
        k: Float::with_val(prec, k),
        phase,
        correlations: down(corr),
        r_values: down(r),
        rbar_values: down(rb),
        l_values: down(l),
        method: Method::Recurrence,
    })
}

/// (correlation, r_N, rbar_N) from partition hypergeometric functions at t = k^{-2} or k^2.
pub fn ising_via_hyp(k: &Float, phase: IsingPhase, n: usize, ctx: &PrecisionContext) -> Result<(XComplex, XComplex, XComplex)> {
    let prec = ctx.prec();
    if n < 1 {
        return Err(Error::Precondition("N >= 1 required".into()));
    }
    let kx = XComplex::from_real(Float::with_val(prec, k));
    let h = |s: &str| XComplex::dec(prec, s);
    let ni = n as i64;
    let nu = n as u64;
    let f = |a: &XComplex, b: &XComplex, c: i64, t: &XComplex| hyp_2f1_partition(a, b, &XComplex::int(prec, c), t, n, ctx).map(|v| v.0);
    match phase {
        IsingPhase::Low => {
            if *k <= 1 {
                return Err(Error::Phase("low phase needs k > 1".into()));
            }
            let t = kx.square().recip();
            let base = f(&h("-0.5"), &h("0.5"), ni, &t)?;
            let r = pochhammer(&h("-0.5"), nu, ctx).scale(&factorial(nu, prec).recip()) * &f(&h("-0.5"), &h("1.5"), ni + 1, &t)? / &base;
            let (lim, _) = ising_limit_eval(n, &t, ctx)?;
            let rb = XComplex::from_real(factorial(nu - 1, prec)) / pochhammer(&h("0.5"), nu, ctx) * &lim / &base;
            Ok((base, r * sgn(n), rb * sgn(n)))
        }
        IsingPhase::High => {
            if *k >= 1 || *k <= 0 {
                return Err(Error::Phase("high phase needs 0 < k < 1".into()));
            }
            let t = kx.square();
            let base = f(&h("0.5"), &h("0.5"), ni + 1, &t)?;
            // (2N-1)!! / (2^N N!) = (1/2)_N / N!
            let pref = pochhammer(&h("0.5"), nu, ctx).scale(&factorial(nu, prec).recip()) * &kx.powi(ni);
            let r = pochhammer(&h("-0.5"), nu, ctx).scale(&factorial(nu + 1, prec).recip()) * &f(&h("0.5"), &h("1.5"), ni + 2, &t)? / &base;
            let rb = XComplex::from_real(factorial(nu, prec)) / pochhammer(&h("0.5"), nu, ctx) * &f(&h("0.5"), &h("-0.5"), ni, &t)? / &base;
            Ok((&pref * &base, r * sgn(n), rb * sgn(n)))
        }
    }
}

/// Residuals of rbar_n = t^n r_n and Im(t^{n/2} r_n) = 0 along a recurrence run.
///
/// On the circle the weight is taken real, |2cos(theta/2)|^{2 omega} |2cos((theta+phi)/2)|^{2 mu},
/// which is the general weight with 1 - xi = e^{2 pi i mu} on the arc. Off the circle t must be real in (0, 1).
pub fn realness_structure(params: &WeightParams, n_max: usize, ctx: &PrecisionContext) -> Result<ResidualReport> {
    let prec = ctx.prec();
    if !params.omega2.is_zero() || !params.xi.is_zero() {
        return Err(Error::Precondition("realness needs omega2 = 0 and xi = 0".into()));
    }
    let mut p = params.with_prec(prec);
    if p.is_on_circle(ctx.tolerance.sqrt()) {
        let turn = XComplex::from_real(pi(prec) * 2u32).mul_i();
        p.xi = 1i64 - &(&turn * &p.mu).exp();
    } else if p.t.im.to_f64().abs() > ctx.tolerance || p.t.re.to_f64() <= 0.0 || p.t.re.to_f64() >= 1.0 {
        return Err(Error::Precondition("off the circle t must be real in (0, 1)".into()));
    }
    let spec = MomentSpec::General(p.clone());
    let (run, _, _) = run_checked(&spec, n_max, StepKind::TwoTwo, ctx)?;
    let half_log = p.log_t() * 0.5f64;
    let mut rep = ResidualReport::new();
    for n in 0..=n_max {
        let tn = (&half_log * (2 * n as i64)).exp();
        let sym = &run.r[n] * &tn;
        let scale = run.rbar[n].abs_f64().max(sym.abs_f64());
        let gap = if scale == 0.0 { 0.0 } else { run.rbar[n].abs_diff(&sym) / scale };
        rep.push("conjugate_symmetry", n, gap);
        let rot = &run.r[n] * &(&half_log * n as i64).exp();
        let mag = rot.abs_f64();
        rep.push("real_rotation", n, if mag == 0.0 { 0.0 } else { rot.im.to_f64().abs() / mag });
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toeplitz::toeplitz_det;

    #[test]
    fn cue_moments_follow_determinants() {
        let ctx = PrecisionContext::default();
        let p = ctx.prec();
        let mu = XComplex::dec(p, "0.7");
        let u = XComplex::dec(p, "0.6");
        let run = cue_moment_sequence(&mu, &u, 8, &ctx).unwrap();
        assert_eq!(run.method, Method::Recurrence);
        let spec = MomentSpec::CueCharpoly { mu: mu.clone(), u: u.clone() };
        let table = MomentTable::for_size(&spec, 9, &ctx).unwrap();
        let ora = oracle_sequence(8, &table, &ctx).unwrap();
        for n in 1..=8 {
            assert!(run.f_values[n].rel_diff(&ora.tau[n]) < 1e-40, "F_{n}");
            assert!(run.r_values[n].rel_diff(&ora.r[n]) < 1e-40, "r_{n}");
        }
    }

    #[test]
    fn cue_gap_matches_determinants() {
        let ctx = PrecisionContext::default();
        let p = ctx.prec();
        let xi = XComplex::one(p);
        let phi = pi(p) / 2u32;
        let run = cue_gap_sequence(&xi, &phi, 8, &ctx).unwrap();
        let table = MomentTable::build(&MomentSpec::CueGap { xi: xi.clone(), phi: phi.clone() }, -9, 9, &ctx).unwrap();
        for n in 1..=8 {
            let d = toeplitz_det(0, n, &table, &ctx).unwrap().value;
            assert!(run.e_values[n].rel_diff(&d) < 1e-40, "E_{n}: {}", run.e_values[n].rel_diff(&d));
        }
        assert!(run.residuals.max() < 1e-40);
    }

    #[test]
    fn ising_low_phase_routes_agree() {
        let ctx = PrecisionContext::default();
        let p = ctx.prec();
        let k = Float::with_val(p, 2);
        let run = ising_diagonal(&k, IsingPhase::Low, 5, &ctx).unwrap();
        let table = MomentTable::for_size(&MomentSpec::Ising { k: k.clone(), phase: IsingPhase::Low }, 6, &ctx).unwrap();
        let ora = oracle_sequence(5, &table, &ctx).unwrap();
        for n in 1..=5 {
            assert!(run.correlations[n].rel_diff(&ora.tau[n]) < 1e-40, "C_{n}");
            assert!(run.r_values[n].rel_diff(&ora.r[n]) < 1e-40, "r_{n}");
            let (c, r, rb) = ising_via_hyp(&k, IsingPhase::Low, n, &ctx).unwrap();
            assert!(c.rel_diff(&ora.tau[n]) < 1e-40);
            assert!(r.rel_diff(&run.r_values[n]) < 1e-40);
            assert!(rb.rel_diff(&run.rbar_values[n]) < 1e-40, "rbar_{n}: {}", rb.rel_diff(&run.rbar_values[n]));
        }
    }
}

//! Discrete Painleve V forms of the recurrences and the two Hamiltonian schemes.

use crate::ctx::PrecisionContext;
use crate::error::{Error, Result};
use crate::recurrence::ReflectionRun;
use crate::report::ResidualReport;
use crate::weight::WeightParams;
use crate::xc::XComplex;
use serde::Serialize;

/// (f, g) and their conjugates at index N. `seed_r1` and `seed_rbar1` feed the explicit g_1.
#[derive(Clone, Debug)]
pub struct DpvState {
    pub n: usize,
    pub f: XComplex,
    pub g: XComplex,
    pub fbar: XComplex,
    pub gbar: XComplex,
    pub seed_r1: XComplex,
    pub seed_rbar1: XComplex,
    pub params: WeightParams,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Scheme {
    L01,
    L14,
}

#[derive(Clone, Debug)]
pub struct HamiltonianState {
    pub n: usize,
    pub q: XComplex,
    pub p: XComplex,
    pub t: XComplex,
    pub alphas: [XComplex; 5],
    pub k: XComplex,
    pub scheme: Scheme,
}

/// T_{N-1}, T_N, T_{N+1}.
#[derive(Clone, Debug)]
pub struct TauTriple {
    pub prev: XComplex,
    pub cur: XComplex,
    pub next: XComplex,
}

fn guard(x: &XComplex, what: &str, n: usize, ctx: &PrecisionContext) -> Result<()> {
    if x.is_zero() || x.abs_f64() < ctx.tolerance {
        return Err(Error::SingularStep(format!("{what} vanishes at N = {n}")));
    }
    Ok(())
}

fn nz(x: &XComplex, what: &str, ctx: &PrecisionContext) -> Result<()> {
    if x.is_zero() || x.abs_f64() < ctx.tolerance {
        return Err(Error::DivisionByZero(what.to_string()));
    }
    Ok(())
}

struct Pc {
    mu: XComplex,
    om: XComplex,
    ob: XComplex,
    w1: XComplex,
    t: XComplex,
}

impl Pc {
    fn new(p: &WeightParams, prec: u32) -> Self {
        Self {
            mu: p.mu.with_prec(prec),
            om: p.omega().with_prec(prec),
            ob: p.omega_bar().with_prec(prec),
            w1: p.omega1.with_prec(prec),
            t: p.t.with_prec(prec),
        }
    }
    fn a(&self, k: i64) -> XComplex {
        &self.mu + &self.om + k
    }
    fn b(&self, k: i64) -> XComplex {
        &self.mu + &self.ob + k
    }
}

/// g_1 and gbar_1 from the first reflection coefficients.
fn explicit_g1(c: &Pc, r1: &XComplex, rb1: &XComplex, ctx: &PrecisionContext) -> Result<(XComplex, XComplex)> {
    let t = &c.t;
    let num = c.a(0) + &c.b(1) * r1;
    let den = c.a(0) + &c.b(1) * t * r1;
    nz(&den, "g_1 denominator", ctx)?;
    let numb = c.b(0) + &c.a(1) / t * rb1;
    let denb = c.b(0) + &c.a(1) * rb1;
    nz(&denb, "gbar_1 denominator", ctx)?;
    Ok((t * num / den, numb / denb))
}

/// The image of a reflection run at index N.
pub fn to_fg(run: &ReflectionRun, n_idx: usize, ctx: &PrecisionContext) -> Result<DpvState> {
    let prec = ctx.prec();
    let c = Pc::new(&run.params, prec);
    let t = &c.t;
    let n = n_idx as i64;
    let (r, rb, l) = (&run.r, &run.rbar, &run.l);
    if n_idx + 1 > run.n_max() {
        return Err(Error::Precondition("to_fg needs r_{N+1}".into()));
    }
    let one_t = 1i64 - t;
    nz(&one_t, "1 - t", ctx)?;
    let mk = |f, g, fbar, gbar| DpvState {
        n: n_idx,
        f,
        g,
        fbar,
        gbar,
        seed_r1: r[1].clone(),
        seed_rbar1: rb[1].clone(),
        params: run.params.clone(),
    };
    let v = 1i64 - &r[n_idx] * &rb[n_idx];
    if n_idx == 0 {
        let z = XComplex::zero(prec);
        return Ok(mk(z.clone(), z.clone(), z.clone(), z));
    }
    nz(&r[n_idx], "r_N", ctx)?;
    nz(&rb[n_idx], "rbar_N", ctx)?;
    let f = (t * &l[n_idx] - n - &c.b(n + 1) * &v * t * &r[n_idx + 1] / &r[n_idx]) / &one_t;
    let fbar = (-(t * &l[n_idx]) + t * n + &c.b(n - 1) * &v * t * &rb[n_idx - 1] / &rb[n_idx]) / &one_t;
    nz(&r[n_idx - 1], "r_{N-1}", ctx)?;
    nz(&rb[n_idx - 1], "rbar_{N-1}", ctx)?;
    let rho = &r[n_idx] / &r[n_idx - 1];
    let rhob = &rb[n_idx] / &rb[n_idx - 1];
    let gden = c.a(n - 1) + &c.b(n) * t * &rho;
    nz(&gden, "g_N denominator", ctx)?;
    let g = t * (c.a(n - 1) + &c.b(n) * &rho) / gden;
    let gbden = c.b(n - 1) + &c.a(n) * &rhob;
    nz(&gbden, "gbar_N denominator", ctx)?;
    let gbar = (c.b(n - 1) + &c.a(n) / t * &rhob) / gbden;
    Ok(mk(f, g, fbar, gbar))
}

/// Base state N = 0: f_0 = fbar_0 = 0, g undefined (stored as zero).
pub fn dpv_base(params: &WeightParams, r1: &XComplex, rb1: &XComplex, ctx: &PrecisionContext) -> DpvState {
    let z = XComplex::zero(ctx.prec());
    DpvState {
        n: 0,
        f: z.clone(),
        g: z.clone(),
        fbar: z.clone(),
        gbar: z,
        seed_r1: r1.clone(),
        seed_rbar1: rb1.clone(),
        params: params.clone(),
    }
}

/// Advances (f, g) and (fbar, gbar) from N to N+1.
pub fn dpv_step(s: &DpvState, ctx: &PrecisionContext) -> Result<DpvState> {
    let prec = ctx.prec();
    let c = Pc::new(&s.params, prec);
    let t = &c.t;
    let n = s.n as i64;
    let two_w1 = &c.w1 * 2i64;
    let two_mu = &c.mu * 2i64;
    let (g1, gb1) = if s.n == 0 {
        explicit_g1(&c, &s.seed_r1, &s.seed_rbar1, ctx)?
    } else {
        let den = &s.f * (&s.f - &two_w1) * &s.g;
        guard(&den, "f_N (f_N - 2 omega1) g_N", s.n, ctx)?;
        let g1 = t * (&s.f + n) * (&s.f + n + &two_mu) / den;
        let denb = t * &s.fbar * (&s.fbar - &two_mu) * &s.gbar;
        guard(&denb, "t fbar_N (fbar_N - 2 mu) gbar_N", s.n, ctx)?;
        let gb1 = (&s.fbar + n) * (&s.fbar + n + &two_w1) / denb;
        (g1, gb1)
    };
    let gm1 = &g1 - 1i64;
    let gmt = &g1 - t;
    guard(&gm1, "g_{N+1} - 1", s.n, ctx)?;
    guard(&gmt, "g_{N+1} - t", s.n, ctx)?;
    let f1 = &two_w1 + c.a(n) / gm1 + &c.b(n + 1) * t / gmt - &s.f;
    let gbm1 = &gb1 - 1i64;
    let gbmt = &gb1 - &t.recip();
    guard(&gbm1, "gbar_{N+1} - 1", s.n, ctx)?;
    guard(&gbmt, "gbar_{N+1} - 1/t", s.n, ctx)?;
    let fb1 = &two_mu + c.a(n + 1) / gbm1 + c.b(n) / t / gbmt - &s.fbar;
    Ok(DpvState {
        n: s.n + 1,
        f: f1,
        g: g1,
        fbar: fb1,
        gbar: gb1,
        seed_r1: s.seed_r1.clone(),
        seed_rbar1: s.seed_rbar1.clone(),
        params: s.params.clone(),
    })
}

/// Residuals of the four first-order equations between consecutive states (N-1, N, N+1).
pub fn dpv_closure(prev: &DpvState, cur: &DpvState, next: &DpvState) -> ResidualReport {
    let prec = cur.f.prec();
    let c = Pc::new(&cur.params, prec);
    let t = &c.t;
    let n = cur.n as i64;
    let mut rep = ResidualReport::new();
    let two_w1 = &c.w1 * 2i64;
    let two_mu = &c.mu * 2i64;
    let (f, g, fb, gb) = (&cur.f, &cur.g, &cur.fbar, &cur.gbar);
    rep.push_terms("dpv_g", cur.n, &[&next.g * g * f * (f - &two_w1), -(t * (f + n) * (f + n + &two_mu))]);
    rep.push_terms("dpv_f", cur.n, &[f.clone(), prev.f.clone(), -two_w1.clone(), -(c.a(n - 1) / (g - 1i64)), -(&c.b(n) * t / (g - t))]);
    rep.push_terms("dpv_gbar", cur.n, &[t * &next.gbar * gb * fb * (fb - &two_mu), -((fb + n) * (fb + n + &two_w1))]);
    rep.push_terms(
        "dpv_fbar",
        cur.n,
        &[fb.clone(), prev.fbar.clone(), -two_mu, -(c.a(n) / (gb - 1i64)), -(c.b(n - 1) / t / (gb - &t.recip()))],
    );
    rep
}

/// Reflection coefficients recovered from a propagated (f, g) sequence.
pub fn dpv_reflections(
    params: &WeightParams,
    r1: &XComplex,
    rb1: &XComplex,
    n_max: usize,
    ctx: &PrecisionContext,
) -> Result<(ReflectionRun, Vec<DpvState>)> {
    let prec = ctx.prec();
    let c = Pc::new(params, prec);
    let t = &c.t;
    let one = XComplex::one(prec);
    let mut r = vec![one.clone()];
    let mut rb = vec![one];
    let mut states = vec![dpv_base(params, r1, rb1, ctx)];
    if r1.is_zero() && rb1.is_zero() {
        let z = XComplex::zero(prec);
        for _ in 1..=n_max {
            r.push(z.clone());
            rb.push(z.clone());
        }
        return Ok((ReflectionRun::from_sequences(params.clone(), r, rb), states));
    }
    for n_idx in 1..=n_max {
        let s = dpv_step(states.last().expect("base state"), ctx)?;
        let n = n_idx as i64;
        // g = t (A + B rho) / (A + B t rho)
        let a = c.a(n - 1);
        let b = c.b(n);
        let den = &b * t * (&s.g - 1i64);
        nz(&den, "g_N - 1", ctx)?;
        let rho = &a * (t - &s.g) / den;
        let ab = c.b(n - 1);
        let bb = c.a(n);
        let denb = &bb * (&s.gbar - &t.recip());
        nz(&denb, "gbar_N - 1/t", ctx)?;
        let rhob = &ab * (1i64 - &s.gbar) / denb;
        let rn = &r[n_idx - 1] * &rho;
        let bn = &rb[n_idx - 1] * &rhob;
        r.push(rn);
        rb.push(bn);
        states.push(s);
    }
    r[1] = r1.clone();
    rb[1] = rb1.clone();
    Ok((ReflectionRun::from_sequences(params.clone(), r, rb), states))
}

/// K = t(t-1)H for the sixth Painleve Hamiltonian.
pub fn hamiltonian_k(q: &XComplex, p: &XComplex, t: &XComplex, al: &[XComplex; 5]) -> XComplex {
    let qm1 = q - 1i64;
    let qmt = q - t;
    let quad = q * &qm1 * &qmt * p.square();
    let lin = (&al[4] * &qm1 * &qmt + &al[3] * q * &qmt + (&al[0] - 1i64) * q * &qm1) * p;
    let cst = &al[2] * (&al[1] + &al[2]) * &qmt;
    quad - lin + cst
}

pub fn l01_alphas(n: usize, p: &WeightParams, prec: u32) -> [XComplex; 5] {
    let c = Pc::new(p, prec);
    let n = n as i64;
    [&c.w1 * 2i64 + (n + 1), &c.mu * 2i64 + n, XComplex::int(prec, -n), -(&c.mu + &c.om), -(&c.mu + &c.ob)]
}

pub fn l14_alphas(n: usize, p: &WeightParams, prec: u32) -> [XComplex; 5] {
    let c = Pc::new(p, prec);
    let n = n as i64;
    [1i64 - &c.mu - &c.om, &c.mu * 2i64 + n, XComplex::int(prec, -n), -(&c.mu + &c.ob), &c.w1 * 2i64 + n]
}

/// Output of either Hamiltonian scheme.
#[derive(Clone, Debug)]
pub struct SchemeRun {
    pub tau: Vec<XComplex>,
    pub states: Vec<HamiltonianState>,
    pub f: Vec<XComplex>,
    pub g: Vec<XComplex>,
}

impl SchemeRun {
    pub fn triple(&self, n: usize) -> Option<TauTriple> {
        if n == 0 || n + 1 >= self.tau.len() {
            return None;
        }
        Some(TauTriple { prev: self.tau[n - 1].clone(), cur: self.tau[n].clone(), next: self.tau[n + 1].clone() })
    }
}

fn check_base(t0: &XComplex, t1: &XComplex, mu: &XComplex, ctx: &PrecisionContext) -> Result<()> {
    if (t0 - 1i64).abs_f64() > ctx.tolerance {
        return Err(Error::Precondition("T_0 must be 1".into()));
    }
    nz(t1, "T_1", ctx)?;
    if mu.is_zero() || mu.abs_f64() < ctx.tolerance {
        return Err(Error::DivisionByZero("mu = 0 in the initial q_0".into()));
    }
    Ok(())
}

fn advance_tau(tau: &mut Vec<XComplex>, n: usize, rhs: &XComplex, c: &Pc, ctx: &PrecisionContext) -> Result<()> {
    let ni = n as i64;
    let den = c.a(ni) * c.b(ni);
    nz(&den, "(N+mu+omega)(N+mu+omegabar)", ctx)?;
    nz(&tau[n - 1], "T_{N-1}", ctx)?;
    let next = -(rhs / den) * tau[n].square() / &tau[n - 1];
    tau.push(next);
    Ok(())
}

/// The scheme built on the shift incrementing (alpha0, alpha1, -alpha2), with t = 1/(1 - e^{i phi}).
pub fn l01_scheme(
    t0: &XComplex,
    t1: &XComplex,
    dt1_dphi: &XComplex,
    params: &WeightParams,
    n_max: usize,
    ctx: &PrecisionContext,
) -> Result<SchemeRun> {
    let prec = ctx.prec();
    let c = Pc::new(params, prec);
    check_base(t0, t1, &c.mu, ctx)?;
    let te = &c.t;
    let one_te = 1i64 - te;
    nz(&one_te, "1 - e^{i phi}", ctx)?;
    let t = one_te.recip();
    let dlog = dt1_dphi / t1;
    let q0 = (1i64 + XComplex::i(prec) / &c.mu * dlog) * 0.5f64;
    nz(&(&q0 - 1i64), "q_0 - 1", ctx)?;
    nz(&(&q0 - &t), "q_0 - t", ctx)?;
    let g0 = &q0 / (&q0 - 1i64);
    let f0 = c.b(1) * (&q0 - 1i64) + &c.a(0) * &q0 - (&c.w1 * 2i64 + 1i64) * &q0 * (&q0 - 1i64) / (&q0 - &t);
    let mut gs = vec![g0];
    let mut fs = vec![f0];
    let tt = &t / (&t - 1i64);
    for n_idx in 0..n_max {
        let n = n_idx as i64;
        let (g, f) = (&gs[n_idx], &fs[n_idx]);
        let den = f * (f - &c.a(0)) * g;
        guard(&den, "f_N (f_N - mu - omega) g_N", n_idx, ctx)?;
        let gn = &tt * (f + (n + 1)) * (f + &c.b(n + 1)) / den;
        let d1 = &gn - 1i64;
        let d2 = &t * &d1 - &gn;
        guard(&d1, "g_{N+1} - 1", n_idx, ctx)?;
        guard(&d2, "t (g_{N+1} - 1) - g_{N+1}", n_idx, ctx)?;
        let fnext = c.a(0) + (&c.mu * 2i64 + (n + 1)) / d1 + (&c.w1 * 2i64 + (n + 2)) * &t / d2 - f;
        gs.push(gn);
        fs.push(fnext);
    }
    let mut tau = vec![t0.clone(), t1.clone()];
    let mut states = Vec::new();
    for n_idx in 0..n_max {
        let n = n_idx as i64;
        let (g, f) = (&gs[n_idx], &fs[n_idx]);
        let gm1 = g - 1i64;
        nz(&gm1, "g_N - 1", ctx)?;
        nz(g, "g_N", ctx)?;
        let q = g / &gm1;
        let p = gm1.square() / g * f - c.b(n + 1) * &gm1 / g - c.a(0) * &gm1 + (&c.w1 * 2i64 + (n + 1)) * &gm1 / (&t + (1i64 - &t) * g);
        let al = l01_alphas(n_idx, params, prec);
        let k = hamiltonian_k(&q, &p, &t, &al);
        if n_idx >= 1 && tau.len() <= n_max {
            let rhs =
                &q * (&q - 1i64) * p.square() + (&c.mu + &c.w1) * 2i64 * &q * &p - &c.b(0) * &p - (&c.mu * 2i64 + &c.w1 * 2i64 + n) * n;
            advance_tau(&mut tau, n_idx, &rhs, &c, ctx)?;
        }
        states.push(HamiltonianState { n: n_idx, q, p, t: t.clone(), alphas: al, k, scheme: Scheme::L01 });
    }
    tau.truncate(n_max + 1);
    Ok(SchemeRun { tau, states, f: fs, g: gs })
}

/// The scheme built on the shift incrementing (alpha1, -alpha2, alpha4), with t = e^{i phi}.
pub fn l14_scheme(
    t0: &XComplex,
    t1: &XComplex,
    dt1_dphi: &XComplex,
    params: &WeightParams,
    n_max: usize,
    ctx: &PrecisionContext,
) -> Result<SchemeRun> {
    let prec = ctx.prec();
    let c = Pc::new(params, prec);
    check_base(t0, t1, &c.mu, ctx)?;
    let t = c.t.clone();
    nz(&(1i64 - &t), "1 - t", ctx)?;
    // d/dphi log(e^{i mu phi} T_1)
    let d = dt1_dphi / t1 + c.mu.mul_i();
    let den = c.a(0) + d.mul_i();
    nz(&den, "mu + omega + i D", ctx)?;
    let q0 = &c.w1 / &c.mu * (-d.mul_i()) / den;
    nz(&q0, "q_0", ctx)?;
    nz(&(&q0 - 1i64), "q_0 - 1", ctx)?;
    let g0 = (&q0 - &t) / (&q0 - 1i64);
    let f0 = (c.a(0) * (&q0 - 1i64) + c.b(0) * (&q0 - &t) - &c.w1 * 2i64 * (&q0 - &t) * (&q0 - 1i64) / &q0) / (1i64 - &t);
    let mut gs = vec![g0];
    let mut fs = vec![f0];
    for n_idx in 0..n_max {
        let n = n_idx as i64;
        let (g, f) = (&gs[n_idx], &fs[n_idx]);
        let den = f * (f - &c.b(0)) * g;
        guard(&den, "f_N (f_N - mu - omegabar) g_N", n_idx, ctx)?;
        let gn = &t * (f + (n + 1)) * (f + &c.a(n)) / den;
        let d1 = &gn - 1i64;
        let d2 = &gn - &t;
        guard(&d1, "g_{N+1} - 1", n_idx, ctx)?;
        guard(&d2, "g_{N+1} - t", n_idx, ctx)?;
        let fnext = c.b(0) + (&c.mu * 2i64 + (n + 1)) / d1 + (&c.w1 * 2i64 + (n + 1)) * &t / d2 - f;
        gs.push(gn);
        fs.push(fnext);
    }
    let mut tau = vec![t0.clone(), t1.clone()];
    let mut states = Vec::new();
    for n_idx in 0..n_max {
        let n = n_idx as i64;
        let (g, f) = (&gs[n_idx], &fs[n_idx]);
        let gm1 = g - 1i64;
        nz(&gm1, "g_N - 1", ctx)?;
        nz(g, "g_N", ctx)?;
        let q = (g - &t) / &gm1;
        let p = &gm1 / ((1i64 - &t) * g) * (&gm1 * f - c.b(0) * g + (&c.w1 * 2i64 + n) * (1i64 - &t) * g / (g - &t) - c.a(n));
        let al = l14_alphas(n_idx, params, prec);
        let k = hamiltonian_k(&q, &p, &t, &al);
        if n_idx >= 1 && tau.len() <= n_max {
            let qm1 = &q - 1i64;
            let rhs = &q * qm1.square() * p.square() + ((&c.mu * 2i64 - n) * &q + &c.w1 * 2i64 + n) * &qm1 * &p
                - &c.mu * 2i64 * n * &q
                - (&c.w1 * 2i64 + n) * n;
            advance_tau(&mut tau, n_idx, &rhs, &c, ctx)?;
        }
        states.push(HamiltonianState { n: n_idx, q, p, t: t.clone(), alphas: al, k, scheme: Scheme::L14 });
    }
    tau.truncate(n_max + 1);
    Ok(SchemeRun { tau, states, f: fs, g: gs })
}

/// Residuals of the four implicit (q, p) <-> (r, rbar) relations and the factorization at N.
/// `te` is the weight's t = e^{i phi}; the relations are written in t/(t-1).
pub fn map_qp_reflections(ham: &HamiltonianState, run: &ReflectionRun, ctx: &PrecisionContext) -> ResidualReport {
    let prec = ctx.prec();
    let c = Pc::new(&run.params, prec);
    let n_idx = ham.n;
    let n = n_idx as i64;
    let mut rep = ResidualReport::new();
    let (q, p) = (&ham.q, &ham.p);
    let rr = &run.r[n_idx] * &run.rbar[n_idx];
    let lhs1 = q * p + c.b(0);
    let lhs2 = (q - 1i64) * p + c.a(0);
    rep.push_terms("qp_factorization", n_idx, &[c.a(n) * c.b(n) * &rr, -(&lhs1 * &lhs2)]);
    if n_idx == 0 || n_idx + 1 > run.n_max() || run.r[n_idx].is_zero() || run.rbar[n_idx].is_zero() {
        return rep;
    }
    let tx = &c.t / (&c.t - 1i64);
    let l = &run.l[n_idx];
    let v = 1i64 - &rr;
    let u = (&c.w1 * 2i64 + n) * (q - 1i64) - &tx * l + &tx * n + c.b(n + 1) * &v * &tx * &run.r[n_idx + 1] / &run.r[n_idx];
    let w = (&c.w1 * 2i64 + n) * q + &tx * l - &tx * n - c.b(n - 1) * &v * &tx * &run.rbar[n_idx - 1] / &run.rbar[n_idx];
    let a = c.b(n) * &rr / (c.b(n) * &rr - &c.mu + &c.om) / (q - 1i64) * &u;
    let b = c.b(n) * (c.a(n) * &rr - &c.mu + &c.ob) * q / &w;
    let cc = c.a(n) * (c.b(n) * &rr - &c.mu + &c.om) * (q - 1i64) / &u;
    let d = c.a(n) * &rr / (c.a(n) * &rr - &c.mu + &c.ob) / q * &w;
    rep.push_terms("ops_a", n_idx, &[lhs1.clone(), -a]);
    rep.push_terms("ops_b", n_idx, &[lhs1, -b]);
    rep.push_terms("ops_c", n_idx, &[lhs2.clone(), -cc]);
    rep.push_terms("ops_d", n_idx, &[lhs2, -d]);
    rep
}

/// alpha0 <-> alpha4, t -> t/(t-1), q -> (t-q)/(t-1), p -> -(t-1)p.
pub fn s4_x3_transform(ham: &HamiltonianState, ctx: &PrecisionContext) -> Result<HamiltonianState> {
    let tm1 = &ham.t - 1i64;
    nz(&tm1, "t - 1 in the x^3 map", ctx)?;
    let t = &ham.t / &tm1;
    let q = (&ham.t - &ham.q) / &tm1;
    let p = -(&tm1 * &ham.p);
    let mut al = ham.alphas.clone();
    al.swap(0, 4);
    let k = hamiltonian_k(&q, &p, &t, &al);
    let scheme = match ham.scheme {
        Scheme::L01 => Scheme::L14,
        Scheme::L14 => Scheme::L01,
    };
    Ok(HamiltonianState { n: ham.n, q, p, t, alphas: al, k, scheme })
}

/// (g, f) auxiliary definitions of the L01 scheme in terms of (q, p, t, alphas).
pub fn l01_aux(h: &HamiltonianState) -> (XComplex, XComplex) {
    let (q, p, t, a) = (&h.q, &h.p, &h.t, &h.alphas);
    let qm1 = q - 1i64;
    let g = q / &qm1;
    let f = q * &qm1 * p + (1i64 - &a[2] - &a[4]) * &qm1 - &a[3] * q - &a[0] * q * &qm1 / (q - t);
    (g, f)
}

/// (g, f) auxiliary definitions of the L14 scheme.
pub fn l14_aux(h: &HamiltonianState) -> (XComplex, XComplex) {
    let (q, p, t, a) = (&h.q, &h.p, &h.t, &h.alphas);
    let qm1 = q - 1i64;
    let qmt = q - t;
    let g = &qmt / &qm1;
    let f = (&qmt * &qm1 * p + (1i64 - &a[0] - &a[2]) * &qm1 - &a[3] * &qmt - &a[4] * &qmt * &qm1 / q) / (1i64 - t);
    (g, f)
}

/// x^3 sends the L01 definitions to the L14 ones: residuals for one state.
pub fn x3_definition_residuals(h: &HamiltonianState, ctx: &PrecisionContext) -> Result<ResidualReport> {
    let img = s4_x3_transform(h, ctx)?;
    let (g01, f01) = l01_aux(&img);
    let (g14, f14) = l14_aux(h);
    let back = s4_x3_transform(&img, ctx)?;
    let mut rep = ResidualReport::new();
    rep.push_terms("x3_g", h.n, &[g01, -g14]);
    rep.push_terms("x3_f", h.n, &[f01, -f14]);
    rep.push_terms("x3_involution_q", h.n, &[back.q, -h.q.clone()]);
    rep.push_terms("x3_involution_p", h.n, &[back.p, -h.p.clone()]);
    rep.push_terms("x3_involution_t", h.n, &[back.t, -h.t.clone()]);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::run_oracle;
    use crate::toeplitz::oracle_sequence;
    use crate::weight::{moment_general, moment_general_dphi, MomentSpec, MomentTable};
    use rug::Float;

    fn d(p: u32, s: &str) -> XComplex {
        XComplex::dec(p, s)
    }

    #[test]
    fn hamiltonian_trivial_values() {
        let p = 200;
        let al = [d(p, "1.5"), d(p, "0.3"), d(p, "-2"), d(p, "0.1"), d(p, "0.4")];
        let q = d(p, "0.7,0.2");
        let t = d(p, "0.3,0.5");
        let z = XComplex::zero(p);
        let k = hamiltonian_k(&q, &z, &t, &al);
        let e = &al[2] * (&al[1] + &al[2]) * (&q - &t);
        assert!(k.abs_diff(&e) < 1e-50);
        assert!(hamiltonian_k(&t, &z, &t, &al).abs_f64() < 1e-50);
    }

    #[test]
    fn dpv_matches_oracle_images() {
        let ctx = PrecisionContext::default();
        let p = ctx.prec();
        let t = XComplex::from_real(Float::with_val(p, 0.6)) * XComplex::cis(&Float::with_val(p, 0.7));
        let wp = WeightParams::new(d(p, "0.3,0.1"), d(p, "0.2"), d(p, "0.15"), XComplex::zero(p), t, &ctx).unwrap();
        let spec = MomentSpec::General(wp.clone());
        let ora = run_oracle(&spec, 9, &ctx).unwrap();
        let (prop, states) = dpv_reflections(&wp, &ora.r[1], &ora.rbar[1], 8, &ctx).unwrap();
        for n in 1..=8 {
            let img = to_fg(&ora, n, &ctx).unwrap();
            assert!(img.f.rel_diff(&states[n].f) < 1e-35, "f at {n}");
            assert!(img.g.rel_diff(&states[n].g) < 1e-35, "g at {n}");
            assert!(img.fbar.rel_diff(&states[n].fbar) < 1e-35, "fbar at {n}");
            assert!(img.gbar.rel_diff(&states[n].gbar) < 1e-35, "gbar at {n}");
            assert!(prop.r[n].rel_diff(&ora.r[n]) < 1e-35);
        }
        for n in 1..8 {
            let rep = dpv_closure(&to_fg(&ora, n - 1, &ctx).unwrap(), &to_fg(&ora, n, &ctx).unwrap(), &to_fg(&ora, n + 1, &ctx).unwrap());
            assert!(rep.max() < 1e-40, "{n}: {:?}", rep.worst());
        }
    }

    #[test]
    fn both_schemes_reproduce_determinants() {
        let ctx = PrecisionContext::default();
        let p = ctx.prec();
        let wp =
            WeightParams::on_circle(d(p, "0.3"), d(p, "0.2"), d(p, "0.15"), XComplex::zero(p), &Float::with_val(p, 1.1), &ctx).unwrap();
        let w0 = moment_general(0, &wp, &ctx).unwrap();
        let dw0 = moment_general_dphi(0, &wp, &ctx).unwrap();
        let table = MomentTable::for_size(&MomentSpec::General(wp.clone()), 8, &ctx).unwrap();
        let ora = oracle_sequence(8, &table, &ctx).unwrap();
        let one = XComplex::one(p);
        let a = l01_scheme(&one, &w0, &dw0, &wp, 8, &ctx).unwrap();
        let b = l14_scheme(&one, &w0, &dw0, &wp, 8, &ctx).unwrap();
        for n in 0..=8 {
            assert!(a.tau[n].rel_diff(&ora.tau[n]) < 1e-30, "L01 {n}: {}", a.tau[n].rel_diff(&ora.tau[n]));
            assert!(b.tau[n].rel_diff(&ora.tau[n]) < 1e-30, "L14 {n}: {}", b.tau[n].rel_diff(&ora.tau[n]));
        }
        let run = run_oracle(&MomentSpec::General(wp), 9, &ctx).unwrap();
        for st in a.states.iter().skip(1).take(6) {
            let rep = map_qp_reflections(st, &run, &ctx);
            assert!(rep.max() < 1e-35, "{:?}", rep.worst());
            let x3 = x3_definition_residuals(st, &ctx).unwrap();
            assert!(x3.max() < 1e-40, "{:?}", x3.worst());
        }
    }
}

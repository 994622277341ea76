//! Discrete Painleve recurrences for the reflection coefficients.
//!
//! `r_N` and `rbar_N` are the constant terms of the monic orthogonal polynomials
//! on the circle; `l` and `lbar` are their subleading ratios, which satisfy
//! l_N = l_{N-1} + r_N rbar_{N-1}.

use crate::ctx::PrecisionContext;
use crate::error::{Error, Result};
use crate::hyp2f1::gauss_2f1;
use crate::report::ResidualReport;
use crate::toeplitz::reflection_from_dets;
use crate::weight::{MomentSpec, MomentTable, WeightParams};
use crate::xc::XComplex;
use serde::Serialize;

/// Which recurrence advances the state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    /// coupled pair, second order in each
    TwoTwo,
    /// second order in r, first order in rbar, with its conjugate partner
    TwoOne,
}

/// Parameters at working precision, pre-combined.
#[derive(Clone, Debug)]
struct Coef {
    mu: XComplex,
    om: XComplex,
    ob: XComplex,
    w1: XComplex,
    w2: XComplex,
    t: XComplex,
}

impl Coef {
    fn new(p: &WeightParams, prec: u32) -> Self {
        Self {
            mu: p.mu.with_prec(prec),
            om: p.omega().with_prec(prec),
            ob: p.omega_bar().with_prec(prec),
            w1: p.omega1.with_prec(prec),
            w2: p.omega2.with_prec(prec),
            t: p.t.with_prec(prec),
        }
    }

    /// k + mu + omega
    fn a(&self, k: i64) -> XComplex {
        &self.mu + &self.om + k
    }

    /// k + mu + omegabar
    fn b(&self, k: i64) -> XComplex {
        &self.mu + &self.ob + k
    }

    /// The coefficients seen by the conjugate partner equation.
    fn partner(&self) -> Self {
        Self { mu: self.mu.clone(), om: self.ob.clone(), ob: self.om.clone(), w1: self.w1.clone(), w2: -&self.w2, t: self.t.recip() }
    }
}

/// A window of the last three reflection coefficients plus the subleading ratios.
#[derive(Clone, Debug)]
pub struct ReflectionState {
    pub n: usize,
    /// r_N, r_{N-1}, r_{N-2}
    pub r: [XComplex; 3],
    pub rbar: [XComplex; 3],
    pub l_ratio: XComplex,
    pub lbar_ratio: XComplex,
    pub params: WeightParams,
}

fn nonzero(x: &XComplex, what: &str, n: usize, ctx: &PrecisionContext) -> Result<()> {
    if x.is_zero() || x.abs_f64() < ctx.tolerance {
        return Err(Error::ZeroPivot(format!("{what} vanishes at N = {n}")));
    }
    Ok(())
}

/// State at N = 1 from the moments w_{-1}, w_0, w_1.
pub fn init_state(params: &WeightParams, w_m1: &XComplex, w0: &XComplex, w1: &XComplex, ctx: &PrecisionContext) -> Result<ReflectionState> {
    let prec = ctx.prec();
    nonzero(w0, "w_0", 0, ctx)?;
    let r1 = -(w_m1 / w0);
    let rb1 = -(w1 / w0);
    let one = XComplex::one(prec);
    let z = XComplex::zero(prec);
    Ok(ReflectionState {
        n: 1,
        l_ratio: r1.clone(),
        lbar_ratio: rb1.clone(),
        r: [r1, one.clone(), z.clone()],
        rbar: [rb1, one, z],
        params: params.clone(),
    })
}

impl ReflectionState {
    fn is_trivial(&self) -> bool {
        self.r[0].is_zero() && self.rbar[0].is_zero() && (self.n == 1 || (self.r[1].is_zero() && self.rbar[1].is_zero()))
    }

    fn advance(&self, rn: XComplex, bn: XComplex) -> Self {
        let l = &self.l_ratio + &(&rn * &self.rbar[0]);
        let lb = &self.lbar_ratio + &(&bn * &self.r[0]);
        Self {
            n: self.n + 1,
            r: [rn, self.r[0].clone(), self.r[1].clone()],
            rbar: [bn, self.rbar[0].clone(), self.rbar[1].clone()],
            l_ratio: l,
            lbar_ratio: lb,
            params: self.params.clone(),
        }
    }
}

/// Advances N -> N+1 with the coupled second-order pair.
pub fn step_2_2(s: &ReflectionState, ctx: &PrecisionContext) -> Result<ReflectionState> {
    let prec = ctx.prec();
    if s.is_trivial() {
        return Ok(s.advance(XComplex::zero(prec), XComplex::zero(prec)));
    }
    let c = Coef::new(&s.params, prec);
    let n = s.n as i64;
    let t = &c.t;
    let [rn, rn1, rn2] = &s.r;
    let [bn, bn1, bn2] = &s.rbar;
    let lhs = t * rn * bn1 + rn1 * bn - t - 1i64;
    let va = 1i64 - rn * bn;
    let vb = 1i64 - rn1 * bn1;
    nonzero(&va, "1 - r rbar", s.n, ctx)?;
    nonzero(bn1, "rbar_{N-1}", s.n, ctx)?;
    nonzero(rn1, "r_{N-1}", s.n, ctx)?;
    let den_r = &c.b(n + 1) * t;
    let den_b = c.a(n + 1);
    nonzero(&den_r, "(N+1+mu+omegabar) t", s.n, ctx)?;
    nonzero(&den_b, "N+1+mu+omega", s.n, ctx)?;
    let sa = &lhs + &(&vb / bn1 * (&c.a(n) * bn + &c.b(n - 2) * t * bn2));
    let r_next = (&sa * rn / &va - &c.a(n - 1) * rn1) / &den_r;
    let sb = &lhs + &(&vb / rn1 * (&c.b(n) * t * rn + &c.a(n - 2) * rn2));
    let b_next = (&sb * bn / &va - &c.b(n - 1) * t * bn1) / &den_b;
    Ok(s.advance(r_next, b_next))
}

/// Terms of the 2/1 relation in r, with r_{N+1} multiplying `lead`.
fn terms_21(c: &Coef, n: i64, r: [&XComplex; 3], rb: [&XComplex; 2]) -> (XComplex, Vec<XComplex>) {
    let t = &c.t;
    let (rn, rn1) = (r[1], r[2]);
    let (bn, bn1) = (rb[0], rb[1]);
    let d = &c.ob - &c.om;
    let lead = &c.b(n + 1) * &d * t * (1i64 - rn * bn);
    let two_mw = (&c.mu + &c.w1) * 2i64;
    let rest = vec![
        &c.a(n - 1) * (&c.a(n) * 2i64 * rn * bn + &d) * rn1,
        -(&c.b(n - 1) * (&two_mw + 2 * n) * t * rn.square() * bn1),
        (&d * n * (t + 1i64) - &two_mw * (&c.mu * (1i64 - t) + &c.om * t - &c.ob)) * rn,
    ];
    (lead, rest)
}

/// Advances N -> N+1 with the 2/1 relation and its conjugate partner.
pub fn step_2_1(s: &ReflectionState, ctx: &PrecisionContext) -> Result<ReflectionState> {
    let prec = ctx.prec();
    if s.is_trivial() {
        return Ok(s.advance(XComplex::zero(prec), XComplex::zero(prec)));
    }
    let c = Coef::new(&s.params, prec);
    let gap = (&c.ob - &c.om).abs_f64();
    if gap < ctx.tolerance {
        return Err(Error::DegenerateForm("omegabar = omega leaves the 2/1 relation without its leading term".into()));
    }
    let n = s.n as i64;
    let solve = |c: &Coef, r: &[XComplex; 3], rb: &[XComplex; 3]| -> Result<XComplex> {
        let zero = XComplex::zero(prec);
        let (lead, rest) = terms_21(c, n, [&zero, &r[0], &r[1]], [&rb[0], &rb[1]]);
        nonzero(&lead, "2/1 leading coefficient", s.n, ctx)?;
        let mut sum = XComplex::zero(prec);
        for x in &rest {
            sum += x;
        }
        Ok(-(sum / lead))
    };
    let r_next = solve(&c, &s.r, &s.rbar)?;
    let b_next = solve(&c.partner(), &s.rbar, &s.r)?;
    Ok(s.advance(r_next, b_next))
}

/// l_N from r_{N+1}, r_N, r_{N-1}, rbar_N, rbar_{N-1}; lbar_N from the linear l-lbar relation.
pub fn compute_subleading(s: &ReflectionState, r_next: &XComplex, ctx: &PrecisionContext) -> Result<(XComplex, XComplex)> {
    let c = Coef::new(&s.params, ctx.prec());
    let n = s.n as i64;
    let t = &c.t;
    let [rn, rn1, _] = &s.r;
    let [bn, bn1, _] = &s.rbar;
    nonzero(rn, "r_N", s.n, ctx)?;
    let two_l = &c.b(n + 1) * t * (r_next / rn - r_next * bn) + &c.a(n - 1) * rn1 / rn - &c.b(n - 1) * t * rn * bn1
        + (&c.mu - &c.om + n) * t
        + (&c.ob - &c.mu + n);
    let l = two_l / (t * 2i64);
    let lb = lbar_from_l(&c, n, &l, ctx)?;
    Ok((l, lb))
}

fn lbar_from_l(c: &Coef, n: i64, l: &XComplex, ctx: &PrecisionContext) -> Result<XComplex> {
    let t = &c.t;
    let den = c.a(n);
    nonzero(&den, "N+mu+omega", n as usize, ctx)?;
    let inh = (&c.mu * (t - 1i64) + &c.ob - &c.om * t) * n;
    Ok((&c.b(n) * t * l - inh) / den)
}

/// Full sequences r_0..r_M with cumulative subleading ratios.
#[derive(Clone, Debug)]
pub struct ReflectionRun {
    pub params: WeightParams,
    pub r: Vec<XComplex>,
    pub rbar: Vec<XComplex>,
    pub l: Vec<XComplex>,
    pub lbar: Vec<XComplex>,
}

impl ReflectionRun {
    pub fn from_sequences(params: WeightParams, r: Vec<XComplex>, rbar: Vec<XComplex>) -> Self {
        let prec = r[0].prec();
        let mut l = vec![XComplex::zero(prec)];
        let mut lbar = vec![XComplex::zero(prec)];
        for n in 1..r.len() {
            l.push(&l[n - 1] + &(&r[n] * &rbar[n - 1]));
            lbar.push(&lbar[n - 1] + &(&rbar[n] * &r[n - 1]));
        }
        Self { params, r, rbar, l, lbar }
    }

    pub fn n_max(&self) -> usize {
        self.r.len() - 1
    }

    /// Rescales by r_N -> c^N r_N, rbar_N -> c^{-N} rbar_N.
    pub fn gauged(&self, c: &XComplex) -> Self {
        let ci = c.recip();
        let r = self.r.iter().enumerate().map(|(n, x)| x * &c.powi(n as i64)).collect();
        let rb = self.rbar.iter().enumerate().map(|(n, x)| x * &ci.powi(n as i64)).collect();
        Self::from_sequences(self.params.clone(), r, rb)
    }
}

/// I_N and the ratios I_{N+1} I_{N-1} / I_N^2 = 1 - r_N rbar_N.
#[derive(Clone, Debug)]
pub struct TauSequence {
    pub values: Vec<XComplex>,
    pub ratios: Vec<XComplex>,
}

/// Rebuilds I_0..I_M from I_0 = 1, I_1 = w_0 and the reflection coefficients.
pub fn tau_sequence(r: &[XComplex], rbar: &[XComplex], w0: &XComplex, n_max: usize) -> Result<TauSequence> {
    let prec = w0.prec();
    let mut values = vec![XComplex::one(prec), w0.clone()];
    let mut ratios = vec![XComplex::one(prec)];
    for n in 1..n_max {
        let q = 1i64 - &r[n] * &rbar[n];
        if values[n - 1].is_zero() {
            return Err(Error::ZeroPivot(format!("I_{} vanishes", n - 1)));
        }
        let next = &values[n].square() * &q / &values[n - 1];
        ratios.push(q);
        values.push(next);
    }
    values.truncate(n_max + 1);
    Ok(TauSequence { values, ratios })
}

fn fallback_step(spec: &MomentSpec, n: usize, ctx: &PrecisionContext) -> Result<(XComplex, XComplex)> {
    let table = MomentTable::for_size(spec, n, ctx)?;
    reflection_from_dets(n, &table, ctx)
}

/// Runs a recurrence to N = n_max; zero pivots are bridged by direct determinants.
pub fn run_recurrence(spec: &MomentSpec, n_max: usize, kind: StepKind, ctx: &PrecisionContext) -> Result<ReflectionRun> {
    let params = spec.params(ctx)?;
    let prec = ctx.prec();
    let one = XComplex::one(prec);
    if n_max == 0 {
        return Ok(ReflectionRun::from_sequences(params, vec![one.clone()], vec![one]));
    }
    let seed = MomentTable::build(spec, -1, 1, ctx)?;
    let mut s = init_state(&params, seed.get(-1)?, seed.get(0)?, seed.get(1)?, ctx)?;
    let mut r = vec![one.clone(), s.r[0].clone()];
    let mut rb = vec![one, s.rbar[0].clone()];
    while s.n < n_max {
        let next = match kind {
            StepKind::TwoTwo => step_2_2(&s, ctx),
            StepKind::TwoOne => step_2_1(&s, ctx),
        };
        s = match next {
            Ok(v) => v,
            Err(Error::ZeroPivot(_)) => {
                let (a, b) = fallback_step(spec, s.n + 1, ctx)?;
                s.advance(a, b)
            }
            Err(e) => return Err(e),
        };
        r.push(s.r[0].clone());
        rb.push(s.rbar[0].clone());
    }
    Ok(ReflectionRun::from_sequences(params, r, rb))
}

/// Largest relative deviation of two runs over N = 1..=n_max, measured on r and rbar.
pub fn max_relative_gap(a: &ReflectionRun, b: &ReflectionRun) -> f64 {
    let m = a.n_max().min(b.n_max());
    let mut worst = 0f64;
    for n in 1..=m {
        for (x, y) in [(&a.r[n], &b.r[n]), (&a.rbar[n], &b.rbar[n])] {
            let scale = x.abs_f64().max(y.abs_f64());
            let d = if scale == 0.0 { 0.0 } else { x.abs_diff(y) / scale };
            worst = worst.max(if d.is_nan() { f64::INFINITY } else { d });
        }
    }
    worst
}

/// Reflection coefficients by determinants for N = 0..=n_max.
pub fn run_oracle(spec: &MomentSpec, n_max: usize, ctx: &PrecisionContext) -> Result<ReflectionRun> {
    let params = spec.params(ctx)?;
    let table = MomentTable::for_size(spec, n_max.max(1), ctx)?;
    let seq = crate::toeplitz::oracle_sequence(n_max, &table, ctx)?;
    Ok(ReflectionRun::from_sequences(params, seq.r, seq.rbar))
}

/// Recurrence checked against determinants, retried once at twice the digits.
pub fn run_checked(spec: &MomentSpec, n_max: usize, kind: StepKind, ctx: &PrecisionContext) -> Result<(ReflectionRun, f64, u32)> {
    let target = ctx.half_tolerance();
    let mut digits = ctx.decimal_digits;
    let mut last = f64::INFINITY;
    for _ in 0..2 {
        let c = ctx.rescaled(digits);
        let spec_c = spec.with_prec(c.prec());
        let rec = run_recurrence(&spec_c, n_max, kind, &c)?;
        let ora = run_oracle(&spec_c, n_max, &c)?;
        last = max_relative_gap(&rec, &ora);
        if last <= target {
            return Ok((rec, last, digits));
        }
        digits *= 2;
    }
    Err(Error::Disagreement(format!("recurrence and determinants differ by {last:.3e} after escalation")))
}

fn get<'a>(v: &'a [XComplex], k: i64, zero: &'a XComplex) -> &'a XComplex {
    if k < 0 {
        zero
    } else {
        &v[k as usize]
    }
}

/// Normalized residuals of the recurrence identities at N (needs r_{N+1}).
pub fn residuals(run: &ReflectionRun, n_idx: usize) -> ResidualReport {
    let prec = run.r[0].prec();
    let c = Coef::new(&run.params, prec);
    let z = XComplex::zero(prec);
    let n = n_idx as i64;
    let t = &c.t;
    let r = |k: i64| get(&run.r, k, &z);
    let rb = |k: i64| get(&run.rbar, k, &z);
    let l = &run.l[n_idx];
    let lb = &run.lbar[n_idx];
    let v = 1i64 - r(n) * rb(n);
    let mut rep = ResidualReport::new();

    rep.push_terms(
        "2ndRR",
        n_idx,
        &[
            &c.b(n + 1) * t * r(n + 1) * rb(n),
            -(&c.b(n - 1) * t * r(n) * rb(n - 1)),
            -(&c.a(n + 1) * rb(n + 1) * r(n)),
            &c.a(n - 1) * rb(n) * r(n - 1),
        ],
    );
    rep.push_terms("lRecur", n_idx, &[&c.b(n) * t * l, -(&c.a(n) * lb), -((&c.mu * (t - 1i64) + &c.ob - &c.om * t) * n)]);
    let mag = [lb.clone(), t * l, -((t + 1i64) * n)];
    let mut ma = mag.to_vec();
    ma.push(-(&v / r(n) * (&c.b(n + 1) * t * r(n + 1) + &c.a(n - 1) * r(n - 1))));
    rep.push_terms("magnus_a", n_idx, &ma);
    let mut mb = mag.to_vec();
    mb.push(-(&v / rb(n) * (&c.a(n + 1) * rb(n + 1) + &c.b(n - 1) * t * rb(n - 1))));
    rep.push_terms("magnus_b", n_idx, &mb);

    rep.push_terms(
        "lSoln_a",
        n_idx,
        &[
            t * l * 2i64,
            -(&c.b(n + 1) * t * (r(n + 1) / r(n) - r(n + 1) * rb(n))),
            -(&c.a(n - 1) * r(n - 1) / r(n)),
            &c.b(n - 1) * t * r(n) * rb(n - 1),
            -((&c.mu - &c.om + n) * t),
            -(&c.ob - &c.mu + n),
        ],
    );
    rep.push_terms(
        "lSoln_b",
        n_idx,
        &[
            t * l * 2i64,
            -(&c.a(n + 1) * rb(n + 1) / rb(n)),
            -(&c.b(n - 1) * t * (rb(n - 1) / rb(n) - r(n) * rb(n - 1))),
            &c.b(n + 1) * t * r(n + 1) * rb(n),
            -((&c.mu - &c.om + n) * t),
            -(&c.ob - &c.mu + n),
        ],
    );

    // 2+0: second order in r alone
    let x = &v * (&c.b(n + 1) * &c.b(n) * t * r(n + 1) - &c.a(n) * &c.a(n - 1) * r(n - 1));
    let w1 = &c.w1;
    let tm1 = t - 1i64;
    let f1 = &x + &((w1 * 2i64 + n) * n * &tm1 * r(n));
    let f2 = &x + &((&c.mu * 2i64 + n) * (&c.mu * 2i64 + w1 * 2i64 + n) * &tm1 * r(n));
    let g = (&c.mu + w1) * 2i64 + 2 * n;
    rep.push_terms(
        "2+0",
        n_idx,
        &[&f1 * &f2, g.square() * t * &v * (&c.b(n + 1) * r(n + 1) + &c.a(n) * r(n)) * (&c.b(n) * r(n) + &c.a(n - 1) * r(n - 1))],
    );

    let an = c.a(n);
    let rr = r(n) * rb(n);
    let y = -(&an * &v * t * (&c.b(n + 1) * r(n + 1) * rb(n) + &c.b(n - 1) * r(n) * rb(n - 1))) + an.square() * rr.square() * 2i64
        - an.square() * (t + 1i64) * &rr;
    let h1 = &y - &(&an * &c.ob * &tm1 * &rr * 2i64) + (&c.mu - &c.ob) * (&c.mu + &c.ob) * &tm1;
    let h2 = &y + &(&an * &c.om * &tm1 * &rr * 2i64) + (&c.mu - &c.om) * (&c.mu + &c.om) * &tm1;
    let k = &an * &rr * 2i64 + &c.ob - &c.om;
    rep.push_terms(
        "1+1a",
        n_idx,
        &[&h1 * &h2, k.square() * &v * (&c.b(n + 1) * t * r(n + 1) + &an * r(n)) * (&an * rb(n) + &c.b(n - 1) * t * rb(n - 1))],
    );
    let zz = &c.b(n + 1) * &c.b(n) * t * r(n + 1) * rb(n) - &c.a(n + 1) * &an * rb(n + 1) * r(n);
    let d = &c.ob - &c.om;
    rep.push_terms(
        "1+1b",
        n_idx,
        &[
            (&zz + &((&c.ob - &c.mu) * (&c.ob + &c.mu) * &tm1)) * (&zz + &((&c.om - &c.mu) * (&c.om + &c.mu) * &tm1)),
            -(d.square() * (&c.b(n + 1) * t * r(n + 1) + &an * r(n)) * (&c.a(n + 1) * rb(n + 1) + &c.b(n) * t * rb(n))),
        ],
    );

    if d.abs_f64() > 1e-30 {
        let (lead, mut rest) = terms_21(&c, n, [r(n + 1), r(n), r(n - 1)], [rb(n), rb(n - 1)]);
        rest.push(lead * r(n + 1));
        rep.push_terms("2+1", n_idx, &rest);
        let p = c.partner();
        let (lead, mut rest) = terms_21(&p, n, [rb(n + 1), rb(n), rb(n - 1)], [r(n), r(n - 1)]);
        rest.push(lead * rb(n + 1));
        rep.push_terms("2+1bar", n_idx, &rest);
    }
    let _ = &c.w2;
    rep
}

/// The six quadratic (bilinear) identities at N; needs lbar_{N+1}.
pub fn verify_bilinear(run: &ReflectionRun, n_idx: usize) -> ResidualReport {
    let prec = run.r[0].prec();
    let c = Coef::new(&run.params, prec);
    let z = XComplex::zero(prec);
    let n = n_idx as i64;
    let t = &c.t;
    let ti = t.recip();
    let r = |k: i64| get(&run.r, k, &z);
    let rb = |k: i64| get(&run.rbar, k, &z);
    let l = &run.l[n_idx];
    let lb1 = &run.lbar[n_idx + 1];
    let k = 1i64 - r(n) * rb(n);
    let w1 = &c.w1;
    let mu = &c.mu;
    let s1 = (t - 1i64) * &ti;
    let rho = r(n + 1) / r(n);
    let rho_m = r(n - 1) / r(n);
    let mut rep = ResidualReport::new();

    let a0 = l - &(&ti * n) - &c.b(n + 1) * &k * &rho + w1 * (1i64 - &ti);
    rep.push_terms(
        "bil_a",
        n_idx,
        &[a0.square(), &k * (c.b(n) + &c.a(n - 1) * &ti * &rho_m) * (&c.a(n) * &ti + &c.b(n + 1) * &rho), -(w1.square() * s1.square())],
    );
    let b0 = l - &XComplex::int(prec, n) - &c.b(n + 1) * &k * &rho + mu * (&ti - 1i64);
    rep.push_terms(
        "bil_b",
        n_idx,
        &[b0.square(), &k * &ti * (c.b(n) + &c.a(n - 1) * &rho_m) * (c.a(n) + &c.b(n + 1) * &rho), -(mu.square() * s1.square())],
    );
    let c0 = l - &(&ti * n) + &c.a(n) * &ti * &k + w1 * (1i64 - &ti);
    rep.push_terms(
        "bil_c",
        n_idx,
        &[
            c0.square(),
            &k * (&c.b(n + 1) * r(n + 1) + &c.a(n) * &ti * r(n)) * (&c.b(n - 1) * rb(n - 1) + &c.a(n) * &ti * rb(n)),
            -(w1.square() * s1.square()),
        ],
    );
    let d0 = l - &XComplex::int(prec, n) + &c.a(n) * &k + mu * (&ti - 1i64);
    rep.push_terms(
        "bil_d",
        n_idx,
        &[
            d0.square(),
            &k * (&c.b(n + 1) * r(n + 1) + &c.a(n) * r(n)) * (&c.b(n - 1) * rb(n - 1) + &c.a(n) * rb(n)),
            -(mu.square() * s1.square()),
        ],
    );
    let base = lb1 + &(&c.a(n) * rb(n + 1) * r(n));
    let e0 = &base + w1 + (mu - &c.w2.mul_i()) * t;
    let tm1 = t - 1i64;
    rep.push_terms(
        "bil_e",
        n_idx,
        &[
            e0.square(),
            -((&c.b(n + 1) * t * r(n + 1) + &c.a(n) * r(n)) * (&c.a(n + 1) * rb(n + 1) + &c.b(n) * t * rb(n))),
            -(w1.square() * tm1.square()),
        ],
    );
    let f0 = &base + &c.ob + mu * t;
    rep.push_terms(
        "bil_f",
        n_idx,
        &[
            f0.square(),
            -(t * (&c.b(n + 1) * r(n + 1) + &c.a(n) * r(n)) * (&c.a(n + 1) * rb(n + 1) + &c.b(n) * rb(n))),
            -(mu.square() * tm1.square()),
        ],
    );
    rep
}

/// Adler-van Moerbeke form of the recurrence at N, the N = 1 seed, and the contiguous identity behind it.
pub fn check_avm(run: &ReflectionRun, n_idx: usize, ctx: &PrecisionContext) -> Result<ResidualReport> {
    let prec = run.r[0].prec();
    let c = Coef::new(&run.params, prec);
    let t = &c.t;
    let st = t.sqrt();
    let z = XComplex::zero(prec);
    let n = n_idx as i64;
    let sign = |k: i64| if k % 2 == 0 { 1i64 } else { -1 };
    let x = |k: i64| {
        if k < 0 {
            z.clone()
        } else {
            &run.r[k as usize] * &st.powi(k) * sign(k)
        }
    };
    let y = |k: i64| {
        if k < 0 {
            z.clone()
        } else {
            &run.rbar[k as usize] * &st.powi(-k) * sign(k)
        }
    };
    let mut rep = ResidualReport::new();
    rep.push_terms(
        "avm_homogeneous",
        n_idx,
        &[-(&c.b(n + 1) * x(n + 1) * y(n)), &c.a(n + 1) * x(n) * y(n + 1), &c.b(n - 1) * x(n) * y(n - 1), -(&c.a(n - 1) * x(n - 1) * y(n))],
    );
    let (r1, rb1, r2) = (&run.r[1], &run.rbar[1], &run.r[2]);
    rep.push_terms("avm_seed", 1, &[XComplex::one(prec), -((1i64 - r1 * rb1) * (&c.b(2) * t * r2 + c.a(1))), r1 * (t * r1 - t - 1i64)]);
    // c F(a,b;c;x) = [c + (1+b-a) x] F(a,b+1;c+1;x) - (b+1)/(c+1) (1+c-a) x F(a,b+2;c+2;x)
    let ctx_c = ctx.rescaled(ctx.decimal_digits);
    let a = -(&c.mu * 2i64);
    let b = -(&c.mu + &c.om);
    let cc = 1i64 - &c.mu + &c.ob;
    let f0 = gauss_2f1(&a, &b, &cc, t, &ctx_c)?;
    let f1 = gauss_2f1(&a, &(&b + 1i64), &(&cc + 1i64), t, &ctx_c)?;
    let f2 = gauss_2f1(&a, &(&b + 2i64), &(&cc + 2i64), t, &ctx_c)?;
    rep.push_terms(
        "contiguous_2f1",
        1,
        &[-(&cc * &f0), (&cc + &((&b - &a + 1i64) * t)) * f1, -((&b + 1i64) / (&cc + 1i64) * (&cc - &a + 1i64) * t * f2)],
    );
    Ok(rep)
}

/// All recurrence identities over N = 1..n_max-1 of a run.
pub fn residual_sweep(run: &ReflectionRun) -> ResidualReport {
    let mut rep = ResidualReport::new();
    for n in 1..run.n_max() {
        rep.extend(residuals(run, n));
        rep.extend(verify_bilinear(run, n));
    }
    rep
}

/// Worst normalized residual of the step equations, for scheme traces.
pub fn step_residual(run: &ReflectionRun, n_idx: usize) -> f64 {
    let rep = residuals(run, n_idx);
    rep.max_for("2ndRR").max(rep.max_for("magnus_a")).max(rep.max_for("magnus_b"))
}

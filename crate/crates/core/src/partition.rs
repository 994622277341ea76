//! Hypergeometric functions of matrix argument at equal arguments t, ..., t.
//!
//! The partition series is summed in two ways. `hyp_2f1_shells` walks weight
//! shells of partitions directly. `hyp_2f1_partition` regroups the same series
//! by the shifted lengths l_i = kappa_i + N - i, which turns the sum over
//! partitions into an N x N determinant of one-variable series.

use crate::ctx::PrecisionContext;
use crate::error::{Error, Result};
use crate::hyp2f1::gauss_2f1;
use crate::special::{factorial, gamma, pochhammer};
use crate::toeplitz::det_full_pivot;
use crate::weight::WeightParams;
use crate::xc::XComplex;
use rug::ops::Pow;
use rug::{Float, Integer};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Sorts nothing: rejects sequences that increase, drops trailing zeros.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Precondition(format!("parts must weakly decrease: {parts:?}")));
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Self { parts })
    }

    pub fn empty() -> Self {
        Self { parts: vec![] }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn weight(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn conjugate(&self) -> Self {
        let first = self.parts.first().copied().unwrap_or(0);
        let parts = (0..first).map(|j| self.parts.iter().filter(|&&p| p > j).count()).collect();
        Self { parts }
    }

    /// Cells (i, j), zero based.
    fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parts.iter().enumerate().flat_map(|(i, &p)| (0..p).map(move |j| (i, j)))
    }
}

/// Partitions of each weight 0..=weight with at most `max_length` parts, larger first part first.
pub fn partitions_up_to(weight: usize, max_length: usize) -> Vec<Partition> {
    fn rec(rest: usize, cap: usize, len_left: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition { parts: cur.clone() });
            return;
        }
        if len_left == 0 {
            return;
        }
        for first in (1..=cap.min(rest)).rev() {
            cur.push(first);
            rec(rest - first, first, len_left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for w in 0..=weight {
        rec(w, w, max_length, &mut Vec::new(), &mut out);
    }
    out
}

pub fn hook_product(kappa: &Partition) -> Integer {
    let conj = kappa.conjugate();
    let mut h = Integer::from(1);
    for (i, j) in kappa.cells() {
        let arm = kappa.parts[i] - j - 1;
        let leg = conj.parts[j] - i - 1;
        h *= (arm + leg + 1) as u64;
    }
    h
}

/// [a]_kappa = prod_j (a - j + 1)_{kappa_j}.
pub fn gen_pochhammer(a: &XComplex, kappa: &Partition, ctx: &PrecisionContext) -> XComplex {
    let mut r = XComplex::one(ctx.prec());
    for (j, &k) in kappa.parts.iter().enumerate() {
        r *= &pochhammer(&(a - j as i64), k as u64, ctx);
    }
    r
}

/// s_kappa(t, ..., t) in N variables by the hook-content formula.
pub fn schur_equal_args(kappa: &Partition, t: &XComplex, n: usize, ctx: &PrecisionContext) -> XComplex {
    let prec = ctx.prec();
    if kappa.len() > n {
        return XComplex::zero(prec);
    }
    let mut content = Integer::from(1);
    for (i, j) in kappa.cells() {
        content *= (n + j - i) as u64;
    }
    let ratio = Float::with_val(prec, &content) / Float::with_val(prec, &hook_product(kappa));
    t.powi(kappa.weight() as i64).scale(&ratio)
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesDiagnostics {
    pub max_weight_used: usize,
    pub tail_estimate: f64,
    pub converged: bool,
}

fn term(a: &XComplex, b: &XComplex, c: &XComplex, t: &XComplex, n: usize, k: &Partition, ctx: &PrecisionContext) -> Result<XComplex> {
    let pc = gen_pochhammer(c, k, ctx);
    let num = &gen_pochhammer(a, k, ctx) * &gen_pochhammer(b, k, ctx);
    if num.is_zero() {
        return Ok(num);
    }
    if pc.abs_f64() < ctx.tolerance {
        return Err(Error::Pole(format!("[c]_kappa vanishes at kappa = {:?}", k.parts)));
    }
    let h = Float::with_val(ctx.prec(), &hook_product(k));
    Ok(&num / &pc * &schur_equal_args(k, t, n, ctx) / &XComplex::from_real(h))
}

/// Geometric tail from the last three shell magnitudes.
fn shell_tail(shells: &[f64]) -> f64 {
    let m = shells.len();
    if m < 3 {
        return f64::INFINITY;
    }
    let (s0, s1, s2) = (shells[m - 3], shells[m - 2], shells[m - 1]);
    if s2 == 0.0 && s1 == 0.0 {
        return 0.0;
    }
    let rho = if s0 > 0.0 && s1 > 0.0 { (s2 / s1).max(s1 / s0) } else { 1.0 };
    if rho >= 1.0 {
        return f64::INFINITY;
    }
    s2 * rho / (1.0 - rho)
}

/// Direct summation by weight shells, stopping once the three-shell tail estimate is negligible.
pub fn hyp_2f1_shells(
    a: &XComplex,
    b: &XComplex,
    c: &XComplex,
    t: &XComplex,
    n: usize,
    max_weight: usize,
    ctx: &PrecisionContext,
) -> Result<(XComplex, SeriesDiagnostics)> {
    let prec = ctx.prec();
    let mut sum = XComplex::zero(prec);
    let mut mags = Vec::new();
    let mut all = partitions_up_to(max_weight, n).into_iter().peekable();
    let target = ctx.series_eps();
    for w in 0..=max_weight {
        let mut shell = XComplex::zero(prec);
        while let Some(k) = all.peek() {
            if k.weight() != w {
                break;
            }
            shell += &term(a, b, c, t, n, k, ctx)?;
            all.next();
        }
        sum += &shell;
        mags.push(shell.abs_f64());
        let tail = shell_tail(&mags);
        let scale = sum.abs_f64().max(1e-300);
        if w >= 3 && tail <= target * scale {
            return Ok((sum, SeriesDiagnostics { max_weight_used: w, tail_estimate: tail / scale, converged: true }));
        }
    }
    let tail = shell_tail(&mags) / sum.abs_f64().max(1e-300);
    Err(Error::Convergence(format!("partition series not settled by weight {max_weight}, tail {tail:.2e}")))
}

/// sum_l p_j(l) p_k(l) phi(l) for falling factorials p_j, with phi given by successive ratios.
struct MomentSums {
    m: Vec<Vec<XComplex>>,
    used: usize,
    tail: f64,
    converged: bool,
}

fn moment_sums<F>(
    n: usize,
    start: u64,
    phi_start: XComplex,
    ratio: F,
    terminates_at: Option<u64>,
    ctx: &PrecisionContext,
) -> Result<MomentSums>
where
    F: Fn(u64) -> Result<XComplex>,
{
    let prec = phi_start.prec();
    let mut m = vec![vec![XComplex::zero(prec); n]; n];
    let mut phi = phi_start;
    let eps = ctx.series_eps();
    let cap = ctx.max_series_terms as u64;
    let mut l = start;
    let mut quiet = 0usize;
    let mut tail: f64;
    loop {
        if let Some(e) = terminates_at {
            if l > e {
                return Ok(MomentSums { m, used: l as usize, tail: 0.0, converged: true });
            }
        }
        // falling factorials l (l-1) ... (l-j+1)
        let mut p = Vec::with_capacity(n);
        let mut f = Float::with_val(prec, 1);
        for j in 0..n {
            p.push(f.clone());
            f *= l as i64 - j as i64;
        }
        let mut biggest = 0f64;
        for j in 0..n {
            let pj = phi.scale(&p[j]);
            for k in j..n {
                let v = pj.scale(&p[k]);
                biggest = biggest.max(v.abs_f64());
                m[j][k] += &v;
            }
        }
        let scale = m[n - 1][n - 1].abs_f64().max(m[0][0].abs_f64()).max(1e-300);
        tail = biggest / scale;
        if phi.is_zero() && terminates_at.is_none() && l > start {
            return Ok(MomentSums { m, used: l as usize, tail: 0.0, converged: true });
        }
        if biggest <= eps * scale && l > start + 2 * n as u64 {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        if l - start > cap {
            return Ok(MomentSums { m, used: l as usize, tail, converged: false });
        }
        phi = &phi * &ratio(l)?;
        l += 1;
    }
    Ok(MomentSums { m, used: l as usize, tail, converged: true })
}

fn symmetrize(m: &mut [Vec<XComplex>]) {
    let n = m.len();
    for j in 0..n {
        for k in 0..j {
            m[j][k] = m[k][j].clone();
        }
    }
}

fn terminating_index(a: &XComplex, tol: f64) -> Option<u64> {
    a.is_nonpositive_integer(tol).map(|m| (-m) as u64)
}

/// Upper parameters a with 1 <= a <= N - 1 make the determinant form 0/0; the series is
/// analytic in them, so the value is the symmetric Richardson limit of nearby points.
fn hyp_2f1_partition_limit(
    a: &XComplex,
    b: &XComplex,
    c: &XComplex,
    t: &XComplex,
    n: usize,
    vanishing: &[usize],
    ctx: &PrecisionContext,
) -> Result<(XComplex, SeriesDiagnostics)> {
    let d = ctx.decimal_digits;
    let step_digits = d / 4 + 2;
    let lost: usize = vanishing.iter().sum();
    let fine = ctx.rescaled(d + step_digits * lost as u32 + 10);
    let fp = fine.prec();
    let eps = Float::with_val(fp, 10).pow(-(step_digits as i32));
    let eval = |s: i64| -> Result<(XComplex, SeriesDiagnostics)> {
        let shift = XComplex::from_real(Float::with_val(fp, &eps * s));
        let a2 = if vanishing[0] > 0 { a.with_prec(fp) + &shift } else { a.with_prec(fp) };
        let b2 = if vanishing[1] > 0 { b.with_prec(fp) + &shift } else { b.with_prec(fp) };
        hyp_2f1_partition(&a2, &b2, &c.with_prec(fp), &t.with_prec(fp), n, &fine)
    };
    let (p1, d1) = eval(1)?;
    let (m1, _) = eval(-1)?;
    let (p2, _) = eval(2)?;
    let (m2, _) = eval(-2)?;
    let s1 = &p1 + &m1;
    let s2 = &p2 + &m2;
    // (4 S1 - S2) / 6 with S = f(s) + f(-s)
    let v = (&(&s1 * 4i64) - &s2) / 6i64;
    Ok((v.with_prec(ctx.prec()), d1))
}

/// 2F1 of N equal arguments t through the determinant of one-variable series.
pub fn hyp_2f1_partition(
    a: &XComplex,
    b: &XComplex,
    c: &XComplex,
    t: &XComplex,
    n: usize,
    ctx: &PrecisionContext,
) -> Result<(XComplex, SeriesDiagnostics)> {
    let prec = ctx.prec();
    if n == 0 || t.is_zero() {
        let d = SeriesDiagnostics { max_weight_used: 0, tail_estimate: 0.0, converged: true };
        return Ok((XComplex::one(prec), d));
    }
    let tol = ctx.tolerance;
    let shift = 1 - n as i64;
    let (ap, bp, cp) = (a + shift, b + shift, c + shift);
    let term_a = terminating_index(&ap, tol);
    let term_b = terminating_index(&bp, tol);
    let ends = match (term_a, term_b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    };
    if ends.is_none() && t.abs_f64() >= 1.0 {
        return Err(Error::Convergence("non-terminating series needs |t| < 1".into()));
    }
    if n == 1 {
        let v = gauss_2f1(a, b, c, t, ctx)?;
        return Ok((v, SeriesDiagnostics { max_weight_used: 0, tail_estimate: 0.0, converged: true }));
    }
    if let Some(m) = terminating_index(&cp, tol) {
        let reach = ends.map(|e| e.max(n as u64 - 1)).unwrap_or(u64::MAX);
        if m < reach {
            return Err(Error::DegenerateParameter(format!("c = {c} leaves a vanishing [c]_kappa in the series")));
        }
    }
    let vanishing: Vec<usize> = [term_a, term_b].iter().map(|e| e.map_or(0, |e| (n as u64 - 1).saturating_sub(e) as usize)).collect();
    if vanishing.iter().any(|&k| k > 0) {
        return hyp_2f1_partition_limit(a, b, c, t, n, &vanishing, ctx);
    }
    let wide = ctx.rescaled(ctx.decimal_digits * 2);
    let wp = wide.prec();
    let (ap, bp, cp, tw) = (ap.with_prec(wp), bp.with_prec(wp), cp.with_prec(wp), t.with_prec(wp));
    let ratio = |l: u64| -> Result<XComplex> {
        let num = (&ap + l as i64) * (&bp + l as i64) * &tw;
        let den = (&cp + l as i64) * (l as i64 + 1);
        if den.is_zero() {
            return Err(Error::Pole("c + l = 0 in the one-variable series".into()));
        }
        Ok(num / den)
    };
    let sums = moment_sums(n, 0, XComplex::one(wp), ratio, ends, &wide)?;
    let mut m = sums.m;
    symmetrize(&mut m);
    let det = det_full_pivot(m, wp).value;
    // normalization: prod_j j! prod_i (a')_{N-i} (b')_{N-i} / (c')_{N-i} t^{N-i}
    let mut norm = XComplex::one(wp);
    for j in 0..n {
        norm = norm.scale(&factorial(j as u64, wp));
        let e = (n - 1 - j) as u64;
        let pa = pochhammer(&ap, e, &wide);
        let pb = pochhammer(&bp, e, &wide);
        let pcc = pochhammer(&cp, e, &wide);
        norm = &norm * &pa * &pb / &pcc * &tw.powi(e as i64);
    }
    if norm.is_zero() || !norm.is_finite() {
        return Err(Error::DegenerateParameter("normalization of the determinant form vanishes".into()));
    }
    let v = (&det / &norm).with_prec(prec);
    let diag = SeriesDiagnostics { max_weight_used: sums.used, tail_estimate: sums.tail, converged: sums.converged };
    if !sums.converged {
        return Err(Error::Convergence(format!("one-variable series unsettled after {} terms", sums.used)));
    }
    Ok((v, diag))
}

/// lim eps F(-1/2, -1/2; N-1+eps; t, ..., t): only partitions of length N survive.
pub fn ising_limit_eval(n: usize, t: &XComplex, ctx: &PrecisionContext) -> Result<(XComplex, SeriesDiagnostics)> {
    let prec = ctx.prec();
    if n == 0 {
        return Err(Error::Precondition("N >= 1 required".into()));
    }
    if t.abs_f64() > 1.0 {
        return Err(Error::Precondition("|t| <= 1 required".into()));
    }
    if t.is_zero() {
        return Ok((XComplex::zero(prec), SeriesDiagnostics { max_weight_used: 0, tail_estimate: 0.0, converged: true }));
    }
    let wide = ctx.rescaled(ctx.decimal_digits * 2);
    let wp = wide.prec();
    let tw = t.with_prec(wp);
    let ap = XComplex::dec(wp, "0.5") - n as i64;
    // phi1(l) = (a')_l^2 t^l / (l! (l-1)!), l >= 1
    let phi1 = ap.square() * &tw;
    let ratio = |l: u64| -> Result<XComplex> {
        let q = &ap + l as i64;
        Ok(q.square() * &tw / ((l as i64 + 1) * l as i64))
    };
    let sums = moment_sums(n, 1, phi1, ratio, None, &wide)?;
    if !sums.converged {
        return Err(Error::Convergence(format!("limit series unsettled after {} terms", sums.used)));
    }
    let mut m = sums.m;
    symmetrize(&mut m);
    let det = det_full_pivot(m, wp).value;
    let mut norm = XComplex::from_real(factorial(n as u64 - 1, wp));
    for i in 1..=n {
        let e = (n - i) as u64;
        norm = &norm * &pochhammer(&ap, e, &wide).square() * &tw.powi(e as i64);
    }
    let v = (&det / &norm).with_prec(prec);
    Ok((v, SeriesDiagnostics { max_weight_used: sums.used, tail_estimate: sums.tail, converged: true }))
}

/// Direct partition sum for the same limit, for cross-checks.
pub fn ising_limit_shells(n: usize, t: &XComplex, max_weight: usize, ctx: &PrecisionContext) -> Result<XComplex> {
    let prec = ctx.prec();
    let half = XComplex::dec(prec, "-0.5");
    let nn = XComplex::int(prec, n as i64);
    let fact = factorial(n as u64 - 1, prec);
    let mut sum = XComplex::zero(prec);
    for k in partitions_up_to(max_weight, n) {
        if k.len() < n {
            continue;
        }
        let mut pr = Float::with_val(prec, 1);
        for (j, &kj) in k.parts.iter().enumerate() {
            pr *= (n - j - 1 + kj) as u64;
        }
        let g = gen_pochhammer(&half, &k, ctx);
        let v = g.square() / gen_pochhammer(&nn, &k, ctx) * &schur_equal_args(&k, t, n, ctx)
            / &XComplex::from_real(Float::with_val(prec, &hook_product(&k)));
        sum += &v.scale(&(pr / &fact));
    }
    Ok(sum)
}

fn require_xi_zero(p: &WeightParams) -> Result<()> {
    if !p.xi.is_zero() {
        return Err(Error::Precondition("the hypergeometric route needs xi = 0".into()));
    }
    Ok(())
}

/// prod_{j<N} j! Gamma(2 omega1 + j + 1) / (Gamma(1 + mu + omega + j) Gamma(1 - mu + omegabar + j)) times
/// 2F1(-2mu, -mu-omega; N-mu+omegabar; t, ..., t); the weight without its t^{-mu} factor.
pub fn tau_via_hyp(p: &WeightParams, n: usize, ctx: &PrecisionContext) -> Result<(XComplex, SeriesDiagnostics)> {
    require_xi_zero(p)?;
    let prec = ctx.prec();
    let (mu, om, ob, w1) = (p.mu.with_prec(prec), p.omega().with_prec(prec), p.omega_bar().with_prec(prec), p.omega1.with_prec(prec));
    let mut pref = XComplex::one(prec);
    for j in 0..n as i64 {
        let g = gamma(&(&w1 * 2i64 + (j + 1)), ctx)?;
        let d1 = gamma(&(&mu + &om + (j + 1)), ctx)?;
        let d2 = gamma(&(&ob - &mu + (j + 1)), ctx)?;
        pref = &pref * &g / &d1 / &d2;
        pref = pref.scale(&factorial(j as u64, prec));
    }
    let (f, d) = hyp_2f1_partition(&(&mu * -2i64), &-(&mu + &om), &(&ob - &mu + n as i64), &p.t, n, ctx)?;
    Ok((&pref * &f, d))
}

/// I_N of the full weight: t^{-mu N} times `tau_via_hyp`.
pub fn determinant_via_hyp(p: &WeightParams, n: usize, ctx: &PrecisionContext) -> Result<XComplex> {
    let (v, _) = tau_via_hyp(p, n, ctx)?;
    Ok(&v * &p.with_prec(ctx.prec()).t_pow_neg_mu().powi(n as i64))
}

/// (r_N, rbar_N) as ratios of partition hypergeometric functions.
pub fn reflection_via_hyp(p: &WeightParams, n: usize, ctx: &PrecisionContext) -> Result<(XComplex, XComplex)> {
    require_xi_zero(p)?;
    let prec = ctx.prec();
    let (mu, om, ob) = (p.mu.with_prec(prec), p.omega().with_prec(prec), p.omega_bar().with_prec(prec));
    let t = p.t.with_prec(prec);
    let a = &mu * -2i64;
    let b = -(&mu + &om);
    let cbase = &ob - &mu + n as i64;
    let sign = if n % 2 == 0 { 1i64 } else { -1 };
    let (f, _) = hyp_2f1_partition(&a, &b, &cbase, &t, n, ctx)?;
    if f.abs_f64() < ctx.tolerance {
        return Err(Error::DegenerateParameter("the base function vanishes".into()));
    }
    let (fr, _) = hyp_2f1_partition(&a, &(&b + 1i64), &(&cbase + 1i64), &t, n, ctx)?;
    let (fb, _) = hyp_2f1_partition(&a, &(&b - 1i64), &(&cbase - 1i64), &t, n, ctx)?;
    let nn = n as u64;
    let pr_den = pochhammer(&(&ob - &mu + 1i64), nn, ctx);
    let pb_den = pochhammer(&(&mu + &om + 1i64), nn, ctx);
    if pr_den.abs_f64() < ctx.tolerance || pb_den.abs_f64() < ctx.tolerance {
        return Err(Error::DegenerateParameter("Pochhammer prefactor has a vanishing denominator".into()));
    }
    let r = pochhammer(&(&mu + &om), nn, ctx) / pr_den * &fr / &f * sign;
    let rb = pochhammer(&(&ob - &mu), nn, ctx) / pb_den * &fb / &f * sign;
    Ok((r, rb))
}

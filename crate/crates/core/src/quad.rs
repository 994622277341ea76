//! Fourier coefficients of the weight by tanh-sinh quadrature.
//!
//! The circle is cut at the singular points so that every singularity sits at
//! a panel end; distances to both ends are carried exactly through the
//! substitution, which keeps the algebraic endpoint factors accurate.

use crate::ctx::PrecisionContext;
use crate::error::{Error, Result};
use crate::weight::WeightParams;
use crate::xc::{pi, XComplex};
use rug::Float;

/// A node of the substitution: position, distances to both ends, weight.
struct Node {
    theta: Float,
    dl: Float,
    dr: Float,
    w: Float,
}

fn nodes_at(lo: &Float, hi: &Float, u: &Float, prec: u32) -> Node {
    let half = Float::with_val(prec, hi - lo) / 2u32;
    let pi2 = pi(prec) / 2u32;
    let v = Float::with_val(prec, u.sinh_ref()) * &pi2;
    let ch = Float::with_val(prec, v.cosh_ref());
    let ev = Float::with_val(prec, v.exp_ref());
    let emv = Float::with_val(prec, (-v.clone()).exp_ref());
    let dl = Float::with_val(prec, &half * &ev) / &ch;
    let dr = Float::with_val(prec, &half * &emv) / &ch;
    let theta = Float::with_val(prec, lo + &dl);
    let cu = Float::with_val(prec, u.cosh_ref());
    let w = Float::with_val(prec, &half * &pi2) * cu / Float::with_val(prec, ch.square_ref());
    Node { theta, dl, dr, w }
}

/// (2 sin(d/2))^e exp(i e alpha): a principal power of 1 + e^{i psi} near psi = +-pi.
fn edge_power(d: &Float, alpha: &Float, e: &XComplex, prec: u32) -> XComplex {
    let s = Float::with_val(prec, Float::with_val(prec, d / 2u32).sin_ref()) * 2u32;
    let base = XComplex::from_floats(Float::with_val(prec, s.ln_ref()), Float::with_val(prec, alpha));
    (&base * e).exp()
}

enum Layout {
    /// |t| = 1: panels [-pi, s] and [s, pi] with s = pi - phi
    Circle { s: Float },
    /// |t| < 1: one panel, only the (1+z) factor is singular
    Disc,
}

struct Integrand<'a> {
    p: &'a WeightParams,
    n: i64,
    prec: u32,
    e_omega1: XComplex,
    e_mu: XComplex,
    lin: XComplex,
}

impl<'a> Integrand<'a> {
    fn new(p: &'a WeightParams, n: i64, prec: u32) -> Self {
        let e_omega1 = (&p.omega1 * 2i64).with_prec(prec);
        let e_mu = (&p.mu * 2i64).with_prec(prec);
        let lin = (&(&p.mu + &p.omega()) + n).with_prec(prec);
        Self { p, n, prec, e_omega1, e_mu, lin }
    }

    /// e^{-i(mu+omega+n) theta}
    fn rotation(&self, theta: &Float) -> XComplex {
        let th = XComplex::from_real(Float::with_val(self.prec, theta));
        (-(&self.lin * &th).mul_i()).exp()
    }

    fn on_circle(&self, nd: &Node, first: bool) -> XComplex {
        let prec = self.prec;
        let pi_f = pi(prec);
        let a_left = Float::with_val(prec, &nd.dl - &pi_f) / 2u32;
        let a_right = Float::with_val(prec, &pi_f - &nd.dr) / 2u32;
        let (one_z, one_tz) = if first {
            (edge_power(&nd.dl, &a_left, &self.e_omega1, prec), edge_power(&nd.dr, &a_right, &self.e_mu, prec))
        } else {
            (edge_power(&nd.dr, &a_right, &self.e_omega1, prec), edge_power(&nd.dl, &a_left, &self.e_mu, prec))
        };
        let _ = self.n;
        &(&one_z * &one_tz) * &self.rotation(&nd.theta)
    }

    fn in_disc(&self, nd: &Node) -> XComplex {
        let prec = self.prec;
        let pi_f = pi(prec);
        let one_z = if nd.dl < nd.dr {
            let a = Float::with_val(prec, &nd.dl - &pi_f) / 2u32;
            edge_power(&nd.dl, &a, &self.e_omega1, prec)
        } else {
            let a = Float::with_val(prec, &pi_f - &nd.dr) / 2u32;
            edge_power(&nd.dr, &a, &self.e_omega1, prec)
        };
        let z = XComplex::cis(&nd.theta);
        let one_tz = (1i64 + &(&self.p.t.with_prec(prec) * &z)).powc(&self.e_mu);
        &(&one_z * &one_tz) * &self.rotation(&nd.theta)
    }
}

/// Tanh-sinh on one panel, refined until two levels agree to `target`.
fn panel<F: Fn(&Node) -> XComplex>(lo: &Float, hi: &Float, f: F, target: f64, prec: u32) -> Result<XComplex> {
    let u_max = 6.5f64;
    let term = |u: f64| -> Option<XComplex> {
        let uf = Float::with_val(prec, u);
        let nd = nodes_at(lo, hi, &uf, prec);
        if nd.dl.is_zero() || nd.dr.is_zero() {
            return None;
        }
        Some(f(&nd).scale(&nd.w))
    };
    let mut h = 0.5f64;
    let mut sum = XComplex::zero(prec);
    // level 0: all multiples of h
    let mut j = 0i64;
    loop {
        let u = j as f64 * h;
        if u > u_max {
            break;
        }
        if let Some(v) = term(u) {
            sum += &v;
        }
        if j > 0 {
            if let Some(v) = term(-u) {
                sum += &v;
            }
        }
        j += 1;
    }
    let mut est = sum.scale(&Float::with_val(prec, h));
    for _level in 0..12 {
        h /= 2.0;
        let mut j = 1i64;
        loop {
            let u = j as f64 * h;
            if u > u_max {
                break;
            }
            for s in [u, -u] {
                if let Some(v) = term(s) {
                    sum += &v;
                }
            }
            j += 2;
        }
        let next = sum.scale(&Float::with_val(prec, h));
        let diff = next.abs_diff(&est);
        let scale = next.abs_f64().max(1e-300);
        est = next;
        if diff <= target * scale {
            return Ok(est);
        }
    }
    Err(Error::Convergence("tanh-sinh refinement stalled".into()))
}

/// (1/2pi) times the integral of w(e^{i theta}) e^{-i n theta} over the circle.
pub fn moment_quadrature(n: i64, p: &WeightParams, ctx: &PrecisionContext) -> Result<XComplex> {
    let on_circle = p.is_on_circle(ctx.tolerance.sqrt());
    if !on_circle {
        if !p.xi.is_zero() {
            return Err(Error::Precondition("quadrature with xi != 0 needs |t| = 1".into()));
        }
        if p.t.abs_f64() > 1.0 {
            return Err(Error::Precondition("quadrature needs |t| <= 1".into()));
        }
    }
    let qd = ctx.rescaled(ctx.decimal_digits / 2 + 15);
    let prec = qd.prec();
    let target = 10f64.powi(-(ctx.decimal_digits as i32) / 2 - 5);
    let pi_f = pi(prec);
    let neg_pi = Float::with_val(prec, -&pi_f);
    let f = Integrand::new(p, n, prec);
    let layout = if on_circle { Layout::Circle { s: Float::with_val(prec, &pi_f - &p.phi) } } else { Layout::Disc };
    let total = match layout {
        Layout::Circle { s } => {
            let mut acc = panel(&neg_pi, &s, |nd| f.on_circle(nd, true), target, prec)?;
            if s < pi_f {
                let second = panel(&s, &pi_f, |nd| f.on_circle(nd, false), target, prec)?;
                let jump = (1i64 - &p.xi).with_prec(prec);
                acc += &(&jump * &second);
            }
            acc
        }
        Layout::Disc => panel(&neg_pi, &pi_f, |nd| f.in_disc(nd), target, prec)?,
    };
    let two_pi = XComplex::from_real(Float::with_val(prec, &pi_f * 2u32));
    let v = &(&total / &two_pi) * &p.with_prec(prec).t_pow_neg_mu();
    Ok(v.with_prec(ctx.prec()))
}

use crate::output::{num, Agreement, Report};
use crate::{CueGapArgs, CueMomentArgs, Hyp2f1Args, IsingArgs, MethodArg, PhaseArg, VerifyArgs, WeightArgs};
use ptau::apps::{cue_gap_sequence, cue_moment_sequence, ising_diagonal, ising_via_hyp};
use ptau::dpv::{dpv_reflections, l01_scheme, l14_scheme};
use ptau::partition::{determinant_via_hyp, hyp_2f1_partition, reflection_via_hyp};
use ptau::recurrence::{residual_sweep, run_recurrence, tau_sequence, StepKind};
use ptau::toeplitz::{oracle_sequence, reflection_from_dets};
use ptau::verify::{run_panel, Panel};
use ptau::weight::{moment_general, moment_general_dphi, IsingPhase, MomentSpec, MomentTable, WeightParams};
use ptau::{Error, PrecisionContext, Result, XComplex};
use rug::Float;
use serde_json::{json, Value};

const WEIGHT_METHODS: [MethodArg; 7] = [
    MethodArg::Recurrence22,
    MethodArg::Recurrence21,
    MethodArg::DpvProp,
    MethodArg::DpvL01,
    MethodArg::DpvL14,
    MethodArg::Hyp,
    MethodArg::DetOracle,
];

fn complex(s: &str, what: &str, ctx: &PrecisionContext) -> Result<XComplex> {
    XComplex::parse_pair(ctx.prec(), s).ok_or_else(|| Error::Precondition(format!("--{what}: cannot parse {s:?} as re[,im]")))
}

fn real(s: &str, what: &str, ctx: &PrecisionContext) -> Result<Float> {
    let v = Float::parse(s.trim()).map_err(|_| Error::Precondition(format!("--{what}: cannot parse {s:?} as a real number")))?;
    Ok(Float::with_val(ctx.prec(), v))
}

fn n_max_ok(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Precondition("--n-max must be at least 1".into()));
    }
    Ok(())
}

fn scaled_tol(ctx: &PrecisionContext, frac: f64) -> f64 {
    10f64.powf(-(ctx.decimal_digits as f64) * frac)
}

fn gap(a: &[XComplex], b: &[XComplex], from: usize) -> f64 {
    a.iter().zip(b).skip(from).map(|(x, y)| x.rel_diff(y)).map(|v| if v.is_nan() { f64::INFINITY } else { v }).fold(0.0, f64::max)
}

/// Outputs of one method on the general weight; entries are indexed by N.
struct WeightOut {
    tau: Option<Vec<XComplex>>,
    r: Option<Vec<XComplex>>,
    rbar: Option<Vec<XComplex>>,
}

fn weight_params(a: &WeightArgs, ctx: &PrecisionContext) -> Result<WeightParams> {
    let mu = complex(&a.mu, "mu", ctx)?;
    let w1 = complex(&a.omega1, "omega1", ctx)?;
    let w2 = complex(&a.omega2, "omega2", ctx)?;
    let xi = complex(&a.xi, "xi", ctx)?;
    match (&a.t, &a.phi) {
        (_, Some(phi)) => WeightParams::on_circle(mu, w1, w2, xi, &real(phi, "phi", ctx)?, ctx),
        (Some(t), None) => WeightParams::new(mu, w1, w2, xi, complex(t, "t", ctx)?, ctx),
        (None, None) => Err(Error::Precondition("one of --t, --phi is required".into())),
    }
}

/// Why a method cannot run on these parameters, if it cannot.
fn inapplicable(m: MethodArg, w: &WeightParams, want_tau: bool, ctx: &PrecisionContext) -> Option<&'static str> {
    let on_circle = w.is_on_circle(ctx.tolerance);
    match m {
        MethodArg::Recurrence21 if w.omega2.is_zero() => Some("the 2/1 step needs omega != omegabar"),
        MethodArg::DpvL01 | MethodArg::DpvL14 if !want_tau => Some("the Hamiltonian schemes produce tau values only"),
        MethodArg::DpvL01 | MethodArg::DpvL14 if !on_circle || !w.xi.is_zero() => Some("the Hamiltonian schemes need |t| = 1 and xi = 0"),
        MethodArg::Hyp if !w.xi.is_zero() => Some("the hypergeometric route needs xi = 0"),
        MethodArg::Hyp if w.t.abs_f64() >= 1.0 => Some("the hypergeometric route needs |t| < 1"),
        _ => None,
    }
}

fn weight_method(m: MethodArg, w: &WeightParams, n_max: usize, ctx: &PrecisionContext, rep: &mut Report) -> Result<WeightOut> {
    let spec = MomentSpec::General(w.clone());
    let w0 = || moment_general(0, w, ctx);
    let from_run = |r: Vec<XComplex>, rb: Vec<XComplex>, w0: XComplex| -> Result<WeightOut> {
        let tau = tau_sequence(&r, &rb, &w0, n_max)?.values;
        Ok(WeightOut { tau: Some(tau), r: Some(r), rbar: Some(rb) })
    };
    match m {
        MethodArg::Recurrence22 | MethodArg::Recurrence21 => {
            let kind = if m == MethodArg::Recurrence22 { StepKind::TwoTwo } else { StepKind::TwoOne };
            let run = run_recurrence(&spec, n_max, kind, ctx)?;
            rep.absorb(&residual_sweep(&run));
            from_run(run.r, run.rbar, w0()?)
        }
        MethodArg::DpvProp => {
            let seed = MomentTable::build(&spec, -1, 1, ctx)?;
            let (r1, rb1) = reflection_from_dets(1, &seed, ctx)?;
            let (run, _) = dpv_reflections(w, &r1, &rb1, n_max, ctx)?;
            from_run(run.r, run.rbar, w0()?)
        }
        MethodArg::DpvL01 | MethodArg::DpvL14 => {
            let (w0, dw0) = (w0()?, moment_general_dphi(0, w, ctx)?);
            let one = XComplex::one(ctx.prec());
            let run = if m == MethodArg::DpvL01 {
                l01_scheme(&one, &w0, &dw0, w, n_max, ctx)?
            } else {
                l14_scheme(&one, &w0, &dw0, w, n_max, ctx)?
            };
            Ok(WeightOut { tau: Some(run.tau), r: None, rbar: None })
        }
        MethodArg::Hyp => {
            let one = XComplex::one(ctx.prec());
            let (mut tau, mut r, mut rb) = (vec![one.clone()], vec![one.clone()], vec![one]);
            for n in 1..=n_max {
                tau.push(determinant_via_hyp(w, n, ctx)?);
                let (a, b) = reflection_via_hyp(w, n, ctx)?;
                r.push(a);
                rb.push(b);
            }
            Ok(WeightOut { tau: Some(tau), r: Some(r), rbar: Some(rb) })
        }
        MethodArg::DetOracle => {
            let ora = oracle_sequence(n_max, &MomentTable::for_size(&spec, n_max + 1, ctx)?, ctx)?;
            Ok(WeightOut { tau: Some(ora.tau), r: Some(ora.r), rbar: Some(ora.rbar) })
        }
        MethodArg::All => unreachable!("expanded by the caller"),
    }
}

fn agreement_tol(m: MethodArg, ctx: &PrecisionContext) -> f64 {
    if m == MethodArg::Hyp {
        scaled_tol(ctx, 1.0 / 3.0)
    } else {
        ctx.half_tolerance()
    }
}

fn agree(rep: &mut Report, name: &str, g: f64, tol: f64) {
    rep.agreement.insert(name.into(), Agreement { max_relative_gap: g, tolerance: tol, agrees: g < tol });
}

fn finish(rep: Report, common: &crate::Common) -> Result<()> {
    rep.write(common.format, common.output.as_deref()).map_err(|e| Error::Precondition(format!("cannot write output: {e}")))?;
    let bad = rep.disagreements();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::Disagreement(bad.join("; ")))
    }
}

pub fn weight(a: &WeightArgs, want_tau: bool, ctx: &PrecisionContext) -> Result<()> {
    n_max_ok(a.n_max)?;
    let w = weight_params(a, ctx)?;
    let methods: Vec<MethodArg> = if a.method == MethodArg::All {
        WEIGHT_METHODS.iter().copied().filter(|m| inapplicable(*m, &w, want_tau, ctx).is_none()).collect()
    } else {
        if let Some(why) = inapplicable(a.method, &w, want_tau, ctx) {
            return Err(Error::Precondition(format!("{}: {why}", a.method.name())));
        }
        vec![a.method]
    };
    let cols: &[&str] =
        if want_tau { &["N", "method", "tau_re", "tau_im"] } else { &["N", "method", "r_re", "r_im", "rbar_re", "rbar_im"] };
    let mut rep = Report::new(a.method.name(), ctx.decimal_digits, cols);
    for (k, v) in [("mu", &a.mu), ("omega1", &a.omega1), ("omega2", &a.omega2), ("xi", &a.xi)] {
        rep.param(k, v);
    }
    match (&a.t, &a.phi) {
        (_, Some(phi)) => rep.param("phi", phi),
        (Some(t), None) => rep.param("t", t),
        _ => {}
    }
    rep.param("n_max", a.n_max);

    let mut outs = Vec::new();
    for &m in &methods {
        outs.push((m, weight_method(m, &w, a.n_max, ctx, &mut rep)?));
    }
    let d = ctx.decimal_digits;
    for (m, o) in &outs {
        let first = if want_tau { 0 } else { 1 };
        for n in first..=a.n_max {
            let mut row = vec![json!(n), json!(m.name())];
            if want_tau {
                row.extend(num(&o.tau.as_ref().expect("tau")[n], d));
            } else {
                row.extend(num(&o.r.as_ref().expect("r")[n], d));
                row.extend(num(&o.rbar.as_ref().expect("rbar")[n], d));
            }
            rep.row(row);
        }
    }
    if a.method == MethodArg::All {
        if let Some((_, ora)) = outs.iter().find(|(m, _)| *m == MethodArg::DetOracle) {
            for (m, o) in outs.iter().filter(|(m, _)| *m != MethodArg::DetOracle) {
                let g = if want_tau {
                    gap(o.tau.as_ref().expect("tau"), ora.tau.as_ref().expect("tau"), 1)
                } else {
                    gap(o.r.as_ref().expect("r"), ora.r.as_ref().expect("r"), 1).max(gap(
                        o.rbar.as_ref().expect("rbar"),
                        ora.rbar.as_ref().expect("rbar"),
                        1,
                    ))
                };
                agree(&mut rep, m.name(), g, agreement_tol(*m, ctx));
            }
        }
    }
    finish(rep, &a.common)
}

fn app_methods(m: MethodArg, allowed: &[MethodArg]) -> Result<Vec<MethodArg>> {
    if m == MethodArg::All {
        return Ok(allowed.to_vec());
    }
    if !allowed.contains(&m) {
        let names: Vec<_> = allowed.iter().map(|m| m.name()).collect();
        return Err(Error::Precondition(format!("method {} is not available here; use one of {}", m.name(), names.join(", "))));
    }
    Ok(vec![m])
}

pub fn cue_gap(a: &CueGapArgs, ctx: &PrecisionContext) -> Result<()> {
    n_max_ok(a.n_max)?;
    let xi = complex(&a.xi, "xi", ctx)?;
    let phi = real(&a.phi, "phi", ctx)?;
    let methods = app_methods(a.method, &[MethodArg::Recurrence22, MethodArg::DetOracle])?;
    let mut rep = Report::new(a.method.name(), ctx.decimal_digits, &["N", "method", "E_re", "E_im", "x_re", "x_im"]);
    rep.param("xi", &a.xi);
    rep.param("phi", &a.phi);
    rep.param("n_max", a.n_max);
    let d = ctx.decimal_digits;
    let mut cols: Vec<(MethodArg, Vec<XComplex>)> = Vec::new();
    for m in methods {
        if m == MethodArg::Recurrence22 {
            let run = cue_gap_sequence(&xi, &phi, a.n_max, ctx)?;
            rep.absorb(&run.residuals);
            for n in 0..=a.n_max {
                let mut row = vec![json!(n), json!(m.name())];
                row.extend(num(&run.e_values[n], d));
                row.extend(num(&run.x_values[n], d));
                rep.row(row);
            }
            cols.push((m, run.e_values));
        } else {
            let spec = MomentSpec::CueGap { xi: xi.clone(), phi: phi.clone() };
            let ora = oracle_sequence(a.n_max, &MomentTable::for_size(&spec, a.n_max + 1, ctx)?, ctx)?;
            for n in 0..=a.n_max {
                let mut row = vec![json!(n), json!(m.name())];
                row.extend(num(&ora.tau[n], d));
                row.extend([Value::Null, Value::Null]);
                rep.row(row);
            }
            cols.push((m, ora.tau));
        }
    }
    if cols.len() == 2 {
        agree(&mut rep, MethodArg::Recurrence22.name(), gap(&cols[0].1, &cols[1].1, 1), ctx.half_tolerance());
    }
    finish(rep, &a.common)
}

pub fn cue_moment(a: &CueMomentArgs, ctx: &PrecisionContext) -> Result<()> {
    n_max_ok(a.n_max)?;
    let mu = complex(&a.mu, "mu", ctx)?;
    let u = complex(&a.u, "u", ctx)?;
    let methods = app_methods(a.method, &[MethodArg::Recurrence22, MethodArg::DetOracle])?;
    let mut rep = Report::new(a.method.name(), ctx.decimal_digits, &["N", "method", "F_re", "F_im", "r_re", "r_im"]);
    rep.param("mu", &a.mu);
    rep.param("u", &a.u);
    rep.param("n_max", a.n_max);
    let d = ctx.decimal_digits;
    let mut cols: Vec<Vec<XComplex>> = Vec::new();
    for m in methods {
        let (f, r) = if m == MethodArg::Recurrence22 {
            let run = cue_moment_sequence(&mu, &u, a.n_max, ctx)?;
            rep.param("route", run.method.tag());
            (run.f_values, run.r_values)
        } else {
            let spec = MomentSpec::CueCharpoly { mu: mu.clone(), u: u.clone() };
            let ora = oracle_sequence(a.n_max, &MomentTable::for_size(&spec, a.n_max + 1, ctx)?, ctx)?;
            (ora.tau, ora.r)
        };
        for n in 0..=a.n_max {
            let mut row = vec![json!(n), json!(m.name())];
            row.extend(num(&f[n], d));
            if n == 0 {
                row.extend([Value::Null, Value::Null]);
            } else {
                row.extend(num(&r[n], d));
            }
            rep.row(row);
        }
        cols.push(f);
    }
    if cols.len() == 2 {
        agree(&mut rep, MethodArg::Recurrence22.name(), gap(&cols[0], &cols[1], 1), ctx.half_tolerance());
    }
    finish(rep, &a.common)
}

pub fn ising(a: &IsingArgs, ctx: &PrecisionContext) -> Result<()> {
    n_max_ok(a.n_max)?;
    let k = real(&a.k, "k", ctx)?;
    let phase = match a.phase {
        PhaseArg::Low => IsingPhase::Low,
        PhaseArg::High => IsingPhase::High,
    };
    let regular = k.is_finite() && !k.is_zero() && k != 1;
    let allowed: &[MethodArg] = if regular || a.method != MethodArg::All {
        &[MethodArg::Recurrence22, MethodArg::Hyp, MethodArg::DetOracle]
    } else {
        &[MethodArg::Recurrence22]
    };
    let methods = app_methods(a.method, allowed)?;
    if !regular && methods.iter().any(|m| *m != MethodArg::Recurrence22) {
        return Err(Error::Precondition("k = 0, 1 or infinity is available through the recurrence only".into()));
    }
    let mut rep =
        Report::new(a.method.name(), ctx.decimal_digits, &["N", "method", "corr_re", "corr_im", "r_re", "r_im", "rbar_re", "rbar_im"]);
    rep.param("k", &a.k);
    rep.param("phase", if phase == IsingPhase::Low { "low" } else { "high" });
    rep.param("n_max", a.n_max);
    let d = ctx.decimal_digits;
    let mut cols: Vec<(MethodArg, [Vec<XComplex>; 3])> = Vec::new();
    for m in methods {
        let seqs = match m {
            MethodArg::Recurrence22 => {
                let run = ising_diagonal(&k, phase, a.n_max, ctx)?;
                rep.param("route", run.method.tag());
                [run.correlations, run.r_values, run.rbar_values]
            }
            MethodArg::Hyp => {
                let one = XComplex::one(ctx.prec());
                let mut s = [vec![one.clone()], vec![one.clone()], vec![one]];
                for n in 1..=a.n_max {
                    let (c, r, rb) = ising_via_hyp(&k, phase, n, ctx)?;
                    s[0].push(c);
                    s[1].push(r);
                    s[2].push(rb);
                }
                s
            }
            _ => {
                let spec = MomentSpec::Ising { k: k.clone(), phase };
                let mut table = MomentTable::for_size(&spec, a.n_max + 1, ctx)?;
                if phase == IsingPhase::High {
                    table = table.gauged(&XComplex::from_real(k.clone()).square());
                }
                let ora = oracle_sequence(a.n_max, &table, ctx)?;
                [ora.tau, ora.r, ora.rbar]
            }
        };
        for n in 1..=a.n_max {
            let mut row = vec![json!(n), json!(m.name())];
            for s in &seqs {
                row.extend(num(&s[n], d));
            }
            rep.row(row);
        }
        cols.push((m, seqs));
    }
    if let Some((_, ora)) = cols.iter().find(|(m, _)| *m == MethodArg::DetOracle) {
        for (m, s) in cols.iter().filter(|(m, _)| *m != MethodArg::DetOracle) {
            let g = (0..3).map(|i| gap(&s[i], &ora[i], 1)).fold(0.0, f64::max);
            agree(&mut rep, m.name(), g, agreement_tol(*m, ctx));
        }
    }
    finish(rep, &a.common)
}

pub fn hyp2f1(a: &Hyp2f1Args, ctx: &PrecisionContext) -> Result<()> {
    n_max_ok(a.n_max)?;
    let (pa, pb, pc, t) = (complex(&a.a, "a", ctx)?, complex(&a.b, "b", ctx)?, complex(&a.c, "c", ctx)?, complex(&a.t, "t", ctx)?);
    let mut rep = Report::new("hyp", ctx.decimal_digits, &["N", "value_re", "value_im", "max_weight_used", "tail_estimate"]);
    for (k, v) in [("a", &a.a), ("b", &a.b), ("c", &a.c), ("t", &a.t)] {
        rep.param(k, v);
    }
    rep.param("n_max", a.n_max);
    let d = ctx.decimal_digits;
    for n in 1..=a.n_max {
        let (v, diag) = hyp_2f1_partition(&pa, &pb, &pc, &t, n, ctx)?;
        rep.converged &= diag.converged;
        let mut row = vec![json!(n)];
        row.extend(num(&v, d));
        row.push(json!(diag.max_weight_used));
        row.push(if diag.tail_estimate.is_finite() { json!(diag.tail_estimate) } else { Value::Null });
        rep.row(row);
    }
    finish(rep, &a.common)
}

pub fn verify(a: &VerifyArgs, ctx: &PrecisionContext) -> Result<()> {
    let panel: Panel = a.panel.parse()?;
    let report = run_panel(panel, ctx, a.jobs)?;
    eprint!("{}", report.table());
    let mut rep = Report::new("verify", ctx.decimal_digits, &["group", "name", "worst", "tolerance", "passed", "detail"]);
    rep.param("panel", &a.panel);
    if let Some(j) = a.jobs {
        rep.param("jobs", j);
    }
    for c in &report.cells {
        let worst = if c.worst.is_finite() { json!(c.worst) } else { Value::Null };
        rep.row(vec![json!(c.group), json!(c.name), worst, json!(c.tolerance), json!(c.passed), json!(c.detail)]);
        rep.residuals.insert(format!("{}/{}", c.group, c.name), c.worst);
    }
    rep.converged = report.all_passed();
    rep.write(a.common.format, a.common.output.as_deref()).map_err(|e| Error::Precondition(format!("cannot write output: {e}")))?;
    if report.all_passed() {
        Ok(())
    } else {
        let names: Vec<_> = report.failures().iter().map(|c| format!("{}/{}", c.group, c.name)).collect();
        Err(Error::Disagreement(format!("verify cells failed: {}", names.join(", "))))
    }
}

//! The cross-validation matrix: every route against every oracle on a fixed parameter panel.

use crate::apps::{cue_gap_sequence, cue_moment_sequence, ising_critical_correlation, ising_diagonal, ising_via_hyp, realness_structure};
use crate::ctx::PrecisionContext;
use crate::dpv::{dpv_closure, l01_scheme, l14_scheme, map_qp_reflections, to_fg, x3_definition_residuals};
use crate::error::{Error, Result};
use crate::partition::{determinant_via_hyp, hyp_2f1_partition, reflection_via_hyp};
use crate::recurrence::{check_avm, max_relative_gap, residuals, run_oracle, run_recurrence, tau_sequence, verify_bilinear, StepKind};
use crate::special::{gamma, pochhammer};
use crate::toeplitz::{oracle_sequence, toeplitz_det};
use crate::weight::{moment_general, moment_general_dphi, IsingPhase, MomentSpec, MomentTable, WeightParams};
use crate::xc::{pi, XComplex};
use rayon::prelude::*;
use rug::Float;
use serde::Serialize;
use std::str::FromStr;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Panel {
    Default,
    Core,
    Dpv,
    Hyp,
    Cue,
    Ising,
    Structure,
}

impl FromStr for Panel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "default" | "all" => Panel::Default,
            "core" | "core-only" => Panel::Core,
            "dpv" | "dpv-only" => Panel::Dpv,
            "hyp" | "hyp-only" => Panel::Hyp,
            "cue" | "cue-only" => Panel::Cue,
            "ising" | "ising-only" => Panel::Ising,
            "structure" | "structure-only" => Panel::Structure,
            _ => return Err(Error::Precondition(format!("unknown panel {s}"))),
        })
    }
}

impl Panel {
    fn admits(&self, group: &str) -> bool {
        match self {
            Panel::Default => true,
            Panel::Core => group == "core",
            Panel::Dpv => group == "dpv",
            Panel::Hyp => group == "hyp",
            Panel::Cue => group == "cue",
            Panel::Ising => group == "ising",
            Panel::Structure => group == "structure",
        }
    }
}

/// One cell of the matrix: a named check with its worst residual.
#[derive(Clone, Debug, Serialize)]
pub struct Cell {
    pub group: String,
    pub name: String,
    pub tolerance: f64,
    pub worst: f64,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub digits: u32,
    pub panel: Panel,
    pub cells: Vec<Cell>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.cells.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Cell> {
        self.cells.iter().filter(|c| !c.passed).collect()
    }

    pub fn table(&self) -> String {
        let w = self.cells.iter().map(|c| c.group.len() + c.name.len() + 1).max().unwrap_or(10).max(10);
        let mut out = format!("{:<w$}  {:>10}  {:>10}  result\n", "cell", "worst", "tolerance");
        for c in &self.cells {
            let label = format!("{}/{}", c.group, c.name);
            let status = if c.passed { "pass" } else { "FAIL" };
            out.push_str(&format!("{label:<w$}  {:>10.2e}  {:>10.2e}  {status}", c.worst, c.tolerance));
            if !c.detail.is_empty() {
                out.push_str(&format!("  ({})", c.detail));
            }
            out.push('\n');
        }
        out
    }
}

type Check = Box<dyn Fn(&PrecisionContext) -> Result<f64> + Send + Sync>;

struct CellSpec {
    group: &'static str,
    name: String,
    tol: Tol,
    check: Check,
}

#[derive(Clone, Copy)]
enum Tol {
    /// 10^{-digits * f}
    Scaled(f64),
    Fixed(f64),
    /// the context's own tolerance
    Exact,
}

impl Tol {
    fn value(&self, ctx: &PrecisionContext) -> f64 {
        match self {
            Tol::Scaled(f) => 10f64.powf(-(ctx.decimal_digits as f64) * f),
            Tol::Fixed(v) => *v,
            Tol::Exact => ctx.tolerance,
        }
    }
}

fn cell(group: &'static str, name: impl Into<String>, frac: f64, check: Check) -> CellSpec {
    CellSpec { group, name: name.into(), tol: Tol::Scaled(frac), check }
}

fn fixed(group: &'static str, name: impl Into<String>, tol: f64, check: Check) -> CellSpec {
    CellSpec { group, name: name.into(), tol: Tol::Fixed(tol), check }
}

fn exact(group: &'static str, name: impl Into<String>, check: Check) -> CellSpec {
    CellSpec { group, name: name.into(), tol: Tol::Exact, check }
}

fn d(p: u32, s: &str) -> XComplex {
    XComplex::dec(p, s)
}

fn polar(p: u32, r: f64, theta: f64) -> XComplex {
    XComplex::from_real(Float::with_val(p, r)) * XComplex::cis(&Float::with_val(p, theta))
}

fn rel(a: &XComplex, b: &XComplex) -> f64 {
    let s = a.abs_f64().max(b.abs_f64());
    if s == 0.0 {
        return 0.0;
    }
    let v = a.abs_diff(b) / s;
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Generic off-circle parameter sets with xi = 0 and |t| <= 0.7.
pub fn generic_sets(ctx: &PrecisionContext) -> Vec<(String, WeightParams)> {
    let p = ctx.prec();
    let z = XComplex::zero(p);
    let raw: [(&str, &str, &str, f64, f64); 5] = [
        ("0.3,0.1", "0.2", "0.15", 0.6, 0.7),
        ("0.45,-0.2", "0.35,0.1", "-0.25", 0.5, -1.9),
        ("1.1,0.3", "-0.15", "0.4,0.2", 0.7, 2.5),
        ("0.2", "0.6,-0.3", "0.05", 0.35, 0.0),
        ("-0.3,0.25", "0.8", "-0.1,0.3", 0.65, -0.4),
    ];
    raw.iter()
        .enumerate()
        .map(|(i, (m, w1, w2, r, th))| {
            let w = WeightParams::new(d(p, m), d(p, w1), d(p, w2), z.clone(), polar(p, *r, *th), ctx).expect("panel parameters");
            (format!("g{}", i + 1), w)
        })
        .collect()
}

/// On-circle sets with a jump on the arc.
pub fn circle_sets(ctx: &PrecisionContext) -> Vec<(String, WeightParams)> {
    let p = ctx.prec();
    let raw: [(&str, &str, &str, &str, f64); 2] = [("0.3", "0.2", "0.15", "0.4", 1.1), ("0.25,0.1", "0.4", "-0.2", "0.7,0.2", 2.3)];
    raw.iter()
        .enumerate()
        .map(|(i, (m, w1, w2, xi, phi))| {
            let w =
                WeightParams::on_circle(d(p, m), d(p, w1), d(p, w2), d(p, xi), &Float::with_val(p, *phi), ctx).expect("panel parameters");
            (format!("c{}", i + 1), w)
        })
        .collect()
}

/// On-circle sets with xi = 0 for the Hamiltonian schemes.
pub fn scheme_sets(ctx: &PrecisionContext) -> Vec<(String, WeightParams)> {
    let p = ctx.prec();
    let z = XComplex::zero(p);
    let raw: [(&str, &str, &str, f64); 2] = [("0.3", "0.2", "0.15", 1.1), ("0.35,0.1", "0.25", "-0.1", 2.0)];
    raw.iter()
        .enumerate()
        .map(|(i, (m, w1, w2, phi))| {
            let w =
                WeightParams::on_circle(d(p, m), d(p, w1), d(p, w2), z.clone(), &Float::with_val(p, *phi), ctx).expect("panel parameters");
            (format!("s{}", i + 1), w)
        })
        .collect()
}

fn core_cells(ctx: &PrecisionContext, out: &mut Vec<CellSpec>) {
    let mut sets = generic_sets(ctx);
    sets.extend(circle_sets(ctx));
    for (name, w) in sets {
        let w1 = w.clone();
        out.push(cell(
            "core",
            format!("step22-vs-det/{name}"),
            0.5,
            Box::new(move |c| {
                let spec = MomentSpec::General(w1.with_prec(c.prec()));
                let ora = run_oracle(&spec, 10, c)?;
                let rec = run_recurrence(&spec, 10, StepKind::TwoTwo, c)?;
                Ok(max_relative_gap(&rec, &ora))
            }),
        ));
        out.push(cell(
            "core",
            format!("step21-vs-det/{name}"),
            0.5,
            Box::new({
                let w = w.clone();
                move |c| {
                    let spec = MomentSpec::General(w.with_prec(c.prec()));
                    let ora = run_oracle(&spec, 10, c)?;
                    let rec = run_recurrence(&spec, 10, StepKind::TwoOne, c)?;
                    Ok(max_relative_gap(&rec, &ora))
                }
            }),
        ));
        out.push(cell(
            "core",
            format!("ladder/{name}"),
            2.0 / 3.0,
            Box::new(move |c| {
                let spec = MomentSpec::General(w.with_prec(c.prec()));
                let ora = run_oracle(&spec, 9, c)?;
                let mut worst = 0f64;
                for n in 1..=8 {
                    worst = worst.max(residuals(&ora, n).max()).max(verify_bilinear(&ora, n).max());
                }
                Ok(worst)
            }),
        ));
    }
}

fn dpv_cells(ctx: &PrecisionContext, out: &mut Vec<CellSpec>) {
    for (name, w) in generic_sets(ctx).into_iter().take(3) {
        out.push(cell(
            "dpv",
            format!("closure/{name}"),
            7.0 / 12.0,
            Box::new(move |c| {
                let ora = run_oracle(&MomentSpec::General(w.with_prec(c.prec())), 10, c)?;
                let mut worst = 0f64;
                for n in 1..=8 {
                    let rep = dpv_closure(&to_fg(&ora, n - 1, c)?, &to_fg(&ora, n, c)?, &to_fg(&ora, n + 1, c)?);
                    worst = worst.max(rep.max());
                }
                Ok(worst)
            }),
        ));
    }
    for (name, w) in scheme_sets(ctx) {
        let w2 = w.clone();
        out.push(cell(
            "dpv",
            format!("tau-routes/{name}"),
            0.5,
            Box::new(move |c| {
                let w = w.with_prec(c.prec());
                let spec = MomentSpec::General(w.clone());
                let table = MomentTable::for_size(&spec, 9, c)?;
                let ora = oracle_sequence(8, &table, c)?;
                let w0 = moment_general(0, &w, c)?;
                let dw0 = moment_general_dphi(0, &w, c)?;
                let one = XComplex::one(c.prec());
                let rec = run_recurrence(&spec, 8, StepKind::TwoTwo, c)?;
                let seq = tau_sequence(&rec.r, &rec.rbar, &w0, 8)?;
                let a = l01_scheme(&one, &w0, &dw0, &w, 8, c)?;
                let b = l14_scheme(&one, &w0, &dw0, &w, 8, c)?;
                let mut worst = 0f64;
                for n in 0..=8 {
                    worst = worst.max(rel(&seq.values[n], &ora.tau[n]));
                    worst = worst.max(rel(&a.tau[n], &ora.tau[n]));
                    worst = worst.max(rel(&b.tau[n], &ora.tau[n]));
                }
                Ok(worst)
            }),
        ));
        out.push(cell(
            "structure",
            format!("qp-map-and-x3/{name}"),
            7.0 / 12.0,
            Box::new(move |c| {
                let w = w2.with_prec(c.prec());
                let w0 = moment_general(0, &w, c)?;
                let dw0 = moment_general_dphi(0, &w, c)?;
                let one = XComplex::one(c.prec());
                let a = l01_scheme(&one, &w0, &dw0, &w, 8, c)?;
                let b = l14_scheme(&one, &w0, &dw0, &w, 8, c)?;
                let run = run_oracle(&MomentSpec::General(w), 9, c)?;
                let mut worst = 0f64;
                for st in a.states.iter().skip(1).take(6) {
                    worst = worst.max(map_qp_reflections(st, &run, c).max());
                    worst = worst.max(x3_definition_residuals(st, c)?.max());
                }
                for st in b.states.iter().skip(1).take(6) {
                    worst = worst.max(x3_definition_residuals(st, c)?.max());
                }
                Ok(worst)
            }),
        ));
    }
}

fn hyp_cells(ctx: &PrecisionContext, out: &mut Vec<CellSpec>) {
    let p = ctx.prec();
    let mut sets = generic_sets(ctx);
    sets.push((
        "mu1".into(),
        WeightParams::new(d(p, "1"), d(p, "0.3"), d(p, "0.1"), XComplex::zero(p), d(p, "0.5"), ctx).expect("panel parameters"),
    ));
    for (name, w) in sets {
        out.push(cell(
            "hyp",
            format!("tau-and-reflections/{name}"),
            1.0 / 3.0,
            Box::new(move |c| {
                let w = w.with_prec(c.prec());
                let table = MomentTable::for_size(&MomentSpec::General(w.clone()), 7, c)?;
                let ora = oracle_sequence(6, &table, c)?;
                let mut worst = 0f64;
                for n in 1..=6 {
                    worst = worst.max(rel(&determinant_via_hyp(&w, n, c)?, &ora.tau[n]));
                    let (r, rb) = reflection_via_hyp(&w, n, c)?;
                    worst = worst.max(rel(&r, &ora.r[n])).max(rel(&rb, &ora.rbar[n]));
                }
                Ok(worst)
            }),
        ));
    }
    out.push(cell("hyp", "gauss-summation", 0.75, Box::new(gauss_summation_gap)));
}

/// Largest relative error of the terminating summation formula at t = 1, mu in {1/2, 1, 3/2}.
pub fn gauss_summation_gap(c: &PrecisionContext) -> Result<f64> {
    let p = c.prec();
    let (w1, w2) = (d(p, "0.3"), d(p, "0.1"));
    let mut worst = 0f64;
    for m in ["0.5", "1", "1.5"] {
        let mu = d(p, m);
        let om = &w1 + &w2.mul_i();
        let ob = &w1 - &w2.mul_i();
        for n in 1..=4usize {
            let a = -(&mu * 2i64);
            let b = -(&mu + &om);
            let cc = &ob - &mu + n as i64;
            let (v, _) = hyp_2f1_partition(&a, &b, &cc, &XComplex::one(p), n, c)?;
            let mut want = XComplex::one(p);
            for j in 1..=n as i64 {
                let num = gamma(&(&mu * 2i64 + &w1 * 2i64 + j), c)? * gamma(&(&ob - &mu + j), c)?;
                let den = gamma(&(&w1 * 2i64 + j), c)? * gamma(&(&ob + &mu + j), c)?;
                want = &want * &num / &den;
            }
            worst = worst.max(rel(&v, &want));
        }
    }
    Ok(worst)
}

fn cue_cells(ctx: &PrecisionContext, out: &mut Vec<CellSpec>) {
    let _ = ctx;
    for xi in ["0.3", "0.7", "1"] {
        for (label, div) in [("pi/4", 4u32), ("pi/2", 2), ("pi", 1)] {
            out.push(cell(
                "cue",
                format!("gap-vs-det/xi={xi},phi={label}"),
                0.5,
                Box::new(move |c| {
                    let p = c.prec();
                    let xi = d(p, xi);
                    let phi = pi(p) / div;
                    let run = cue_gap_sequence(&xi, &phi, 8, c)?;
                    let table = MomentTable::build(&MomentSpec::CueGap { xi: xi.clone(), phi: phi.clone() }, -9, 9, c)?;
                    let mut worst = 0f64;
                    for n in 1..=8 {
                        worst = worst.max(rel(&run.e_values[n], &toeplitz_det(0, n, &table, c)?.value));
                    }
                    Ok(worst)
                }),
            ));
            out.push(exact(
                "cue",
                format!("gap-e1/xi={xi},phi={label}"),
                Box::new(move |c| {
                    let p = c.prec();
                    let xi = d(p, xi);
                    let phi = pi(p) / div;
                    let run = cue_gap_sequence(&xi, &phi, 1, c)?;
                    let frac = XComplex::from_real(Float::with_val(p, &phi / (pi(p) * 2u32)));
                    Ok(rel(&run.e_values[1], &(1i64 - &(&xi * &frac))))
                }),
            ));
            out.push(cell(
                "cue",
                format!("gap-quadratic/xi={xi},phi={label}"),
                7.0 / 12.0,
                Box::new(move |c| {
                    let p = c.prec();
                    Ok(cue_gap_sequence(&d(p, xi), &(pi(p) / div), 8, c)?.residuals.max())
                }),
            ));
        }
    }
    out.push(cell(
        "cue",
        "moments-on-circle",
        2.0 / 3.0,
        Box::new(|c| {
            let p = c.prec();
            let mut worst = 0f64;
            for m in ["0.5", "1", "1.5", "0.37"] {
                let mu = d(p, m);
                let run = cue_moment_sequence(&mu, &XComplex::one(p), 10, c)?;
                let table = MomentTable::for_size(&MomentSpec::CueCharpoly { mu: mu.clone(), u: XComplex::one(p) }, 11, c)?;
                let ora = oracle_sequence(10, &table, c)?;
                for n in 1..=10 {
                    worst = worst.max(rel(&run.f_values[n], &ora.tau[n]));
                }
            }
            Ok(worst)
        }),
    ));
    out.push(cell(
        "cue",
        "moments-inside",
        0.5,
        Box::new(|c| {
            let p = c.prec();
            let u = d(p, "0.6");
            let mut worst = 0f64;
            for m in ["0.5", "0.7", "1.3,0.2"] {
                let mu = d(p, m);
                let run = cue_moment_sequence(&mu, &u, 8, c)?;
                let table = MomentTable::for_size(&MomentSpec::CueCharpoly { mu: mu.clone(), u: u.clone() }, 9, c)?;
                let ora = oracle_sequence(8, &table, c)?;
                for n in 1..=8 {
                    worst = worst.max(rel(&run.f_values[n], &ora.tau[n])).max(rel(&run.r_values[n], &ora.r[n]));
                }
            }
            Ok(worst)
        }),
    ));
    out.push(cell(
        "cue",
        "moments-functional-equation",
        0.5,
        Box::new(|c| {
            let p = c.prec();
            let u = d(p, "0.6");
            let big = u.recip();
            let mut worst = 0f64;
            for m in ["0.5", "0.7"] {
                let mu = d(p, m);
                let small = cue_moment_sequence(&mu, &u, 8, c)?;
                let large = cue_moment_sequence(&mu, &big, 8, c)?;
                // |1/u + z| = |1 + u z| / |u| for real u: determinants of the scaled table
                let table = MomentTable::for_size(&MomentSpec::CueCharpoly { mu: mu.clone(), u: u.clone() }, 9, c)?;
                let ora = oracle_sequence(8, &table, c)?;
                for n in 1..=8i64 {
                    let scale = XComplex::from_real(big.norm_sqr()).powc(&(&mu * n));
                    worst = worst.max(rel(&large.f_values[n as usize], &(&ora.tau[n as usize] * &scale)));
                    worst = worst.max(rel(&small.f_values[n as usize], &ora.tau[n as usize]));
                }
            }
            Ok(worst)
        }),
    ));
}

fn ising_cells(ctx: &PrecisionContext, out: &mut Vec<CellSpec>) {
    let _ = ctx;
    out.push(cell(
        "ising",
        "critical-point",
        2.0 / 3.0,
        Box::new(|c| {
            let p = c.prec();
            let run = ising_diagonal(&Float::with_val(p, 1), IsingPhase::Low, 10, c)?;
            let mut worst = 0f64;
            for n in 1..=10usize {
                let ni = n as i64;
                let s: i64 = if n % 2 == 0 { 1 } else { -1 };
                worst = worst.max(rel(&run.r_values[n], &(XComplex::int(p, -s) / ((2 * ni + 1) * (2 * ni - 1)))));
                worst = worst.max(rel(&run.rbar_values[n], &XComplex::int(p, s)));
                worst = worst.max(rel(&run.l_values[n], &(XComplex::int(p, ni) / (2 * ni + 1))));
                worst = worst.max(rel(&run.correlations[n], &ising_critical_correlation(n, c)?));
            }
            Ok(worst)
        }),
    ));
    out.push(exact(
        "ising",
        "temperature-extremes",
        Box::new(|c| {
            let p = c.prec();
            let cold = ising_diagonal(&Float::with_val(p, f64::INFINITY), IsingPhase::Low, 10, c)?;
            let hot = ising_diagonal(&Float::new(p), IsingPhase::High, 10, c)?;
            let (nh, h) = (d(p, "-0.5"), d(p, "0.5"));
            let mut worst = 0f64;
            let mut fact = Float::with_val(p, 1);
            for n in 1..=10u64 {
                fact *= n;
                let s: i64 = if n % 2 == 0 { 1 } else { -1 };
                let pn = pochhammer(&nh, n, c) * s;
                worst = worst.max(rel(&cold.r_values[n as usize], &pn.scale(&Float::with_val(p, fact.recip_ref()))));
                worst = worst.max(cold.rbar_values[n as usize].abs_f64());
                worst = worst.max(rel(&cold.correlations[n as usize], &XComplex::one(p)));
                let f1 = Float::with_val(p, &fact * (n + 1));
                worst = worst.max(rel(&hot.r_values[n as usize], &pn.scale(&f1.recip())));
                worst = worst.max(rel(&hot.rbar_values[n as usize], &(XComplex::from_real(fact.clone()) / pochhammer(&h, n, c) * s)));
                worst = worst.max(hot.correlations[n as usize].abs_f64());
            }
            Ok(worst)
        }),
    ));
    let cases: [(&str, IsingPhase); 6] = [
        ("1.2", IsingPhase::Low),
        ("2", IsingPhase::Low),
        ("5", IsingPhase::Low),
        ("0.2", IsingPhase::High),
        ("0.5", IsingPhase::High),
        ("0.8", IsingPhase::High),
    ];
    for (ks, phase) in cases {
        out.push(cell(
            "ising",
            format!("three-routes/k={ks}"),
            1.0 / 3.0,
            Box::new(move |c| {
                let p = c.prec();
                let k = Float::with_val(p, Float::parse(ks).map_err(|e| Error::Precondition(e.to_string()))?);
                let run = ising_diagonal(&k, phase, 6, c)?;
                let mut table = MomentTable::for_size(&MomentSpec::Ising { k: k.clone(), phase }, 7, c)?;
                if phase == IsingPhase::High {
                    table = table.gauged(&XComplex::from_real(k.clone()).square());
                }
                let ora = oracle_sequence(6, &table, c)?;
                let mut worst = 0f64;
                for n in 1..=6 {
                    let (cr, r, rb) = ising_via_hyp(&k, phase, n, c)?;
                    for (x, y) in [
                        (&run.correlations[n], &ora.tau[n]),
                        (&cr, &ora.tau[n]),
                        (&run.r_values[n], &ora.r[n]),
                        (&r, &ora.r[n]),
                        (&run.rbar_values[n], &ora.rbar[n]),
                        (&rb, &ora.rbar[n]),
                    ] {
                        worst = worst.max(rel(x, y));
                    }
                }
                Ok(worst)
            }),
        ));
    }
    out.push(fixed(
        "ising",
        "long-range-order/k=2,N=20",
        1e-3,
        Box::new(|c| {
            let p = c.prec();
            let run = ising_diagonal(&Float::with_val(p, 2), IsingPhase::Low, 20, c)?;
            let limit = Float::with_val(p, 0.75).sqrt().sqrt();
            Ok(Float::with_val(p, &run.correlations[20].re - &limit).to_f64().abs())
        }),
    ));
}

fn structure_cells(ctx: &PrecisionContext, out: &mut Vec<CellSpec>) {
    let p = ctx.prec();
    let z = XComplex::zero(p);
    let real_sets = vec![
        ("circle-0.2", WeightParams::on_circle(d(p, "0.2"), d(p, "0.2"), z.clone(), z.clone(), &Float::with_val(p, 1.1), ctx)),
        ("circle-0.45", WeightParams::on_circle(d(p, "0.45"), d(p, "0.45"), z.clone(), z.clone(), &Float::with_val(p, 2.6), ctx)),
        ("charpoly-0.6", WeightParams::new(d(p, "0.35"), d(p, "0.35"), z.clone(), z.clone(), d(p, "0.36"), ctx)),
    ];
    for (name, w) in real_sets {
        let w = w.expect("panel parameters");
        out.push(cell(
            "structure",
            format!("realness/{name}"),
            7.0 / 12.0,
            Box::new(move |c| Ok(realness_structure(&w.with_prec(c.prec()), 8, c)?.max())),
        ));
    }
    for (name, w) in generic_sets(ctx).into_iter().take(3) {
        out.push(cell(
            "structure",
            format!("avm/{name}"),
            7.0 / 12.0,
            Box::new(move |c| {
                let ora = run_oracle(&MomentSpec::General(w.with_prec(c.prec())), 9, c)?;
                let mut worst = 0f64;
                for n in 1..=8 {
                    worst = worst.max(check_avm(&ora, n, c)?.max());
                }
                Ok(worst)
            }),
        ));
    }
}

fn build(panel: Panel, ctx: &PrecisionContext) -> Vec<CellSpec> {
    let mut all = Vec::new();
    core_cells(ctx, &mut all);
    dpv_cells(ctx, &mut all);
    hyp_cells(ctx, &mut all);
    cue_cells(ctx, &mut all);
    ising_cells(ctx, &mut all);
    structure_cells(ctx, &mut all);
    all.into_iter().filter(|c| panel.admits(c.group)).collect()
}

/// Runs every cell of the panel, in parallel up to `jobs` threads; cell order in the report is fixed.
pub fn run_panel(panel: Panel, ctx: &PrecisionContext, jobs: Option<usize>) -> Result<VerifyReport> {
    ctx.validate()?;
    let specs = build(panel, ctx);
    let exec = |s: &CellSpec| {
        let start = Instant::now();
        let tolerance = s.tol.value(ctx);
        let (worst, detail) = match (s.check)(ctx) {
            Ok(v) => (if v.is_nan() { f64::INFINITY } else { v }, String::new()),
            Err(e) => (f64::INFINITY, e.to_string()),
        };
        Cell {
            group: s.group.to_string(),
            name: s.name.clone(),
            tolerance,
            worst,
            passed: worst < tolerance,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        }
    };
    let cells = match jobs {
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j.max(1))
                .build()
                .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
            pool.install(|| specs.par_iter().map(exec).collect())
        }
        None => specs.par_iter().map(exec).collect(),
    };
    Ok(VerifyReport { digits: ctx.decimal_digits, panel, cells })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panel_filters() {
        let ctx = PrecisionContext::default();
        let specs = build(Panel::Ising, &ctx);
        assert!(!specs.is_empty());
        assert!(specs.iter().all(|s| s.group == "ising"));
        assert!("bogus".parse::<Panel>().is_err());
        assert_eq!("ising-only".parse::<Panel>().unwrap(), Panel::Ising);
    }
}

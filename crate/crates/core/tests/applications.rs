use ptau::apps::*;
use ptau::toeplitz::oracle_sequence;
use ptau::weight::{IsingPhase, MomentSpec, MomentTable, WeightParams};
use ptau::xc::pi;
use ptau::{PrecisionContext, XComplex};
use rug::Float;

fn ctx() -> PrecisionContext {
    PrecisionContext::default()
}

#[test]
fn ising_high_phase_routes_agree() {
    let ctx = ctx();
    let p = ctx.prec();
    for ks in ["0.2", "0.5", "0.8"] {
        let k = Float::with_val(p, Float::parse(ks).unwrap());
        let run = ising_diagonal(&k, IsingPhase::High, 6, &ctx).unwrap();
        let kx = XComplex::from_real(k.clone());
        let table =
            MomentTable::for_size(&MomentSpec::Ising { k: k.clone(), phase: IsingPhase::High }, 7, &ctx).unwrap().gauged(&kx.square());
        let ora = oracle_sequence(6, &table, &ctx).unwrap();
        for n in 1..=6 {
            assert!(run.correlations[n].rel_diff(&ora.tau[n]) < 1e-35, "k={ks} C_{n}");
            assert!(run.r_values[n].rel_diff(&ora.r[n]) < 1e-35, "k={ks} r_{n}");
            assert!(run.rbar_values[n].rel_diff(&ora.rbar[n]) < 1e-35, "k={ks} rbar_{n}");
            let (c, r, rb) = ising_via_hyp(&k, IsingPhase::High, n, &ctx).unwrap();
            assert!(c.rel_diff(&ora.tau[n]) < 1e-35, "k={ks} hyp C_{n}: {}", c.rel_diff(&ora.tau[n]));
            assert!(r.rel_diff(&ora.r[n]) < 1e-35, "k={ks} hyp r_{n}");
            assert!(rb.rel_diff(&ora.rbar[n]) < 1e-35, "k={ks} hyp rbar_{n}");
        }
    }
}

#[test]
fn ising_critical_point_closed_forms() {
    let ctx = ctx();
    let p = ctx.prec();
    let run = ising_diagonal(&Float::with_val(p, 1), IsingPhase::Low, 10, &ctx).unwrap();
    for n in 1..=10usize {
        let ni = n as i64;
        let sign = if n % 2 == 0 { 1 } else { -1 };
        let r = XComplex::int(p, -sign) / ((2 * ni + 1) * (2 * ni - 1));
        assert!(run.r_values[n].rel_diff(&r) < 1e-40, "r_{n}");
        assert!(run.rbar_values[n].rel_diff(&XComplex::int(p, sign)) < 1e-40, "rbar_{n}");
        let l = XComplex::int(p, ni) / (2 * ni + 1);
        assert!(run.l_values[n].rel_diff(&l) < 1e-40, "l_{n}");
        let c = ising_critical_correlation(n, &ctx).unwrap();
        assert!(run.correlations[n].rel_diff(&c) < 1e-40, "C_{n}");
    }
    let c1 = XComplex::from_real(pi(p)).recip() * 2i64;
    assert!(run.correlations[1].rel_diff(&c1) < 1e-50);
}

#[test]
fn ising_temperature_extremes() {
    let ctx = ctx();
    let p = ctx.prec();
    let zero = ising_diagonal(&Float::with_val(p, f64::INFINITY), IsingPhase::Low, 6, &ctx).unwrap();
    assert!(zero.correlations.iter().all(|c| c.rel_diff(&XComplex::one(p)) == 0.0));
    assert!(zero.rbar_values[1..].iter().all(|v| v.is_zero()));
    assert!(zero.r_values[2].rel_diff(&XComplex::dec(p, "-0.125")) < 1e-55);
    let hot = ising_diagonal(&Float::new(p), IsingPhase::High, 6, &ctx).unwrap();
    assert!(hot.correlations[1..].iter().all(|v| v.is_zero()));
    assert!(hot.rbar_values[1].rel_diff(&XComplex::int(p, -2)) < 1e-55);
    assert!(hot.r_values[1].rel_diff(&XComplex::dec(p, "0.25")) < 1e-55);
}

#[test]
fn ising_correlation_approaches_long_range_order() {
    let ctx = ctx();
    let p = ctx.prec();
    let k = Float::with_val(p, 2);
    let run = ising_diagonal(&k, IsingPhase::Low, 20, &ctx).unwrap();
    let limit = Float::with_val(p, 0.75).sqrt().sqrt();
    let gaps: Vec<f64> = run.correlations.iter().map(|c| (Float::with_val(p, &c.re - &limit)).to_f64().abs()).collect();
    assert!(gaps[20] < 1e-3, "{}", gaps[20]);
    assert!(gaps[1..].windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn ising_rejects_wrong_phase() {
    let ctx = ctx();
    let p = ctx.prec();
    assert!(matches!(ising_diagonal(&Float::with_val(p, 0.5), IsingPhase::Low, 3, &ctx), Err(ptau::Error::Phase(_))));
    assert!(matches!(ising_diagonal(&Float::with_val(p, 2), IsingPhase::High, 3, &ctx), Err(ptau::Error::Phase(_))));
}

#[test]
fn cue_moment_special_points() {
    let ctx = ctx();
    let p = ctx.prec();
    let mu = XComplex::dec(p, "0.37");
    let on = cue_moment_sequence(&mu, &XComplex::cis(&Float::with_val(p, 0.4)), 6, &ctx).unwrap();
    assert_eq!(on.method, Method::ClosedForm);
    let zero = cue_moment_sequence(&mu, &XComplex::zero(p), 6, &ctx).unwrap();
    assert!(zero.f_values.iter().all(|f| f.rel_diff(&XComplex::one(p)) == 0.0));
    let table = MomentTable::for_size(&MomentSpec::CueCharpoly { mu: mu.clone(), u: XComplex::zero(p) }, 7, &ctx).unwrap();
    let ora = oracle_sequence(6, &table, &ctx).unwrap();
    for n in 1..=6 {
        assert!(zero.r_values[n].rel_diff(&ora.r[n]) < 1e-50, "r_{n}");
    }
}

#[test]
fn cue_moment_functional_equation() {
    let ctx = ctx();
    let p = ctx.prec();
    let mu = XComplex::dec(p, "0.6,0.1");
    let u = XComplex::dec(p, "0.6");
    let big = u.recip();
    let a = cue_moment_sequence(&mu, &u, 8, &ctx).unwrap();
    let b = cue_moment_sequence(&mu, &big, 8, &ctx).unwrap();
    for n in 0..=8i64 {
        let want = &a.f_values[n as usize] * &XComplex::from_real(big.norm_sqr()).powc(&(&mu * n));
        assert!(b.f_values[n as usize].rel_diff(&want) < 1e-45);
    }
}

#[test]
fn cue_gap_trivial_and_monotone() {
    let ctx = ctx();
    let p = ctx.prec();
    let phi = Float::with_val(p, 1.3);
    let run = cue_gap_sequence(&XComplex::zero(p), &phi, 6, &ctx).unwrap();
    assert!(run.e_values.iter().all(|e| e.rel_diff(&XComplex::one(p)) == 0.0));
    assert!(run.x_values[1..].iter().all(|x| x.is_zero()));
    let one = XComplex::one(p);
    let mut prev: Option<Vec<f64>> = None;
    for j in 1..=9 {
        let phi = pi(p) * Float::with_val(p, j) / 10u32;
        let e: Vec<f64> = cue_gap_sequence(&one, &phi, 6, &ctx).unwrap().e_values.iter().map(|v| v.re.to_f64()).collect();
        assert!(e.iter().all(|&v| (0.0..=1.0).contains(&v)));
        if let Some(q) = prev {
            assert!(e[1..].iter().zip(&q[1..]).all(|(a, b)| a < b));
        }
        prev = Some(e);
    }
}

#[test]
fn realness_on_symmetric_weights() {
    let ctx = ctx();
    let p = ctx.prec();
    let d = |s| XComplex::dec(p, s);
    let w = WeightParams::on_circle(d("0.2"), d("0.2"), d("0"), d("0"), &Float::with_val(p, 1.1), &ctx).unwrap();
    let rep = realness_structure(&w, 8, &ctx).unwrap();
    assert!(rep.max() < 1e-35, "{:?}", rep.worst());
    let w = WeightParams::new(d("0.35"), d("0.35"), d("0"), d("0"), d("0.36"), &ctx).unwrap();
    let rep = realness_structure(&w, 8, &ctx).unwrap();
    assert!(rep.max() < 1e-35, "{:?}", rep.worst());
    // omega != mu breaks the reflection symmetry of the weight
    let w = WeightParams::on_circle(d("0.2"), d("0.3"), d("0"), d("0"), &Float::with_val(p, 1.1), &ctx).unwrap();
    assert!(realness_structure(&w, 4, &ctx).unwrap().max() > 1e-3);
}

#[test]
fn cue_moments_on_the_circle_match_determinants() {
    let ctx = ctx();
    let p = ctx.prec();
    for m in ["0.5", "1", "1.5", "0.37"] {
        let mu = XComplex::dec(p, m);
        let run = cue_moment_sequence(&mu, &XComplex::one(p), 10, &ctx).unwrap();
        let table = MomentTable::for_size(&MomentSpec::CueCharpoly { mu: mu.clone(), u: XComplex::one(p) }, 11, &ctx).unwrap();
        let ora = oracle_sequence(10, &table, &ctx).unwrap();
        for n in 1..=10 {
            assert!(run.f_values[n].rel_diff(&ora.tau[n]) < 1e-40, "mu={m} F_{n}: {}", run.f_values[n].rel_diff(&ora.tau[n]));
            assert!(run.r_values[n].rel_diff(&ora.r[n]) < 1e-40, "mu={m} r_{n}");
        }
    }
}

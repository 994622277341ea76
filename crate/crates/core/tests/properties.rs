use proptest::prelude::*;
use ptau::dpv::{l01_scheme, l14_scheme, s4_x3_transform, x3_definition_residuals, HamiltonianState, Scheme};
use ptau::hyp2f1::gauss_2f1;
use ptau::partition::{hyp_2f1_partition, partitions_up_to, schur_equal_args, Partition};
use ptau::recurrence::{residuals, run_oracle};
use ptau::special::gamma;
use ptau::toeplitz::toeplitz_det;
use ptau::weight::{moment_general, moment_general_dphi, MomentSpec, MomentTable, WeightParams};
use ptau::{PrecisionContext, XComplex};
use rug::Float;

fn ctx() -> PrecisionContext {
    PrecisionContext::default()
}

fn cx(p: u32, re: f64, im: f64) -> XComplex {
    XComplex::from_real(Float::with_val(p, re)) + XComplex::from_real(Float::with_val(p, im)).mul_i()
}

/// Number of semistandard tableaux of shape kappa with entries in 1..=n, by direct filling.
fn count_ssyt(kappa: &[usize], n: usize) -> u64 {
    let cells: Vec<(usize, usize)> = kappa.iter().enumerate().flat_map(|(i, &l)| (0..l).map(move |j| (i, j))).collect();
    let mut grid = vec![vec![0usize; kappa.first().copied().unwrap_or(0)]; kappa.len()];
    fn fill(k: usize, cells: &[(usize, usize)], grid: &mut Vec<Vec<usize>>, n: usize) -> u64 {
        if k == cells.len() {
            return 1;
        }
        let (i, j) = cells[k];
        let lo = {
            let left = if j > 0 { grid[i][j - 1] } else { 1 };
            let up = if i > 0 { grid[i - 1][j] + 1 } else { 1 };
            left.max(up)
        };
        let mut total = 0;
        for v in lo..=n {
            grid[i][j] = v;
            total += fill(k + 1, cells, grid, n);
        }
        total
    }
    fill(0, &cells, &mut grid, n)
}

#[test]
fn schur_hook_content_matches_tableaux_count() {
    let ctx = ctx();
    let p = ctx.prec();
    let t = cx(p, 0.7, -0.3);
    for n in 1..=4 {
        for kappa in partitions_up_to(6, 6) {
            let brute = t.powi(kappa.weight() as i64) * count_ssyt(kappa.parts(), n) as i64;
            let v = schur_equal_args(&kappa, &t, n, &ctx);
            assert!(v.abs_diff(&brute) <= 1e-55 * brute.abs_f64().max(1.0), "{:?} n={n}", kappa.parts());
        }
    }
}

#[test]
fn gauss_summation_terminating_matrix_cases() {
    let ctx = ctx();
    assert!(ptau::verify::gauss_summation_gap(&ctx).unwrap() < 1e-45);
}

#[test]
fn dodgson_identity_on_generic_weight() {
    let ctx = ctx();
    let p = ctx.prec();
    let w = WeightParams::new(
        cx(p, 0.3, 0.1),
        cx(p, 0.2, 0.0),
        cx(p, 0.15, 0.0),
        XComplex::zero(p),
        cx(p, 0.6 * 0.7f64.cos(), 0.6 * 0.7f64.sin()),
        &ctx,
    )
    .unwrap();
    let spec = MomentSpec::General(w);
    let table = MomentTable::for_size(&spec, 12, &ctx).unwrap();
    let run = run_oracle(&spec, 10, &ctx).unwrap();
    let det = |n| toeplitz_det(0, n, &table, &ctx).unwrap().value;
    for n in 1..=10 {
        let lhs = det(n + 1) * det(n - 1) / det(n).square();
        let rhs = 1i64 - &(&run.r[n] * &run.rbar[n]);
        assert!(lhs.rel_diff(&rhs) < 1e-40, "N={n}");
    }
}

#[test]
fn schemes_keep_the_alpha_constraint() {
    let ctx = ctx();
    let p = ctx.prec();
    let z = XComplex::zero(p);
    let w = WeightParams::on_circle(cx(p, 0.3, 0.0), cx(p, 0.2, 0.0), cx(p, 0.15, 0.0), z, &Float::with_val(p, 1.1), &ctx).unwrap();
    let w0 = moment_general(0, &w, &ctx).unwrap();
    let dw0 = moment_general_dphi(0, &w, &ctx).unwrap();
    let one = XComplex::one(p);
    for run in [l01_scheme(&one, &w0, &dw0, &w, 8, &ctx).unwrap(), l14_scheme(&one, &w0, &dw0, &w, 8, &ctx).unwrap()] {
        for st in &run.states {
            let a = &st.alphas;
            let s = &a[0] + &a[1] + &(&a[2] * 2i64) + &a[3] + &a[4];
            assert!(s.abs_diff(&one) < 1e-50, "N={}", st.n);
        }
    }
}

#[test]
fn cue_moment_integer_mu_single_size_is_binomial_polynomial() {
    let ctx = ctx();
    let p = ctx.prec();
    for m in 1..=3u32 {
        let mu = XComplex::int(p, m as i64);
        let u = XComplex::dec(p, "0.45");
        let run = ptau::apps::cue_moment_sequence(&mu, &u, 4, &ctx).unwrap();
        let x = XComplex::from_real(u.norm_sqr());
        let mut want = XComplex::zero(p);
        for k in 0..=m {
            let b = rug::Integer::from(rug::Integer::binomial_u(m, k)).to_i64().unwrap();
            want += &(x.powi(k as i64) * (b * b));
        }
        assert!(run.f_values[1].rel_diff(&want) < 1e-55, "mu={m}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gamma_recursion(re in 0.1f64..5.0, im in -5.0f64..5.0) {
        let ctx = ctx();
        let z = cx(ctx.prec(), re, im);
        let lhs = gamma(&(&z + 1i64), &ctx).unwrap();
        let rhs = &z * &gamma(&z, &ctx).unwrap();
        prop_assert!(lhs.rel_diff(&rhs) < ctx.tolerance);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn one_variable_series_is_gauss(
        a in (-1.5f64..1.5, -0.5f64..0.5),
        b in (-1.5f64..1.5, -0.5f64..0.5),
        c in (0.3f64..2.5, -0.5f64..0.5),
        r in 0.0f64..0.8,
        th in -3.0f64..3.0,
    ) {
        let ctx = ctx();
        let p = ctx.prec();
        let (a, b, c) = (cx(p, a.0, a.1), cx(p, b.0, b.1), cx(p, c.0, c.1));
        let t = cx(p, r * th.cos(), r * th.sin());
        let (v, _) = hyp_2f1_partition(&a, &b, &c, &t, 1, &ctx).unwrap();
        let g = gauss_2f1(&a, &b, &c, &t, &ctx).unwrap();
        prop_assert!(v.rel_diff(&g) < ctx.tolerance);
    }

    #[test]
    fn partition_series_symmetric_in_upper_parameters(
        a in (-1.5f64..1.5, -0.5f64..0.5),
        b in (-1.5f64..1.5, -0.5f64..0.5),
        n in 2usize..5,
        r in 0.0f64..0.7,
        th in -3.0f64..3.0,
    ) {
        let ctx = ctx();
        let p = ctx.prec();
        let (a, b) = (cx(p, a.0, a.1), cx(p, b.0, b.1));
        let c = cx(p, 4.3, 0.2);
        let t = cx(p, r * th.cos(), r * th.sin());
        let (x, _) = hyp_2f1_partition(&a, &b, &c, &t, n, &ctx).unwrap();
        let (y, _) = hyp_2f1_partition(&b, &a, &c, &t, n, &ctx).unwrap();
        prop_assert!(x.rel_diff(&y) < ctx.tolerance);
    }

    #[test]
    fn conjugation_is_an_involution(parts in proptest::collection::vec(0usize..7, 0..6)) {
        let mut parts = parts;
        parts.sort_unstable_by(|a, b| b.cmp(a));
        let k = Partition::new(parts).unwrap();
        prop_assert_eq!(k.conjugate().conjugate(), k.clone());
        prop_assert_eq!(k.conjugate().weight(), k.weight());
    }

    #[test]
    fn x3_is_an_involution_and_maps_definitions(
        q in (-2.0f64..2.0, -2.0f64..2.0),
        pp in (-2.0f64..2.0, -2.0f64..2.0),
        t in (-0.9f64..0.9, 0.1f64..1.5),
        al in proptest::collection::vec((-1.0f64..1.0, -0.5f64..0.5), 4),
    ) {
        let ctx = ctx();
        let p = ctx.prec();
        let mut alphas: Vec<XComplex> = al.iter().map(|&(re, im)| cx(p, re, im)).collect();
        // alpha2 fixed by the constraint
        let rest = &alphas[0] + &alphas[1] + &alphas[2] + &alphas[3];
        alphas.insert(2, (1i64 - &rest) / 2i64);
        let alphas: [XComplex; 5] = alphas.try_into().unwrap();
        let (q, pv, t) = (cx(p, q.0, q.1), cx(p, pp.0, pp.1), cx(p, t.0, t.1));
        let k = ptau::dpv::hamiltonian_k(&q, &pv, &t, &alphas);
        let st = HamiltonianState { n: 1, q, p: pv, t, alphas, k, scheme: Scheme::L01 };
        let back = s4_x3_transform(&s4_x3_transform(&st, &ctx).unwrap(), &ctx).unwrap();
        prop_assert!(back.q.abs_diff(&st.q) < 1e-50);
        prop_assert!(back.p.abs_diff(&st.p) < 1e-50);
        prop_assert!(back.t.abs_diff(&st.t) < 1e-50);
        prop_assert!(x3_definition_residuals(&st, &ctx).unwrap().max() < 1e-35);
    }

    #[test]
    fn ladder_residuals_vanish_on_oracle_sequences(
        mu in (0.05f64..0.9, -0.3f64..0.3),
        w1 in (-0.4f64..0.8, -0.3f64..0.3),
        w2 in (-0.4f64..0.4, -0.3f64..0.3),
        r in 0.2f64..0.7,
        th in 0.2f64..3.0,
    ) {
        let ctx = ctx();
        let p = ctx.prec();
        let w = WeightParams::new(cx(p, mu.0, mu.1), cx(p, w1.0, w1.1), cx(p, w2.0, w2.1), XComplex::zero(p), cx(p, r * th.cos(), r * th.sin()), &ctx).unwrap();
        let run = run_oracle(&MomentSpec::General(w), 6, &ctx).unwrap();
        for n in 1..=5 {
            let rep = residuals(&run, n);
            prop_assert!(rep.max() < 1e-35, "{:?}", rep.worst());
        }
    }

    #[test]
    fn cue_gap_determinants_are_probabilities(xi in 0.0f64..1.0, phi in 0.05f64..3.1) {
        let ctx = ctx();
        let p = ctx.prec();
        let spec = MomentSpec::CueGap { xi: cx(p, xi, 0.0), phi: Float::with_val(p, phi) };
        let table = MomentTable::for_size(&spec, 9, &ctx).unwrap();
        for n in 1..=8 {
            let v = toeplitz_det(0, n, &table, &ctx).unwrap().value;
            prop_assert!(v.im.to_f64().abs() < 1e-45);
            let re = v.re.to_f64();
            prop_assert!(re > 0.0 && re <= 1.0 + 1e-45);
        }
    }
}

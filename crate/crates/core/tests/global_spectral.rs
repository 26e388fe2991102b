use num_rational::Ratio;
use overconvergent::automorphic::*;
use overconvergent::fredholm::*;
use overconvergent::induced::{ModuleSpec, Weight};
use overconvergent::linalg::{fredholm_coefficients, Matrix};
use overconvergent::padic::{PadicScalar, Zmod};
use overconvergent::quaternion::*;
use overconvergent::ring::SeriesRing;
use overconvergent::weight::{TorusCharacter, WeightDisc};
use proptest::prelude::*;

const P: u64 = 3;
const N: u32 = 30;

fn iwahori() -> DoubleQuotient {
    build_double_quotient(P, Level::Iwahori, N + 5).unwrap()
}

fn space(dq: &DoubleQuotient, n: i64, k: u32, d: usize) -> GlobalSpace {
    let spec = ModuleSpec::new(P, k, d, N, Weight::Point(TorusCharacter::algebraic(n, 0))).unwrap();
    GlobalSpace::new(spec, dq.clone(), LayoutChoice::Auto).unwrap()
}

/// tr Sym^n(g) for g of reduced norm 1 and reduced trace t.
fn sym_trace(n: i64, t: i64) -> i64 {
    let (mut a, mut b) = (1i64, t);
    if n == 0 {
        return 1;
    }
    for _ in 1..n {
        let c = t * b - a;
        a = b;
        b = c;
    }
    b
}

#[test]
fn classical_dimension_matches_the_character_average() {
    for level in [Level::Maximal, Level::Iwahori] {
        let dq = build_double_quotient(P, level, N).unwrap();
        let t5 = hecke_coset_data(Operator::T(5), &dq).unwrap();
        for n in (0..=10).step_by(2) {
            let want: Ratio<i64> = dq
                .stabilizers
                .iter()
                .map(|g| {
                    let s: i64 = g.iter().map(|x| sym_trace(n, x.doubled()[0])).sum();
                    Ratio::new(s, g.len() as i64)
                })
                .sum();
            let b = classical_brandt(&t5, (n, 0), &dq).unwrap();
            assert_eq!(Ratio::from_integer(b.classical_dim as i64), want, "{level} n={n}");
        }
    }
}

#[test]
fn brandt_traces_are_rational_integers_at_maximal_level() {
    let dq = build_double_quotient(P, Level::Maximal, N).unwrap();
    for q in [5u64, 7, 11] {
        let data = hecke_coset_data(Operator::T(q), &dq).unwrap();
        // weight 0: the constant function, eigenvalue q + 1
        let b = classical_brandt(&data, (0, 0), &dq).unwrap();
        assert_eq!(brandt_trace(&b), Some(Ratio::from_integer(q as i64 + 1)));
    }
}

#[test]
fn identity_operator_is_the_identity_on_invariants() {
    let dq = iwahori();
    for k in [1u32, 2] {
        let gs = space(&dq, 2, k, 8);
        let id = identity_operator(&gs).unwrap();
        assert_eq!(id.shift, 0);
        let ctx = gs.spec.ctx();
        assert_eq!(id.matrix, Matrix::identity(&ctx, gs.dim()));
    }
}

#[test]
fn trace_of_up_is_minus_the_first_coefficient() {
    let dq = iwahori();
    let up = hecke_coset_data(Operator::Up, &dq).unwrap();
    let gs = space(&dq, 0, 1, 20);
    let b = assemble_hecke(&gs, &up, Convention::Indicator).unwrap();
    let ctx = gs.spec.ctx();
    let tr = (0..b.matrix.rows()).fold(0, |acc, i| ctx.add(acc, *b.matrix.get(i, i)));
    let s = fredholm_series(&b, 4).unwrap();
    let c1 = PadicScalar::from_residue(&ctx, ctx.neg(tr)).cap_abs(s.coeffs[1].abs_precision());
    assert!(s.coeffs[1].agrees_with(&c1));
}

fn compact(seed: &[u64], n: usize, ctx: &Zmod) -> Matrix<u128> {
    // row i divisible by p^i
    Matrix::from_fn(n, n, |i, j| ctx.mul(ctx.reduce(seed[(i * n + j) % seed.len()] as u128), ctx.p_pow(i as u32)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fredholm_series_is_conjugation_invariant(seed in prop::collection::vec(any::<u64>(), 16..40), perm in Just((0..6).collect::<Vec<usize>>()).prop_shuffle()) {
        let ctx = Zmod::new(P, 20).unwrap();
        let m = compact(&seed, 6, &ctx);
        let pm = m.select(&perm, &perm);
        prop_assert_eq!(fredholm_coefficients(&ctx, &m, 6), fredholm_coefficients(&ctx, &pm, 6));
    }

    #[test]
    fn fredholm_series_is_multiplicative_on_blocks(a in prop::collection::vec(any::<u64>(), 9), b in prop::collection::vec(any::<u64>(), 16)) {
        let ctx = Zmod::new(P, 20).unwrap();
        let (ma, mb) = (compact(&a, 3, &ctx), compact(&b, 4, &ctx));
        let zero = |r, c| Matrix::filled(r, c, 0u128);
        let m = Matrix::from_blocks(&[vec![ma.clone(), zero(3, 4)], vec![zero(4, 3), mb.clone()]]);
        let (fa, fb) = (fredholm_coefficients(&ctx, &ma, 7), fredholm_coefficients(&ctx, &mb, 7));
        let mut prod = vec![0u128; 8];
        for (i, x) in fa.iter().enumerate() {
            for (j, y) in fb.iter().enumerate() {
                if i + j < 8 {
                    prod[i + j] = ctx.add(prod[i + j], ctx.mul(*x, *y));
                }
            }
        }
        let full = fredholm_coefficients(&ctx, &m, 7);
        prop_assert_eq!(&full[..], &prod[..full.len()]);
    }
}

fn family(dq: &DoubleQuotient, d: usize, t: usize, s_order: usize) -> FamilySeries {
    let up = hecke_coset_data(Operator::Up, dq).unwrap();
    let disc = WeightDisc::new(P, TorusCharacter::trivial(), 0, s_order).unwrap();
    let spec = ModuleSpec::new(P, 1, d, N, Weight::Family(disc)).unwrap();
    let gs = GlobalSpace::new(spec, dq.clone(), LayoutChoice::Auto).unwrap();
    let ring = disc.series_ring(gs.spec.ctx());
    let b = assemble_in(&ring, &disc, &gs, &up, Degrees::square(d), Convention::Indicator).unwrap();
    family_series(&b, &ring, t).unwrap()
}

#[test]
fn family_specializes_to_the_center_exactly() {
    let dq = iwahori();
    let up = hecke_coset_data(Operator::Up, &dq).unwrap();
    let fam = family(&dq, 20, 6, 4);
    let gs = space(&dq, 0, 1, 20);
    let direct = fredholm_series(&assemble_hecke(&gs, &up, Convention::Indicator).unwrap(), 6).unwrap();
    let sp = fam.specialize(0).unwrap();
    for m in 0..=6 {
        let (x, y) = (&sp.coeffs[m], &direct.coeffs[m]);
        assert_eq!(x.abs_precision(), y.abs_precision());
        assert!(x.distance_valuation(y) >= x.abs_precision(), "m={m}");
    }
}

#[test]
fn family_specialization_is_honest_at_other_points() {
    let dq = iwahori();
    let up = hecke_coset_data(Operator::Up, &dq).unwrap();
    let fam = family(&dq, 20, 6, 4);
    let disc = WeightDisc::new(P, TorusCharacter::trivial(), 0, 4).unwrap();
    for n in [2i64, 4] {
        let s0 = disc.algebraic_point(n).unwrap();
        let sp = fam.specialize(s0).unwrap();
        let gs = space(&dq, n, 1, 20);
        let direct = fredholm_series(&assemble_hecke(&gs, &up, Convention::Indicator).unwrap(), 6).unwrap();
        for m in 0..=6 {
            let (x, y) = (&sp.coeffs[m], &direct.coeffs[m]);
            assert!(x.distance_valuation(y) >= x.abs_precision().min(y.abs_precision()), "n={n} m={m}");
        }
    }
}

#[test]
fn family_derivative_matches_a_finite_difference() {
    let dq = iwahori();
    let fam = family(&dq, 20, 6, 6);
    let ctx = fam.ctx();
    let ring = SeriesRing::new(ctx, fam.s_order);
    let dp = fam.derivative_at_zero();
    for e in [2u32, 3] {
        let h = ctx.p_pow(e);
        for (m, c) in fam.coeffs.iter().enumerate() {
            // P(h) - P(0) - h P'(0) only has s^l terms with l >= 2
            let diff = ctx.sub(ctx.sub(ring.eval(c, h), c[0]), ctx.mul(h, dp[m]));
            if let Some(v) = ctx.valuation(diff) {
                assert!(v >= 2 * e, "m={m} e={e} v={v}");
            }
        }
    }
}

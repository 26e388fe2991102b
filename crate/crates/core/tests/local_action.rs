use overconvergent::induced::*;
use overconvergent::linalg::Matrix;
use overconvergent::padic::{PadicScalar, Zmod};
use overconvergent::quaternion::{split_at_p, HurwitzQuat};
use overconvergent::weight::TorusCharacter;
use proptest::prelude::*;

const P: u64 = 3;
const N: u32 = 24;

/// Entries (a, b, c, d) of an Iwahori element (`contract` = false) or of
/// a contracting monoid element.
fn monoid(contract: bool) -> impl Strategy<Value = [i64; 4]> {
    (1i64..200, -200i64..200, -60i64..60, 1i64..200).prop_filter_map("determinant", move |(a, b, c, d)| {
        let a = if a % 3 == 0 { a + 1 } else { a };
        let c = 3 * c;
        let d = if contract { 3 * d } else if d % 3 == 0 { d + 1 } else { d };
        (a * d - b * c != 0).then_some([a, b, c, d])
    })
}

fn spec(n: i64, k: u32, d: usize) -> ModuleSpec {
    ModuleSpec::new(P, k, d, N, Weight::Point(TorusCharacter::algebraic(n, 0))).unwrap()
}

fn elem(m: [i64; 4]) -> MonoidElement {
    MonoidElement::from_i64(P, m, N + 4).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn monoid_is_closed(g in monoid(false), h in monoid(true)) {
        let (g, h) = (elem(g), elem(h));
        let gh = g.mul(&h).unwrap();
        prop_assert!(gh.is_contracting());
        let back = gh.factors.reassemble().unwrap();
        for i in 0..4 {
            prop_assert!(back[i].agrees_with(&gh.entries[i]));
        }
    }

    #[test]
    fn action_is_a_cocycle_up_to_the_tail(g in monoid(false), h in monoid(false), n in 0i64..5) {
        let (k, d) = (1u32, 12usize);
        let s = spec(n, k, d);
        let ctx = s.ctx();
        let (g, h) = (elem(g), elem(h));
        let mg = operator_matrix(&g, &s).unwrap().matrix;
        let mh = operator_matrix(&h, &s).unwrap().matrix;
        let mgh = operator_matrix(&g.mul(&h).unwrap(), &s).unwrap().matrix;
        let prod = mg.mul(&ctx, &mh);
        for i in 0..s.dim() {
            for (col, bj) in s.basis().iter().enumerate() {
                let diff = ctx.sub(*mgh.get(i, col), *prod.get(i, col));
                let floor = ((d + 1 - bj.degree) as u32) * (k + 1);
                if let Some(v) = ctx.valuation(diff) {
                    prop_assert!(v >= floor.min(N), "entry ({i},{col}) valuation {v} below {floor}");
                }
            }
        }
    }

    #[test]
    fn iwahori_entries_decay_below_the_diagonal(g in monoid(false), n in 0i64..5, k in 1u32..3) {
        let s = spec(n, k, 10);
        let ctx = s.ctx();
        let m = operator_matrix(&elem(g), &s).unwrap().matrix;
        let basis = s.basis();
        for (r, bl) in basis.iter().enumerate() {
            for (c, bj) in basis.iter().enumerate() {
                if bl.degree > bj.degree {
                    if let Some(v) = ctx.valuation(*m.get(r, c)) {
                        prop_assert!(v as usize >= ((bl.degree - bj.degree) * (k as usize + 1)).min(N as usize));
                    }
                }
            }
        }
    }

    #[test]
    fn locally_algebraic_span_is_invariant(g in monoid(false), h in monoid(true), n in 0usize..5) {
        let s = spec(n as i64, 1, 10);
        let inside = locally_algebraic_indices(n, &s);
        let outside: Vec<usize> = (0..s.dim()).filter(|i| !inside.contains(i)).collect();
        for x in [elem(g), elem(h)] {
            let m = operator_matrix(&x, &s).unwrap().matrix;
            prop_assert!(m.select(&outside, &inside).entries().iter().all(|&e| e == 0));
        }
    }

    #[test]
    fn splitting_is_a_ring_map(x in prop::array::uniform4(-6i64..6), y in prop::array::uniform4(-6i64..6), half in any::<bool>(), half2 in any::<bool>()) {
        let q = |v: [i64; 4], h: bool| {
            if h { HurwitzQuat::from_doubled(v.map(|c| 2 * c + 1)).unwrap() } else { HurwitzQuat::from_integers(v) }
        };
        let (a, b) = (q(x, half), q(y, half2));
        let split = split_at_p(P, N).unwrap();
        let z = split.ctx();
        let mat = |m: [u128; 4]| Matrix::from_rows(vec![vec![m[0], m[1]], vec![m[2], m[3]]]);
        let lhs = mat(split.image_residues(&a.mul(&b)));
        let rhs = mat(split.image_residues(&a)).mul(&z, &mat(split.image_residues(&b)));
        prop_assert_eq!(lhs, rhs);
        let m = split.image_residues(&a);
        prop_assert_eq!(z.sub(z.mul(m[0], m[3]), z.mul(m[1], m[2])), z.from_i64(a.nrd()));
    }
}

#[test]
fn factorization_of_a_lower_unipotent() {
    let s = |x: i64| PadicScalar::from_i64(P, x, 20).unwrap();
    let f = iwahori_factorize(&[s(1), s(0), s(6), s(1)]).unwrap();
    assert!(f.nbar.agrees_with(&s(6)));
    assert!(f.n.is_zero());
}

#[test]
fn truncated_spaces_match_their_dimension() {
    let s = spec(2, 2, 7);
    assert_eq!(s.dim(), s.cosets() * 8);
    assert_eq!(s.basis().len(), s.dim());
    let ctx = Zmod::new(P, N).unwrap();
    let m = operator_matrix(&MonoidElement::identity(P, N + 4), &s).unwrap().matrix;
    assert_eq!(m, Matrix::identity(&ctx, s.dim()));
}

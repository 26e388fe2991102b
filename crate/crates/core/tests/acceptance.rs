//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits 0;
//! set ACCEPTANCE_STRICT=1 to exit 1 when any criterion fails.

use std::collections::BTreeMap;

use num_rational::Ratio;
use overconvergent::automorphic::*;
use overconvergent::fredholm::*;
use overconvergent::induced::*;
use overconvergent::linalg::Matrix;
use overconvergent::padic::{newton_polygon, PadicPoly, PadicScalar, Slope, Zmod};
use overconvergent::quaternion::*;
use overconvergent::ring::SeriesRing;
use overconvergent::weight::{TorusCharacter, WeightDisc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const P: u64 = 3;
const D: usize = 50;
const T: usize = 12;
const N: u32 = 30;

type Outcome = overconvergent::Result<(bool, String)>;

struct Ctx {
    dq: DoubleQuotient,
    up: HeckeCosetData,
}

impl Ctx {
    fn space(&self, n: i64, k: u32, d: usize, choice: LayoutChoice) -> overconvergent::Result<GlobalSpace> {
        let spec = ModuleSpec::new(P, k, d, N, Weight::Point(TorusCharacter::algebraic(n, 0)))?;
        GlobalSpace::new(spec, self.dq.clone(), choice)
    }

    fn up_series(&self, n: i64, k: u32, d: usize, t: usize) -> overconvergent::Result<FredholmSeries> {
        let gs = self.space(n, k, d, LayoutChoice::Auto)?;
        fredholm_series(&assemble_hecke(&gs, &self.up, Convention::Indicator)?, t)
    }
}

fn slopes_below(table: &SlopeTable, bound: Slope) -> BTreeMap<Slope, usize> {
    let mut m = BTreeMap::new();
    for e in table.below(bound) {
        *m.entry(e.slope).or_insert(0) += e.mult;
    }
    m
}

fn fmt_multiset(m: &BTreeMap<Slope, usize>) -> String {
    let v: Vec<String> = m.iter().map(|(s, k)| format!("{s}^{k}")).collect();
    format!("[{}]", v.join(", "))
}

fn control_theorem(c: &Ctx) -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for n in [0i64, 2, 4, 6, 8] {
        let oc = SlopeTable::from_series(&c.up_series(n, 1, D, T)?, Convention::Indicator)?;
        let cl = SlopeTable::from_brandt(&classical_brandt(&c.up, (n, 0), &c.dq)?, P, Convention::Indicator)?;
        let bound = small_slope_bound(&TorusCharacter::algebraic(n, 0), 1)?;
        let (a, b) = (slopes_below(&oc, bound), slopes_below(&cl, bound));
        let covered = oc.covers(bound);
        ok &= covered && a == b;
        notes.push(format!("n={n}: {} vs {}{}", fmt_multiset(&a), fmt_multiset(&b), if covered { "" } else { " (not covered)" }));
    }
    Ok((ok, notes.join("; ")))
}

fn radius_independence(c: &Ctx) -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for n in [0i64, 2] {
        let a = c.up_series(n, 1, D, 8)?;
        let b = c.up_series(n, 2, D, 8)?;
        let v = link_invariance(&a, &b, 8).unwrap_or(i64::MAX);
        ok &= v >= 25;
        notes.push(format!("n={n}: agree mod 3^{}", if v == i64::MAX { "inf".into() } else { v.to_string() }));
    }
    Ok((ok, notes.join("; ")))
}

fn stabilization(c: &Ctx) -> Outcome {
    let n = 2;
    let a = c.up_series(n, 1, 40, 10)?;
    let b = c.up_series(n, 1, 50, 10)?;
    let mut ok = true;
    let mut changed = Vec::new();
    for m in 0..=10 {
        let claimed = a.coeffs[m].abs_precision().min(b.coeffs[m].abs_precision());
        if a.coeffs[m].distance_valuation(&b.coeffs[m]) < claimed {
            ok = false;
            changed.push(m);
        }
    }
    // Decay of the matrix acting on row vectors: its source-degree-j
    // columns are the degree-j rows of the column-vector matrix here.
    let gs = c.space(n, 1, D, LayoutChoice::Auto)?;
    let bm = assemble_hecke(&gs, &c.up, Convention::Indicator)?;
    let ctx = gs.spec.ctx();
    let mut worst = i64::MAX;
    for r in 0..bm.matrix.rows() {
        let j = bm.row_degree(r) as i64;
        for &x in bm.matrix.row(r) {
            if let Some(v) = ctx.valuation(x) {
                worst = worst.min(v as i64 + bm.shift - j.min(N as i64));
            }
        }
    }
    ok &= worst >= 0;
    Ok((ok, format!("D=40 vs D=50 changed coefficients {changed:?}; min(v - degree) = {worst}")))
}

fn commutativity(c: &Ctx) -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    let guard = D + (N as usize).div_ceil(2);
    for n in [0i64, 2] {
        let gs = c.space(n, 1, D, LayoutChoice::Auto)?;
        let w = TorusCharacter::algebraic(n, 0);
        let ctx = gs.spec.ctx();
        let wide = Degrees { target: D, source: guard };
        let tall = Degrees { target: guard, source: D };
        let conv = Convention::Indicator;
        for q in [5u64, 7] {
            let tq = hecke_coset_data(Operator::T(q), &c.dq)?;
            let v = commutator_check(
                &assemble_in(&ctx, &w, &gs, &c.up, wide, conv)?,
                &assemble_in(&ctx, &w, &gs, &tq, tall, conv)?,
                &assemble_in(&ctx, &w, &gs, &tq, wide, conv)?,
                &assemble_in(&ctx, &w, &gs, &c.up, tall, conv)?,
            )?;
            ok &= v.map_or(true, |v| v >= 25);
            notes.push(format!("n={n} T{q}: {}", v.map_or("zero".into(), |v| format!("v={v}"))));
        }
    }
    Ok((ok, notes.join("; ")))
}

fn family_base_change(c: &Ctx) -> Outcome {
    let (d, t, s_order) = (D, 8, 8);
    let disc = WeightDisc::new(P, TorusCharacter::trivial(), 0, s_order)?;
    let spec = ModuleSpec::new(P, 1, d, N, Weight::Family(disc))?;
    let gs = GlobalSpace::new(spec, c.dq.clone(), LayoutChoice::Auto)?;
    let ctx = gs.spec.ctx();
    let ring = disc.series_ring(ctx);
    let b = assemble_in(&ring, &disc, &gs, &c.up, Degrees::square(d), Convention::Indicator)?;
    let fam = family_series(&b, &ring, t)?;
    let eval = SeriesRing::new(ctx, s_order);
    let mut ok = true;
    let mut notes = Vec::new();
    for n in [0i64, 2, 4] {
        let s0 = disc.algebraic_point(n)?;
        let direct = c.up_series(n, 1, d, t)?;
        // full value of the truncated family series at s0, without the
        // truncation cap, compared with the direct series
        let mut worst = i64::MAX;
        for m in 1..=t {
            let v = eval.eval(&fam.coeffs[m], ctx.from_i128(s0));
            let x = PadicScalar::from_residue(&ctx, v).shift(m as i64 * fam.tail.shift);
            let y = &direct.coeffs[m];
            worst = worst.min(x.distance_valuation(y).min(y.abs_precision()));
        }
        ok &= worst >= 25;
        let floor = fam.truncation_floor(s0);
        notes.push(format!(
            "n={n}: agree mod 3^{} (s-truncation floor {})",
            if worst == i64::MAX { "inf".into() } else { worst.to_string() },
            if floor == i64::MAX { "exact".into() } else { floor.to_string() }
        ));
    }
    Ok((ok, notes.join("; ")))
}

fn brute_norm_count(n: i64) -> usize {
    let r = (2.0 * (n as f64).sqrt()).ceil() as i64 + 1;
    let mut count = 0;
    for a in -r..=r {
        for b in -r..=r {
            for c in -r..=r {
                for d in -r..=r {
                    let same = (a - b) % 2 == 0 && (a - c) % 2 == 0 && (a - d) % 2 == 0;
                    if same && a * a + b * b + c * c + d * d == 4 * n {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

fn counting(_c: &Ctx) -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (n, want) in [(1u64, 24usize), (3, 96), (5, 144), (7, 192)] {
        let got = enumerate_norm(n);
        let brute = brute_norm_count(n as i64);
        let norms_ok = got.iter().all(|x| x.nrd() == n as i64);
        ok &= got.len() == want && brute == want && norms_ok;
        notes.push(format!("norm {n}: {} (loop {brute})", got.len()));
    }
    for level in [Level::Maximal, Level::Iwahori] {
        let dq = build_double_quotient(P, level, N + 5)?;
        let mut ops = vec![Operator::T(5), Operator::T(7)];
        if level == Level::Iwahori {
            ops.push(Operator::Up);
        }
        for op in ops {
            let data = hecke_coset_data(op, &dq)?;
            let want = match op {
                Operator::T(q) => q as usize + 1,
                Operator::Up => P as usize,
            };
            let rows_ok = data.global.iter().all(|row| row.iter().map(|b| b.len()).sum::<usize>() == want);
            ok &= rows_ok;
            if !rows_ok {
                notes.push(format!("{level} {}: degree identity broken", op.label(P)));
            }
        }
        if level == Level::Maximal {
            let mass: Ratio<i64> = dq.stabilizers_mod_center.iter().map(|g| Ratio::new(1, g.len() as i64)).sum();
            ok &= mass == Ratio::new(1, 12);
            notes.push(format!("mass {mass}"));
        }
    }
    notes.push("degree identities checked".into());
    Ok((ok, notes.join("; ")))
}

fn torus(_c: &Ctx) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (k, d) = (1, 12);
    let mut ok = true;
    for trial in 0..10 {
        let (n1, n2) = [(0, 0), (2, 0), (4, 0), (3, 1), (5, 2)][trial % 5];
        let w = TorusCharacter::algebraic(n1, n2);
        let spec = ModuleSpec::new(P, k, d, N, Weight::Point(w))?;
        let ctx = spec.ctx();
        let unit = |rng: &mut ChaCha8Rng| loop {
            let x: i64 = rng.gen_range(1..1_000_000_000);
            if x % 3 != 0 {
                return x;
            }
        };
        let (u1, u2) = (unit(&mut rng), unit(&mut rng));
        let m = operator_matrix(&MonoidElement::from_i64(P, [u1, 0, 0, u2], N + 2)?, &spec)?;
        let (a, b) = (ctx.from_i64(u1), ctx.from_i64(u2));
        let ratio = ctx.mul(b, ctx.inv(a)?);
        let chi = ctx.mul(ctx.pow(a, n1 as u128), ctx.pow(b, n2 as u128));
        for j in 0..=d {
            let col = m.matrix.column(spec.index_of(BasisIndex { coset: 0, degree: j }));
            let want = ctx.mul(chi, ctx.pow(ratio, j as u128));
            for (r, &x) in col.iter().enumerate() {
                let expected = if r == j { want } else { 0 };
                ok &= ctx.reduce(x) == expected;
            }
        }
    }
    Ok((ok, "10 random unit pairs on the identity coset, exact mod 3^30".into()))
}

fn newton_exactness(_c: &Ctx) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut ok = true;
    for _ in 0..20 {
        let len = rng.gen_range(1..=8);
        let mut vals: Vec<i64> = (0..len).map(|_| rng.gen_range(0..8)).collect();
        // enough relative precision to resolve det = p^(sum of vals)
        let rel = Zmod::max_digits(P) - 8;
        let m = Matrix::from_fn(len, len, |i, j| {
            if i == j {
                PadicScalar::new(P, vals[i], 1, rel).unwrap()
            } else {
                PadicScalar::exact_zero(P)
            }
        });
        let cp = charpoly_division_free(&m, P)?;
        let got = newton_polygon(&cp)?.slope_list();
        vals.sort();
        ok &= got == vals.iter().map(|&v| Ratio::from_integer(v)).collect::<Vec<_>>();
    }
    let mut merged = true;
    for _ in 0..20 {
        let rand_poly = |rng: &mut ChaCha8Rng| {
            let len = rng.gen_range(2..=6);
            let mut c: Vec<i64> = vec![1];
            for _ in 1..len {
                let v = rng.gen_range(0..4u32);
                c.push(rng.gen_range(-4..=4) * 3i64.pow(v));
            }
            let last = c.len() - 1;
            if c[last] == 0 {
                c[last] = 3;
            }
            c
        };
        let (f, g) = (rand_poly(&mut rng), rand_poly(&mut rng));
        let (f, g) = (PadicPoly::from_i64s(P, &f, 30)?, PadicPoly::from_i64s(P, &g, 30)?);
        let mut both = newton_polygon(&f)?.slope_list();
        both.extend(newton_polygon(&g)?.slope_list());
        both.sort();
        merged &= newton_polygon(&f.mul(&g)?)?.slope_list() == both;
    }
    Ok((ok && merged, format!("20 diagonal matrices exact: {ok}; 20 product merges: {merged}")))
}

fn quotient_bound(_c: &Ctx) -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for n in [0usize, 2, 4] {
        let spec = ModuleSpec::new(P, 1, D, N, Weight::Point(TorusCharacter::algebraic(n as i64, 0)))?;
        let eta = MonoidElement::from_i64(P, [1, 0, 0, 3], N + 2)?;
        let m = operator_matrix(&eta, &spec)?;
        let classical = locally_algebraic_indices(n, &spec);
        let rest: Vec<usize> = (0..spec.dim()).filter(|i| !classical.contains(i)).collect();
        let ctx = Zmod::new(P, N)?;
        let q = m.matrix.select(&rest, &rest);
        let floor = q.entries().iter().filter_map(|&x| ctx.valuation(x)).min();
        // the classical span must be invariant for the quotient to exist
        let leak = m.matrix.select(&rest, &classical).entries().iter().any(|&x| x != 0);
        ok &= !leak && floor.map_or(true, |v| v as usize > n);
        notes.push(format!("n={n}: min valuation {}", floor.map_or("inf".into(), |v| v.to_string())));
    }
    Ok((ok, notes.join("; ")))
}

fn main() {
    let dq = build_double_quotient(P, Level::Iwahori, N + 5).expect("double quotient");
    let up = hecke_coset_data(Operator::Up, &dq).expect("U_p cosets");
    let c = Ctx { dq, up };
    let criteria: [(&str, fn(&Ctx) -> Outcome); 9] = [
        ("control theorem", control_theorem),
        ("radius independence", radius_independence),
        ("compactness and stabilization", stabilization),
        ("Hecke commutativity", commutativity),
        ("family base change", family_base_change),
        ("counting oracles", counting),
        ("torus eigenstructure", torus),
        ("Newton polygon exactness", newton_exactness),
        ("small-slope quotient bound", quotient_bound),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (pass, detail) = f(&c).unwrap_or_else(|e| (false, format!("error: {e}")));
        failed += usize::from(!pass);
        println!("{} {}. {name}: {detail}", if pass { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}

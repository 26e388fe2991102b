//! U_3 commutes with T_5 and T_7 on overconvergent forms, checked with
//! guard-band products of truncated matrices.

use overconvergent::automorphic::*;
use overconvergent::induced::{ModuleSpec, Weight};
use overconvergent::quaternion::*;
use overconvergent::weight::TorusCharacter;

fn main() -> overconvergent::Result<()> {
    let (p, d, n_prec) = (3, 30, 30);
    let dq = build_double_quotient(p, Level::Iwahori, n_prec + 5)?;
    let w = TorusCharacter::algebraic(2, 0);
    let spec = ModuleSpec::new(p, 1, d, n_prec, Weight::Point(w))?;
    let gs = GlobalSpace::new(spec, dq.clone(), LayoutChoice::Auto)?;
    let ctx = gs.spec.ctx();
    let guard = d + 15;
    let wide = Degrees { target: d, source: guard };
    let tall = Degrees { target: guard, source: d };
    let up = hecke_coset_data(Operator::Up, &dq)?;
    let conv = Convention::Indicator;
    for q in [5u64, 7] {
        let tq = hecke_coset_data(Operator::T(q), &dq)?;
        let v = commutator_check(
            &assemble_in(&ctx, &w, &gs, &up, wide, conv)?,
            &assemble_in(&ctx, &w, &gs, &tq, tall, conv)?,
            &assemble_in(&ctx, &w, &gs, &tq, wide, conv)?,
            &assemble_in(&ctx, &w, &gs, &up, tall, conv)?,
        )?;
        match v {
            None => println!("[U3, T{q}] vanishes mod 3^{n_prec}"),
            Some(v) => println!("[U3, T{q}] has valuation {v}"),
        }
    }
    Ok(())
}

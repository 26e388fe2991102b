//! U_3 slopes on overconvergent forms compared with the classical slopes
//! below the small-slope bound n + 1.

use overconvergent::automorphic::*;
use overconvergent::fredholm::*;
use overconvergent::induced::{ModuleSpec, Weight};
use overconvergent::quaternion::*;
use overconvergent::weight::TorusCharacter;

fn main() -> overconvergent::Result<()> {
    let (p, d, n_prec, t) = (3, 50, 30, 12);
    let dq = build_double_quotient(p, Level::Iwahori, n_prec + 5)?;
    let up = hecke_coset_data(Operator::Up, &dq)?;
    for n in [0i64, 2, 4, 6, 8] {
        let w = TorusCharacter::algebraic(n, 0);
        let spec = ModuleSpec::new(p, 1, d, n_prec, Weight::Point(w))?;
        let gs = GlobalSpace::new(spec, dq.clone(), LayoutChoice::Auto)?;
        let b = assemble_hecke(&gs, &up, Convention::Indicator)?;
        let series = fredholm_series(&b, t)?;
        let oc = SlopeTable::from_series(&series, Convention::Indicator)?;
        let cl = SlopeTable::from_brandt(&classical_brandt(&up, (n, 0), &dq)?, p, Convention::Indicator)?;
        let bound = small_slope_bound(&w, 1)?;
        let r = classicality_compare(&oc, &cl, bound)?;
        println!("n = {n}: overconvergent {oc}");
        println!("       classical {cl}; below {bound}: {:?}", r.verdict);
    }
    Ok(())
}

//! The same operator on modules of radius 1 and 2 has the same
//! characteristic series, and the projector layout agrees with the
//! division-free reduced layout.

use overconvergent::automorphic::*;
use overconvergent::fredholm::*;
use overconvergent::induced::{ModuleSpec, Weight};
use overconvergent::quaternion::*;
use overconvergent::weight::TorusCharacter;

fn main() -> overconvergent::Result<()> {
    let (p, d, n_prec) = (3, 40, 30);
    let dq = build_double_quotient(p, Level::Iwahori, n_prec + 6)?;
    let up = hecke_coset_data(Operator::Up, &dq)?;
    for n in [0i64, 2] {
        let w = TorusCharacter::algebraic(n, 0);
        let series = |k: u32, choice: LayoutChoice| -> overconvergent::Result<FredholmSeries> {
            let spec = ModuleSpec::new(p, k, d, n_prec, Weight::Point(w))?;
            let gs = GlobalSpace::new(spec, dq.clone(), choice)?;
            fredholm_series(&assemble_hecke(&gs, &up, Convention::Indicator)?, 8)
        };
        let k1 = series(1, LayoutChoice::Auto)?;
        let k2 = series(2, LayoutChoice::Auto)?;
        let proj = series(1, LayoutChoice::Projector)?;
        println!("n = {n}: radii 1 and 2 agree to {:?}", link_invariance(&k1, &k2, 8));
        println!("       reduced and projector layouts agree to {:?}", link_invariance(&k1, &proj, 8));
    }
    Ok(())
}

//! The two-variable series P(s, t) over a disc of weights, specialized at
//! algebraic points and compared with direct computations.

use overconvergent::automorphic::*;
use overconvergent::fredholm::*;
use overconvergent::induced::{ModuleSpec, Weight};
use overconvergent::quaternion::*;
use overconvergent::weight::{TorusCharacter, WeightDisc};

fn main() -> overconvergent::Result<()> {
    let (p, d, n_prec, t, s_order) = (3, 40, 30, 8, 8);
    let dq = build_double_quotient(p, Level::Iwahori, n_prec + 5)?;
    let up = hecke_coset_data(Operator::Up, &dq)?;
    let disc = WeightDisc::new(p, TorusCharacter::trivial(), 0, s_order)?;
    let spec = ModuleSpec::new(p, 1, d, n_prec, Weight::Family(disc))?;
    let gs = GlobalSpace::new(spec, dq.clone(), LayoutChoice::Auto)?;
    let ring = disc.series_ring(gs.spec.ctx());
    let b = assemble_in(&ring, &disc, &gs, &up, Degrees::square(d), Convention::Indicator)?;
    let fam = family_series(&b, &ring, t)?;
    println!("P(s, t) uses s up to degree {}", fam.s_degree());
    for n in [0i64, 2, 4] {
        let s0 = disc.algebraic_point(n)?;
        let sp = fam.specialize(s0)?;
        let spec = ModuleSpec::new(p, 1, d, n_prec, Weight::Point(disc.specialize(s0)?))?;
        let gs = GlobalSpace::new(spec, dq.clone(), LayoutChoice::Auto)?;
        let direct = fredholm_series(&assemble_hecke(&gs, &up, Convention::Indicator)?, t)?;
        println!(
            "s = {s0}: truncation floor {}, agreement with direct {:?}",
            match fam.truncation_floor(s0) { i64::MAX => "exact".to_string(), f => f.to_string() },
            link_invariance(&sp, &direct, t)
        );
        println!("       slopes {}", SlopeTable::from_series(&sp, Convention::Indicator)?);
    }
    Ok(())
}

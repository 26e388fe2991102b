//! Certifying the characteristic series by increasing the degree cutoff.

use overconvergent::automorphic::*;
use overconvergent::fredholm::*;
use overconvergent::induced::{ModuleSpec, Weight};
use overconvergent::quaternion::*;
use overconvergent::weight::TorusCharacter;

fn main() -> overconvergent::Result<()> {
    let (p, n_prec) = (3, 30);
    let dq = build_double_quotient(p, Level::Iwahori, n_prec + 5)?;
    let up = hecke_coset_data(Operator::Up, &dq)?;
    let w = TorusCharacter::algebraic(2, 0);
    let build = |d: usize| {
        let spec = ModuleSpec::new(p, 1, d, n_prec, Weight::Point(w))?;
        let gs = GlobalSpace::new(spec, dq.clone(), LayoutChoice::Auto)?;
        fredholm_series(&assemble_hecke(&gs, &up, Convention::Indicator)?, 10)
    };
    let scan = stabilization_scan(build, &[20, 30, 40], 10)?;
    println!("cutoffs {:?}, agreements {:?}", scan.cutoffs, scan.agreements);
    for (m, c) in scan.series.coeffs.iter().enumerate() {
        println!("c_{m} = {c}  stable: {}", scan.series.stable[m]);
    }
    println!("trusted through t^{}", scan.trusted_degree);
    Ok(())
}

//! Characters of the torus, weight discs and their analyticity radius.

use overconvergent::padic::{PadicScalar, Zmod};
use overconvergent::weight::{analyticity_radius, eval_character, TorusCharacter, WeightDisc};

fn main() -> overconvergent::Result<()> {
    let p = 3;
    let k: TorusCharacter = "4,0".parse()?;
    let u1 = PadicScalar::from_i64(p, 2, 20)?;
    let u2 = PadicScalar::from_i64(p, 5, 20)?;
    println!("kappa = {k}, kappa(2, 5) = {}", eval_character(&k, &u1, &u2)?);
    println!("parity on -1: {}", k.parity());

    let twisted = TorusCharacter::algebraic(2, 0).with_tame(1, 0);
    println!("twisted = {twisted}, parity {}", twisted.parity());

    let disc = WeightDisc::new(p, TorusCharacter::trivial(), 0, 8)?;
    let cert = analyticity_radius(&disc);
    println!("disc around {} analytic from radius k = {}", disc.center, cert.k);
    println!("s-term valuation bounds: {:?}, tail >= {}", cert.term_bounds, cert.tail_bound);
    for n in [0i64, 2, 4] {
        let s0 = disc.algebraic_point(n)?;
        let w = disc.specialize(s0)?;
        let z = Zmod::new(p, 20)?;
        println!("s = {s0}: weight {w}, value at (4, 1) = {}", w.eval_residue(&z, 4, 1)?);
    }
    Ok(())
}

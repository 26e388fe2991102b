//! Capped-precision p-adic scalars, residue arithmetic and Newton polygons.

use num_bigint::BigInt;
use num_rational::BigRational;
use overconvergent::padic::{newton_polygon, PadicPoly, PadicScalar, Zmod};

fn main() -> overconvergent::Result<()> {
    let p = 3;
    let x = PadicScalar::from_rational(p, &BigRational::new(BigInt::from(18), BigInt::from(5)), 10)?;
    let y = PadicScalar::from_i64(p, 7, 10)?;
    println!("x = 18/5 = {x}");
    println!("x / 9 = {}", x.div(&PadicScalar::from_i64(p, 9, 10)?)?);
    println!("x + y = {}", x.add(&y)?);
    println!("1 / y = {}", y.invert()?);

    let z = Zmod::new(p, 12)?;
    let u = 5;
    let t = z.teichmuller(u);
    println!("teichmuller(5) mod 3^12 = {t}, its square = {}", z.mul(t, t));

    // (1 - t)(1 - 3t)(1 - 9t)^2
    let f = PadicPoly::from_i64s(p, &[1, -1], 20)?
        .mul(&PadicPoly::from_i64s(p, &[1, -3], 20)?)?
        .mul(&PadicPoly::from_i64s(p, &[1, -18, 81], 20)?)?;
    let np = newton_polygon(&f)?;
    for s in &np.segments {
        println!("slope {} with multiplicity {}", s.slope, s.mult);
    }
    Ok(())
}

//! Exact Brandt matrices on the classical spaces and their slopes.

use overconvergent::automorphic::{classical_brandt, Convention};
use overconvergent::fredholm::SlopeTable;
use overconvergent::quaternion::*;

fn main() -> overconvergent::Result<()> {
    let p = 3;
    let maximal = build_double_quotient(p, Level::Maximal, 20)?;
    let t5 = hecke_coset_data(Operator::T(5), &maximal)?;
    let b = classical_brandt(&t5, (0, 0), &maximal)?;
    println!("maximal level, weight 0: det(1 - t T5) = {:?}", b.fredholm.iter().map(|c| c.to_string()).collect::<Vec<_>>());

    let dq = build_double_quotient(p, Level::Iwahori, 34)?;
    let up = hecke_coset_data(Operator::Up, &dq)?;
    for n in [0i64, 2, 4, 6, 8] {
        let b = classical_brandt(&up, (n, 0), &dq)?;
        let table = SlopeTable::from_brandt(&b, p, Convention::Indicator)?;
        println!("n = {n}: classical dimension {}, U3 slopes {table}", b.classical_dim);
    }
    Ok(())
}

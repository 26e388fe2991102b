//! The Hurwitz order: elements of given norm, the splitting at p, the
//! double quotient and Hecke coset representatives (written to JSON).

use overconvergent::quaternion::*;

fn main() -> overconvergent::Result<()> {
    for n in [1u64, 3, 5, 7] {
        println!("elements of norm {n}: {}", enumerate_norm(n).len());
    }
    let p = 3;
    let split = split_at_p(p, 20)?;
    let i = HurwitzQuat::from_integers([0, 1, 0, 0]);
    println!("i at 3 maps to {:?} mod 3^20", split.image_residues(&i));

    let maximal = build_double_quotient(p, Level::Maximal, 20)?;
    println!("maximal level: t = {}, mass = {}", maximal.t(), maximal.mass());
    let dq = build_double_quotient(p, Level::Iwahori, 34)?;
    println!("iwahori level: t = {}, |stabilizer / +-1| = {:?}", dq.t(), dq.stabilizers_mod_center.iter().map(|s| s.len()).collect::<Vec<_>>());

    let mut all = Vec::new();
    for op in [Operator::Up, Operator::T(5), Operator::T(7)] {
        let c = hecke_coset_data(op, &dq)?;
        c.validate(&dq)?;
        let per_row: Vec<usize> = c.global.iter().map(|r| r.iter().map(|b| b.len()).sum()).collect();
        println!("{}: cosets per row {per_row:?}", op.label(p));
        all.push(c);
    }
    let path = std::env::temp_dir().join("hurwitz_cosets_p3.json");
    std::fs::write(&path, serde_json::to_string_pretty(&all).unwrap()).unwrap();
    println!("coset data written to {}", path.display());
    Ok(())
}

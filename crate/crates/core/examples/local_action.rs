//! The induced module: Iwahori factorization, matrices of monoid elements,
//! torus eigenvalues and the link maps between radii.

use overconvergent::induced::*;
use overconvergent::padic::PadicScalar;
use overconvergent::weight::TorusCharacter;

fn main() -> overconvergent::Result<()> {
    let p = 3;
    let s = |x: i64| PadicScalar::from_i64(p, x, 20).unwrap();
    let g = [s(2), s(3), s(3), s(1)];
    let f = iwahori_factorize(&g)?;
    println!("(2 3; 3 1) = nbar({}) diag({}, {}) n({})", f.nbar, f.m.0, f.m.1, f.n);

    let w = TorusCharacter::algebraic(2, 0);
    let spec = ModuleSpec::new(p, 1, 6, 20, Weight::Point(w))?;
    let eta = MonoidElement::from_i64(p, [1, 0, 0, 3], 24)?;
    let m = operator_matrix(&eta, &spec)?;
    println!("eta = diag(1, 3) on {} basis vectors", m.matrix.rows());
    for r in 0..m.matrix.rows() {
        println!("  row floor {:?}", m.row_floor(r));
    }

    let t = MonoidElement::from_i64(p, [2, 0, 0, 5], 24)?;
    let tm = operator_matrix(&t, &spec)?;
    let e = torus_weight(BasisIndex { coset: 0, degree: 3 }, &w);
    let want = e.eval(&s(2), &s(5))?;
    let got = PadicScalar::from_residue(&spec.ctx(), *tm.matrix.get(3, 3));
    println!("diag(2, 5) on e_(0,3): {got} (expected {want})");

    let (i_k, z_k) = link_pair(&spec.ctx(), &w, &eta, 1, 6)?;
    println!("link maps: i_1 is {}x{}, z_1 is {}x{}", i_k.rows(), i_k.cols(), z_k.rows(), z_k.cols());
    let classical = classical_inclusion(&w, &spec)?;
    println!("classical polynomials 1, z, z^2 embed as {} rows", classical.rows());
    Ok(())
}

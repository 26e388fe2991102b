//! The induced Banach module at p: functions on Z_p analytic on the discs
//! a + p^k Z_p, with the action of the monoid generated by the Iwahori
//! subgroup and the contracting torus, written in the basis
//! e_{a,j}(z) = ((z - a) / p^k)^j.
//!
//! The action is (g . f)(z) = kappa1(A) kappa2(det / A) f((b + d z) / A)
//! with A = a + c z, after scaling g so that a is a unit; the character is
//! trivial on p-power scalar and diagonal elements.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::padic::modular::Zmod;
use crate::padic::scalar::PadicScalar;
use crate::ring::{ResidueAlgebra, Ring, SeriesRing};
use crate::weight::{TorusCharacter, WeightDisc};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Weight {
    Point(TorusCharacter),
    Family(WeightDisc),
}

impl Weight {
    pub fn parity(&self) -> i64 {
        match self {
            Weight::Point(w) => w.parity(),
            Weight::Family(d) => d.parity(),
        }
    }

    /// Radius index below which the weight is not analytic.
    pub fn min_radius(&self) -> u32 {
        match self {
            Weight::Point(_) => 1,
            Weight::Family(d) => crate::weight::analyticity_radius(d).k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleSpec {
    pub p: u64,
    pub k: u32,
    pub degree: usize,
    pub precision: u32,
    pub weight: Weight,
}

impl ModuleSpec {
    pub fn new(p: u64, k: u32, degree: usize, precision: u32, weight: Weight) -> Result<Self> {
        if !crate::padic::modular::is_odd_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        if k < weight.min_radius() {
            return Err(Error::Weight(format!("radius index {k} is below the analyticity radius")));
        }
        Zmod::new(p, precision)?;
        Ok(ModuleSpec { p, k, degree, precision, weight })
    }

    pub fn cosets(&self) -> usize {
        (self.p as usize).pow(self.k)
    }

    pub fn dim(&self) -> usize {
        self.cosets() * (self.degree + 1)
    }

    pub fn ctx(&self) -> Zmod {
        Zmod::new(self.p, self.precision).expect("validated at construction")
    }

    pub fn basis(&self) -> Vec<BasisIndex> {
        basis(self.cosets(), self.degree)
    }

    pub fn index_of(&self, idx: BasisIndex) -> usize {
        idx.coset * (self.degree + 1) + idx.degree
    }

    pub fn point_weight(&self) -> Result<TorusCharacter> {
        match self.weight {
            Weight::Point(w) => Ok(w),
            Weight::Family(_) => Err(Error::Weight("expected a single weight, found a family".into())),
        }
    }
}

/// e_{coset, degree}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BasisIndex {
    pub coset: usize,
    pub degree: usize,
}

/// Lexicographic (coset, degree) enumeration.
pub fn basis(cosets: usize, degree: usize) -> Vec<BasisIndex> {
    (0..cosets)
        .flat_map(|coset| (0..=degree).map(move |d| BasisIndex { coset, degree: d }))
        .collect()
}

/// g = (1 0; nbar 1) diag(m.0, m.1) (1 n; 0 1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IwahoriFactors {
    pub nbar: PadicScalar,
    pub m: (PadicScalar, PadicScalar),
    pub n: PadicScalar,
}

impl IwahoriFactors {
    pub fn reassemble(&self) -> Result<[PadicScalar; 4]> {
        let (m1, m2) = &self.m;
        let b = m1.mul(&self.n)?;
        let c = self.nbar.mul(m1)?;
        let d = self.nbar.mul(&b)?.add(m2)?;
        Ok([m1.clone(), b, c, d])
    }
}

fn det(g: &[PadicScalar; 4]) -> Result<PadicScalar> {
    g[0].mul(&g[3])?.sub(&g[1].mul(&g[2])?)
}

/// Factor g = nbar * m * n; requires a invertible, nbar in pZ_p, n in Z_p.
pub fn iwahori_factorize(g: &[PadicScalar; 4]) -> Result<IwahoriFactors> {
    let [a, b, c, _] = g;
    if a.is_zero() {
        return Err(Error::IndistinguishableFromZero);
    }
    let n = b.div(a)?;
    let nbar = c.div(a)?;
    let m2 = det(g)?.div(a)?;
    if !at_least(&n, 0)? {
        return Err(Error::NotFactorizable(format!("b/a = {n} is not integral")));
    }
    if !at_least(&nbar, 1)? {
        return Err(Error::NotFactorizable(format!("c/a = {nbar} is not in pZ_p")));
    }
    Ok(IwahoriFactors { nbar, m: (a.clone(), m2), n })
}

/// v(x) >= bound, or an error when the precision cannot decide.
fn at_least(x: &PadicScalar, bound: i64) -> Result<bool> {
    match x.valuation() {
        Some(v) => Ok(v >= bound),
        None if x.is_exact_zero() || x.abs_precision() >= bound => Ok(true),
        None => Err(Error::TooImprecise(format!("cannot decide v({x}) >= {bound}"))),
    }
}

/// Membership in the monoid generated by the Iwahori subgroup and
/// diag(p^r, p^s), r <= s: a != 0, b/a and det/a^2 integral, c/a in pZ_p.
pub fn monoid_membership(g: &[PadicScalar; 4]) -> Result<bool> {
    let [a, b, c, _] = g;
    let va = match a.valuation() {
        Some(v) => v,
        None => return Err(Error::TooImprecise("a is indistinguishable from zero".into())),
    };
    Ok(at_least(b, va)? && at_least(c, va + 1)? && at_least(&det(g)?, 2 * va)?)
}

/// A monoid element with its factorization. `scaled` is g / p^v(a), whose
/// entries are integral with a a unit; the dropped scalar acts trivially.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoidElement {
    pub p: u64,
    pub entries: [PadicScalar; 4],
    pub factors: IwahoriFactors,
    pub scale: i64,
    pub scaled: [PadicScalar; 4],
    /// v(det) of the scaled matrix.
    pub det_valuation: i64,
}

impl MonoidElement {
    pub fn new(entries: [PadicScalar; 4]) -> Result<Self> {
        let p = entries[0].p();
        for e in &entries {
            if e.p() != p {
                return Err(Error::PrimeMismatch(p, e.p()));
            }
        }
        if !monoid_membership(&entries)? {
            return Err(Error::NotInMonoid(format!(
                "({} {}; {} {})",
                entries[0], entries[1], entries[2], entries[3]
            )));
        }
        let factors = iwahori_factorize(&entries)?;
        let scale = entries[0].valuation().expect("checked nonzero");
        let scaled = entries.clone().map(|e| e.shift(-scale));
        let det_valuation = det(&scaled)?
            .valuation()
            .ok_or_else(|| Error::TooImprecise("determinant indistinguishable from zero".into()))?;
        Ok(MonoidElement { p, entries, factors, scale, scaled, det_valuation })
    }

    pub fn from_i64(p: u64, m: [i64; 4], precision: u32) -> Result<Self> {
        let e = m.map(|x| PadicScalar::from_i64(p, x, precision));
        let [a, b, c, d] = e;
        Self::new([a?, b?, c?, d?])
    }

    pub fn identity(p: u64, precision: u32) -> Self {
        Self::from_i64(p, [1, 0, 0, 1], precision).expect("identity is in the monoid")
    }

    pub fn mul(&self, other: &MonoidElement) -> Result<MonoidElement> {
        let [a, b, c, d] = &self.entries;
        let [e, f, g, h] = &other.entries;
        Self::new([
            a.mul(e)?.add(&b.mul(g)?)?,
            a.mul(f)?.add(&b.mul(h)?)?,
            c.mul(e)?.add(&d.mul(g)?)?,
            c.mul(f)?.add(&d.mul(h)?)?,
        ])
    }

    /// Scaled entries as residues (a, b, c, d) modulo p^n.
    pub fn residues(&self, ctx: &Zmod) -> Result<[u128; 4]> {
        let [a, b, c, d] = &self.scaled;
        Ok([a.to_residue(ctx)?, b.to_residue(ctx)?, c.to_residue(ctx)?, d.to_residue(ctx)?])
    }

    /// Strictly contracting: v(det / a^2) >= 1.
    pub fn is_contracting(&self) -> bool {
        self.det_valuation >= 1
    }
}

/// A weight usable as coefficients in the ring `R`.
pub trait LocalWeight<R: ResidueAlgebra>: Sync {
    /// kappa1(A) kappa2(det / A) for A = a0 (1 + eps u), as a series in u.
    fn factor(&self, ring: &R, a0: u128, dunit: u128, eps: u128, len: usize) -> Result<Vec<R::Elem>>;
}

impl LocalWeight<Zmod> for TorusCharacter {
    fn factor(&self, ring: &Zmod, a0: u128, dunit: u128, eps: u128, len: usize) -> Result<Vec<u128>> {
        self.local_factor(ring, a0, dunit, eps, len)
    }
}

impl LocalWeight<SeriesRing> for WeightDisc {
    fn factor(&self, ring: &SeriesRing, a0: u128, dunit: u128, eps: u128, len: usize) -> Result<Vec<Vec<u128>>> {
        self.local_factor(ring, a0, dunit, eps, len)
    }
}

/// Radii and degree cutoffs for target and source modules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Geometry {
    pub p: u64,
    pub target_k: u32,
    pub source_k: u32,
    pub target_deg: usize,
    pub source_deg: usize,
}

impl Geometry {
    pub fn square(p: u64, k: u32, degree: usize) -> Self {
        Geometry { p, target_k: k, source_k: k, target_deg: degree, source_deg: degree }
    }

    pub fn of(spec: &ModuleSpec) -> Self {
        Self::square(spec.p, spec.k, spec.degree)
    }

    pub fn target_cosets(&self) -> usize {
        (self.p as usize).pow(self.target_k)
    }

    pub fn source_cosets(&self) -> usize {
        (self.p as usize).pow(self.source_k)
    }

    pub fn rows(&self) -> usize {
        self.target_cosets() * (self.target_deg + 1)
    }

    pub fn cols(&self) -> usize {
        self.source_cosets() * (self.source_deg + 1)
    }
}

/// The action of one element: each target coset a' reads from a single
/// source coset, through a (target_deg+1) x (source_deg+1) block.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalAction<E> {
    pub geometry: Geometry,
    /// Target cosets computed (all of them unless restricted).
    pub targets: Vec<usize>,
    pub source: Vec<usize>,
    pub blocks: Vec<Matrix<E>>,
}

impl<E: Clone + Send + Sync> LocalAction<E> {
    pub fn dense<R: Ring<Elem = E>>(&self, ring: &R) -> Matrix<E> {
        let g = &self.geometry;
        let (rt, cs) = (g.target_deg + 1, g.source_deg + 1);
        let mut m = Matrix::zeros(ring, g.rows(), g.cols());
        for (n, blk) in self.blocks.iter().enumerate() {
            let (t, s) = (self.targets[n], self.source[n]);
            for i in 0..rt {
                for j in 0..cs {
                    m.set(t * rt + i, s * cs + j, blk.get(i, j).clone());
                }
            }
        }
        m
    }
}

/// Compute the action of `g` with the weight `w` in the ring `R`.
pub fn local_action<R, W>(ring: &R, weight: &W, g: &MonoidElement, geom: Geometry) -> Result<LocalAction<R::Elem>>
where
    R: ResidueAlgebra,
    W: LocalWeight<R> + ?Sized,
{
    let all: Vec<usize> = (0..geom.target_cosets()).collect();
    local_action_at(ring, weight, g, geom, &all)
}

/// The source coset read by each target coset, without the blocks.
pub fn coset_map(g: &MonoidElement, k: u32) -> Result<Vec<usize>> {
    let ctx = Zmod::new(g.p, k)?;
    let [a, b, c, d] = g.residues(&ctx)?;
    (0..(g.p as usize).pow(k))
        .map(|t| {
            let t = t as u128;
            let a0 = ctx.add(a, ctx.mul(c, t));
            Ok(ctx.mul(ctx.add(b, ctx.mul(d, t)), ctx.inv(a0)?) as usize)
        })
        .collect()
}

/// As [`local_action`], restricted to the listed target cosets.
pub fn local_action_at<R, W>(
    ring: &R,
    weight: &W,
    g: &MonoidElement,
    geom: Geometry,
    targets: &[usize],
) -> Result<LocalAction<R::Elem>>
where
    R: ResidueAlgebra,
    W: LocalWeight<R> + ?Sized,
{
    let ctx = *ring.base();
    if g.p != ctx.p() || geom.p != ctx.p() {
        return Err(Error::PrimeMismatch(g.p, ctx.p()));
    }
    let (kt, ks) = (geom.target_k, geom.source_k);
    let vdet = g.det_valuation;
    let shift = kt as i64 - ks as i64 + vdet;
    if shift < 0 {
        return Err(Error::NotInMonoid(format!(
            "element does not map radius {ks} discs into radius {kt} discs"
        )));
    }
    // one extra digit per source radius step so that (Y0 - src)/p^ks keeps
    // full precision
    let wide = ctx.with_digits(ctx.digits() + ks)?;
    let [a, b, c, d] = g.residues(&wide)?;
    let det = wide.sub(wide.mul(a, d), wide.mul(b, c));
    let dunit = wide.div_p_pow(det, vdet as u32);
    let pkt = ctx.p_pow(kt);
    let pks = wide.p_pow(ks);
    let len_t = geom.target_deg + 1;
    let len_s = geom.source_deg + 1;

    let per_coset: Vec<Result<(usize, Matrix<R::Elem>)>> = targets
        .par_iter()
        .map(|&t| {
            let at = t as u128;
            let a0 = wide.add(a, wide.mul(c, at));
            let ia = wide.inv(a0)?;
            let y0 = wide.mul(wide.add(b, wide.mul(d, at)), ia);
            let src = y0 % pks;
            let delta = ctx.reduce(wide.div_p_pow(wide.sub(y0, src), ks));
            let a0n = ctx.reduce(a0);
            let ian = ctx.reduce(ia);
            let eps = ctx.mul(ctx.mul(ctx.reduce(c), pkt), ian);
            // r' = p^(kt - ks + vdet) dunit / a0^2
            let rp = ctx.mul(ctx.mul(ctx.reduce(dunit), ctx.mul(ian, ian)), ctx.p_pow(shift as u32));
            let w = weight.factor(ring, a0n, ctx.reduce(dunit), eps, len_t)?;
            // Y'(u) = delta + r' u / (1 + eps u)
            let mut yp = vec![ring.zero(); len_t];
            yp[0] = ring.embed(delta);
            let neg_eps = ctx.neg(eps);
            let mut coef = rp;
            for item in yp.iter_mut().skip(1) {
                *item = ring.embed(coef);
                coef = ctx.mul(coef, neg_eps);
            }
            let mut blk = Matrix::zeros(ring, len_t, len_s);
            let mut cur = w;
            for j in 0..len_s {
                for (i, x) in cur.iter().enumerate() {
                    blk.set(i, j, x.clone());
                }
                if j + 1 < len_s {
                    cur = mul_trunc(ring, &cur, &yp, len_t);
                }
            }
            Ok((src as usize, blk))
        })
        .collect();
    let mut source = Vec::with_capacity(per_coset.len());
    let mut blocks = Vec::with_capacity(per_coset.len());
    for r in per_coset {
        let (s, b) = r?;
        source.push(s);
        blocks.push(b);
    }
    Ok(LocalAction { geometry: geom, targets: targets.to_vec(), source, blocks })
}

fn mul_trunc<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem], len: usize) -> Vec<R::Elem> {
    let mut out = vec![ring.zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if ring.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            let t = ring.mul(x, y);
            ring.add_assign(&mut out[i + j], &t);
        }
    }
    out
}

/// Matrix of g in the basis of `spec`, with valuation floors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorMatrix {
    pub p: u64,
    pub precision: u32,
    pub basis: Vec<BasisIndex>,
    pub matrix: Matrix<u128>,
}

impl OperatorMatrix {
    fn floor<I: Iterator<Item = u128>>(&self, it: I) -> Option<u32> {
        let ctx = Zmod::new(self.p, self.precision).unwrap();
        it.filter_map(|x| ctx.valuation(x)).min()
    }

    /// Least entry valuation in row i; `None` when the row vanishes.
    pub fn row_floor(&self, i: usize) -> Option<u32> {
        self.floor(self.matrix.row(i).iter().copied())
    }

    pub fn column_floor(&self, j: usize) -> Option<u32> {
        self.floor(self.matrix.column(j).into_iter())
    }

    pub fn min_valuation(&self) -> Option<u32> {
        self.floor(self.matrix.entries().iter().copied())
    }

    /// JSON with a header documenting the basis order.
    pub fn to_json(&self) -> serde_json::Value {
        let ctx = Zmod::new(self.p, self.precision).unwrap();
        let rows: Vec<Vec<String>> = (0..self.matrix.rows())
            .map(|i| {
                self.matrix
                    .row(i)
                    .iter()
                    .map(|&x| PadicScalar::from_residue(&ctx, x).to_string())
                    .collect()
            })
            .collect();
        serde_json::json!({
            "header": {
                "basis_order": "lexicographic (coset, degree); e_{a,j}(z) = ((z-a)/p^k)^j",
                "p": self.p,
                "precision": self.precision,
                "basis": self.basis.iter().map(|b| [b.coset, b.degree]).collect::<Vec<_>>(),
            },
            "rows": rows,
        })
    }
}

/// Matrix of g at a single weight.
pub fn operator_matrix(g: &MonoidElement, spec: &ModuleSpec) -> Result<OperatorMatrix> {
    let w = spec.point_weight()?;
    let ctx = spec.ctx();
    let act = local_action(&ctx, &w, g, Geometry::of(spec))?;
    Ok(OperatorMatrix { p: spec.p, precision: spec.precision, basis: spec.basis(), matrix: act.dense(&ctx) })
}

/// The image of e_idx under g, as a coordinate vector.
pub fn act_on_basis(g: &MonoidElement, idx: BasisIndex, spec: &ModuleSpec) -> Result<Vec<u128>> {
    if idx.coset >= spec.cosets() || idx.degree > spec.degree {
        return Err(Error::Dimension(format!("basis index {idx:?} out of range")));
    }
    Ok(operator_matrix(g, spec)?.matrix.column(spec.index_of(idx)))
}

/// Rows are the coordinates of 1, z, ..., z^n.
pub fn classical_inclusion(weight: &TorusCharacter, spec: &ModuleSpec) -> Result<Matrix<u128>> {
    let n = weight.dominant_n()? as usize;
    let ctx = spec.ctx();
    let pk = ctx.p_pow(spec.k);
    let binom = binomials(&ctx, n);
    let mut m = Matrix::filled(n + 1, spec.dim(), 0u128);
    for i in 0..=n {
        for a in 0..spec.cosets() {
            // z^i = (a + p^k u)^i
            let mut apow = vec![1u128 % ctx.modulus(); i + 1];
            for e in 1..=i {
                apow[e] = ctx.mul(apow[e - 1], a as u128);
            }
            let mut pkj = 1 % ctx.modulus();
            for j in 0..=i.min(spec.degree) {
                let v = ctx.mul(ctx.mul(binom[i][j], apow[i - j]), pkj);
                m.set(i, spec.index_of(BasisIndex { coset: a, degree: j }), v);
                pkj = ctx.mul(pkj, pk);
            }
        }
    }
    Ok(m)
}

fn binomials(ctx: &Zmod, n: usize) -> Vec<Vec<u128>> {
    let mut b = vec![vec![0u128; n + 1]; n + 1];
    for i in 0..=n {
        b[i][0] = 1 % ctx.modulus();
        for j in 1..=i {
            b[i][j] = ctx.add(b[i - 1][j - 1], if j < i { b[i - 1][j] } else { 0 });
        }
    }
    b
}

/// Indices of the locally polynomial functions of degree <= n on each
/// radius-k disc. They span a subspace stable under the whole monoid.
pub fn locally_algebraic_indices(n: usize, spec: &ModuleSpec) -> Vec<usize> {
    spec.basis()
        .into_iter()
        .enumerate()
        .filter(|(_, b)| b.degree <= n)
        .map(|(i, _)| i)
        .collect()
}

/// Eigencharacter t -> kappa(t) (t2/t1)^j of e_{0,j} under diagonal t.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusEigencharacter {
    pub weight: TorusCharacter,
    pub degree: usize,
}

impl TorusEigencharacter {
    /// Value at diag(t1, t2), trivial on the p-power part of kappa.
    pub fn eval(&self, t1: &PadicScalar, t2: &PadicScalar) -> Result<PadicScalar> {
        let (v1, v2) = match (t1.valuation(), t2.valuation()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::IndistinguishableFromZero),
        };
        let u1 = t1.shift(-v1);
        let u2 = t2.shift(-v2);
        let chi = crate::weight::eval_character(&self.weight, &u1, &u2)?;
        let ratio = t2.div(t1)?.pow(self.degree as u32)?;
        chi.mul(&ratio)
    }
}

pub fn torus_weight(idx: BasisIndex, weight: &TorusCharacter) -> TorusEigencharacter {
    TorusEigencharacter { weight: *weight, degree: idx.degree }
}

/// Inclusion i_k from radius k to radius k+1 and the factored action z_k
/// from radius k+1 back to radius k; z_k i_k and i_k z_k are the actions
/// of z at radii k and k+1.
pub fn link_pair<R, W>(
    ring: &R,
    weight: &W,
    z: &MonoidElement,
    k: u32,
    degree: usize,
) -> Result<(Matrix<R::Elem>, Matrix<R::Elem>)>
where
    R: ResidueAlgebra,
    W: LocalWeight<R> + ?Sized,
{
    if !z.is_contracting() {
        return Err(Error::NotInMonoid("link maps need a strictly contracting element".into()));
    }
    let p = ring.base().p();
    let id = MonoidElement::identity(p, z.entries[0].rel_precision().max(ring.base().digits() + k + 2));
    let up = Geometry { p, target_k: k + 1, source_k: k, target_deg: degree, source_deg: degree };
    let down = Geometry { p, target_k: k, source_k: k + 1, target_deg: degree, source_deg: degree };
    let i_k = local_action(ring, weight, &id, up)?.dense(ring);
    let z_k = local_action(ring, weight, z, down)?.dense(ring);
    Ok((i_k, z_k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(p: u64, k: u32, d: usize, w: TorusCharacter) -> ModuleSpec {
        ModuleSpec::new(p, k, d, 20, Weight::Point(w)).unwrap()
    }

    fn s(p: u64, x: i64) -> PadicScalar {
        PadicScalar::from_i64(p, x, 30).unwrap()
    }

    #[test]
    fn factorization_of_example() {
        let g = [s(3, 2), s(3, 3), s(3, 3), s(3, 1)];
        let f = iwahori_factorize(&g).unwrap();
        let q = |n: i64, d: i64| {
            PadicScalar::from_rational(3, &num_rational::BigRational::new(n.into(), d.into()), 30).unwrap()
        };
        assert!(f.nbar.agrees_with(&q(3, 2)));
        assert!(f.m.1.agrees_with(&q(-7, 2)));
        assert!(f.n.agrees_with(&q(3, 2)));
        let back = f.reassemble().unwrap();
        for (x, y) in back.iter().zip(&g) {
            assert!(x.distance_valuation(y) >= 20);
        }
        let id = iwahori_factorize(&[s(3, 1), s(3, 0), s(3, 0), s(3, 1)]).unwrap();
        assert!(id.nbar.is_zero() && id.n.is_zero());
    }

    #[test]
    fn membership_examples() {
        assert!(monoid_membership(&[s(3, 1), s(3, 0), s(3, 0), s(3, 3)]).unwrap());
        assert!(!monoid_membership(&[s(3, 1), s(3, 0), s(3, 1), s(3, 1)]).unwrap());
        assert!(monoid_membership(&[s(3, 1), s(3, 5), s(3, 0), s(3, 3)]).unwrap());
        assert!(!monoid_membership(&[s(3, 3), s(3, 0), s(3, 0), s(3, 1)]).unwrap());
        assert!(iwahori_factorize(&[s(3, 1), s(3, 0), s(3, 1), s(3, 1)]).is_err());
    }

    #[test]
    fn identity_acts_trivially() {
        let sp = spec(3, 1, 6, TorusCharacter::algebraic(3, 1));
        let m = operator_matrix(&MonoidElement::identity(3, 30), &sp).unwrap();
        let ctx = sp.ctx();
        assert_eq!(m.matrix, Matrix::identity(&ctx, sp.dim()));
    }

    #[test]
    fn eta_on_linear_function() {
        let sp = spec(3, 1, 4, TorusCharacter::trivial());
        let eta = MonoidElement::from_i64(3, [1, 0, 0, 3], 30).unwrap();
        let col = act_on_basis(&eta, BasisIndex { coset: 0, degree: 1 }, &sp).unwrap();
        let mut want = vec![0u128; sp.dim()];
        for a in 0..3 {
            want[sp.index_of(BasisIndex { coset: a, degree: 0 })] = a as u128;
            want[sp.index_of(BasisIndex { coset: a, degree: 1 })] = 3;
        }
        assert_eq!(col, want);
    }

    #[test]
    fn linear_monomial_expansion() {
        let sp = spec(3, 1, 3, TorusCharacter::algebraic(1, 0));
        let inc = classical_inclusion(&TorusCharacter::algebraic(1, 0), &sp).unwrap();
        for a in 0..3 {
            assert_eq!(*inc.get(1, sp.index_of(BasisIndex { coset: a, degree: 0 })), a as u128);
            assert_eq!(*inc.get(1, sp.index_of(BasisIndex { coset: a, degree: 1 })), 3);
            assert_eq!(*inc.get(0, sp.index_of(BasisIndex { coset: a, degree: 0 })), 1);
        }
        assert!(matches!(
            classical_inclusion(&TorusCharacter::algebraic(0, 1), &sp),
            Err(Error::NonDominant { .. })
        ));
    }

    #[test]
    fn torus_eigenvalues() {
        let w = TorusCharacter::trivial();
        let e = torus_weight(BasisIndex { coset: 0, degree: 3 }, &w);
        let v = e.eval(&s(3, 1), &s(3, 3)).unwrap();
        assert!(v.agrees_with(&s(3, 27)));
        let w = TorusCharacter::algebraic(2, 1);
        let e = torus_weight(BasisIndex { coset: 0, degree: 5 }, &w);
        assert!(e.eval(&s(3, 2), &s(3, 2)).unwrap().agrees_with(&s(3, 8)));
    }

    #[test]
    fn inclusion_on_linear_function() {
        let ctx = Zmod::new(3, 20).unwrap();
        let eta = MonoidElement::from_i64(3, [1, 0, 0, 3], 30).unwrap();
        let (i_k, _) = link_pair(&ctx, &TorusCharacter::trivial(), &eta, 1, 3).unwrap();
        // e_{a,1} at radius 1 is c e_{a',0} + 3 e_{a',1} on a' = a + 3c
        for a in 0..3usize {
            for c in 0..3usize {
                let ap = a + 3 * c;
                assert_eq!(*i_k.get(ap * 4, a * 4 + 1), c as u128);
                assert_eq!(*i_k.get(ap * 4 + 1, a * 4 + 1), 3);
                assert_eq!(*i_k.get(ap * 4, a * 4), 1);
            }
        }
    }
}

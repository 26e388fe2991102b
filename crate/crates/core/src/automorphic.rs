//! Global spaces of forms on the double quotient and their Hecke matrices.
//!
//! A form is a tuple (f_i) with f_i in the local module, invariant under
//! the stabilizer Gamma_i. The operator attached to cosets A_jk is
//! (T f)_j = sum_k sum_{x in A_jk} x_p . f_k.
//!
//! Two layouts are supported. When Gamma_i / +-1 acts freely on the discs
//! of radius p^-k, an invariant f_i is determined by its restriction to a
//! set F_i of orbit representatives, and the operator is computed on those
//! restrictions without any division ("reduced"). Otherwise the operator
//! sum_x x_p Pi_k is used on the whole local module, with the stabilizer
//! average Pi_k: it has the same nonzero spectrum ("projector").

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::induced::{coset_map, local_action_at, Geometry, LocalWeight, ModuleSpec, MonoidElement};
use crate::linalg::{self, Matrix};
use crate::padic::modular::Zmod;
use crate::padic::newton::{polygon_from_info, CoeffInfo, NewtonPolygon};
use crate::quaternion::{DoubleQuotient, HeckeCosetData, HurwitzQuat, Level, Operator};
use crate::ring::{Gaussian, GaussianRationals, ResidueAlgebra, Ring};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Layout {
    /// Orbit representatives F_i of the free action on cosets.
    Reduced { fundamental: Vec<Vec<usize>> },
    /// Full local module per index, with stabilizer averaging.
    Projector { denominator: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LayoutChoice {
    Auto,
    Projector,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GlobalSpace {
    pub spec: ModuleSpec,
    pub dq: DoubleQuotient,
    pub layout: Layout,
    /// The weight fails the parity condition and the space is zero.
    pub zero: bool,
}

impl GlobalSpace {
    pub fn new(spec: ModuleSpec, dq: DoubleQuotient, choice: LayoutChoice) -> Result<Self> {
        if dq.level != Level::Iwahori {
            return Err(Error::Config("overconvergent spaces need Iwahori level at p".into()));
        }
        if dq.p != spec.p {
            return Err(Error::PrimeMismatch(dq.p, spec.p));
        }
        if dq.splitting.precision < spec.precision + spec.k + 2 {
            return Err(Error::TooImprecise(format!(
                "double quotient carries {} digits, need {}",
                dq.splitting.precision,
                spec.precision + spec.k + 2
            )));
        }
        let zero = spec.weight.parity() != 1;
        let layout = match choice {
            LayoutChoice::Auto => match fundamental_domains(&dq, spec.k)? {
                Some(f) => Layout::Reduced { fundamental: f },
                None => Layout::Projector { denominator: projector_denominator(&dq) },
            },
            LayoutChoice::Projector => Layout::Projector { denominator: projector_denominator(&dq) },
        };
        Ok(GlobalSpace { spec, dq, layout, zero })
    }

    pub fn t(&self) -> usize {
        self.dq.t()
    }

    /// Number of local basis vectors kept for index i at degree cutoff d.
    pub fn block_size(&self, i: usize, degree: usize) -> usize {
        if self.zero {
            return 0;
        }
        match &self.layout {
            Layout::Reduced { fundamental } => fundamental[i].len() * (degree + 1),
            Layout::Projector { .. } => self.spec.cosets() * (degree + 1),
        }
    }

    pub fn dim(&self) -> usize {
        (0..self.t()).map(|i| self.block_size(i, self.spec.degree)).sum()
    }

    /// Cosets carried by index i, in order.
    pub fn cosets_of(&self, i: usize) -> Vec<usize> {
        match &self.layout {
            Layout::Reduced { fundamental } => fundamental[i].clone(),
            Layout::Projector { .. } => (0..self.spec.cosets()).collect(),
        }
    }

    /// p-adic valuation of the denominator divided out of assembled
    /// matrices (0 for the reduced layout).
    pub fn denominator_valuation(&self) -> u32 {
        match &self.layout {
            Layout::Reduced { .. } => 0,
            Layout::Projector { denominator } => {
                crate::padic::modular::val_i128(*denominator as i128, self.spec.p).unwrap_or(0)
            }
        }
    }

    /// Row floors of the assembled basis: the degree of each basis vector.
    pub fn degrees(&self, degree: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for i in 0..self.t() {
            for _ in 0..self.block_size(i, degree) / (degree + 1).max(1) {
                out.extend(0..=degree);
            }
        }
        out
    }
}

fn projector_denominator(dq: &DoubleQuotient) -> u64 {
    dq.stabilizers_mod_center
        .iter()
        .fold(1u64, |acc, s| acc.lcm(&(s.len() as u64)))
}

/// Orbit representatives when each Gamma_i / +-1 acts freely on the cosets
/// of p^k Z_p; `None` when some action has a fixed point.
pub fn fundamental_domains(dq: &DoubleQuotient, k: u32) -> Result<Option<Vec<Vec<usize>>>> {
    let n = (dq.p as usize).pow(k);
    let mut out = Vec::new();
    for imgs in &dq.stabilizer_images {
        let maps = imgs.iter().map(|g| coset_map(g, k)).collect::<Result<Vec<_>>>()?;
        let mut seen = vec![false; n];
        let mut reps = Vec::new();
        for a in 0..n {
            if seen[a] {
                continue;
            }
            let orbit: BTreeSet<usize> = maps.iter().map(|m| m[a]).collect();
            if orbit.len() != maps.len() {
                return Ok(None);
            }
            for &b in &orbit {
                seen[b] = true;
            }
            reps.push(a);
        }
        out.push(reps);
    }
    Ok(Some(out))
}

/// The stabilizer average at index i, kept as the undivided sum
/// S = sum_g g so that Pi = S / |Gamma_i / +-1|.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projector {
    pub order: usize,
    pub sum: Matrix<u128>,
    pub ctx: Zmod,
    pub k: u32,
    pub degree: usize,
}

impl Projector {
    /// Columns of degree j <= this are unaffected by truncation at the
    /// working precision: the dropped terms have valuation >= (D+1-j)(k+1).
    pub fn trusted_degree(&self) -> Option<usize> {
        let n = self.ctx.digits() as usize;
        let step = self.k as usize + 1;
        (0..=self.degree).rev().find(|&j| (self.degree + 1 - j) * step >= n)
    }

    /// v(Pi^2 - Pi) on the columns of degree <= `max_degree`; `None` when
    /// it vanishes at working precision.
    pub fn idempotency_defect(&self, max_degree: usize) -> Option<i64> {
        let z = &self.ctx;
        let sq = self.sum.mul(z, &self.sum);
        let scaled = self.sum.map(|&x| z.mul(x, z.from_i64(self.order as i64)));
        let d = sq.sub(z, &scaled);
        let vg = crate::padic::modular::val_i128(self.order as i128, z.p()).unwrap_or(0) as i64;
        let len = self.degree + 1;
        (0..d.cols())
            .filter(|c| c % len <= max_degree)
            .flat_map(|c| d.column(c))
            .filter_map(|x| z.valuation(x))
            .min()
            .map(|v| v as i64 - 2 * vg)
    }

    /// Pi itself, when |Gamma| is a unit.
    pub fn matrix(&self) -> Result<Matrix<u128>> {
        let z = &self.ctx;
        let inv = z.inv(z.from_i64(self.order as i64))?;
        Ok(self.sum.map(|&x| z.mul(x, inv)))
    }

    pub fn rank(&self, cutoff: u32) -> usize {
        linalg::padic_rank(&self.ctx, &self.sum, cutoff)
    }
}

pub fn invariant_projector(gs: &GlobalSpace, i: usize) -> Result<Projector> {
    let w = gs.spec.point_weight()?;
    let ctx = gs.spec.ctx();
    let geom = Geometry::of(&gs.spec);
    let all: Vec<usize> = (0..gs.spec.cosets()).collect();
    let mut sum = Matrix::zeros(&ctx, gs.spec.dim(), gs.spec.dim());
    for g in &gs.dq.stabilizer_images[i] {
        let m = local_action_at(&ctx, &w, g, geom, &all)?.dense(&ctx);
        sum = sum.add(&ctx, &m);
    }
    Ok(Projector { order: gs.dq.stabilizer_images[i].len(), sum, ctx, k: gs.spec.k, degree: gs.spec.degree })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// Plain sums over coset representatives.
    Indicator,
    /// U_p divided by p.
    Normalized,
}

impl Convention {
    pub fn tag(&self) -> &'static str {
        match self {
            Convention::Indicator => "indicator",
            Convention::Normalized => "normalized",
        }
    }
}

/// An assembled operator: the true operator is p^shift * matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockMatrix<E> {
    pub operator: Operator,
    pub p: u64,
    pub precision: u32,
    pub convention: Convention,
    pub shift: i64,
    pub degrees: Degrees,
    pub row_blocks: Vec<usize>,
    pub col_blocks: Vec<usize>,
    pub matrix: Matrix<E>,
}

impl<E: Clone> BlockMatrix<E> {
    /// Degree of the basis vector indexing row r.
    pub fn row_degree(&self, r: usize) -> usize {
        r % (self.degrees.target + 1)
    }

    pub fn col_degree(&self, c: usize) -> usize {
        c % (self.degrees.source + 1)
    }

    pub fn block(&self, j: usize, k: usize) -> Matrix<E> {
        let r0: usize = self.row_blocks[..j].iter().sum();
        let c0: usize = self.col_blocks[..k].iter().sum();
        let rows: Vec<usize> = (r0..r0 + self.row_blocks[j]).collect();
        let cols: Vec<usize> = (c0..c0 + self.col_blocks[k]).collect();
        self.matrix.select(&rows, &cols)
    }
}

impl BlockMatrix<u128> {
    pub fn to_json(&self) -> serde_json::Value {
        let ctx = Zmod::new(self.p, self.precision).unwrap();
        let t = self.row_blocks.len();
        let blocks: Vec<Vec<Vec<Vec<String>>>> = (0..t)
            .map(|j| {
                (0..self.col_blocks.len())
                    .map(|k| {
                        let b = self.block(j, k);
                        (0..b.rows())
                            .map(|r| {
                                b.row(r)
                                    .iter()
                                    .map(|&x| {
                                        crate::padic::scalar::PadicScalar::from_scaled_residue(&ctx, x, self.shift)
                                            .to_string()
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        serde_json::json!({
            "operator": self.operator.label(self.p),
            "convention": self.convention.tag(),
            "row_blocks": self.row_blocks,
            "col_blocks": self.col_blocks,
            "blocks": blocks,
        })
    }
}

/// Degree cutoffs of the rows and columns of an assembled matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Degrees {
    pub target: usize,
    pub source: usize,
}

impl Degrees {
    pub fn square(d: usize) -> Self {
        Degrees { target: d, source: d }
    }
}

/// Assemble the operator of `cosets` in any coefficient ring.
pub fn assemble_in<R, W>(
    ring: &R,
    weight: &W,
    gs: &GlobalSpace,
    cosets: &HeckeCosetData,
    degrees: Degrees,
    convention: Convention,
) -> Result<BlockMatrix<R::Elem>>
where
    R: ResidueAlgebra,
    W: LocalWeight<R> + ?Sized,
{
    cosets.validate(&gs.dq)?;
    assemble_core(ring, weight, gs, cosets, degrees, convention)
}

fn assemble_core<R, W>(
    ring: &R,
    weight: &W,
    gs: &GlobalSpace,
    cosets: &HeckeCosetData,
    degrees: Degrees,
    convention: Convention,
) -> Result<BlockMatrix<R::Elem>>
where
    R: ResidueAlgebra,
    W: LocalWeight<R> + ?Sized,
{
    let t = gs.t();
    let row_blocks: Vec<usize> = (0..t).map(|i| gs.block_size(i, degrees.target)).collect();
    let col_blocks: Vec<usize> = (0..t).map(|i| gs.block_size(i, degrees.source)).collect();
    let mut shift = 0i64;
    if convention == Convention::Normalized && cosets.operator == Operator::Up {
        shift -= 1;
    }
    let ctx = *ring.base();
    let geom = Geometry {
        p: gs.spec.p,
        target_k: gs.spec.k,
        source_k: gs.spec.k,
        target_deg: degrees.target,
        source_deg: degrees.source,
    };
    let (lt, ls) = (degrees.target + 1, degrees.source + 1);
    let mut grid: Vec<Vec<Matrix<R::Elem>>> = (0..t)
        .map(|j| (0..t).map(|k| Matrix::zeros(ring, row_blocks[j], col_blocks[k])).collect())
        .collect();
    if !gs.zero {
        let (scale, dshift) = match &gs.layout {
            Layout::Reduced { .. } => (vec![1u128 % ctx.modulus(); t], 0),
            Layout::Projector { denominator } => projector_scales(&ctx, &gs.dq, *denominator)?,
        };
        shift -= dshift;
        for j in 0..t {
            let targets = gs.cosets_of(j);
            for k in 0..t {
                let sources = gs.cosets_of(k);
                let pos: Vec<Option<usize>> = (0..gs.spec.cosets())
                    .map(|c| sources.iter().position(|&s| s == c))
                    .collect();
                let blk = &mut grid[j][k];
                for x in &cosets.global[j][k] {
                    for d in &gs.dq.stabilizers_mod_center[k] {
                        let g = MonoidElement::new(gs.dq.conjugate(&x.mul(d), j, k))?;
                        let act = local_action_at(ring, weight, &g, geom, &targets)?;
                        for (ti, b) in act.blocks.iter().enumerate() {
                            let Some(si) = pos[act.source[ti]] else { continue };
                            for r in 0..lt {
                                for c in 0..ls {
                                    let e = blk.get_mut(ti * lt + r, si * ls + c);
                                    let v = ring.scale(b.get(r, c), scale[k]);
                                    ring.add_assign(e, &v);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(BlockMatrix {
        operator: cosets.operator,
        p: gs.spec.p,
        precision: ctx.digits(),
        convention,
        shift,
        degrees,
        row_blocks,
        col_blocks,
        matrix: Matrix::from_blocks(&grid),
    })
}

/// Per-block factors L / |Gamma_k| with the unit part of L divided out,
/// and v_p(L).
fn projector_scales(ctx: &Zmod, dq: &DoubleQuotient, l: u64) -> Result<(Vec<u128>, i64)> {
    let v = crate::padic::modular::val_i128(l as i128, ctx.p()).unwrap_or(0);
    let unit = l / ctx.p().pow(v);
    let uinv = ctx.inv(ctx.from_i64(unit as i64))?;
    let s = dq
        .stabilizers_mod_center
        .iter()
        .map(|g| ctx.mul(ctx.from_i64((l / g.len() as u64) as i64), uinv))
        .collect();
    Ok((s, v as i64))
}

/// Assemble at a single weight with square degree cutoffs.
pub fn assemble_hecke(gs: &GlobalSpace, cosets: &HeckeCosetData, convention: Convention) -> Result<BlockMatrix<u128>> {
    let w = gs.spec.point_weight()?;
    let ctx = gs.spec.ctx();
    assemble_in(&ctx, &w, gs, cosets, Degrees::square(gs.spec.degree), convention)
}

/// The operator of the identity double coset (the stabilizer averages).
pub fn identity_operator(gs: &GlobalSpace) -> Result<BlockMatrix<u128>> {
    let t = gs.t();
    let global = (0..t)
        .map(|j| (0..t).map(|k| if j == k { vec![HurwitzQuat::one()] } else { vec![] }).collect())
        .collect();
    let local = (0..t)
        .map(|j| {
            (0..t)
                .map(|k| {
                    if j == k {
                        Ok(vec![MonoidElement::new(gs.dq.conjugate(&HurwitzQuat::one(), j, j))?])
                    } else {
                        Ok(vec![])
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let data = HeckeCosetData { operator: Operator::T(1), p: gs.spec.p, global, local };
    let w = gs.spec.point_weight()?;
    let ctx = gs.spec.ctx();
    // the degree identity does not apply to the identity coset
    assemble_core(&ctx, &w, gs, &data, Degrees::square(gs.spec.degree), Convention::Indicator)
}

/// Minimum valuation of the entries of AB - BA (None when it vanishes).
/// `a` and `b` must be assembled with guard bands: a with source degree
/// D' and b with target degree D', and likewise for the reverse product.
pub fn commutator_check(
    a_wide: &BlockMatrix<u128>,
    b_tall: &BlockMatrix<u128>,
    b_wide: &BlockMatrix<u128>,
    a_tall: &BlockMatrix<u128>,
) -> Result<Option<i64>> {
    let p = a_wide.p;
    let ctx = Zmod::new(p, a_wide.precision)?;
    if a_wide.matrix.cols() != b_tall.matrix.rows() || b_wide.matrix.cols() != a_tall.matrix.rows() {
        return Err(Error::Dimension("guard-band shapes do not match".into()));
    }
    let ab = a_wide.matrix.mul(&ctx, &b_tall.matrix);
    let ba = b_wide.matrix.mul(&ctx, &a_tall.matrix);
    if ab.rows() != ba.rows() || ab.cols() != ba.cols() {
        return Err(Error::Dimension("products have different shapes".into()));
    }
    let s1 = a_wide.shift + b_tall.shift;
    let s2 = b_wide.shift + a_tall.shift;
    if s1 != s2 {
        return Err(Error::Dimension("operators use different scalings".into()));
    }
    let d = ab.sub(&ctx, &ba);
    Ok(d.entries().iter().filter_map(|&x| ctx.valuation(x)).min().map(|v| v as i64 + s1))
}

/// The classical space and its Hecke matrix over Q(i).
#[derive(Debug, Clone)]
pub struct BrandtMatrix {
    pub operator: Operator,
    pub n: u32,
    pub matrix: Matrix<Gaussian>,
    /// Dimension of sum_i (Sym^n)^Gamma_i.
    pub classical_dim: usize,
    /// Coefficients of det(1 - tB), all rational.
    pub fredholm: Vec<BigRational>,
}

impl BrandtMatrix {
    /// Newton polygon of det(1 - tB) at p (exact).
    pub fn newton_polygon(&self, p: u64) -> Result<NewtonPolygon> {
        let info: Vec<CoeffInfo> = self
            .fredholm
            .iter()
            .map(|c| match rational_valuation(c, p) {
                Some(v) => CoeffInfo::Known(v),
                None => CoeffInfo::AtLeast(i64::MAX),
            })
            .collect();
        polygon_from_info(&info, None)
    }
}

pub fn rational_valuation(x: &BigRational, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let count = |mut n: BigInt| {
        let mut v = 0i64;
        while (&n % &pb).is_zero() {
            n /= &pb;
            v += 1;
        }
        v
    };
    Some(count(x.numer().abs()) - count(x.denom().abs()))
}

/// x -> (x0 + x1 i, x2 + x3 i; -x2 + x3 i, x0 - x1 i) over Q(i).
fn gaussian_image(x: &HurwitzQuat) -> [Gaussian; 4] {
    let d = x.doubled();
    let h = |v: i64| BigRational::new(BigInt::from(v), BigInt::from(2));
    [
        Gaussian::new(h(d[0]), h(d[1])),
        Gaussian::new(h(d[2]), h(d[3])),
        Gaussian::new(h(-d[2]), h(d[3])),
        Gaussian::new(h(d[0]), h(-d[1])),
    ]
}

/// Sym^n tensor det^n2 on polynomials of degree <= n:
/// f(z) -> det^n2 (a + c z)^n f((b + d z) / (a + c z)); column m is the
/// image of z^m.
fn sym_rep(g: &[Gaussian; 4], n: usize, n2: i64, det_scale: &BigRational) -> Matrix<Gaussian> {
    let r = GaussianRationals;
    let [a, b, c, d] = g;
    let poly_mul = |x: &[Gaussian], y: &[Gaussian]| {
        let mut out = vec![r.zero(); x.len() + y.len() - 1];
        for (i, u) in x.iter().enumerate() {
            for (j, v) in y.iter().enumerate() {
                out[i + j] = r.add(&out[i + j], &r.mul(u, v));
            }
        }
        out
    };
    let lin1 = vec![a.clone(), c.clone()];
    let lin2 = vec![b.clone(), d.clone()];
    let det = r.sub(&r.mul(a, d), &r.mul(b, c));
    let mut dpow = r.one();
    for _ in 0..n2.unsigned_abs() {
        dpow = r.mul(&dpow, &det);
    }
    if n2 < 0 {
        dpow = dpow.inv().expect("invertible");
    }
    let dpow = dpow.div_rational(det_scale);
    let mut m = Matrix::filled(n + 1, n + 1, r.zero());
    for col in 0..=n {
        // (b + d z)^col (a + c z)^(n - col)
        let mut f = vec![r.one()];
        for _ in 0..col {
            f = poly_mul(&f, &lin2);
        }
        for _ in 0..n - col {
            f = poly_mul(&f, &lin1);
        }
        for (i, x) in f.iter().enumerate() {
            m.set(i, col, r.mul(x, &dpow));
        }
    }
    m
}

/// Brandt matrix of `cosets` on sum_i (Sym^n tensor det^n2)^Gamma_i, with
/// the p-power part of the determinant twist removed at U_p so that it
/// matches the overconvergent normalization.
pub fn classical_brandt(cosets: &HeckeCosetData, weight: (i64, i64), dq: &DoubleQuotient) -> Result<BrandtMatrix> {
    let (n1, n2) = weight;
    if n1 < n2 {
        return Err(Error::NonDominant { n1, n2 });
    }
    let n = (n1 - n2) as usize;
    let r = GaussianRationals;
    let t = dq.t();
    let one = BigRational::one();
    let p_scale = match cosets.operator {
        Operator::Up => num_traits::pow(BigRational::from_integer(BigInt::from(cosets.p)), n2.unsigned_abs() as usize),
        Operator::T(_) => one.clone(),
    };
    let p_scale = if n2 < 0 { one.clone() / p_scale } else { p_scale };
    let projectors: Vec<Matrix<Gaussian>> = dq
        .stabilizers
        .iter()
        .map(|st| {
            let mut acc = Matrix::filled(n + 1, n + 1, r.zero());
            for g in st {
                acc = acc.add(&r, &sym_rep(&gaussian_image(g), n, n2, &one));
            }
            let inv = BigRational::new(BigInt::one(), BigInt::from(st.len()));
            acc.map(|x| Gaussian::new(&x.re * &inv, &x.im * &inv))
        })
        .collect();
    let classical_dim = projectors.iter().map(|pm| linalg::rank(&r, pm)).sum();
    let mut grid = Vec::with_capacity(t);
    for j in 0..t {
        let mut row = Vec::with_capacity(t);
        for k in 0..t {
            let mut acc = Matrix::filled(n + 1, n + 1, r.zero());
            for x in &cosets.global[j][k] {
                acc = acc.add(&r, &sym_rep(&gaussian_image(x), n, n2, &p_scale));
            }
            row.push(acc.mul(&r, &projectors[k]));
        }
        grid.push(row);
    }
    let matrix = Matrix::from_blocks(&grid);
    let coeffs = linalg::fredholm_coefficients(&r, &matrix, matrix.rows());
    let mut fredholm = Vec::with_capacity(coeffs.len());
    for c in coeffs {
        if !c.im.is_zero() {
            return Err(Error::Certification("Brandt characteristic polynomial is not rational".into()));
        }
        fredholm.push(c.re);
    }
    Ok(BrandtMatrix { operator: cosets.operator, n: n as u32, matrix, classical_dim, fredholm })
}

/// Exact rational lift of the trace, for small sanity checks.
pub fn brandt_trace(b: &BrandtMatrix) -> Option<Ratio<i64>> {
    let tr = b.fredholm.get(1)?.clone();
    let tr = -tr;
    Some(Ratio::new(tr.numer().to_i64()?, tr.denom().to_i64()?))
}

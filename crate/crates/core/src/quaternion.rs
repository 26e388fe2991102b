//! The Hurwitz order in the quaternion algebra (-1, -1 / Q), its splitting
//! at an odd prime, the double quotient at Iwahori or maximal level, and
//! the Hecke coset data A_jk.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::induced::MonoidElement;
use crate::padic::modular::{is_odd_prime, Zmod};
use crate::padic::scalar::PadicScalar;

/// x0 + x1 i + x2 j + x3 k stored as doubled coordinates (2 x0, ..., 2 x3),
/// all of one parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "[i64; 4]", into = "[i64; 4]")]
pub struct HurwitzQuat {
    d: [i64; 4],
}

impl TryFrom<[i64; 4]> for HurwitzQuat {
    type Error = Error;
    fn try_from(d: [i64; 4]) -> Result<Self> {
        Self::from_doubled(d)
    }
}

impl From<HurwitzQuat> for [i64; 4] {
    fn from(q: HurwitzQuat) -> [i64; 4] {
        q.d
    }
}

impl HurwitzQuat {
    pub fn from_doubled(d: [i64; 4]) -> Result<Self> {
        let par = d[0].rem_euclid(2);
        if d.iter().any(|x| x.rem_euclid(2) != par) {
            return Err(Error::Parse(format!("{d:?}: coordinates must be all integral or all half-integral")));
        }
        Ok(HurwitzQuat { d })
    }

    pub fn from_integers(x: [i64; 4]) -> Self {
        HurwitzQuat { d: x.map(|c| 2 * c) }
    }

    pub fn one() -> Self {
        Self::from_integers([1, 0, 0, 0])
    }

    pub fn doubled(&self) -> [i64; 4] {
        self.d
    }

    pub fn mul(&self, other: &HurwitzQuat) -> HurwitzQuat {
        let [a1, b1, c1, d1] = self.d;
        let [a2, b2, c2, d2] = other.d;
        let r = [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ];
        // (x/2)(y/2) = r/4, doubled coordinates r/2; the order is closed
        HurwitzQuat { d: r.map(|v| v / 2) }
    }

    pub fn conj(&self) -> HurwitzQuat {
        let [a, b, c, d] = self.d;
        HurwitzQuat { d: [a, -b, -c, -d] }
    }

    pub fn neg(&self) -> HurwitzQuat {
        HurwitzQuat { d: self.d.map(|x| -x) }
    }

    pub fn nrd(&self) -> i64 {
        self.d.iter().map(|x| x * x).sum::<i64>() / 4
    }
}

impl fmt::Display for HurwitzQuat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = |x: i64| if x % 2 == 0 { (x / 2).to_string() } else { format!("{x}/2") };
        write!(f, "{} + {}i + {}j + {}k", h(self.d[0]), h(self.d[1]), h(self.d[2]), h(self.d[3]))
    }
}

/// All elements of reduced norm n.
pub fn enumerate_norm(n: u64) -> Vec<HurwitzQuat> {
    let target = 4 * n as i64;
    let r = (target as f64).sqrt() as i64 + 1;
    let mut out = Vec::new();
    for a in -r..=r {
        let ra = target - a * a;
        if ra < 0 {
            continue;
        }
        for b in -r..=r {
            let rb = ra - b * b;
            if rb < 0 || (a - b) % 2 != 0 {
                continue;
            }
            for c in -r..=r {
                let rc = rb - c * c;
                if rc < 0 || (a - c) % 2 != 0 {
                    continue;
                }
                let d = (rc as f64).sqrt().round() as i64;
                if d * d != rc || (a - d) % 2 != 0 {
                    continue;
                }
                out.push(HurwitzQuat { d: [a, b, c, d] });
                if d != 0 {
                    out.push(HurwitzQuat { d: [a, b, c, -d] });
                }
            }
        }
    }
    out.sort();
    out
}

/// B tensor Q_p = M_2(Q_p) through i -> I, j -> J.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingData {
    pub p: u64,
    pub precision: u32,
    pub alpha: u128,
    pub beta: u128,
    pub i: [PadicScalar; 4],
    pub j: [PadicScalar; 4],
    pub k: [PadicScalar; 4],
}

/// alpha^2 + beta^2 = -1 in Z_p, with I = (alpha beta; beta -alpha),
/// J = (0 1; -1 0), K = IJ = (-beta alpha; alpha beta).
pub fn split_at_p(p: u64, precision: u32) -> Result<SplittingData> {
    if p == 2 {
        return Err(Error::RamifiedPlace);
    }
    if !is_odd_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let ctx = Zmod::new(p, precision)?;
    let (mut al, mut be) = (0u128, 0u128);
    'search: for a in 0..p as u128 {
        for b in 0..p as u128 {
            if (a * a + b * b + 1) % p as u128 == 0 {
                al = a;
                be = b;
                break 'search;
            }
        }
    }
    for _ in 0..2 * precision + 2 {
        let f = ctx.add(ctx.add(ctx.mul(al, al), ctx.mul(be, be)), 1);
        if f == 0 {
            break;
        }
        if al % p as u128 != 0 {
            al = ctx.sub(al, ctx.mul(f, ctx.inv(ctx.add(al, al))?));
        } else {
            be = ctx.sub(be, ctx.mul(f, ctx.inv(ctx.add(be, be))?));
        }
    }
    let s = |x: u128| PadicScalar::from_residue(&ctx, x);
    let i = [s(al), s(be), s(be), s(ctx.neg(al))];
    let j = [s(0), s(1), s(ctx.neg(1)), s(0)];
    let k = [s(ctx.neg(be)), s(al), s(al), s(be)];
    Ok(SplittingData { p, precision, alpha: al, beta: be, i, j, k })
}

impl SplittingData {
    pub fn ctx(&self) -> Zmod {
        Zmod::new(self.p, self.precision).expect("validated")
    }

    /// Image as residues (a, b, c, d) modulo p^precision.
    pub fn image_residues(&self, x: &HurwitzQuat) -> [u128; 4] {
        let z = self.ctx();
        let half = z.inv(2).expect("p odd");
        let [x0, x1, x2, x3] = x.d.map(|c| z.mul(z.from_i64(c), half));
        let (al, be) = (self.alpha, self.beta);
        let a = z.add(z.add(x0, z.mul(x1, al)), z.neg(z.mul(x3, be)));
        let b = z.add(z.add(z.mul(x1, be), x2), z.mul(x3, al));
        let c = z.add(z.sub(z.mul(x1, be), x2), z.mul(x3, al));
        let d = z.add(z.sub(x0, z.mul(x1, al)), z.mul(x3, be));
        [a, b, c, d]
    }

    pub fn image(&self, x: &HurwitzQuat) -> [PadicScalar; 4] {
        let z = self.ctx();
        self.image_residues(x).map(|r| PadicScalar::from_residue(&z, r))
    }
}

fn mat_mul(z: &Zmod, x: &[u128; 4], y: &[u128; 4]) -> [u128; 4] {
    [
        z.add(z.mul(x[0], y[0]), z.mul(x[1], y[2])),
        z.add(z.mul(x[0], y[1]), z.mul(x[1], y[3])),
        z.add(z.mul(x[2], y[0]), z.mul(x[3], y[2])),
        z.add(z.mul(x[2], y[1]), z.mul(x[3], y[3])),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Maximal,
    Iwahori,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Maximal => "maximal",
            Level::Iwahori => "iwahori",
        })
    }
}

impl FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "maximal" => Ok(Level::Maximal),
            "iwahori" => Ok(Level::Iwahori),
            _ => Err(Error::Parse(format!("level `{s}`: expected maximal or iwahori"))),
        }
    }
}

/// Points of P^1(F_p): index 0 is infinity = (1:0), index 1+x is (x:1).
fn point_of(p: u64, v: (u128, u128)) -> usize {
    let p = p as u128;
    let (a, b) = (v.0 % p, v.1 % p);
    if b == 0 {
        0
    } else {
        let z = Zmod::new(p as u64, 1).unwrap();
        1 + z.mul(a, z.inv(b).unwrap()) as usize
    }
}

fn point_vector(idx: usize) -> (u128, u128) {
    if idx == 0 {
        (1, 0)
    } else {
        ((idx - 1) as u128, 1)
    }
}

/// mu sends infinity to the point; mu_inf = 1, mu_(x:1) = (x -1; 1 0).
fn mu(idx: usize) -> ([i64; 4], [i64; 4]) {
    if idx == 0 {
        ([1, 0, 0, 1], [1, 0, 0, 1])
    } else {
        let x = (idx - 1) as i64;
        ([x, -1, 1, 0], [0, 1, -1, x])
    }
}

fn act_point(p: u64, g: &[u128; 4], idx: usize) -> usize {
    let pm = p as u128;
    let (x, y) = point_vector(idx);
    let g = g.map(|e| e % pm);
    point_of(p, ((g[0] * x + g[1] * y) % pm, (g[2] * x + g[3] * y) % pm))
}

/// Canonical representative of +-x: first nonzero coordinate positive.
fn mod_center(x: &HurwitzQuat) -> HurwitzQuat {
    let first = x.d.iter().find(|&&c| c != 0).copied().unwrap_or(0);
    if first < 0 {
        x.neg()
    } else {
        *x
    }
}

/// G(Q) \ G(A_f) / U at the given level, with stabilizers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleQuotient {
    pub p: u64,
    pub level: Level,
    pub splitting: SplittingData,
    /// Point of P^1(F_p) for each representative (maximal level: none).
    pub points: Vec<usize>,
    pub orbits: Vec<Vec<usize>>,
    /// Gamma_i including the central units +-1.
    pub stabilizers: Vec<Vec<HurwitzQuat>>,
    /// Gamma_i / {+-1}.
    pub stabilizers_mod_center: Vec<Vec<HurwitzQuat>>,
    /// mu_i^-1 gamma mu_i for gamma in stabilizers_mod_center (Iwahori level).
    pub stabilizer_images: Vec<Vec<MonoidElement>>,
}

impl DoubleQuotient {
    pub fn t(&self) -> usize {
        self.stabilizers.len()
    }

    /// Sum of 1 / |Gamma_i / +-1|.
    pub fn mass(&self) -> Ratio<i64> {
        self.stabilizers_mod_center
            .iter()
            .map(|s| Ratio::new(1, s.len() as i64))
            .sum()
    }

    /// mu_j^-1 x mu_k as residues modulo p^precision.
    pub fn conjugate_residues(&self, x: &HurwitzQuat, j: usize, k: usize) -> [u128; 4] {
        let z = self.splitting.ctx();
        let img = self.splitting.image_residues(x);
        if self.level == Level::Maximal {
            return img;
        }
        let (_, mj_inv) = mu(self.points[j]);
        let (mk, _) = mu(self.points[k]);
        let l = mat_mul(&z, &mj_inv.map(|v| z.from_i64(v)), &img);
        mat_mul(&z, &l, &mk.map(|v| z.from_i64(v)))
    }

    pub fn conjugate(&self, x: &HurwitzQuat, j: usize, k: usize) -> [PadicScalar; 4] {
        let z = self.splitting.ctx();
        self.conjugate_residues(x, j, k).map(|r| PadicScalar::from_residue(&z, r))
    }
}

pub fn build_double_quotient(p: u64, level: Level, precision: u32) -> Result<DoubleQuotient> {
    let splitting = split_at_p(p, precision)?;
    let units = enumerate_norm(1);
    let imgs: Vec<[u128; 4]> = units.iter().map(|u| splitting.image_residues(u)).collect();
    let mut dq = DoubleQuotient {
        p,
        level,
        splitting: splitting.clone(),
        points: vec![],
        orbits: vec![],
        stabilizers: vec![],
        stabilizers_mod_center: vec![],
        stabilizer_images: vec![],
    };
    match level {
        Level::Maximal => {
            dq.orbits.push(vec![]);
            dq.stabilizers.push(units.clone());
            dq.stabilizers_mod_center.push(center_quotient(&units));
        }
        Level::Iwahori => {
            let mut seen = BTreeSet::new();
            for pt in 0..=p as usize {
                if seen.contains(&pt) {
                    continue;
                }
                let orbit: BTreeSet<usize> = imgs.iter().map(|g| act_point(p, g, pt)).collect();
                seen.extend(orbit.iter().copied());
                let stab: Vec<HurwitzQuat> = units
                    .iter()
                    .zip(&imgs)
                    .filter(|(_, g)| act_point(p, g, pt) == pt)
                    .map(|(u, _)| *u)
                    .collect();
                dq.points.push(pt);
                dq.orbits.push(orbit.into_iter().collect());
                dq.stabilizers_mod_center.push(center_quotient(&stab));
                dq.stabilizers.push(stab);
            }
            for i in 0..dq.t() {
                let imgs = dq.stabilizers_mod_center[i]
                    .iter()
                    .map(|g| MonoidElement::new(dq.conjugate(g, i, i)))
                    .collect::<Result<Vec<_>>>()?;
                for m in &imgs {
                    if m.det_valuation != 0 {
                        return Err(Error::NotInMonoid("stabilizer image is not invertible".into()));
                    }
                }
                dq.stabilizer_images.push(imgs);
            }
        }
    }
    Ok(dq)
}

fn center_quotient(g: &[HurwitzQuat]) -> Vec<HurwitzQuat> {
    let set: BTreeSet<HurwitzQuat> = g.iter().map(mod_center).collect();
    set.into_iter().collect()
}

/// U_p or T_q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Operator {
    Up,
    T(u64),
}

impl Operator {
    pub fn degree(&self, p: u64) -> usize {
        match self {
            Operator::Up => p as usize,
            Operator::T(q) => *q as usize + 1,
        }
    }

    pub fn norm(&self, p: u64) -> u64 {
        match self {
            Operator::Up => p,
            Operator::T(q) => *q,
        }
    }

    pub fn label(&self, p: u64) -> String {
        match self {
            Operator::Up => format!("U{p}"),
            Operator::T(q) => format!("T{q}"),
        }
    }

    pub fn parse(s: &str, p: u64) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidOperator(format!("`{s}`: expected U, Up, U{p} or Tq"));
        if s == "U" || s == "Up" || s == format!("U{p}") {
            return Ok(Operator::Up);
        }
        let q: u64 = s.strip_prefix('T').ok_or_else(bad)?.parse().map_err(|_| bad())?;
        if !is_odd_prime(q) || q == p {
            return Err(Error::InvalidOperator(format!("T{q}: q must be an odd prime different from {p}")));
        }
        Ok(Operator::T(q))
    }
}

/// A_jk for one operator: `global[j][k]` are quaternion representatives,
/// `local[j][k]` their conjugated p-components.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeckeCosetData {
    pub operator: Operator,
    pub p: u64,
    pub global: Vec<Vec<Vec<HurwitzQuat>>>,
    pub local: Vec<Vec<Vec<MonoidElement>>>,
}

impl HeckeCosetData {
    pub fn t(&self) -> usize {
        self.global.len()
    }

    /// Degree identities and monoid membership.
    pub fn validate(&self, dq: &DoubleQuotient) -> Result<()> {
        let want = self.operator.degree(self.p);
        let t = dq.t();
        if self.global.len() != t || self.local.len() != t {
            return Err(Error::DegreeIdentity(format!("expected {t} rows of cosets")));
        }
        for j in 0..t {
            if self.global[j].len() != t || self.local[j].len() != t {
                return Err(Error::DegreeIdentity(format!("row {j} has the wrong number of blocks")));
            }
            let total: usize = self.global[j].iter().map(|v| v.len()).sum();
            if total != want {
                return Err(Error::DegreeIdentity(format!(
                    "{}: row {j} has {total} cosets, expected {want}",
                    self.operator.label(self.p)
                )));
            }
            for k in 0..t {
                let local_len = if dq.level == Level::Iwahori { self.global[j][k].len() } else { 0 };
                if self.local[j][k].len() != local_len {
                    return Err(Error::DegreeIdentity(format!("block ({j},{k}) is inconsistent")));
                }
                for x in &self.global[j][k] {
                    if x.nrd() as u64 != self.operator.norm(self.p) {
                        return Err(Error::DegreeIdentity(format!("{x} has the wrong norm")));
                    }
                }
                if dq.level == Level::Iwahori {
                    for (x, m) in self.global[j][k].iter().zip(&self.local[j][k]) {
                        let again = MonoidElement::new(dq.conjugate(x, j, k))?;
                        if again.entries != m.entries {
                            return Err(Error::DegreeIdentity(format!("local image of {x} does not match")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Whether mu_j^-1 x mu_k lies in the support of the operator.
fn in_support(op: Operator, p: u64, m: &[u128; 4]) -> bool {
    let pm = p as u128;
    let [a, _, c, d] = m.map(|e| e % pm);
    match op {
        Operator::T(_) => c == 0,
        Operator::Up => a != 0 && c == 0 && d == 0,
    }
}

pub fn hecke_coset_data(op: Operator, dq: &DoubleQuotient) -> Result<HeckeCosetData> {
    let p = dq.p;
    if let Operator::T(q) = op {
        if q == p || q == 2 || !is_odd_prime(q) {
            return Err(Error::InvalidOperator(format!("T{q} at p = {p}")));
        }
    }
    if op == Operator::Up && dq.level != Level::Iwahori {
        return Err(Error::InvalidOperator("U_p needs Iwahori level".into()));
    }
    let elems = enumerate_norm(op.norm(p));
    let t = dq.t();
    let mut global = vec![vec![Vec::new(); t]; t];
    let mut local = vec![vec![Vec::new(); t]; t];
    for j in 0..t {
        for k in 0..t {
            let mut reps = BTreeSet::new();
            for x in &elems {
                let m = dq.conjugate_residues(x, j, k);
                if dq.level == Level::Iwahori && !in_support(op, p, &m) {
                    continue;
                }
                let canon = dq.stabilizers[k].iter().map(|g| x.mul(g)).min().expect("nonempty");
                reps.insert(canon);
            }
            for x in reps {
                if dq.level == Level::Iwahori {
                    local[j][k].push(MonoidElement::new(dq.conjugate(&x, j, k))?);
                }
                global[j][k].push(x);
            }
        }
    }
    let data = HeckeCosetData { operator: op, p, global, local };
    data.validate(dq)?;
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(x: [i64; 4]) -> HurwitzQuat {
        HurwitzQuat::from_integers(x)
    }

    #[test]
    fn products_and_norms() {
        assert_eq!(q([0, 1, 0, 0]).mul(&q([0, 0, 1, 0])), q([0, 0, 0, 1]));
        let w = HurwitzQuat::from_doubled([1, 1, 1, 1]).unwrap();
        assert_eq!(w.nrd(), 1);
        assert_eq!(q([1, 1, 0, 0]).mul(&q([1, 0, 1, 0])).nrd(), 4);
        assert!(HurwitzQuat::from_doubled([1, 2, 1, 1]).is_err());
        assert_eq!(w.conj().mul(&w), HurwitzQuat::one());
    }

    #[test]
    fn norm_counts() {
        assert_eq!(enumerate_norm(1).len(), 24);
        assert_eq!(enumerate_norm(3).len(), 96);
        assert_eq!(enumerate_norm(5).len(), 144);
        assert_eq!(enumerate_norm(7).len(), 192);
    }

    #[test]
    fn splittings() {
        let s3 = split_at_p(3, 20).unwrap();
        assert_eq!((s3.alpha % 3, s3.beta % 3), (1, 1));
        let s5 = split_at_p(5, 20).unwrap();
        assert_eq!((s5.alpha % 5, s5.beta % 5), (0, 2));
        let z = s5.ctx();
        assert_eq!(z.add(z.add(z.mul(s5.alpha, s5.alpha), z.mul(s5.beta, s5.beta)), 1), 0);
        assert_eq!(s3.image_residues(&HurwitzQuat::one()), [1, 0, 0, 1]);
        assert!(matches!(split_at_p(2, 10), Err(Error::RamifiedPlace)));
    }

    #[test]
    fn double_quotients() {
        for p in [3, 5, 7] {
            let m = build_double_quotient(p, Level::Maximal, 20).unwrap();
            assert_eq!(m.t(), 1);
            assert_eq!(m.stabilizers_mod_center[0].len(), 12);
            assert_eq!(m.mass(), Ratio::new(1, 12));
            let dq = build_double_quotient(p, Level::Iwahori, 20).unwrap();
            assert_eq!(dq.orbits.iter().map(|o| o.len()).sum::<usize>(), p as usize + 1);
        }
        let dq = build_double_quotient(3, Level::Iwahori, 20).unwrap();
        assert_eq!(dq.t(), 1);
        assert_eq!(dq.stabilizers_mod_center[0].len(), 3);
    }

    #[test]
    fn coset_counts() {
        let m = build_double_quotient(3, Level::Maximal, 20).unwrap();
        assert_eq!(hecke_coset_data(Operator::T(5), &m).unwrap().global[0][0].len(), 6);
        let dq = build_double_quotient(3, Level::Iwahori, 20).unwrap();
        assert_eq!(hecke_coset_data(Operator::Up, &dq).unwrap().global[0][0].len(), 3);
        let t7 = hecke_coset_data(Operator::T(7), &dq).unwrap();
        assert_eq!(t7.global[0].iter().map(|v| v.len()).sum::<usize>(), 8);
        for p in [5u64, 7] {
            let dq = build_double_quotient(p, Level::Iwahori, 20).unwrap();
            hecke_coset_data(Operator::Up, &dq).unwrap();
            hecke_coset_data(Operator::T(if p == 5 { 3 } else { 5 }), &dq).unwrap();
        }
    }

    #[test]
    fn json_round_trip_and_corruption() {
        let dq = build_double_quotient(3, Level::Iwahori, 20).unwrap();
        let data = hecke_coset_data(Operator::Up, &dq).unwrap();
        let back = HeckeCosetData::from_json(&data.to_json().unwrap()).unwrap();
        assert_eq!(back, data);
        let mut bad = data.clone();
        bad.global[0][0].pop();
        bad.local[0][0].pop();
        assert!(matches!(bad.validate(&dq), Err(Error::DegreeIdentity(_))));
    }
}

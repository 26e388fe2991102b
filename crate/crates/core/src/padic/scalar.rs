use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::modular::Zmod;
use crate::error::{Error, Result};

pub const DEFAULT_PRECISION: u32 = 30;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Kind {
    /// Exactly zero.
    Exact,
    /// Known to be 0 mod p^abs and nothing more.
    Zero { abs: i64 },
    /// p^v * unit, known modulo p^(v + rel).
    Nonzero { v: i64, unit: u128, rel: u32 },
}

/// An element of Q_p with a capped number of unit digits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicScalar {
    p: u64,
    kind: Kind,
}

impl PadicScalar {
    pub fn exact_zero(p: u64) -> Self {
        PadicScalar { p, kind: Kind::Exact }
    }

    /// The value 0 + O(p^abs).
    pub fn zero_to(p: u64, abs: i64) -> Self {
        PadicScalar { p, kind: Kind::Zero { abs } }
    }

    /// p^v * unit + O(p^(v+rel)). The unit is reduced modulo p^rel.
    pub fn new(p: u64, v: i64, unit: u128, rel: u32) -> Result<Self> {
        let ctx = Zmod::new(p, rel)?;
        let u = ctx.reduce(unit);
        if rel == 0 {
            return Ok(Self::zero_to(p, v));
        }
        if u % p as u128 == 0 {
            return Err(Error::NotAUnit);
        }
        Ok(PadicScalar { p, kind: Kind::Nonzero { v, unit: u, rel } })
    }

    pub fn from_i64(p: u64, x: i64, rel: u32) -> Result<Self> {
        Self::from_i128(p, x as i128, rel)
    }

    pub fn from_i128(p: u64, x: i128, rel: u32) -> Result<Self> {
        let ctx = Zmod::new(p, rel)?;
        if x == 0 {
            return Ok(Self::exact_zero(p));
        }
        let mut v = 0i64;
        let mut y = x;
        while y % p as i128 == 0 {
            y /= p as i128;
            v += 1;
        }
        Ok(PadicScalar { p, kind: Kind::Nonzero { v, unit: ctx.from_i128(y), rel } })
    }

    pub fn from_rational(p: u64, x: &BigRational, rel: u32) -> Result<Self> {
        if x.is_zero() {
            return Ok(Self::exact_zero(p));
        }
        let ctx = Zmod::new(p, rel)?;
        let (vn, un) = split_bigint(x.numer(), p);
        let (vd, ud) = split_bigint(x.denom(), p);
        let un = bigint_residue(&un, &ctx);
        let ud = bigint_residue(&ud, &ctx);
        let unit = ctx.mul(un, ctx.inv(ud)?);
        Ok(PadicScalar { p, kind: Kind::Nonzero { v: vn - vd, unit, rel } })
    }

    /// A residue modulo p^n, read as an element known modulo p^n.
    pub fn from_residue(ctx: &Zmod, r: u128) -> Self {
        match ctx.split(r) {
            None => Self::zero_to(ctx.p(), ctx.digits() as i64),
            Some((v, u)) => PadicScalar {
                p: ctx.p(),
                kind: Kind::Nonzero { v: v as i64, unit: u, rel: ctx.digits() - v },
            },
        }
    }

    /// `p^shift * r` for a residue `r` modulo p^n.
    pub fn from_scaled_residue(ctx: &Zmod, r: u128, shift: i64) -> Self {
        Self::from_residue(ctx, r).shift(shift)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Exact zero or indistinguishable from zero.
    pub fn is_zero(&self) -> bool {
        !matches!(self.kind, Kind::Nonzero { .. })
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.kind, Kind::Exact)
    }

    /// Valuation when determined.
    pub fn valuation(&self) -> Option<i64> {
        match self.kind {
            Kind::Nonzero { v, .. } => Some(v),
            _ => None,
        }
    }

    /// Lower bound for the valuation (`i64::MAX` for exact zero).
    pub fn valuation_floor(&self) -> i64 {
        match self.kind {
            Kind::Exact => i64::MAX,
            Kind::Zero { abs } => abs,
            Kind::Nonzero { v, .. } => v,
        }
    }

    /// The element is known modulo p^abs_precision.
    pub fn abs_precision(&self) -> i64 {
        match self.kind {
            Kind::Exact => i64::MAX,
            Kind::Zero { abs } => abs,
            Kind::Nonzero { v, rel, .. } => v + rel as i64,
        }
    }

    pub fn rel_precision(&self) -> u32 {
        match self.kind {
            Kind::Nonzero { rel, .. } => rel,
            _ => 0,
        }
    }

    pub fn unit(&self) -> Option<u128> {
        match self.kind {
            Kind::Nonzero { unit, .. } => Some(unit),
            _ => None,
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        Ok(())
    }

    /// Multiply by p^e.
    pub fn shift(&self, e: i64) -> Self {
        let kind = match self.kind {
            Kind::Exact => Kind::Exact,
            Kind::Zero { abs } => Kind::Zero { abs: abs + e },
            Kind::Nonzero { v, unit, rel } => Kind::Nonzero { v: v + e, unit, rel },
        };
        PadicScalar { p: self.p, kind }
    }

    /// Forget digits beyond p^abs.
    pub fn cap_abs(&self, abs: i64) -> Self {
        match self.kind {
            Kind::Exact => Self::zero_to(self.p, abs),
            Kind::Zero { abs: a } => Self::zero_to(self.p, a.min(abs)),
            Kind::Nonzero { v, unit, rel } => {
                if abs <= v {
                    return Self::zero_to(self.p, abs);
                }
                let rel2 = rel.min((abs - v) as u32);
                let m = (self.p as u128).pow(rel2);
                PadicScalar { p: self.p, kind: Kind::Nonzero { v, unit: unit % m, rel: rel2 } }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if self.is_exact_zero() {
            return Ok(other.clone());
        }
        if other.is_exact_zero() {
            return Ok(self.clone());
        }
        let abs = self.abs_precision().min(other.abs_precision());
        let vm = self.valuation_floor().min(other.valuation_floor());
        if abs <= vm {
            return Ok(Self::zero_to(self.p, abs));
        }
        let d = (abs - vm) as u32;
        let ctx = Zmod::new(self.p, d)?;
        let lift = |x: &PadicScalar| -> u128 {
            match x.kind {
                Kind::Nonzero { v, unit, .. } => {
                    ctx.mul(ctx.reduce(unit), ctx.p_pow((v - vm) as u32))
                }
                _ => 0,
            }
        };
        let s = ctx.add(lift(self), lift(other));
        Ok(Self::from_residue(&ctx, s).shift(vm))
    }

    pub fn neg(&self) -> Self {
        match self.kind {
            Kind::Nonzero { v, unit, rel } => {
                let m = (self.p as u128).pow(rel);
                PadicScalar { p: self.p, kind: Kind::Nonzero { v, unit: m - unit, rel } }
            }
            _ => self.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let p = self.p;
        Ok(match (&self.kind, &other.kind) {
            (Kind::Exact, _) | (_, Kind::Exact) => Self::exact_zero(p),
            (Kind::Zero { abs: a }, Kind::Zero { abs: b }) => Self::zero_to(p, a + b),
            (Kind::Zero { abs }, Kind::Nonzero { v, .. })
            | (Kind::Nonzero { v, .. }, Kind::Zero { abs }) => Self::zero_to(p, abs + v),
            (
                Kind::Nonzero { v: va, unit: ua, rel: ra },
                Kind::Nonzero { v: vb, unit: ub, rel: rb },
            ) => {
                let rel = (*ra).min(*rb);
                let ctx = Zmod::new(p, rel)?;
                PadicScalar {
                    p,
                    kind: Kind::Nonzero {
                        v: va + vb,
                        unit: ctx.mul(ctx.reduce(*ua), ctx.reduce(*ub)),
                        rel,
                    },
                }
            }
        })
    }

    pub fn invert(&self) -> Result<Self> {
        match self.kind {
            Kind::Nonzero { v, unit, rel } => {
                let ctx = Zmod::new(self.p, rel)?;
                Ok(PadicScalar { p: self.p, kind: Kind::Nonzero { v: -v, unit: ctx.inv(unit)?, rel } })
            }
            _ => Err(Error::IndistinguishableFromZero),
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.invert()?)
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::from_i64(self.p, 1, self.rel_precision().max(1))?;
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Residue modulo p^n of an element with nonnegative valuation floor.
    /// Fails when the element is not integral or is known to fewer digits.
    pub fn to_residue(&self, ctx: &Zmod) -> Result<u128> {
        if self.p != ctx.p() {
            return Err(Error::PrimeMismatch(self.p, ctx.p()));
        }
        if self.abs_precision() < ctx.digits() as i64 {
            return Err(Error::TooImprecise(format!(
                "{self} requested modulo {}^{}",
                ctx.p(),
                ctx.digits()
            )));
        }
        match self.kind {
            Kind::Nonzero { v, unit, .. } => {
                if v < 0 {
                    return Err(Error::NotAUnit);
                }
                Ok(ctx.mul(ctx.reduce(unit), ctx.p_pow(v as u32)))
            }
            _ => Ok(0),
        }
    }

    /// Congruent to `other` modulo the coarser of the two precisions.
    pub fn agrees_with(&self, other: &Self) -> bool {
        match self.sub(other) {
            Ok(d) => d.is_zero(),
            Err(_) => false,
        }
    }

    /// Valuation of `self - other`, capped by the available precision.
    pub fn distance_valuation(&self, other: &Self) -> i64 {
        match self.sub(other) {
            Ok(d) => d.valuation_floor(),
            Err(_) => i64::MIN,
        }
    }

    /// Integer lift in (-p^abs/2, p^abs/2] when the element is integral and
    /// the modulus fits; used for display of small values.
    pub fn to_i128_lift(&self) -> Option<i128> {
        match self.kind {
            Kind::Exact | Kind::Zero { .. } => Some(0),
            Kind::Nonzero { v, unit, rel } => {
                if v < 0 {
                    return None;
                }
                let ctx = Zmod::new(self.p, rel + v as u32).ok()?;
                Some(ctx.to_signed(ctx.mul(unit, ctx.p_pow(v as u32))))
            }
        }
    }
}

fn split_bigint(x: &BigInt, p: u64) -> (i64, BigInt) {
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut y = x.clone();
    while (&y % &pb).is_zero() {
        y /= &pb;
        v += 1;
    }
    (v, y)
}

pub(crate) fn bigint_residue(x: &BigInt, ctx: &Zmod) -> u128 {
    let m = BigInt::from(ctx.modulus());
    let mut r = x % &m;
    if r.is_negative() {
        r += &m;
    }
    r.to_u128().expect("residue below modulus")
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.p;
        match self.kind {
            Kind::Exact => write!(f, "0*{p}^inf"),
            Kind::Zero { abs } => write!(f, "0 + O({p}^{abs})"),
            Kind::Nonzero { v, unit, rel } => {
                write!(f, "{unit}*{p}^{v} + O({p}^{})", v + rel as i64)
            }
        }
    }
}

impl FromStr for PadicScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed p-adic scalar {s:?}"));
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("0*") {
            let (p, e) = rest.split_once('^').ok_or_else(bad)?;
            if e != "inf" {
                return Err(bad());
            }
            return Ok(Self::exact_zero(p.parse().map_err(|_| bad())?));
        }
        let (head, tail) = s.split_once(" + O(").ok_or_else(bad)?;
        let tail = tail.strip_suffix(')').ok_or_else(bad)?;
        let (p, abs) = tail.split_once('^').ok_or_else(bad)?;
        let p: u64 = p.parse().map_err(|_| bad())?;
        let abs: i64 = abs.parse().map_err(|_| bad())?;
        if head == "0" {
            return Ok(Self::zero_to(p, abs));
        }
        let (unit, pv) = head.split_once('*').ok_or_else(bad)?;
        let (p2, v) = pv.split_once('^').ok_or_else(bad)?;
        if p2.parse::<u64>().map_err(|_| bad())? != p {
            return Err(bad());
        }
        let v: i64 = v.parse().map_err(|_| bad())?;
        let unit: u128 = unit.parse().map_err(|_| bad())?;
        if abs <= v {
            return Err(bad());
        }
        let out = Self::new(p, v, unit, (abs - v) as u32)?;
        if out.unit() != Some(unit) {
            return Err(bad());
        }
        Ok(out)
    }
}

impl Serialize for PadicScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PadicScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

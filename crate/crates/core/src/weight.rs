//! Characters of the torus (Z_p^x)^2 and one-parameter weight discs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::modular::{val_factorial, Zmod};
use crate::padic::scalar::PadicScalar;
use crate::padic::series::{divided_powers, exp_coefficients, log_principal, principal_power};
use crate::ring::{ResidueAlgebra, Ring, SeriesRing};

/// The wild part of a character of Z_p^x.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WildPart {
    /// u -> u^n (this includes the Teichmuller factor omega(u)^n).
    Algebraic(i64),
    /// u -> <u>^s0 for a p-adic integer s0, given by an integer lift.
    Point(i128),
}

/// omega(u)^tame times the wild part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharComponent {
    pub tame: u64,
    pub wild: WildPart,
}

impl CharComponent {
    pub fn algebraic(n: i64) -> Self {
        CharComponent { tame: 0, wild: WildPart::Algebraic(n) }
    }

    pub fn trivial() -> Self {
        Self::algebraic(0)
    }

    pub fn eval(&self, ctx: &Zmod, u: u128) -> Result<u128> {
        if !ctx.is_unit(u) {
            return Err(Error::NotAUnit);
        }
        let tame = ctx.pow(ctx.teichmuller(u), self.tame as u128);
        let wild = match self.wild {
            WildPart::Algebraic(n) => pow_signed(ctx, u, n)?,
            WildPart::Point(s0) => principal_power(ctx, u, ctx.from_i128(s0))?,
        };
        Ok(ctx.mul(tame, wild))
    }

    /// Exponent w with chi(u (1 + x)) = chi(u) (1 + x)^w for v(x) >= 1.
    pub fn exponent(&self, ctx: &Zmod) -> u128 {
        match self.wild {
            WildPart::Algebraic(n) => ctx.from_i64(n),
            WildPart::Point(s0) => ctx.from_i128(s0),
        }
    }

    /// chi(-1) as +1 or -1.
    pub fn sign(&self) -> i64 {
        let e = match self.wild {
            WildPart::Algebraic(n) => self.tame as i64 + n,
            WildPart::Point(_) => self.tame as i64,
        };
        if e.rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }

    /// Split a locally algebraic component into (finite order, algebraic)
    /// parts: omega^(tame) * u^n = omega^(tame) * (u^n).
    pub fn factorization(&self) -> Option<(u64, i64)> {
        match self.wild {
            WildPart::Algebraic(n) => Some((self.tame, n)),
            WildPart::Point(_) => None,
        }
    }

    fn normalize(mut self, p: u64) -> Self {
        self.tame %= p - 1;
        self
    }
}

fn pow_signed(ctx: &Zmod, u: u128, n: i64) -> Result<u128> {
    let x = ctx.pow(u, n.unsigned_abs() as u128);
    if n >= 0 {
        Ok(x)
    } else {
        ctx.inv(x)
    }
}

/// kappa(diag(u1, u2)) = kappa1(u1) kappa2(u2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusCharacter {
    pub k1: CharComponent,
    pub k2: CharComponent,
}

impl TorusCharacter {
    pub fn new(k1: CharComponent, k2: CharComponent) -> Self {
        TorusCharacter { k1, k2 }
    }

    pub fn trivial() -> Self {
        Self::algebraic(0, 0)
    }

    pub fn algebraic(n1: i64, n2: i64) -> Self {
        TorusCharacter { k1: CharComponent::algebraic(n1), k2: CharComponent::algebraic(n2) }
    }

    pub fn with_tame(mut self, e1: u64, e2: u64) -> Self {
        self.k1.tame = e1;
        self.k2.tame = e2;
        self
    }

    pub fn normalized(self, p: u64) -> Self {
        TorusCharacter { k1: self.k1.normalize(p), k2: self.k2.normalize(p) }
    }

    /// (n1, n2) when both wild parts are algebraic.
    pub fn algebraic_part(&self) -> Option<(i64, i64)> {
        match (self.k1.wild, self.k2.wild) {
            (WildPart::Algebraic(a), WildPart::Algebraic(b)) => Some((a, b)),
            _ => None,
        }
    }

    /// n1 - n2 for a locally algebraic dominant weight.
    pub fn dominant_n(&self) -> Result<u32> {
        let (n1, n2) = self
            .algebraic_part()
            .ok_or_else(|| Error::Weight("weight is not locally algebraic".into()))?;
        if n1 < n2 {
            return Err(Error::NonDominant { n1, n2 });
        }
        Ok((n1 - n2) as u32)
    }

    /// kappa(-1, -1); the space of forms is zero unless this is 1.
    pub fn parity(&self) -> i64 {
        self.k1.sign() * self.k2.sign()
    }

    pub fn eval_residue(&self, ctx: &Zmod, u1: u128, u2: u128) -> Result<u128> {
        Ok(ctx.mul(self.k1.eval(ctx, u1)?, self.k2.eval(ctx, u2)?))
    }

    /// Exponent of (1 + eps u) in kappa1(A) kappa2(d / A) for A = a0 (1 + eps u).
    pub fn local_exponent(&self, ctx: &Zmod) -> u128 {
        ctx.sub(self.k1.exponent(ctx), self.k2.exponent(ctx))
    }

    /// kappa1(a0 (1 + eps u)) kappa2(dunit / (a0 (1 + eps u))) as a series in
    /// u with `len` coefficients; v(eps) >= 1.
    pub fn local_factor(&self, ctx: &Zmod, a0: u128, dunit: u128, eps: u128, len: usize) -> Result<Vec<u128>> {
        let c = self.eval_residue(ctx, a0, ctx.mul(dunit, ctx.inv(a0)?))?;
        let w = self.local_exponent(ctx);
        let dp = divided_powers(ctx, eps, len)?;
        let mut out = Vec::with_capacity(len);
        let mut falling = 1 % ctx.modulus();
        for (m, &e) in dp.iter().enumerate() {
            if m > 0 {
                falling = ctx.mul(falling, ctx.sub(w, ctx.from_i64(m as i64 - 1)));
            }
            out.push(ctx.mul(c, ctx.mul(falling, e)));
        }
        Ok(out)
    }
}

impl fmt::Display for TorusCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let part = |c: &CharComponent| match c.wild {
            WildPart::Algebraic(n) => n.to_string(),
            WildPart::Point(s) => format!("s{s}"),
        };
        write!(f, "{},{}", part(&self.k1), part(&self.k2))?;
        if self.k1.tame != 0 || self.k2.tame != 0 {
            write!(f, ",tame={}:{}", self.k1.tame, self.k2.tame)?;
        }
        Ok(())
    }
}

impl FromStr for TorusCharacter {
    type Err = Error;

    /// `n1,n2[,tame=e1:e2]`
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("weight `{s}`: expected n1,n2[,tame=e1:e2]"));
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() < 2 || parts.len() > 3 {
            return Err(bad());
        }
        let n1: i64 = parts[0].parse().map_err(|_| bad())?;
        let n2: i64 = parts[1].parse().map_err(|_| bad())?;
        let mut w = TorusCharacter::algebraic(n1, n2);
        if let Some(t) = parts.get(2) {
            let t = t.strip_prefix("tame=").ok_or_else(bad)?;
            let (a, b) = t.split_once(':').ok_or_else(bad)?;
            w = w.with_tame(a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
        }
        Ok(w)
    }
}

/// Evaluate a character at a pair of units.
pub fn eval_character(kappa: &TorusCharacter, u1: &PadicScalar, u2: &PadicScalar) -> Result<PadicScalar> {
    let p = u1.p();
    if u2.p() != p {
        return Err(Error::PrimeMismatch(p, u2.p()));
    }
    if u1.valuation() != Some(0) || u2.valuation() != Some(0) {
        return Err(Error::NotAUnit);
    }
    let n = u1.rel_precision().min(u2.rel_precision());
    let ctx = Zmod::new(p, n)?;
    let r = kappa.eval_residue(&ctx, u1.to_residue(&ctx)?, u2.to_residue(&ctx)?)?;
    Ok(PadicScalar::from_residue(&ctx, r))
}

/// The disc kappa1 = center1 * <u>^s, kappa2 = center2, |s| <= p^-radius.
/// The coordinate used in series is s itself; specializations must have
/// v(s0) >= radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightDisc {
    pub p: u64,
    pub center: TorusCharacter,
    pub radius: u32,
    pub order: usize,
}

/// Valuation lower bounds for the s-expansion of <u>^s on 1 + p^k Z_p.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyticityCertificate {
    pub k: u32,
    /// Lower bound for the valuation of the s^m term, m = 0..=order,
    /// on the disc |s| <= p^-radius.
    pub term_bounds: Vec<i64>,
    /// Lower bound for every term past the truncation order.
    pub tail_bound: i64,
}

impl WeightDisc {
    pub fn new(p: u64, center: TorusCharacter, radius: u32, order: usize) -> Result<Self> {
        if center.algebraic_part().is_none() {
            return Err(Error::Weight("disc center must be locally algebraic".into()));
        }
        Ok(WeightDisc { p, center: center.normalized(p), radius, order })
    }

    /// The character at s = s0.
    pub fn specialize(&self, s0: i128) -> Result<TorusCharacter> {
        if s0 != 0 {
            let v = crate::padic::modular::val_i128(s0, self.p).unwrap_or(u32::MAX);
            if v < self.radius {
                return Err(Error::Weight(format!("s0 = {s0} lies outside the disc")));
            }
        }
        let (n1, _) = self.center.algebraic_part().unwrap();
        // omega^e u^n1 <u>^s0 = omega^(e+n1) <u>^(n1+s0)
        let k1 = CharComponent { tame: (self.center.k1.tame + n1.rem_euclid(self.p as i64 - 1) as u64) % (self.p - 1), wild: WildPart::Point(n1 as i128 + s0) };
        Ok(TorusCharacter { k1, k2: self.center.k2 })
    }

    /// The s0 at which the family has algebraic weight (n1 + shift, n2):
    /// s0 = shift, provided omega^shift is trivial.
    pub fn algebraic_point(&self, shift: i64) -> Result<i128> {
        if shift.rem_euclid(self.p as i64 - 1) != 0 {
            return Err(Error::Weight(format!("weight shift {shift} changes the tame character")));
        }
        let s0 = shift as i128;
        self.specialize(s0)?;
        Ok(s0)
    }

    pub fn series_ring(&self, base: Zmod) -> SeriesRing {
        SeriesRing::new(base, self.order)
    }

    pub fn parity(&self) -> i64 {
        self.center.parity()
    }
}

/// Least k >= 1 such that <u>^s is a convergent power series in s with
/// integral coefficients on the disc for u in 1 + p^k Z_p, with the
/// per-term valuation certificate.
pub fn analyticity_radius(disc: &WeightDisc) -> AnalyticityCertificate {
    let p = disc.p as i64;
    let r = disc.radius as i64;
    // term m is (log u)^m s^m / m! with v >= m (k + r) - v(m!), and
    // v(m!) <= (m - 1)/(p - 1); need m (k + r)(p - 1) > m - 1 for all m
    let mut k = 1i64;
    while (k + r) * (p - 1) <= 1 {
        k += 1;
    }
    let term_bounds = (0..=disc.order as u64)
        .map(|m| m as i64 * (k + r) - val_factorial(m, disc.p) as i64)
        .collect();
    let tail_bound = tail_floor(disc.p, (k + r) as u64, disc.order as u64 + 1);
    AnalyticityCertificate { k: k as u32, term_bounds, tail_bound }
}

/// min over m >= from of m * step - v(m!), bounded through Legendre.
pub(crate) fn tail_floor(p: u64, step: u64, from: u64) -> i64 {
    // m*step - (m-1)/(p-1) is increasing, so check a finite window exactly
    // and use the linear bound at its end
    let mut best = i64::MAX;
    let mut m = from;
    loop {
        let exact = m as i64 * step as i64 - val_factorial(m, p) as i64;
        best = best.min(exact);
        let linear = (m as i64 * step as i64 * (p as i64 - 1) - (m as i64 - 1)) / (p as i64 - 1);
        if linear >= best || m > from + 10_000 {
            return best;
        }
        m += 1;
    }
}

/// The weight-direction factor kappa_which(u) as a series in s.
pub fn universal_eval(disc: &WeightDisc, ctx: &Zmod, u: u128, which: u8) -> Result<Vec<u128>> {
    let ring = disc.series_ring(*ctx);
    match which {
        1 => {
            let c = disc.center.k1.eval(ctx, u)?;
            let l = log_principal(ctx, u)?;
            let coeffs = exp_coefficients(ctx, l, disc.order)?;
            Ok(coeffs.into_iter().map(|x| ctx.mul(x, c)).collect())
        }
        2 => Ok(ring.constant(disc.center.k2.eval(ctx, u)?)),
        _ => Err(Error::Weight(format!("component index {which} is not 1 or 2"))),
    }
}

impl WeightDisc {
    /// The family analogue of `TorusCharacter::local_factor`: coefficients
    /// are s-series. The u^m coefficient is c(s) * (w + s)_m * eps^m / m!,
    /// with c(s) = kappa(a0, d/a0) * <a0>^s.
    pub fn local_factor(&self, ring: &SeriesRing, a0: u128, dunit: u128, eps: u128, len: usize) -> Result<Vec<Vec<u128>>> {
        let ctx = &ring.base;
        let c = self.center.eval_residue(ctx, a0, ctx.mul(dunit, ctx.inv(a0)?))?;
        let l = log_principal(ctx, a0)?;
        let cs: Vec<u128> = exp_coefficients(ctx, l, self.order)?
            .into_iter()
            .map(|x| ctx.mul(x, c))
            .collect();
        let w = self.center.local_exponent(ctx);
        let dp = divided_powers(ctx, eps, len)?;
        let mut out = Vec::with_capacity(len);
        let mut falling = ring.one();
        for (m, &e) in dp.iter().enumerate() {
            if m > 0 {
                let mut lin = ring.zero();
                lin[0] = ctx.sub(w, ctx.from_i64(m as i64 - 1));
                if ring.order >= 1 {
                    lin[1] = 1;
                }
                falling = ring.mul(&falling, &lin);
            }
            out.push(ring.scale(&ring.mul(&cs, &falling), e));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebraic_evaluation() {
        let k = TorusCharacter::algebraic(2, 0);
        let z = Zmod::new(3, 20).unwrap();
        assert_eq!(k.eval_residue(&z, 4, 7).unwrap(), 16);
        let t = TorusCharacter::trivial();
        assert_eq!(t.eval_residue(&z, 5, 11).unwrap(), 1);
        assert!(t.eval_residue(&z, 3, 1).is_err());
    }

    #[test]
    fn point_at_integer_matches_algebraic() {
        let z = Zmod::new(3, 20).unwrap();
        for n in [0i64, 1, 2, 5, 12] {
            let alg = CharComponent::algebraic(n);
            let pt = CharComponent { tame: 0, wild: WildPart::Point(n as i128) };
            for x in [1u128, 2, 7, 100] {
                let u = 1 + 3 * x;
                assert_eq!(pt.eval(&z, u).unwrap(), alg.eval(&z, u).unwrap());
            }
        }
    }

    #[test]
    fn log_of_four_series() {
        let z = Zmod::new(3, 20).unwrap();
        let disc = WeightDisc::new(3, TorusCharacter::trivial(), 0, 1).unwrap();
        let s = universal_eval(&disc, &z, 4, 1).unwrap();
        assert_eq!(s[0], 1);
        assert_eq!(s[1], crate::padic::series::log1p(&z, 3).unwrap());
        let one = universal_eval(&disc, &z, 1, 1).unwrap();
        assert_eq!(one, vec![1, 0]);
    }

    #[test]
    fn radius_and_certificate() {
        let d = WeightDisc::new(3, TorusCharacter::trivial(), 0, 8).unwrap();
        let c = analyticity_radius(&d);
        assert_eq!(c.k, 1);
        assert!(c.term_bounds.iter().all(|&b| b >= 0));
        assert!(c.tail_bound >= 5);
        let big = WeightDisc::new(3, TorusCharacter::trivial(), 4, 8).unwrap();
        assert!(analyticity_radius(&big).k <= c.k);
    }

    #[test]
    fn parse_and_display() {
        let w: TorusCharacter = "2,0,tame=1:0".parse().unwrap();
        assert_eq!(w.k1.tame, 1);
        assert_eq!(w.to_string(), "2,0,tame=1:0");
        assert!("2".parse::<TorusCharacter>().is_err());
    }

    #[test]
    fn parity_sign() {
        assert_eq!(TorusCharacter::algebraic(2, 0).parity(), 1);
        assert_eq!(TorusCharacter::algebraic(1, 0).parity(), -1);
        assert_eq!(TorusCharacter::algebraic(1, 0).with_tame(1, 0).parity(), 1);
    }

    #[test]
    fn local_factor_matches_direct_evaluation() {
        let z = Zmod::new(3, 18).unwrap();
        let k = TorusCharacter::algebraic(5, 1);
        let (a0, dunit, eps) = (2u128, 7u128, 9u128);
        let ser = k.local_factor(&z, a0, dunit, eps, 30).unwrap();
        for u in [0u128, 1, 2, 5, 13] {
            let a = z.mul(a0, z.add(1, z.mul(eps, u)));
            let direct = k.eval_residue(&z, a, z.mul(dunit, z.inv(a).unwrap())).unwrap();
            let series = ser.iter().rev().fold(0, |acc, &c| z.add(z.mul(acc, u), c));
            assert_eq!(series, direct, "u = {u}");
        }
    }

    #[test]
    fn family_factor_specializes() {
        let z = Zmod::new(3, 16).unwrap();
        let disc = WeightDisc::new(3, TorusCharacter::algebraic(0, 0), 0, 12).unwrap();
        let ring = disc.series_ring(z);
        let (a0, dunit, eps) = (4u128, 1u128, 9u128);
        let fam = disc.local_factor(&ring, a0, dunit, eps, 20).unwrap();
        let s0 = 2i128;
        let pt = disc.specialize(s0).unwrap();
        let direct = pt.local_factor(&z, a0, dunit, eps, 20).unwrap();
        for (f, d) in fam.iter().zip(&direct) {
            // s-truncation error at s0 = 2 is at least v(2^13 (log)^13/13!) >= 8
            let diff = z.sub(ring.eval(f, s0 as u128), *d);
            assert!(z.valuation(diff).map_or(true, |v| v >= 8));
        }
    }
}

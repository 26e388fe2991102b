//! p-adic logarithm and exponential on residues, with every division by an
//! integer accounted for by valuation (Legendre's formula for m!).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::modular::{val_factorial, Zmod};
use crate::error::{Error, Result};

fn ilog(p: u64, x: u64) -> u32 {
    let mut e = 0;
    let mut q = x;
    while q >= p {
        q /= p;
        e += 1;
    }
    e
}

struct Big {
    p: BigInt,
    m: BigInt,
}

impl Big {
    fn new(p: u64, n: u32) -> Self {
        let pb = BigInt::from(p);
        let m = num_traits::pow(pb.clone(), n as usize);
        Big { p: pb, m }
    }

    fn reduce(&self, x: BigInt) -> BigInt {
        x.mod_floor(&self.m)
    }

    /// x / d for an integer d whose p-part divides x exactly.
    fn div_int(&self, x: &BigInt, d: u64) -> BigInt {
        let mut d = BigInt::from(d);
        let mut x = x.clone();
        while (&d % &self.p).is_zero() {
            d /= &self.p;
            debug_assert!((&x % &self.p).is_zero());
            x /= &self.p;
        }
        let inv = d.extended_gcd(&self.m).x;
        self.reduce(x * inv)
    }
}

/// log(1 + x) modulo p^n for v(x) >= 1.
pub fn log1p(ctx: &Zmod, x: u128) -> Result<u128> {
    let p = ctx.p();
    let n = ctx.digits();
    if x % p as u128 != 0 {
        return Err(Error::Weight("log1p needs an argument divisible by p".into()));
    }
    if x == 0 || n == 0 {
        return Ok(0);
    }
    let vx = ctx.valuation(x).map_or(n, |v| v) as u64;
    // term l has valuation >= l*vx - log_p(l); stop once that reaches n
    let mut last = 1u64;
    while (last + 1) * vx < n as u64 + ilog(p, last + 1) as u64 {
        last += 1;
    }
    let guard = ilog(p, last) + 1;
    let big = Big::new(p, n + guard);
    let xb = BigInt::from(x);
    let mut term = BigInt::one();
    let mut acc = BigInt::zero();
    for l in 1..=last {
        term = big.reduce(term * &xb);
        let t = big.div_int(&term, l);
        if l % 2 == 1 {
            acc += t;
        } else {
            acc -= t;
        }
    }
    let m = BigInt::from(ctx.modulus());
    Ok(acc.mod_floor(&m).to_u128().unwrap())
}

/// exp(y) modulo p^n for v(y) >= 1 (p odd).
pub fn exp(ctx: &Zmod, y: u128) -> Result<u128> {
    let p = ctx.p();
    let n = ctx.digits();
    if y % p as u128 != 0 {
        return Err(Error::Weight("exp needs an argument divisible by p".into()));
    }
    if n == 0 {
        return Ok(0);
    }
    if y == 0 {
        return Ok(1 % ctx.modulus());
    }
    let vy = ctx.valuation(y).map_or(n, |v| v) as u64;
    // v(y^m/m!) >= m*vy - (m-1)/(p-1), which is increasing in m
    let mut last = 0u64;
    while (last + 1) * vy * (p - 1) < n as u64 * (p - 1) + last {
        last += 1;
    }
    let guard = val_factorial(last, p) as u32;
    let big = Big::new(p, n + guard);
    let yb = BigInt::from(y);
    let mut power = BigInt::one();
    let mut fact = BigInt::one();
    let mut fact_p = 0u32;
    let mut acc = BigInt::one();
    for m in 1..=last {
        power = big.reduce(power * &yb);
        // m! = p^fact_p * fact with fact a unit, kept modulo p^(n+guard)
        let mut mm = m;
        while mm % p == 0 {
            mm /= p;
            fact_p += 1;
        }
        fact = big.reduce(fact * BigInt::from(mm));
        let mut t = power.clone();
        for _ in 0..fact_p {
            t /= &big.p;
        }
        let inv = fact.extended_gcd(&big.m).x;
        acc += big.reduce(t * inv);
    }
    let m = BigInt::from(ctx.modulus());
    Ok(acc.mod_floor(&m).to_u128().unwrap())
}

/// log of the principal part of a unit: log(<u>) with <u> = u / teich(u).
pub fn log_principal(ctx: &Zmod, u: u128) -> Result<u128> {
    let z = ctx;
    if !z.is_unit(u) {
        return Err(Error::NotAUnit);
    }
    // log <u> = log(u^(p-1)) / (p-1), and u^(p-1) is a principal unit
    let w = z.pow(u, (z.p() - 1) as u128);
    let l = log1p(z, z.sub(w, 1))?;
    Ok(z.mul(l, z.inv((z.p() - 1) as u128 % z.modulus())?))
}

/// Coefficients y^m / m! for m = 0..=order, modulo p^n. Requires
/// v(y) >= 1; each division loses exactly v_p(m!) digits, which are
/// restored by working with that many extra digits.
pub fn exp_coefficients(ctx: &Zmod, y: u128, order: usize) -> Result<Vec<u128>> {
    let p = ctx.p();
    if y % p as u128 != 0 {
        return Err(Error::Weight("exponential series needs v(y) >= 1".into()));
    }
    let guard = val_factorial(order as u64, p) as u32;
    let big = Big::new(p, ctx.digits() + guard);
    let yb = BigInt::from(y);
    let mut out = Vec::with_capacity(order + 1);
    let m = BigInt::from(ctx.modulus());
    // t_k = t_{k-1} * y / k stays integral since v(y^k/k!) >= 0
    let mut t = BigInt::one();
    out.push(t.mod_floor(&m).to_u128().unwrap());
    for k in 1..=order as u64 {
        t = big.div_int(&big.reduce(t * &yb), k);
        out.push(t.mod_floor(&m).to_u128().unwrap());
    }
    Ok(out)
}

/// x^m / m! for m = 0..=len-1, modulo p^n, for v(x) >= 1. Same as
/// `exp_coefficients` but named for its use as binomial-series weights.
pub fn divided_powers(ctx: &Zmod, x: u128, len: usize) -> Result<Vec<u128>> {
    if len == 0 {
        return Ok(vec![]);
    }
    exp_coefficients(ctx, x, len - 1)
}

/// <u>^w for a unit u and a p-adic exponent w (given by a residue).
pub fn principal_power(ctx: &Zmod, u: u128, w: u128) -> Result<u128> {
    let l = log_principal(ctx, u)?;
    exp(ctx, ctx.mul(l, w))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divided_powers_match_rational_oracle() {
        use num_rational::BigRational;
        let z = Zmod::new(3, 12).unwrap();
        let x = 9 * 5u128;
        let got = divided_powers(&z, x, 30).unwrap();
        let mut fact = BigInt::one();
        for (m, &g) in got.iter().enumerate() {
            if m > 0 {
                fact *= m;
            }
            let q = BigRational::new(num_traits::pow(BigInt::from(x), m), fact.clone());
            let r = crate::padic::scalar::PadicScalar::from_rational(3, &q, 40).unwrap();
            assert_eq!(r.to_residue(&z).unwrap(), g, "m = {m}");
        }
    }

    #[test]
    fn principal_power_integer_exponent() {
        let z = Zmod::new(5, 14).unwrap();
        let u = 7u128;
        // <7>^3 = 7^3 / teich(7)^3
        let t = z.teichmuller(u);
        let want = z.mul(z.pow(u, 3), z.inv(z.pow(t, 3)).unwrap());
        assert_eq!(principal_power(&z, u, 3).unwrap(), want);
    }

    #[test]
    fn exp_log_inverse() {
        let z = Zmod::new(3, 20).unwrap();
        for x in [3u128, 6, 27, 300, 3 * 1234567] {
            let l = log1p(&z, x).unwrap();
            let e = exp(&z, l).unwrap();
            assert_eq!(e, z.add(1, x), "x = {x}");
        }
    }

    #[test]
    fn log_of_four_alternating_sum() {
        // log(1+3) = 3 - 9/2 + 27/3 - 81/4 + ...
        let z = Zmod::new(3, 20).unwrap();
        let big = Zmod::new(3, 26).unwrap();
        let mut acc = 0u128;
        let mut pw = 1u128;
        for l in 1..=40u64 {
            pw = big.mul(pw, 3);
            let t = big.div_exact_int(pw, l);
            acc = if l % 2 == 1 { big.add(acc, t) } else { big.sub(acc, t) };
        }
        assert_eq!(log1p(&z, 3).unwrap(), z.reduce(acc));
    }

    #[test]
    fn log_is_additive() {
        let z = Zmod::new(5, 15).unwrap();
        let (a, b) = (1 + 5 * 7u128, 1 + 25 * 3u128);
        let lab = log1p(&z, z.sub(z.mul(a, b), 1)).unwrap();
        let la = log1p(&z, a - 1).unwrap();
        let lb = log1p(&z, b - 1).unwrap();
        assert_eq!(lab, z.add(la, lb));
    }

    #[test]
    fn integer_power_agrees_with_exp_log() {
        let z = Zmod::new(3, 20).unwrap();
        let u = 1 + 3 * 5u128;
        for n in [0i64, 1, 2, 7, -3] {
            let l = log1p(&z, u - 1).unwrap();
            let e = exp(&z, z.mul(l, z.from_i64(n))).unwrap();
            let direct = if n >= 0 {
                z.pow(u, n as u128)
            } else {
                z.inv(z.pow(u, (-n) as u128)).unwrap()
            };
            assert_eq!(e, direct);
        }
    }
}

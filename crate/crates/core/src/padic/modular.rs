//! Residue arithmetic in Z/p^M, the workhorse behind every matrix entry.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus handled: products are reduced in 32-bit chunks, which
/// needs `m < 2^96`.
const MAX_MODULUS_BITS: u32 = 96;

pub fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// p-adic valuation of a nonzero integer; `None` for zero.
pub fn val_i128(x: i128, p: u64) -> Option<u32> {
    if x == 0 {
        return None;
    }
    let p = p as i128;
    let mut v = 0;
    let mut x = x;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    Some(v)
}

/// v_p(m!) by Legendre's formula.
pub fn val_factorial(m: u64, p: u64) -> u64 {
    let mut v = 0;
    let mut q = m / p;
    while q > 0 {
        v += q;
        q /= p;
    }
    v
}

/// The ring Z/p^n as a runtime context. Elements are plain least
/// nonnegative residues in `u128`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Zmod {
    p: u64,
    n: u32,
    m: u128,
}

impl Zmod {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        let mut m: u128 = 1;
        for _ in 0..n {
            m = m
                .checked_mul(p as u128)
                .filter(|m| m.leading_zeros() >= 128 - MAX_MODULUS_BITS)
                .ok_or(Error::PrecisionTooLarge { p, digits: n })?;
        }
        Ok(Zmod { p, n, m })
    }

    /// Largest `n` with `p^n` inside the supported range.
    pub fn max_digits(p: u64) -> u32 {
        let mut n = 0;
        let mut m: u128 = 1;
        loop {
            match m.checked_mul(p as u128) {
                Some(next) if next.leading_zeros() >= 128 - MAX_MODULUS_BITS => {
                    m = next;
                    n += 1;
                }
                _ => return n,
            }
        }
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn digits(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn modulus(&self) -> u128 {
        self.m
    }

    /// The same prime at a different number of digits.
    pub fn with_digits(&self, n: u32) -> Result<Self> {
        Zmod::new(self.p, n)
    }

    /// p^e as an element (zero once e >= n).
    pub fn p_pow(&self, e: u32) -> u128 {
        if e >= self.n {
            return 0;
        }
        (self.p as u128).pow(e)
    }

    #[inline]
    pub fn reduce(&self, x: u128) -> u128 {
        x % self.m
    }

    pub fn from_i128(&self, x: i128) -> u128 {
        let m = self.m as i128;
        (((x % m) + m) % m) as u128
    }

    pub fn from_i64(&self, x: i64) -> u128 {
        self.from_i128(x as i128)
    }

    /// Symmetric lift to (-m/2, m/2], when it fits.
    pub fn to_signed(&self, x: u128) -> i128 {
        if x > self.m / 2 {
            -((self.m - x) as i128)
        } else {
            x as i128
        }
    }

    #[inline]
    pub fn add(&self, a: u128, b: u128) -> u128 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u128, b: u128) -> u128 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u128) -> u128 {
        if a == 0 {
            0
        } else {
            self.m - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u128, b: u128) -> u128 {
        if self.m >> 64 == 0 {
            (a * b) % self.m
        } else {
            let mut r: u128 = 0;
            for shift in [64u32, 32, 0] {
                let chunk = (b >> shift) & 0xffff_ffff;
                r = (r << 32) % self.m;
                r = self.add(r, (a * chunk) % self.m);
            }
            r
        }
    }

    pub fn pow(&self, a: u128, mut e: u128) -> u128 {
        let mut base = a % self.m;
        let mut acc = 1 % self.m;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Valuation of a residue; `None` when it is zero mod p^n.
    pub fn valuation(&self, a: u128) -> Option<u32> {
        if a % self.m == 0 {
            return None;
        }
        let p = self.p as u128;
        let mut v = 0;
        let mut x = a;
        while x % p == 0 {
            x /= p;
            v += 1;
        }
        Some(v)
    }

    pub fn is_unit(&self, a: u128) -> bool {
        a % (self.p as u128) != 0
    }

    /// Inverse of a unit by the extended Euclidean algorithm.
    pub fn inv(&self, a: u128) -> Result<u128> {
        if !self.is_unit(a) {
            return Err(Error::NotAUnit);
        }
        let (mut r0, mut r1) = (self.m as i128, (a % self.m) as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.from_i128(s0))
    }

    /// Split a nonzero residue as p^v * unit. The unit is only meaningful
    /// modulo p^(n-v).
    pub fn split(&self, a: u128) -> Option<(u32, u128)> {
        let v = self.valuation(a)?;
        Some((v, a / (self.p as u128).pow(v)))
    }

    /// Exact division by p^e of a residue known to be divisible by it. The
    /// result is correct modulo p^(n-e); higher digits are garbage and are
    /// cleared.
    pub fn div_p_pow(&self, a: u128, e: u32) -> u128 {
        if e == 0 {
            return a;
        }
        debug_assert!(e <= self.n);
        let pe = (self.p as u128).pow(e);
        debug_assert_eq!(a % pe, 0, "residue not divisible by p^{e}");
        (a / pe) % (self.m / pe)
    }

    /// Exact division by an integer whose p-part divides `a`.
    pub fn div_exact_int(&self, a: u128, d: u64) -> u128 {
        let mut d = d;
        let mut e = 0;
        while d % self.p == 0 {
            d /= self.p;
            e += 1;
        }
        let a = self.div_p_pow(a, e);
        self.mul(a, self.inv(d as u128 % self.m).expect("unit part"))
    }

    /// Teichmüller representative of a unit.
    pub fn teichmuller(&self, a: u128) -> u128 {
        if self.n == 0 {
            return 0;
        }
        let e = (self.p as u128).pow(self.n - 1);
        self.pow(a, e)
    }

    /// Principal unit part <a> = a / teichmuller(a).
    pub fn principal_part(&self, a: u128) -> Result<u128> {
        let w = self.teichmuller(a);
        Ok(self.mul(a, self.inv(w)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_limits() {
        assert!(Zmod::new(3, 60).is_ok());
        assert!(Zmod::new(3, 61).is_err());
        assert_eq!(Zmod::max_digits(3), 60);
        assert!(Zmod::new(5, 30).is_ok());
        assert!(Zmod::new(4, 3).is_err());
        assert!(Zmod::new(2, 3).is_err());
    }

    #[test]
    fn invert_two_mod_243() {
        let z = Zmod::new(3, 5).unwrap();
        assert_eq!(z.inv(2).unwrap(), 122);
        assert!(z.inv(3).is_err());
    }

    #[test]
    fn wide_multiplication_matches_bigint() {
        use num_bigint::BigUint;
        let z = Zmod::new(3, 58).unwrap();
        let m = BigUint::from(z.modulus());
        let a = z.modulus() - 12345678901234567;
        let b = z.modulus() / 3 + 99;
        let expect = (BigUint::from(a) * BigUint::from(b)) % &m;
        assert_eq!(BigUint::from(z.mul(a, b)), expect);
    }

    #[test]
    fn teichmuller_is_root_of_unity() {
        let z = Zmod::new(5, 20).unwrap();
        for a in 1..5u128 {
            let w = z.teichmuller(a);
            assert_eq!(z.pow(w, 4), 1);
            assert_eq!(w % 5, a);
        }
    }

    #[test]
    fn legendre() {
        assert_eq!(val_factorial(8, 3), 2);
        assert_eq!(val_factorial(9, 3), 4);
        assert_eq!(val_factorial(27, 3), 13);
    }
}

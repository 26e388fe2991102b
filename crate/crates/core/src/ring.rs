//! Commutative rings used as matrix coefficients: residues mod p^M,
//! truncated power series in the weight variable over them, and exact
//! (Gaussian) rationals for the classical oracle.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::padic::modular::Zmod;

pub trait Ring: Sync {
    type Elem: Clone + Debug + PartialEq + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn from_i64(&self, x: i64) -> Self::Elem;

    fn add_assign(&self, a: &mut Self::Elem, b: &Self::Elem) {
        *a = self.add(a, b);
    }
}

/// Rings that are algebras over Z/p^M, so residues can be embedded and
/// used as cheap scalars.
pub trait ResidueAlgebra: Ring {
    fn base(&self) -> &Zmod;
    fn embed(&self, x: u128) -> Self::Elem;
    fn scale(&self, a: &Self::Elem, x: u128) -> Self::Elem;
    /// Reduce to a coarser residue ring with the same prime.
    fn reduce_to(&self, a: &Self::Elem, target: &Zmod) -> Self::Elem;
}

impl Ring for Zmod {
    type Elem = u128;

    fn zero(&self) -> u128 {
        0
    }
    fn one(&self) -> u128 {
        1 % self.modulus()
    }
    #[inline]
    fn add(&self, a: &u128, b: &u128) -> u128 {
        Zmod::add(self, *a, *b)
    }
    #[inline]
    fn sub(&self, a: &u128, b: &u128) -> u128 {
        Zmod::sub(self, *a, *b)
    }
    #[inline]
    fn mul(&self, a: &u128, b: &u128) -> u128 {
        Zmod::mul(self, *a, *b)
    }
    fn neg(&self, a: &u128) -> u128 {
        Zmod::neg(self, *a)
    }
    fn is_zero(&self, a: &u128) -> bool {
        *a == 0
    }
    fn from_i64(&self, x: i64) -> u128 {
        Zmod::from_i64(self, x)
    }
}

impl ResidueAlgebra for Zmod {
    fn base(&self) -> &Zmod {
        self
    }
    fn embed(&self, x: u128) -> u128 {
        self.reduce(x)
    }
    fn scale(&self, a: &u128, x: u128) -> u128 {
        Zmod::mul(self, *a, x)
    }
    fn reduce_to(&self, a: &u128, target: &Zmod) -> u128 {
        target.reduce(*a)
    }
}

/// (Z/p^M)[s] / (s^(order+1)).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeriesRing {
    pub base: Zmod,
    pub order: usize,
}

impl SeriesRing {
    pub fn new(base: Zmod, order: usize) -> Self {
        SeriesRing { base, order }
    }

    pub fn constant(&self, x: u128) -> Vec<u128> {
        let mut v = vec![0; self.order + 1];
        v[0] = self.base.reduce(x);
        v
    }

    /// Evaluate at s = s0.
    pub fn eval(&self, a: &[u128], s0: u128) -> u128 {
        let z = &self.base;
        a.iter().rev().fold(0, |acc, &c| z.add(z.mul(acc, s0), c))
    }

    /// Formal derivative in s (the top coefficient is lost).
    pub fn derivative(&self, a: &[u128]) -> Vec<u128> {
        let z = &self.base;
        let mut out = vec![0; self.order + 1];
        for l in 1..a.len() {
            out[l - 1] = z.mul(a[l], z.from_i64(l as i64));
        }
        out
    }
}

impl Ring for SeriesRing {
    type Elem = Vec<u128>;

    fn zero(&self) -> Vec<u128> {
        vec![0; self.order + 1]
    }
    fn one(&self) -> Vec<u128> {
        self.constant(1)
    }
    fn add(&self, a: &Vec<u128>, b: &Vec<u128>) -> Vec<u128> {
        a.iter().zip(b).map(|(&x, &y)| self.base.add(x, y)).collect()
    }
    fn sub(&self, a: &Vec<u128>, b: &Vec<u128>) -> Vec<u128> {
        a.iter().zip(b).map(|(&x, &y)| self.base.sub(x, y)).collect()
    }
    fn mul(&self, a: &Vec<u128>, b: &Vec<u128>) -> Vec<u128> {
        let z = &self.base;
        let n = self.order + 1;
        let mut out = vec![0u128; n];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().take(n - i).enumerate() {
                if y != 0 {
                    out[i + j] = z.add(out[i + j], z.mul(x, y));
                }
            }
        }
        out
    }
    fn neg(&self, a: &Vec<u128>) -> Vec<u128> {
        a.iter().map(|&x| self.base.neg(x)).collect()
    }
    fn is_zero(&self, a: &Vec<u128>) -> bool {
        a.iter().all(|&x| x == 0)
    }
    fn from_i64(&self, x: i64) -> Vec<u128> {
        self.constant(self.base.from_i64(x))
    }
    fn add_assign(&self, a: &mut Vec<u128>, b: &Vec<u128>) {
        for (x, &y) in a.iter_mut().zip(b) {
            *x = self.base.add(*x, y);
        }
    }
}

impl ResidueAlgebra for SeriesRing {
    fn base(&self) -> &Zmod {
        &self.base
    }
    fn embed(&self, x: u128) -> Vec<u128> {
        self.constant(x)
    }
    fn scale(&self, a: &Vec<u128>, x: u128) -> Vec<u128> {
        a.iter().map(|&c| self.base.mul(c, x)).collect()
    }
    fn reduce_to(&self, a: &Vec<u128>, target: &Zmod) -> Vec<u128> {
        a.iter().map(|&c| target.reduce(c)).collect()
    }
}

/// The field Q.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rationals;

impl Ring for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn from_i64(&self, x: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(x))
    }
}

/// An element re + im*i of Q(i).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gaussian {
    pub re: BigRational,
    pub im: BigRational,
}

impl Gaussian {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Gaussian { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Gaussian {
            re: BigRational::from_integer(re.into()),
            im: BigRational::from_integer(im.into()),
        }
    }

    pub fn conj(&self) -> Self {
        Gaussian { re: self.re.clone(), im: -&self.im }
    }

    pub fn norm(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        Some(Gaussian { re: &self.re / &n, im: -&self.im / &n })
    }

    pub fn div_rational(&self, d: &BigRational) -> Self {
        Gaussian { re: &self.re / d, im: &self.im / d }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct GaussianRationals;

impl Ring for GaussianRationals {
    type Elem = Gaussian;

    fn zero(&self) -> Gaussian {
        Gaussian::from_ints(0, 0)
    }
    fn one(&self) -> Gaussian {
        Gaussian::from_ints(1, 0)
    }
    fn add(&self, a: &Gaussian, b: &Gaussian) -> Gaussian {
        Gaussian { re: &a.re + &b.re, im: &a.im + &b.im }
    }
    fn sub(&self, a: &Gaussian, b: &Gaussian) -> Gaussian {
        Gaussian { re: &a.re - &b.re, im: &a.im - &b.im }
    }
    fn mul(&self, a: &Gaussian, b: &Gaussian) -> Gaussian {
        Gaussian {
            re: &a.re * &b.re - &a.im * &b.im,
            im: &a.re * &b.im + &a.im * &b.re,
        }
    }
    fn neg(&self, a: &Gaussian) -> Gaussian {
        Gaussian { re: -&a.re, im: -&a.im }
    }
    fn is_zero(&self, a: &Gaussian) -> bool {
        a.re.is_zero() && a.im.is_zero()
    }
    fn from_i64(&self, x: i64) -> Gaussian {
        Gaussian::from_ints(x, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_multiplication_truncates() {
        let z = Zmod::new(3, 10).unwrap();
        let r = SeriesRing::new(z, 2);
        let a = vec![1, 1, 0];
        let sq = r.mul(&a, &a);
        assert_eq!(sq, vec![1, 2, 1]);
        let cube = r.mul(&sq, &a);
        assert_eq!(cube, vec![1, 3, 3]);
        assert_eq!(r.eval(&cube, 2), 1 + 6 + 12);
    }

    #[test]
    fn gaussian_inverse() {
        let g = GaussianRationals;
        let x = Gaussian::from_ints(1, 2);
        let y = x.inv().unwrap();
        assert_eq!(g.mul(&x, &y), g.one());
    }
}

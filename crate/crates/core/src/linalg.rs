//! Dense matrices over a [`Ring`] and the division-free characteristic
//! polynomial.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::padic::modular::Zmod;
use crate::ring::{Gaussian, GaussianRationals, Rationals, Ring};

use num_rational::BigRational;
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn filled(rows: usize, cols: usize, value: E) -> Self {
        Matrix { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<E>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut E {
        &mut self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: E) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> &[E] {
        &self.data
    }

    pub fn map<F: Clone>(&self, f: impl Fn(&E) -> F) -> Matrix<F> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Submatrix from index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }
}

impl<E: Clone + Send + Sync> Matrix<E> {
    pub fn identity<R: Ring<Elem = E>>(ring: &R, n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { ring.one() } else { ring.zero() })
    }

    pub fn zeros<R: Ring<Elem = E>>(ring: &R, rows: usize, cols: usize) -> Self {
        Matrix::filled(rows, cols, ring.zero())
    }

    pub fn add<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| ring.add(a, b)).collect(),
        }
    }

    pub fn sub<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| ring.sub(a, b)).collect(),
        }
    }

    /// Row-parallel product; each output entry is summed in index order.
    pub fn mul<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let data: Vec<E> = (0..self.rows)
            .into_par_iter()
            .flat_map_iter(|i| {
                let a = self.row(i);
                (0..other.cols).map(move |j| {
                    let mut acc = ring.zero();
                    for (l, x) in a.iter().enumerate() {
                        if !ring.is_zero(x) {
                            ring.add_assign(&mut acc, &ring.mul(x, other.get(l, j)));
                        }
                    }
                    acc
                })
            })
            .collect();
        Matrix { rows: self.rows, cols: other.cols, data }
    }

    pub fn mul_vec<R: Ring<Elem = E>>(&self, ring: &R, v: &[E]) -> Vec<E> {
        (0..self.rows)
            .map(|i| {
                let mut acc = ring.zero();
                for (x, y) in self.row(i).iter().zip(v) {
                    ring.add_assign(&mut acc, &ring.mul(x, y));
                }
                acc
            })
            .collect()
    }

    /// Block matrix from a grid of equally shaped blocks per row/column.
    pub fn from_blocks(blocks: &[Vec<Matrix<E>>]) -> Self {
        let row_sizes: Vec<usize> = blocks.iter().map(|r| r[0].rows).collect();
        let col_sizes: Vec<usize> = blocks[0].iter().map(|b| b.cols).collect();
        let rows = row_sizes.iter().sum();
        let cols = col_sizes.iter().sum();
        let mut data = Vec::with_capacity(rows * cols);
        for (bi, brow) in blocks.iter().enumerate() {
            for i in 0..row_sizes[bi] {
                for b in brow {
                    data.extend_from_slice(b.row(i));
                }
            }
        }
        Matrix { rows, cols, data }
    }
}

/// Coefficients c_0..c_T of det(1 - tM), computed division-free.
///
/// Berkowitz's recurrence produces det(tI - A_r) for the leading principal
/// submatrices A_r; its coefficient list (leading term first) is exactly
/// c_0, c_1, ... of det(1 - tA_r). Only the first `max_terms` coefficients
/// are tracked, which truncates every Toeplitz column as well.
pub fn fredholm_coefficients<R: Ring>(ring: &R, m: &Matrix<R::Elem>, max_terms: usize) -> Vec<R::Elem> {
    assert_eq!(m.rows(), m.cols(), "square matrix required");
    let n = m.rows();
    let keep = max_terms.min(n) + 1;
    let mut poly: Vec<R::Elem> = vec![ring.one()];
    for r in 0..n {
        // column of the Toeplitz matrix for step r: 1, -a, -R C, -R A C, ...
        let mut toeplitz = Vec::with_capacity(keep);
        toeplitz.push(ring.one());
        toeplitz.push(ring.neg(m.get(r, r)));
        let mut v: Vec<R::Elem> = (0..r).map(|i| m.get(i, r).clone()).collect();
        while toeplitz.len() < keep.min(r + 2) {
            let mut acc = ring.zero();
            for (l, vl) in v.iter().enumerate() {
                ring.add_assign(&mut acc, &ring.mul(m.get(r, l), vl));
            }
            toeplitz.push(ring.neg(&acc));
            if toeplitz.len() < keep.min(r + 2) {
                v = (0..r)
                    .into_par_iter()
                    .map(|i| {
                        let mut acc = ring.zero();
                        for (l, vl) in v.iter().enumerate() {
                            let a = m.get(i, l);
                            if !ring.is_zero(a) {
                                ring.add_assign(&mut acc, &ring.mul(a, vl));
                            }
                        }
                        acc
                    })
                    .collect();
            }
        }
        let len = (r + 2).min(keep);
        let mut next = Vec::with_capacity(len);
        for i in 0..len {
            let mut acc = ring.zero();
            for (l, c) in poly.iter().enumerate().take(i + 1) {
                if let Some(t) = toeplitz.get(i - l) {
                    ring.add_assign(&mut acc, &ring.mul(t, c));
                }
            }
            next.push(acc);
        }
        poly = next;
    }
    while poly.len() < max_terms + 1 {
        poly.push(ring.zero());
    }
    poly.truncate(max_terms + 1);
    poly
}

/// Coefficients of det(tI - M) in ascending degree (monic, degree n).
pub fn charpoly_ascending<R: Ring>(ring: &R, m: &Matrix<R::Elem>) -> Vec<R::Elem> {
    let mut c = fredholm_coefficients(ring, m, m.rows());
    c.reverse();
    c
}

pub trait Field: Ring {
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
}

impl Field for Rationals {
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
}

impl Field for GaussianRationals {
    fn inv(&self, a: &Gaussian) -> Option<Gaussian> {
        a.inv()
    }
}

/// Rank over a field by Gaussian elimination.
pub fn rank<F: Field>(field: &F, m: &Matrix<F::Elem>) -> usize {
    let mut a = m.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows).find(|&i| !field.is_zero(a.get(i, c))) else {
            continue;
        };
        for j in 0..cols {
            let tmp = a.get(r, j).clone();
            a.set(r, j, a.get(piv, j).clone());
            a.set(piv, j, tmp);
        }
        let inv = field.inv(a.get(r, c)).expect("nonzero pivot");
        for i in 0..rows {
            if i != r && !field.is_zero(a.get(i, c)) {
                let f = field.mul(a.get(i, c), &inv);
                for j in c..cols {
                    let v = field.sub(a.get(i, j), &field.mul(&f, a.get(r, j)));
                    a.set(i, j, v);
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Rank of a p-adic matrix given modulo p^n: pivots are chosen of minimal
/// valuation, and only pivots of valuation below `cutoff` count.
pub fn padic_rank(ctx: &Zmod, m: &Matrix<u128>, cutoff: u32) -> usize {
    let mut a = m.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut active_r: Vec<usize> = (0..rows).collect();
    let mut active_c: Vec<usize> = (0..cols).collect();
    let mut rank = 0;
    loop {
        let mut best: Option<(u32, usize, usize)> = None;
        for &i in &active_r {
            for &j in &active_c {
                if let Some(v) = ctx.valuation(*a.get(i, j)) {
                    if best.map_or(true, |b| v < b.0) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((v, pi, pj)) = best else { break };
        if v >= cutoff {
            break;
        }
        let (_, unit) = ctx.split(*a.get(pi, pj)).unwrap();
        let uinv = ctx.inv(unit).unwrap();
        for &i in &active_r {
            if i == pi {
                continue;
            }
            let x = *a.get(i, pj);
            if x == 0 {
                continue;
            }
            // x has valuation >= v; factor = x / pivot
            let f = ctx.mul(ctx.div_p_pow(x, v), uinv);
            for &j in &active_c {
                let y = ctx.sub(*a.get(i, j), ctx.mul(f, *a.get(pi, j)));
                a.set(i, j, y);
            }
        }
        active_r.retain(|&i| i != pi);
        active_c.retain(|&j| j != pj);
        rank += 1;
    }
    rank
}

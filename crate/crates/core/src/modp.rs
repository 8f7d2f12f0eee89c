//! Arithmetic and linear algebra over the prime field Z_p.
//!
//! Residues are `u32` values in `[0, p)`; products are formed in `u64`, so
//! every prime below 2^31 is handled exactly.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A prime modulus below 2^31.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if p >= 1 << 31 {
            return Err(Error::PrimeTooLarge(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Prime(p as u32))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_odd(self) -> bool {
        self.0 != 2
    }

    /// Reduces an arbitrary signed integer into `[0, p)`.
    #[inline]
    pub fn reduce(self, a: i64) -> u32 {
        a.rem_euclid(self.0 as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.0 as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.0 as u64 - b as u64) % self.0 as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    pub fn pow(self, base: u32, mut exp: u64) -> u32 {
        let p = self.0 as u64;
        let mut acc = 1 % p;
        let mut b = base as u64 % p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            exp >>= 1;
        }
        acc as u32
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.0 as u64
    }
}

impl TryFrom<u64> for Prime {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        Prime::new(p)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Deterministic trial division; adequate for the 31-bit range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Multiplicative inverse of `a` modulo `p`.
pub fn inv(a: u32, p: Prime) -> Result<u32> {
    let a = a % p.get();
    if a == 0 {
        return Err(Error::NonInvertible(a, p.get()));
    }
    // extended Euclid on signed 64-bit values
    let (mut r0, mut r1) = (p.get() as i64, a as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1);
    Ok(p.reduce(t0))
}

/// Legendre symbol test via Euler's criterion. Zero counts as a residue.
pub fn is_quadratic_residue(a: u32, p: Prime) -> Result<bool> {
    if !p.is_odd() {
        return Err(Error::OddPrimeRequired);
    }
    let a = a % p.get();
    Ok(a == 0 || p.pow(a, (p.get() as u64 - 1) / 2) == 1)
}

/// Square root modulo an odd prime (Tonelli-Shanks). Returns the smaller of
/// the two roots, or `None` for a non-residue.
pub fn sqrt_mod(a: u32, p: Prime) -> Result<Option<u32>> {
    if !is_quadratic_residue(a, p)? {
        return Ok(None);
    }
    let a = a % p.get();
    if a == 0 {
        return Ok(Some(0));
    }
    let pm1 = p.get() as u64 - 1;
    let root = if pm1 % 4 == 2 {
        p.pow(a, (pm1 + 2) / 4)
    } else {
        let s = pm1.trailing_zeros();
        let q = pm1 >> s;
        let mut nonresidue = 2u32;
        while p.pow(nonresidue, pm1 / 2) != p.get() - 1 {
            nonresidue += 1;
        }
        let mut m = s;
        let mut c = p.pow(nonresidue, q);
        let mut t = p.pow(a, q);
        let mut r = p.pow(a, q.div_ceil(2));
        while t != 1 {
            // least i with t^(2^i) = 1
            let mut i = 0;
            let mut t2 = t;
            while t2 != 1 {
                t2 = p.mul(t2, t2);
                i += 1;
            }
            let b = p.pow(c, 1u64 << (m - i - 1));
            m = i;
            c = p.mul(b, b);
            t = p.mul(t, c);
            r = p.mul(r, b);
        }
        r
    };
    debug_assert_eq!(p.mul(root, root), a);
    Ok(Some(root.min(p.neg(root))))
}

/// All `j` in `[0, p)` with `a j^2 + b j + c = 0 (mod p)`, sorted ascending.
pub fn solve_quadratic(a: u32, b: u32, c: u32, p: Prime) -> Result<Vec<u32>> {
    if !p.is_odd() {
        return Err(Error::OddPrimeRequired);
    }
    let (a, b, c) = (a % p.get(), b % p.get(), c % p.get());
    if a == 0 {
        if b == 0 {
            return if c == 0 {
                Err(Error::DegenerateEquation)
            } else {
                Ok(Vec::new())
            };
        }
        return Ok(vec![p.mul(p.neg(c), inv(b, p)?)]);
    }
    let disc = p.sub(p.mul(b, b), p.mul(4, p.mul(a, c)));
    let Some(root) = sqrt_mod(disc, p)? else {
        return Ok(Vec::new());
    };
    let denom = inv(p.mul(2, a), p)?;
    let nb = p.neg(b);
    let mut roots = vec![
        p.mul(p.add(nb, root), denom),
        p.mul(p.sub(nb, root), denom),
    ];
    roots.sort_unstable();
    roots.dedup();
    Ok(roots)
}

/// Dense matrix over Z_p, row-major, entries reduced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FpMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FpMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from row vectors; every row must have `cols` entries.
    pub fn from_rows(rows: &[Vec<u32>], cols: usize, p: Prime) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row of length {} in a {cols}-column matrix",
                    r.len()
                )));
            }
            data.extend(r.iter().map(|&x| x % p.get()));
        }
        Ok(FpMatrix { rows: rows.len(), cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn mul_vec(&self, v: &[u32], p: Prime) -> Vec<u32> {
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % p.get() as u64)
                    as u32
            })
            .collect()
    }

    /// Reduced row echelon form; returns the pivot columns. Zero rows are dropped.
    pub fn rref(&mut self, p: Prime) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(src) = (row..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            self.swap_rows(row, src);
            let scale = inv(self.get(row, col), p).expect("pivot is nonzero");
            for c in col..self.cols {
                let idx = row * self.cols + c;
                self.data[idx] = p.mul(self.data[idx], scale);
            }
            for r in 0..self.rows {
                let factor = self.get(r, col);
                if r == row || factor == 0 {
                    continue;
                }
                for c in col..self.cols {
                    let sub = p.mul(factor, self.data[row * self.cols + c]);
                    let idx = r * self.cols + c;
                    self.data[idx] = p.sub(self.data[idx], sub);
                }
            }
            pivots.push(col);
            row += 1;
        }
        self.data.truncate(row * self.cols);
        self.rows = row;
        pivots
    }

    pub fn rank(&self, p: Prime) -> usize {
        self.clone().rref(p).len()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

/// Canonical basis of the row space: the nonzero rows of the RREF.
pub fn row_space_basis(rows: &[Vec<u32>], cols: usize, p: Prime) -> Result<Vec<Vec<u32>>> {
    let mut m = FpMatrix::from_rows(rows, cols, p)?;
    m.rref(p);
    Ok(m.to_rows())
}

/// Basis of `{v : M v = 0}` in reduced echelon form. The result is unique
/// for a given null space, so equal kernels compare equal.
pub fn kernel_basis(m: &FpMatrix, p: Prime) -> Vec<Vec<u32>> {
    let mut r = m.clone();
    let pivots = r.rref(p);
    let mut basis = Vec::new();
    let mut pivot_iter = pivots.iter().peekable();
    for free in 0..m.cols {
        if pivot_iter.peek() == Some(&&free) {
            pivot_iter.next();
            continue;
        }
        let mut v = vec![0u32; m.cols];
        v[free] = 1;
        for (row, &pc) in pivots.iter().enumerate() {
            if pc < free {
                v[pc] = p.neg(r.get(row, free));
            }
        }
        basis.push(v);
    }
    if basis.is_empty() {
        return basis;
    }
    row_space_basis(&basis, m.cols, p).expect("rows have matching length")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn prime_construction() {
        assert!(Prime::new(2).is_ok());
        assert!(Prime::new(101).is_ok());
        assert_eq!(Prime::new(1), Err(Error::NotPrime(1)));
        assert_eq!(Prime::new(91), Err(Error::NotPrime(91)));
        assert!(matches!(Prime::new(1 << 31), Err(Error::PrimeTooLarge(_))));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(inv(1, p(7)).unwrap(), 1);
        assert_eq!(inv(2, p(11)).unwrap(), 6);
        assert_eq!(inv(0, p(7)), Err(Error::NonInvertible(0, 7)));
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(sqrt_mod(4, p(11)).unwrap(), Some(2));
        assert_eq!(sqrt_mod(6, p(11)).unwrap(), None);
        assert_eq!(sqrt_mod(0, p(13)).unwrap(), Some(0));
        assert_eq!(sqrt_mod(1, p(2)), Err(Error::OddPrimeRequired));
        // p = 1 mod 8 exercises the full Tonelli-Shanks loop
        assert_eq!(sqrt_mod(2, p(17)).unwrap(), Some(6));
    }

    #[test]
    fn squares_mod_eleven() {
        let squares: Vec<u32> = (0..11u32).filter(|&a| sqrt_mod(a, p(11)).unwrap().is_some()).collect();
        assert_eq!(squares, vec![0, 1, 3, 4, 5, 9]);
    }

    #[test]
    fn quadratic_examples() {
        assert_eq!(solve_quadratic(1, 0, 7, p(11)).unwrap(), vec![2, 9]);
        assert_eq!(solve_quadratic(0, 2, 3, p(11)).unwrap(), vec![4]);
        assert_eq!(solve_quadratic(1, 0, 5, p(11)).unwrap(), Vec::<u32>::new());
        assert_eq!(solve_quadratic(0, 0, 5, p(11)).unwrap(), Vec::<u32>::new());
        assert_eq!(solve_quadratic(0, 0, 0, p(11)), Err(Error::DegenerateEquation));
        assert_eq!(solve_quadratic(1, 2, 1, p(7)).unwrap(), vec![6]);
        assert_eq!(solve_quadratic(1, 1, 1, p(2)), Err(Error::OddPrimeRequired));
    }

    #[test]
    fn kernel_examples() {
        let p3 = p(3);
        assert!(kernel_basis(&FpMatrix::identity(2), p3).is_empty());
        assert_eq!(kernel_basis(&FpMatrix::zeros(2, 2), p3), vec![vec![1, 0], vec![0, 1]]);
        let m = FpMatrix::from_rows(&[vec![1, 1]], 2, p3).unwrap();
        assert_eq!(kernel_basis(&m, p3), vec![vec![1, 2]]);
        // zero-row matrix: kernel is everything
        assert_eq!(kernel_basis(&FpMatrix::zeros(0, 2), p3), vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn rref_rank() {
        let p5 = p(5);
        let m = FpMatrix::from_rows(&[vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]], 3, p5).unwrap();
        assert_eq!(m.rank(p5), 2);
        let mut r = m.clone();
        assert_eq!(r.rref(p5), vec![0, 1]);
        assert_eq!(r.to_rows(), vec![vec![1, 0, 1], vec![0, 1, 1]]);
    }
}

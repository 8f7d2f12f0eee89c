//! Witnesses for the phase-cancellation system
//! `sum u_i (j_i - j_i^2) = 0`, `sum u_i j_i^2 = 0` over Z_p with all
//! `j_i != 0`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::modp::{inv, solve_quadratic, Prime};

/// Smallest prime for which the constructive witness search has a positive
/// success bound.
pub const LARGE_PRIME_THRESHOLD: u32 = 11;

/// Largest prime accepted by [`good_fraction`].
pub const GOOD_FRACTION_MAX_PRIME: u32 = 31;

/// Checks the system in its original form.
pub fn verify_witness(u: &[u32; 4], j: &[u32; 4], p: Prime) -> bool {
    if j.iter().any(|&x| x % p.get() == 0) {
        return false;
    }
    let mut lin = 0u32;
    let mut quad = 0u32;
    for i in 0..4 {
        let jj = p.mul(j[i], j[i]);
        lin = p.add(lin, p.mul(u[i] % p.get(), p.sub(j[i] % p.get(), jj)));
        quad = p.add(quad, p.mul(u[i] % p.get(), jj));
    }
    lin == 0 && quad == 0
}

/// Checks the equivalent form `sum u_i j_i = 0`, `sum u_i j_i^2 = 0`.
pub fn verify_witness_linear(u: &[u32; 4], j: &[u32; 4], p: Prime) -> bool {
    if j.iter().any(|&x| x % p.get() == 0) {
        return false;
    }
    let (mut s1, mut s2) = (0u32, 0u32);
    for i in 0..4 {
        let (ui, ji) = (u[i] % p.get(), j[i] % p.get());
        s1 = p.add(s1, p.mul(ui, ji));
        s2 = p.add(s2, p.mul(ui, p.mul(ji, ji)));
    }
    s1 == 0 && s2 == 0
}

/// Constructive witness search: fixes two coordinates of `j` to `1` and
/// `-1` and solves a quadratic for the remaining two, trying every choice
/// of which two positions carry the quadratic. `None` does not mean no
/// witness exists.
pub fn find_witness(u: &[u32; 4], p: Prime) -> Result<Option<[u32; 4]>> {
    if p.get() < LARGE_PRIME_THRESHOLD {
        return Err(Error::LargePrimePathOnly(p.get()));
    }
    let u = u.map(|x| x % p.get());
    if u == [0; 4] {
        return Ok(Some([1, 1, 1, p.get() - 1]));
    }
    for i1 in 0..4 {
        for i2 in 0..4 {
            if i1 == i2 {
                continue;
            }
            let mut rest = (0..4).filter(|&i| i != i1 && i != i2);
            let (i3, i4) = (rest.next().unwrap(), rest.next().unwrap());
            if let Some(j) = solve_assignment(&u, [i1, i2, i3, i4], p)? {
                return Ok(Some(j));
            }
        }
    }
    Ok(None)
}

fn solve_assignment(u: &[u32; 4], roles: [usize; 4], p: Prime) -> Result<Option<[u32; 4]>> {
    let [u1, u2, u3, u4] = roles.map(|i| u[i]);
    if u1 == 0 || u2 == 0 || p.add(u1, u2) == 0 {
        return Ok(None);
    }
    let v = p.add(u3, u4);
    let w = p.sub(u3, u4);
    let a = p.add(p.mul(u1, u2), p.mul(u1, u1));
    let b = p.mul(2 % p.get(), p.mul(u1, w));
    let c = p.add(p.mul(w, w), p.mul(v, u2));
    let u2_inv = inv(u2, p)?;
    for j1 in solve_quadratic(a, b, c, p)? {
        if j1 == 0 {
            continue;
        }
        let j2 = p.neg(p.mul(p.add(w, p.mul(u1, j1)), u2_inv));
        if j2 == 0 {
            continue;
        }
        let mut j = [0u32; 4];
        j[roles[0]] = j1;
        j[roles[1]] = j2;
        j[roles[2]] = 1;
        j[roles[3]] = p.get() - 1;
        if verify_witness(u, &j, p) {
            return Ok(Some(j));
        }
    }
    Ok(None)
}

/// An exact nonnegative fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Fraction {
    pub numerator: u64,
    pub denominator: u64,
}

impl Fraction {
    pub fn new(numerator: u64, denominator: u64) -> Self {
        Fraction { numerator, denominator }
    }

    pub fn to_f64(self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    /// `self >= other`, compared exactly.
    pub fn at_least(self, other: Fraction) -> bool {
        self.numerator as u128 * other.denominator as u128 >= other.numerator as u128 * self.denominator as u128
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

/// The guaranteed lower bound `(p - 9) / 2p` on the fraction of tuples for
/// which [`find_witness`] succeeds.
pub fn good_fraction_bound(p: Prime) -> Fraction {
    let p = p.get() as u64;
    Fraction::new(p.saturating_sub(9), 2 * p)
}

/// Exact fraction of `u` in Z_p^4 for which [`find_witness`] succeeds.
pub fn good_fraction(p: Prime) -> Result<Fraction> {
    if p.get() > GOOD_FRACTION_MAX_PRIME {
        return Err(Error::Unsupported(format!(
            "exhaustive enumeration limited to p <= {GOOD_FRACTION_MAX_PRIME}; sample instead"
        )));
    }
    let q = p.get();
    let mut good = 0u64;
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                for d in 0..q {
                    if find_witness(&[a, b, c, d], p)?.is_some() {
                        good += 1;
                    }
                }
            }
        }
    }
    Ok(Fraction::new(good, (q as u64).pow(4)))
}

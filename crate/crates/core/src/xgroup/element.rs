use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::spec::{FactorType, GroupSpec};
use crate::error::{Error, Result};
use crate::modp::inv;

pub(crate) type Coords = SmallVec<[u32; 9]>;

/// Normal-form element `x_1^e_1 y_1^f_1 ... x_k^e_k y_k^f_k z^l`, stored as
/// `(e_1, f_1, ..., e_k, f_k, l)` with every coordinate in `[0, p)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(Coords);

impl GroupElement {
    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    /// Exponent of the central generator z.
    pub fn z_exponent(&self) -> u32 {
        *self.0.last().expect("elements have at least one coordinate")
    }

    pub(crate) fn from_coords_unchecked(coords: &[u32]) -> Self {
        GroupElement(Coords::from_slice(coords))
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

/// Element of the bar group: a normal form with the z-exponent dropped.
/// The induced law is coordinatewise addition mod p.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BarElement(SmallVec<[u32; 8]>);

impl BarElement {
    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn from_coords(coords: &[u32]) -> Self {
        BarElement(SmallVec::from_slice(coords))
    }
}

impl fmt::Debug for BarElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

impl GroupSpec {
    /// Validates a coordinate vector as an element of this group.
    pub fn element(&self, coords: &[u32]) -> Result<GroupElement> {
        self.check_coords(coords)?;
        Ok(GroupElement::from_coords_unchecked(coords))
    }

    fn check_coords(&self, coords: &[u32]) -> Result<()> {
        if coords.len() != self.rank() {
            return Err(Error::InvalidElement(format!(
                "expected {} coordinates, got {}",
                self.rank(),
                coords.len()
            )));
        }
        if let Some(c) = coords.iter().find(|&&c| c >= self.p().get()) {
            return Err(Error::InvalidElement(format!("coordinate {c} not reduced mod {}", self.p())));
        }
        Ok(())
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(SmallVec::from_elem(0, self.rank()))
    }

    /// x_i (factor index `i` counted from 0).
    pub fn x(&self, i: usize) -> GroupElement {
        self.unit(2 * i)
    }

    /// y_i (factor index `i` counted from 0).
    pub fn y(&self, i: usize) -> GroupElement {
        self.unit(2 * i + 1)
    }

    /// The central generator z.
    pub fn z(&self) -> GroupElement {
        self.unit(2 * self.k())
    }

    fn unit(&self, pos: usize) -> GroupElement {
        let mut g = self.identity();
        g.0[pos] = 1 % self.p().get();
        g
    }

    /// Standard generators `x_1, y_1, ..., x_k, y_k, z`.
    pub fn generators(&self) -> Vec<GroupElement> {
        (0..self.rank()).map(|i| self.unit(i)).collect()
    }

    /// Product in normal form, validating both operands.
    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check_coords(&a.0)?;
        self.check_coords(&b.0)?;
        Ok(self.mul(a, b))
    }

    /// Product of two elements already known to be valid for this group.
    ///
    /// Per factor, `y^f x^e' = x^e' y^f z^(-e'f)`; `A_p` carries the overflow
    /// of the x-exponent into z (`x^p = z`) and `Q` carries both overflows
    /// (`x^2 = y^2 = z`).
    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        debug_assert!(self.check_coords(&a.0).is_ok() && self.check_coords(&b.0).is_ok());
        let p = self.p().get() as u64;
        let mut out = Coords::with_capacity(self.rank());
        let mut ell = a.z_exponent() as u64 + b.z_exponent() as u64;
        for (i, ty) in self.factors().iter().enumerate() {
            let (e, f) = (a.0[2 * i] as u64, a.0[2 * i + 1] as u64);
            let (e2, f2) = (b.0[2 * i] as u64, b.0[2 * i + 1] as u64);
            let (se, sf) = (e + e2, f + f2);
            ell += (p - (e2 * f) % p) % p;
            match ty {
                FactorType::Heisenberg | FactorType::Dihedral4 => {}
                FactorType::ApSquared => ell += se / p,
                FactorType::Quaternion => ell += se / 2 + sf / 2,
            }
            out.push((se % p) as u32);
            out.push((sf % p) as u32);
        }
        out.push((ell % p) as u32);
        GroupElement(out)
    }

    pub fn inverse(&self, g: &GroupElement) -> GroupElement {
        let p = self.p();
        let mut h: Coords = g.0.iter().map(|&c| p.neg(c)).collect();
        *h.last_mut().unwrap() = 0;
        let mut h = GroupElement(h);
        // g * (x^-e y^-f) lands in the centre; cancel its z-exponent
        let t = self.mul(g, &h).z_exponent();
        *h.0.last_mut().unwrap() = p.neg(t);
        h
    }

    /// `g^n` by square-and-multiply; negative `n` inverts first.
    pub fn power(&self, g: &GroupElement, n: i64) -> GroupElement {
        let exp = self.exponent() as i64;
        let mut n = n.rem_euclid(exp) as u64;
        let mut base = g.clone();
        let mut acc = self.identity();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }

    /// `[a, b] = a^-1 b^-1 a b`.
    pub fn commutator(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let ab = self.mul(a, b);
        let ba = self.mul(b, a);
        self.mul(&self.inverse(&ba), &ab)
    }

    /// Order of `g` (a divisor of the exponent).
    pub fn element_order(&self, g: &GroupElement) -> u64 {
        let id = self.identity();
        let mut acc = g.clone();
        let mut n = 1;
        while acc != id {
            acc = self.mul(&acc, g);
            n += 1;
        }
        n
    }

    pub fn bar(&self, g: &GroupElement) -> BarElement {
        BarElement(SmallVec::from_slice(&g.0[..self.rank() - 1]))
    }

    /// Star product in the bar group (coordinatewise sum).
    pub fn bar_mul(&self, a: &BarElement, b: &BarElement) -> BarElement {
        let p = self.p();
        BarElement(a.0.iter().zip(&b.0).map(|(&x, &y)| p.add(x, y)).collect())
    }

    /// The z-free normal form with the given bar coordinates.
    pub fn lift(&self, b: &BarElement) -> GroupElement {
        let mut c = Coords::from_slice(&b.0);
        c.push(0);
        GroupElement(c)
    }

    /// The automorphism `x_i -> x_i^j, y_i -> y_i^j, z -> z^(j^2)`, defined on
    /// exponent-p groups only.
    pub fn apply_phi(&self, j: u32, g: &GroupElement) -> Result<GroupElement> {
        let p = self.p();
        if !self.is_exponent_p() {
            return Err(Error::PhiUndefined);
        }
        if j.is_multiple_of(p.get()) {
            return Err(Error::InvalidElement("phi_j needs j != 0".into()));
        }
        let j = j % p.get();
        let n = self.rank();
        let mut out: Coords = g.0[..n - 1].iter().map(|&c| p.mul(j, c)).collect();
        out.push(p.mul(p.mul(j, j), g.z_exponent()));
        Ok(GroupElement(out))
    }

    /// The `l` with `phi_j(h) = h^j z^((j - j^2) l)` for every nonzero `j`,
    /// read off at the probe `j = 2`.
    pub fn lemma5_ell(&self, h: &GroupElement) -> Result<u32> {
        let p = self.p();
        let image = self.apply_phi(2, h)?;
        let shift = self.mul(&self.power(h, -2), &image);
        debug_assert!(shift.0[..self.rank() - 1].iter().all(|&c| c == 0));
        let t = shift.z_exponent();
        Ok(p.mul(t, inv(p.sub(2, 4 % p.get()), p)?))
    }

    /// Mixed-radix index of `g`; increasing index is lexicographic order of
    /// the coordinate vectors.
    pub fn index_of(&self, g: &GroupElement) -> u64 {
        let p = self.p().get() as u64;
        g.0.iter().fold(0u64, |acc, &c| acc * p + c as u64)
    }

    pub fn element_at(&self, mut index: u64) -> GroupElement {
        let p = self.p().get() as u64;
        let n = self.rank();
        let mut c = Coords::from_elem(0, n);
        for slot in c.iter_mut().rev() {
            *slot = (index % p) as u32;
            index /= p;
        }
        GroupElement(c)
    }

    /// All elements in index order. Panics if |G| does not fit in `u64`.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        let n = self.order_u64().expect("group too large to enumerate");
        (0..n).map(move |i| self.element_at(i))
    }
}

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modp::Prime;

/// The four extraspecial groups of order p^3 used as central factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorType {
    /// `H_p`: exponent p, odd p.
    Heisenberg,
    /// `A_p`: x of order p^2 with x^p = z, odd p.
    ApSquared,
    /// `D_4`, p = 2.
    Dihedral4,
    /// `Q`, p = 2, with x^2 = y^2 = z.
    Quaternion,
}

impl FactorType {
    fn requires_even_prime(self) -> bool {
        matches!(self, FactorType::Dihedral4 | FactorType::Quaternion)
    }
}

/// An extraspecial group of order p^(2k+1), stored as a central product in
/// canonical form: the distinguished factor (`A_p` or `Q`), if any, is
/// factor 0 and every other factor is `H_p` or `D_4`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupSpec {
    p: Prime,
    factors: Vec<FactorType>,
}

impl GroupSpec {
    /// Builds the central product of `factors`, normalising to the canonical
    /// representative of its isomorphism class (`H_p . A_p = A_p . A_p` and
    /// `D_4 . D_4 = Q . Q`).
    pub fn new(p: Prime, factors: &[FactorType]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidSpec("k must be at least 1".into()));
        }
        for f in factors {
            if f.requires_even_prime() == p.is_odd() {
                return Err(Error::InvalidSpec(format!("factor {f:?} is not defined for p = {p}")));
            }
        }
        let k = factors.len();
        let distinguished = if p.is_odd() {
            factors.contains(&FactorType::ApSquared)
        } else {
            factors.iter().filter(|&&f| f == FactorType::Quaternion).count() % 2 == 1
        };
        let (plain, special) = if p.is_odd() {
            (FactorType::Heisenberg, FactorType::ApSquared)
        } else {
            (FactorType::Dihedral4, FactorType::Quaternion)
        };
        let mut normal = vec![plain; k];
        if distinguished {
            normal[0] = special;
        }
        Ok(GroupSpec { p, factors: normal })
    }

    /// `H_p . ... . H_p` (k factors); exponent p.
    pub fn heisenberg(p: Prime, k: usize) -> Result<Self> {
        Self::new(p, &vec![FactorType::Heisenberg; k])
    }

    /// `A_p . H_p . ... . H_p`; exponent p^2.
    pub fn ap_squared(p: Prime, k: usize) -> Result<Self> {
        let mut f = vec![FactorType::Heisenberg; k];
        if !f.is_empty() {
            f[0] = FactorType::ApSquared;
        }
        Self::new(p, &f)
    }

    /// `D_4 . ... . D_4`, or with one quaternion factor when `quaternion`.
    pub fn two_group(k: usize, quaternion: bool) -> Result<Self> {
        let mut f = vec![FactorType::Dihedral4; k];
        if quaternion && k > 0 {
            f[0] = FactorType::Quaternion;
        }
        Self::new(Prime::new(2).expect("2 is prime"), &f)
    }

    #[inline]
    pub fn p(&self) -> Prime {
        self.p
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[FactorType] {
        &self.factors
    }

    /// Number of coordinates of a normal-form element (2k + 1).
    #[inline]
    pub fn rank(&self) -> usize {
        2 * self.factors.len() + 1
    }

    /// |G| = p^(2k+1).
    pub fn order(&self) -> u128 {
        (self.p.get() as u128).pow(self.rank() as u32)
    }

    /// |G| as a `u64` when it fits; enumeration helpers require this.
    pub fn order_u64(&self) -> Option<u64> {
        u64::try_from(self.order()).ok()
    }

    /// True iff every element has order dividing p.
    pub fn is_exponent_p(&self) -> bool {
        self.p.is_odd() && self.factors.iter().all(|&f| f == FactorType::Heisenberg)
    }

    pub fn exponent(&self) -> u64 {
        let p = self.p.get() as u64;
        if self.is_exponent_p() {
            p
        } else {
            p * p
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p.is_odd() {
            let exp = if self.is_exponent_p() { "p" } else { "p2" };
            write!(f, "p={},k={},exp={}", self.p, self.k(), exp)
        } else {
            let ty = if self.factors[0] == FactorType::Quaternion { "q" } else { "d4" };
            write!(f, "p=2,k={},exp=p2,type={}", self.k(), ty)
        }
    }
}

/// Parses `p=<prime>,k=<int>,exp=p|p2`; for p = 2, `type=d4|q` selects the
/// distinguished factor (`exp` may be omitted or `p2`).
impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (mut p, mut k, mut exp, mut ty) = (None, None, None, None);
        for part in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidSpec(format!("expected key=value, got `{part}`")))?;
            let bad = || Error::InvalidSpec(format!("bad value for `{key}`: `{value}`"));
            match key.trim() {
                "p" => p = Some(value.trim().parse::<u64>().map_err(|_| bad())?),
                "k" => k = Some(value.trim().parse::<usize>().map_err(|_| bad())?),
                "exp" => exp = Some(value.trim().to_ascii_lowercase()),
                "type" => ty = Some(value.trim().to_ascii_lowercase()),
                other => return Err(Error::InvalidSpec(format!("unknown key `{other}`"))),
            }
        }
        let p = Prime::new(p.ok_or_else(|| Error::InvalidSpec("missing p".into()))?)?;
        let k = k.ok_or_else(|| Error::InvalidSpec("missing k".into()))?;
        if p.is_odd() {
            if ty.is_some() {
                return Err(Error::InvalidSpec("`type` is only meaningful for p=2".into()));
            }
            match exp.as_deref() {
                Some("p") => GroupSpec::heisenberg(p, k),
                Some("p2") => GroupSpec::ap_squared(p, k),
                Some(other) => Err(Error::InvalidSpec(format!("unknown exponent `{other}`"))),
                None => Err(Error::InvalidSpec("missing exp".into())),
            }
        } else {
            if let Some(e) = exp.as_deref() {
                if e != "p2" {
                    return Err(Error::InvalidSpec("extraspecial 2-groups have exponent 4".into()));
                }
            }
            match ty.as_deref() {
                Some("d4") | None => GroupSpec::two_group(k, false),
                Some("q") => GroupSpec::two_group(k, true),
                Some(other) => Err(Error::InvalidSpec(format!("unknown type `{other}`"))),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let g: GroupSpec = "p=11,k=1,exp=p".parse().unwrap();
        assert!(g.is_exponent_p());
        assert_eq!(g.order(), 1331);
        assert_eq!(g.to_string(), "p=11,k=1,exp=p");
        let a: GroupSpec = "p=3,k=2,exp=p2".parse().unwrap();
        assert_eq!(a.factors(), &[FactorType::ApSquared, FactorType::Heisenberg]);
        assert_eq!(a.exponent(), 9);
        let q: GroupSpec = "p=2,k=2,type=q".parse().unwrap();
        assert_eq!(q.factors()[0], FactorType::Quaternion);
        assert_eq!(q.to_string().parse::<GroupSpec>().unwrap(), q);
        assert!("p=2,k=1,exp=p".parse::<GroupSpec>().is_err());
        assert!("p=9,k=1,exp=p".parse::<GroupSpec>().is_err());
        assert!("p=3,k=0,exp=p".parse::<GroupSpec>().is_err());
        assert!("p=3,k=1,exp=p,type=q".parse::<GroupSpec>().is_err());
    }

    #[test]
    fn canonical_forms() {
        let p5 = Prime::new(5).unwrap();
        use FactorType::*;
        let g = GroupSpec::new(p5, &[Heisenberg, ApSquared, ApSquared]).unwrap();
        assert_eq!(g.factors(), &[ApSquared, Heisenberg, Heisenberg]);
        let p2 = Prime::new(2).unwrap();
        let qq = GroupSpec::new(p2, &[Quaternion, Quaternion]).unwrap();
        assert_eq!(qq.factors(), &[Dihedral4, Dihedral4]);
        let dq = GroupSpec::new(p2, &[Dihedral4, Quaternion]).unwrap();
        assert_eq!(dq.factors(), &[Quaternion, Dihedral4]);
        assert!(GroupSpec::new(p5, &[Dihedral4]).is_err());
        assert!(GroupSpec::new(p2, &[Heisenberg]).is_err());
    }
}

//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use xhsp_core::modp::{inv, Prime};
use xhsp_core::xgroup::{FactorType, GroupElement, GroupSpec, Subgroup};

pub fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

/// Multiplies by appending the letters of `b`'s normal-form word to `a`,
/// one generator at a time, using only the defining relations:
/// `y x = x y z^-1`, generators of distinct factors commute, `z` is central,
/// and the power relations of each factor type.
pub fn rewrite_mul(spec: &GroupSpec, a: &GroupElement, b: &GroupElement) -> GroupElement {
    let p = spec.p().get();
    let mut c: Vec<u32> = a.coords().to_vec();
    let ell = 2 * spec.k();
    let bump_z = |c: &mut Vec<u32>, by: u32| c[ell] = (c[ell] + by) % p;
    for (i, ty) in spec.factors().iter().enumerate() {
        for _ in 0..b.coords()[2 * i] {
            // append x_i: pass it left over y_i^f, one swap per letter
            let f = c[2 * i + 1];
            bump_z(&mut c, (p - f % p) % p);
            c[2 * i] += 1;
            if c[2 * i] == p {
                c[2 * i] = 0;
                if matches!(ty, FactorType::ApSquared | FactorType::Quaternion) {
                    bump_z(&mut c, 1);
                }
            }
        }
        for _ in 0..b.coords()[2 * i + 1] {
            c[2 * i + 1] += 1;
            if c[2 * i + 1] == p {
                c[2 * i + 1] = 0;
                if matches!(ty, FactorType::Quaternion) {
                    bump_z(&mut c, 1);
                }
            }
        }
    }
    bump_z(&mut c, b.coords()[ell]);
    spec.element(&c).unwrap()
}

/// Every `j` in `(Z_p^*)^4` with `sum u_i j_i = 0` and `sum u_i j_i^2 = 0`,
/// searched exhaustively; returns the first found.
pub fn exhaustive_witness(u: &[u32; 4], p: Prime) -> Option<[u32; 4]> {
    let q = p.get();
    let u = u.map(|x| x % q);
    for j1 in 1..q {
        for j2 in 1..q {
            for j3 in 1..q {
                let s1 = (u[0] * j1 + u[1] * j2 + u[2] * j3) % q;
                let j4 = if u[3] == 0 {
                    if s1 != 0 {
                        continue;
                    }
                    1
                } else {
                    let t = p.mul(p.neg(s1), inv(u[3], p).unwrap());
                    if t == 0 {
                        continue;
                    }
                    t
                };
                let j = [j1, j2, j3, j4];
                let s2 = (0..4).fold(0u32, |acc, i| p.add(acc, p.mul(u[i], p.mul(j[i], j[i]))));
                if s2 == 0 {
                    return Some(j);
                }
            }
        }
    }
    None
}

/// A random subgroup meeting the centre trivially.
pub fn random_subgroup_without_center<R: Rng + ?Sized>(spec: &GroupSpec, rng: &mut R) -> Subgroup {
    loop {
        let h = xhsp_core::xgroup::random_subgroup(spec, rng).unwrap();
        if !h.contains_z() {
            return h;
        }
    }
}

/// `<g, h>` of order `p^2` with `z` outside, for `k >= 2`: `g` and `h` are
/// commuting words in different factors.
pub fn random_isotropic_pair<R: Rng + ?Sized>(spec: &GroupSpec, rng: &mut R) -> Subgroup {
    let p = spec.p().get();
    loop {
        let mut a = vec![0u32; 2 * spec.k() + 1];
        let mut b = vec![0u32; 2 * spec.k() + 1];
        a[0] = rng.gen_range(0..p);
        a[1] = rng.gen_range(0..p);
        b[2] = rng.gen_range(0..p);
        b[3] = rng.gen_range(0..p);
        a[2 * spec.k()] = rng.gen_range(0..p);
        let h = Subgroup::generated(spec, &[spec.element(&a).unwrap(), spec.element(&b).unwrap()]).unwrap();
        if h.order() == (p * p) as usize && !h.contains_z() {
            return h;
        }
    }
}

/// Bar-group cosets of `HG'`: one lift per coset.
pub fn hg_prime_transversal(spec: &GroupSpec, hg: &Subgroup) -> Vec<GroupElement> {
    let mut seen = std::collections::HashSet::new();
    let mut reps = Vec::new();
    for g in spec.elements().filter(|g| g.z_exponent() == 0) {
        let label = xhsp_core::xgroup::coset_label(hg, &g);
        if seen.insert(label) {
            reps.push(g);
        }
    }
    reps
}

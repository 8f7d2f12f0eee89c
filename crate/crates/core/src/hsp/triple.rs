use num_complex::Complex64;
use rand::RngCore;

use super::oracle::Oracle;
use super::witness::{find_witness, verify_witness, LARGE_PRIME_THRESHOLD};
use crate::error::{Error, Result};
use crate::modp::Prime;
use crate::simq::{lemma4_run, PrepConfig, StateVector, GROUP_REGISTER};
use crate::xgroup::{GroupElement, GroupSpec};

/// Four coset representatives, their measured phases, and a witness `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HidingTriple {
    pub a: [GroupElement; 4],
    pub u: [u32; 4],
    pub j: [u32; 4],
}

impl HidingTriple {
    pub fn is_appropriate(&self, p: Prime) -> bool {
        verify_witness(&self.u, &self.j, p)
    }
}

/// A triple with the four collapsed states `|a_i H G'_{u_i}>` it was
/// measured from.
#[derive(Debug, Clone)]
pub struct AppropriateTriple {
    pub triple: HidingTriple,
    pub states: [StateVector; 4],
    /// Rounds of four coset-phase preparations used.
    pub iterations: usize,
}

/// Round cap for [`appropriate_triple`]: `64 * ceil(2p / (p - 9))`.
pub fn resample_cap(p: Prime) -> usize {
    let p = p.get() as usize;
    assert!(p > 9);
    64 * (2 * p).div_ceil(p - 9)
}

/// Prepares four coset phase states per round until the measured phases
/// admit a witness.
pub fn appropriate_triple<R: RngCore + ?Sized>(
    oracle: &Oracle,
    rng: &mut R,
    cfg: &PrepConfig,
) -> Result<AppropriateTriple> {
    let spec = oracle.spec();
    let p = spec.p();
    if p.get() < LARGE_PRIME_THRESHOLD {
        return Err(Error::LargePrimePathOnly(p.get()));
    }
    if !spec.is_exponent_p() {
        return Err(Error::PhiUndefined);
    }
    let cap = resample_cap(p);
    for iteration in 1..=cap {
        let runs = [
            lemma4_run(oracle, rng, cfg)?,
            lemma4_run(oracle, rng, cfg)?,
            lemma4_run(oracle, rng, cfg)?,
            lemma4_run(oracle, rng, cfg)?,
        ];
        let u = [runs[0].u, runs[1].u, runs[2].u, runs[3].u];
        if let Some(j) = find_witness(&u, p)? {
            let [r0, r1, r2, r3] = runs;
            return Ok(AppropriateTriple {
                triple: HidingTriple { a: [r0.a, r1.a, r2.a, r3.a], u, j },
                states: [r0.state, r1.state, r2.state, r3.state],
                iterations: iteration,
            });
        }
    }
    Err(Error::ResampleCap(cap))
}

pub(crate) fn group_spec_of(state: &StateVector) -> Result<&GroupSpec> {
    state
        .layout()
        .register(GROUP_REGISTER)?
        .space
        .group_spec()
        .ok_or_else(|| Error::DimensionMismatch("expected a group register".into()))
}

/// The product hiding state for `g`: component `i` is
/// `states[i] * phi_{j_i}(g)`.
pub fn psi_state(t: &HidingTriple, states: &[StateVector; 4], g: &GroupElement) -> Result<[StateVector; 4]> {
    let spec = group_spec_of(&states[0])?;
    let mut out = states.clone();
    for (st, &j) in out.iter_mut().zip(&t.j) {
        st.right_multiply(GROUP_REGISTER, &spec.apply_phi(j, g)?)?;
    }
    Ok(out)
}

/// `<Psi_g1 | Psi_g2>` as the product of the component overlaps.
pub fn psi_overlap(
    t: &HidingTriple,
    states: &[StateVector; 4],
    g1: &GroupElement,
    g2: &GroupElement,
) -> Result<Complex64> {
    let a = psi_state(t, states, g1)?;
    let b = psi_state(t, states, g2)?;
    product_overlap(&a, &b)
}

fn product_overlap(a: &[StateVector], b: &[StateVector]) -> Result<Complex64> {
    let mut acc = Complex64::new(1.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        acc *= x.inner(y)?;
        if acc.norm_sqr() == 0.0 {
            break;
        }
    }
    Ok(acc)
}

/// `|<Psi_g | Psi_g'>|` over all pairs of the transversal.
pub fn hiding_gram_check(
    t: &HidingTriple,
    states: &[StateVector; 4],
    transversal: &[GroupElement],
) -> Result<Vec<Vec<f64>>> {
    let psis: Vec<[StateVector; 4]> = transversal.iter().map(|g| psi_state(t, states, g)).collect::<Result<_>>()?;
    let n = psis.len();
    let mut gram = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = product_overlap(&psis[i], &psis[j])?.norm();
            gram[i][j] = v;
            gram[j][i] = v;
        }
    }
    Ok(gram)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simq::PrepMode;
    use crate::xgroup::Subgroup;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn h11() -> GroupSpec {
        GroupSpec::heisenberg(Prime::new(11).unwrap(), 1).unwrap()
    }

    #[test]
    fn cap_formula() {
        assert_eq!(resample_cap(Prime::new(11).unwrap()), 64 * 11);
        assert_eq!(resample_cap(Prime::new(13).unwrap()), 64 * 7);
        assert_eq!(resample_cap(Prime::new(101).unwrap()), 64 * 3);
    }

    #[test]
    fn center_in_h_needs_one_round() {
        let g = h11();
        let o = Oracle::new(&Subgroup::generated(&g, &[g.z(), g.x(0)]).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = appropriate_triple(&o, &mut rng, &PrepConfig::default()).unwrap();
        assert_eq!(t.iterations, 1);
        assert_eq!(t.triple.u, [0; 4]);
        assert!(t.triple.is_appropriate(g.p()));
    }

    #[test]
    fn psi_fixed_by_identity_center_and_h() {
        let g = h11();
        let h = Subgroup::generated(&g, &[g.mul(&g.x(0), &g.y(0))]).unwrap();
        let o = Oracle::new(&h).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = PrepConfig { mode: PrepMode::Framed, ..Default::default() };
        let t = appropriate_triple(&o, &mut rng, &cfg).unwrap();
        let e = g.identity();
        for probe in [g.identity(), g.z(), h.generators()[0].clone()] {
            let ov = psi_overlap(&t.triple, &t.states, &e, &probe).unwrap();
            assert!((ov - Complex64::new(1.0, 0.0)).norm() < 1e-9, "{probe:?}: {ov}");
        }
        let ov = psi_overlap(&t.triple, &t.states, &e, &g.x(0)).unwrap();
        assert!(ov.norm() < 1e-9);
    }

    #[test]
    fn small_prime_rejected() {
        let g = GroupSpec::heisenberg(Prime::new(7).unwrap(), 1).unwrap();
        let o = Oracle::new(&Subgroup::trivial(&g)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            appropriate_triple(&o, &mut rng, &PrepConfig::default()),
            Err(Error::LargePrimePathOnly(7))
        ));
    }
}

//! Preparation of coset phase states `|aHG'_u>`.
//!
//! The circuit starts from `sum_g |0>|g>|f(g)>`, measures and discards the
//! oracle register (leaving `|0>|aH>`), then applies a Fourier transform to
//! the Z_p register, a controlled `z^(-i)`, and a second Fourier transform.
//! The result is `p^(-1/2) sum_u |u>|aHG'_u>`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, RngCore};

use super::layout::{IndexSpace, Register, RegisterLayout, DEFAULT_DIMENSION_BUDGET};
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::hsp::oracle::Oracle;
use crate::xgroup::{GroupElement, GroupSpec, Subgroup};

pub const U_REGISTER: &str = "u";
pub const GROUP_REGISTER: &str = "g";
pub const ORACLE_REGISTER: &str = "f";

/// How the group register is represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PrepMode {
    /// Whole-group register, with the oracle register materialised and
    /// measured.
    Full,
    /// The oracle measurement is sampled (a uniformly random `g`, whose
    /// label has the Born probability `|H|/|G|`) and the group register
    /// only spans `aHG'`, the smallest subset closed under the circuit.
    #[default]
    Framed,
}

#[derive(Debug, Clone, Copy)]
pub struct PrepConfig {
    pub mode: PrepMode,
    pub budget: usize,
    /// Also return the state before the `u` register is measured.
    pub keep_superposition: bool,
}

impl Default for PrepConfig {
    fn default() -> Self {
        PrepConfig { mode: PrepMode::Framed, budget: DEFAULT_DIMENSION_BUDGET, keep_superposition: false }
    }
}

#[derive(Debug, Clone)]
pub struct PrepOutput {
    /// Least element of the measured coset `aH`.
    pub a: GroupElement,
    pub u: u32,
    /// The collapsed group register, `|aHG'_u>` up to global phase.
    pub state: StateVector,
    /// `p^(-1/2) sum_u |u>|aHG'_u>` when requested.
    pub superposition: Option<StateVector>,
}

/// `|G|^(-1/2) sum_g |g>|f(g)>` over a whole-group register.
pub fn oracle_superposition(oracle: &Oracle, budget: usize) -> Result<StateVector> {
    let spec = oracle.spec();
    let n = spec
        .order_u64()
        .filter(|&n| n as u128 <= budget as u128)
        .ok_or(Error::DimensionBudget { needed: spec.order(), budget })?;
    let q = oracle.superposition();
    let labels: Vec<u64> = (0..n).map(|i| q.eval_index(i)).collect();
    let label_space = IndexSpace::labels(labels.iter().copied());
    let layout = RegisterLayout::new(
        vec![Register::group(GROUP_REGISTER, spec), Register::new(ORACLE_REGISTER, label_space)],
        budget,
    )?;
    let tuples = labels.iter().enumerate().map(|(i, &l)| [i as u64, l]);
    StateVector::uniform(layout, tuples)
}

/// `|aH>` for the coset of `a`, found through one superposition query.
/// In `Framed` mode the register spans `aHG'`.
pub fn coset_state(oracle: &Oracle, a: &GroupElement, mode: PrepMode, budget: usize) -> Result<StateVector> {
    let spec = oracle.spec();
    let n = spec.order_u64().ok_or(Error::DimensionBudget { needed: spec.order(), budget })?;
    let q = oracle.superposition();
    let target = q.eval(a);
    let coset: Vec<u64> = (0..n).filter(|&i| q.eval_index(i) == target).collect();
    let space = match mode {
        PrepMode::Full => IndexSpace::group(spec),
        PrepMode::Framed => IndexSpace::group_subset(spec, center_orbit(spec, &coset)),
    };
    let layout = RegisterLayout::new(vec![Register::new(GROUP_REGISTER, space)], budget)?;
    StateVector::uniform(layout, coset.iter().map(|&i| [i]))
}

fn center_orbit(spec: &GroupSpec, elements: &[u64]) -> Vec<u64> {
    let z = spec.z();
    let mut out = Vec::with_capacity(elements.len() * spec.p().get() as usize);
    for &i in elements {
        let mut g = spec.element_at(i);
        for _ in 0..spec.p().get() {
            out.push(spec.index_of(&g));
            g = spec.mul(&g, &z);
        }
    }
    out
}

/// Samples the oracle measurement and returns `(a, |aH>)`.
pub fn prepare_coset_state<R: RngCore + ?Sized>(
    oracle: &Oracle,
    rng: &mut R,
    cfg: &PrepConfig,
) -> Result<(GroupElement, StateVector)> {
    let spec = oracle.spec();
    let state = match cfg.mode {
        PrepMode::Full => {
            let sup = oracle_superposition(oracle, cfg.budget)?;
            let outcome = sup.measure(ORACLE_REGISTER, rng)?;
            outcome.collapsed.discard(ORACLE_REGISTER)?
        }
        PrepMode::Framed => {
            let n = spec.order_u64().ok_or(Error::DimensionBudget { needed: spec.order(), budget: cfg.budget })?;
            let g0 = spec.element_at(rng.gen_range(0..n));
            coset_state(oracle, &g0, PrepMode::Framed, cfg.budget)?
        }
    };
    let (first, _) = state.nonzero().next().ok_or(Error::ZeroAmplitudeState)?;
    let a = spec.element_at(state.layout().values(first)[0]);
    Ok((a, state))
}

/// Runs the phase part of the circuit on `|aH>` (register `g`), returning
/// the two-register state over `(u, g)`.
pub fn phase_superposition(coset: &StateVector, budget: usize) -> Result<StateVector> {
    let g = coset.layout().register(GROUP_REGISTER)?;
    let spec = g.space.group_spec().ok_or_else(|| Error::DimensionMismatch("`g` must be a group register".into()))?;
    let zero = StateVector::basis(
        RegisterLayout::new(vec![Register::zp(U_REGISTER, spec.p())], budget)?,
        &[0],
    )?;
    let mut st = zero.tensor(coset, budget)?;
    st.qft_zp(U_REGISTER)?;
    st.controlled_z_power(U_REGISTER, GROUP_REGISTER, -1)?;
    st.qft_zp(U_REGISTER)?;
    Ok(st)
}

/// The full coset-phase-state preparation followed by a measurement of `u`.
pub fn lemma4_run<R: RngCore + ?Sized>(oracle: &Oracle, rng: &mut R, cfg: &PrepConfig) -> Result<PrepOutput> {
    let (a, coset) = prepare_coset_state(oracle, rng, cfg)?;
    let sup = phase_superposition(&coset, cfg.budget)?;
    let outcome = sup.measure(U_REGISTER, rng)?;
    let state = outcome.collapsed.discard(U_REGISTER)?;
    Ok(PrepOutput {
        a,
        u: outcome.value as u32,
        state,
        superposition: cfg.keep_superposition.then_some(sup),
    })
}

/// Reference constructor for
/// `|aHG'_u> = (|H| p)^(-1/2) sum_{h in H} sum_i w^(-ui) |a h z^i>`,
/// normalised, on a register framed to `aHG'`.
pub fn coset_phase_state(a: &GroupElement, h: &Subgroup, u: u32) -> Result<StateVector> {
    let spec = h.spec();
    let p = spec.p().get();
    let u = u % p;
    if h.contains_z() && u != 0 {
        return Err(Error::ZeroAmplitudeState);
    }
    let z = spec.z();
    let mut acc: BTreeMap<u64, Complex64> = BTreeMap::new();
    for x in h.elements() {
        let mut g = spec.mul(a, &x);
        for i in 0..p {
            let angle = -2.0 * PI * ((u as u64 * i as u64) % p as u64) as f64 / p as f64;
            *acc.entry(spec.index_of(&g)).or_default() += Complex64::from_polar(1.0, angle);
            g = spec.mul(&g, &z);
        }
    }
    let space = IndexSpace::group_subset(spec, acc.keys().copied());
    let layout = RegisterLayout::new(vec![Register::new(GROUP_REGISTER, space)], usize::MAX)?;
    let mut st = StateVector::from_amplitudes(layout, acc.into_values().collect())?;
    st.normalize()?;
    Ok(st)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modp::Prime;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn h(p: u64) -> GroupSpec {
        GroupSpec::heisenberg(Prime::new(p).unwrap(), 1).unwrap()
    }

    #[test]
    fn reference_state_is_z_eigenvector() {
        let g = h(5);
        let sub = Subgroup::generated(&g, &[g.x(0)]).unwrap();
        let a = g.y(0);
        for u in 0..5 {
            let st = coset_phase_state(&a, &sub, u).unwrap();
            assert!((st.norm() - 1.0).abs() < 1e-12);
            let mut moved = st.clone();
            moved.right_multiply(GROUP_REGISTER, &g.z()).unwrap();
            let w = Complex64::from_polar(1.0, 2.0 * PI * u as f64 / 5.0);
            assert!((st.inner(&moved).unwrap() - w).norm() < 1e-9);
        }
        let with_z = Subgroup::generated(&g, &[g.z()]).unwrap();
        assert_eq!(coset_phase_state(&a, &with_z, 1).err(), Some(Error::ZeroAmplitudeState));
        assert!(coset_phase_state(&a, &with_z, 0).is_ok());
    }

    #[test]
    fn run_matches_reference_in_both_modes() {
        let g = h(3);
        let sub = Subgroup::generated(&g, &[g.mul(&g.x(0), &g.y(0))]).unwrap();
        let o = Oracle::new(&sub).unwrap();
        for mode in [PrepMode::Full, PrepMode::Framed] {
            let mut rng = ChaCha8Rng::seed_from_u64(17);
            let cfg = PrepConfig { mode, keep_superposition: true, ..Default::default() };
            for _ in 0..10 {
                let out = lemma4_run(&o, &mut rng, &cfg).unwrap();
                let want = coset_phase_state(&out.a, &sub, out.u).unwrap();
                assert!((out.state.fidelity(&want).unwrap() - 1.0).abs() < 1e-9);
                let dist = out.superposition.unwrap().outcome_distribution(U_REGISTER).unwrap();
                assert_eq!(dist.len(), 3);
                for d in dist {
                    assert!((d.probability - 1.0 / 3.0).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn center_in_subgroup_measures_zero() {
        let g = h(3);
        let sub = Subgroup::generated(&g, &[g.z(), g.x(0)]).unwrap();
        let o = Oracle::new(&sub).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cfg = PrepConfig { keep_superposition: true, ..Default::default() };
        let out = lemma4_run(&o, &mut rng, &cfg).unwrap();
        assert_eq!(out.u, 0);
        let dist = out.superposition.unwrap().outcome_distribution(U_REGISTER).unwrap();
        assert_eq!(dist.len(), 1);
        assert!((dist[0].probability - 1.0).abs() < 1e-9);
    }

    #[test]
    fn full_mode_respects_budget() {
        let g = h(11);
        let o = Oracle::new(&Subgroup::trivial(&g)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let cfg = PrepConfig { mode: PrepMode::Full, budget: 1000, keep_superposition: false };
        assert!(matches!(lemma4_run(&o, &mut rng, &cfg), Err(Error::DimensionBudget { .. })));
    }
}

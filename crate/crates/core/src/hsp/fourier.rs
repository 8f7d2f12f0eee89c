//! Hiding procedures for `HG'` and Fourier sampling over the bar group.
//!
//! A hiding family is a product of states `base_i * tau_i(g)`, where `base_i`
//! is a coset phase state and `tau_i` is either the identity or `phi_j`.
//! Two members `Psi_g1`, `Psi_g2` are either equal or orthogonal, and are
//! compared by a one-point probe: for `s = tau(g2 g1^-1)` the overlap of a
//! component pair is `base(b s^-1) / base(b)` for any support point `b`,
//! because `base * s` is either a multiple of `base` or has disjoint
//! support.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, RngCore};

use super::abelian::{accumulate_class_distribution, character_registers, sample_from_class, space_size, tuple_at, NOISE_FLOOR};
use super::oracle::Oracle;
use super::triple::{appropriate_triple, group_spec_of, HidingTriple};
use crate::error::{Error, Result};
use crate::simq::{
    lemma4_run, PrepConfig, PrepOutput, Register, RegisterLayout, StateVector, DEFAULT_DIMENSION_BUDGET,
    GROUP_REGISTER,
};
use crate::xgroup::{BarElement, GroupElement, GroupSpec};

/// A character of Z_p^{2k}, as its exponent vector.
pub type CharacterSample = Vec<u32>;

/// Tolerance for deciding that a probed overlap equals one.
const PROBE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone)]
struct Component {
    base: StateVector,
    /// `Some(j)`: twisted by `phi_j`; `None`: plain right multiplication.
    twist: Option<u32>,
    probe_point: GroupElement,
    probe_amp: Complex64,
}

/// A hiding set for `HG'` in product form.
#[derive(Debug, Clone)]
pub struct HidingFamily {
    spec: GroupSpec,
    components: Vec<Component>,
}

impl HidingFamily {
    fn build(parts: Vec<(StateVector, Option<u32>)>) -> Result<Self> {
        let first = parts.first().ok_or(Error::EmptySubset)?;
        let spec = group_spec_of(&first.0)?.clone();
        let mut components = Vec::with_capacity(parts.len());
        for (base, twist) in parts {
            if group_spec_of(&base)? != &spec {
                return Err(Error::DimensionMismatch("components over different groups".into()));
            }
            let (idx, amp) = base
                .nonzero()
                .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
                .ok_or(Error::ZeroAmplitudeState)?;
            let probe_point = spec.element_at(base.layout().values(idx)[0]);
            components.push(Component { base, twist, probe_point, probe_amp: amp });
        }
        Ok(HidingFamily { spec, components })
    }

    /// `Psi_g = (x)_i states_i * phi_{j_i}(g)`.
    pub fn from_triple(triple: &HidingTriple, states: &[StateVector; 4]) -> Result<Self> {
        Self::build(states.iter().cloned().zip(triple.j.iter().map(|&j| Some(j))).collect())
    }

    /// `Psi_g = |aHG'> * g`.
    pub fn from_coset_state(state: &StateVector) -> Result<Self> {
        Self::build(vec![(state.clone(), None)])
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    fn twist(&self, c: &Component, g: &GroupElement) -> Result<GroupElement> {
        match c.twist {
            Some(j) => self.spec.apply_phi(j, g),
            None => Ok(g.clone()),
        }
    }

    /// The component states of `Psi_g`.
    pub fn components(&self, g: &GroupElement) -> Result<Vec<StateVector>> {
        self.components
            .iter()
            .map(|c| {
                let mut st = c.base.clone();
                st.right_multiply(GROUP_REGISTER, &self.twist(c, g)?)?;
                Ok(st)
            })
            .collect()
    }

    /// `<Psi_g1 | Psi_g2>` from full component inner products.
    pub fn overlap(&self, g1: &GroupElement, g2: &GroupElement) -> Result<Complex64> {
        let (a, b) = (self.components(g1)?, self.components(g2)?);
        let mut acc = Complex64::new(1.0, 0.0);
        for (x, y) in a.iter().zip(&b) {
            acc *= x.inner(y)?;
        }
        Ok(acc)
    }

    /// `<Psi_g1 | Psi_g2>` from one amplitude per component.
    pub fn probe_overlap(&self, g1: &GroupElement, g2: &GroupElement) -> Result<Complex64> {
        let d = self.spec.mul(g2, &self.spec.inverse(g1));
        let mut acc = Complex64::new(1.0, 0.0);
        for c in &self.components {
            let s_inv = self.spec.inverse(&self.twist(c, &d)?);
            let at = self.spec.index_of(&self.spec.mul(&c.probe_point, &s_inv));
            acc *= c.base.amplitude(&[at]) / c.probe_amp;
            if acc.norm_sqr() == 0.0 {
                break;
            }
        }
        Ok(acc)
    }

    /// Whether `Psi_g1 = Psi_g2`.
    pub fn coincide(&self, g1: &GroupElement, g2: &GroupElement) -> Result<bool> {
        Ok((self.probe_overlap(g1, g2)? - Complex64::new(1.0, 0.0)).norm() < PROBE_TOLERANCE)
    }

    fn bar_rank(&self) -> usize {
        2 * self.spec.k()
    }

    fn lift_index(&self, i: usize) -> GroupElement {
        let n = self.bar_rank();
        self.spec.lift(&BarElement::from_coords(&tuple_at(i, n, self.spec.p())))
    }

    /// Bar elements whose hiding state equals that of bar element `i0`.
    fn class_of(&self, i0: usize) -> Result<Vec<usize>> {
        let size = space_size(self.bar_rank(), self.spec.p())?;
        let g0 = self.lift_index(i0);
        let mut class = Vec::new();
        for i in 0..size {
            if self.coincide(&g0, &self.lift_index(i))? {
                class.push(i);
            }
        }
        Ok(class)
    }

    /// Partition of the bar group by hiding state.
    fn classes(&self) -> Result<Vec<Vec<usize>>> {
        let size = space_size(self.bar_rank(), self.spec.p())?;
        let mut reps: Vec<(GroupElement, Vec<usize>)> = Vec::new();
        'outer: for i in 0..size {
            let g = self.lift_index(i);
            for (r, members) in reps.iter_mut() {
                if self.coincide(r, &g)? {
                    members.push(i);
                    continue 'outer;
                }
            }
            reps.push((g, vec![i]));
        }
        Ok(reps.into_iter().map(|(_, m)| m).collect())
    }
}

/// How `sum_g |g>|Psi_g>` is simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingBackend {
    /// Measure which hiding state is present first, leaving a uniform
    /// superposition over one class of the bar group.
    #[default]
    Structured,
    /// Materialise the full entangled state; only for groups of order 27.
    Dense,
}

/// One Fourier sample over the bar group with the given hiding family.
pub fn fourier_sample_gbar<R: RngCore + ?Sized>(
    family: &HidingFamily,
    backend: SamplingBackend,
    rng: &mut R,
) -> Result<CharacterSample> {
    let n = family.bar_rank();
    let p = family.spec.p();
    match backend {
        SamplingBackend::Structured => {
            let size = space_size(n, p)?;
            let class = family.class_of(rng.gen_range(0..size))?;
            sample_from_class(&class, n, p, rng)
        }
        SamplingBackend::Dense => {
            let st = dense_state(family)?;
            let dist = dense_distribution(&st, n)?;
            let mut x = rng.gen::<f64>();
            for (c, q) in &dist {
                if x < *q {
                    return Ok(c.clone());
                }
                x -= q;
            }
            dist.keys().next_back().cloned().ok_or(Error::ZeroAmplitudeState)
        }
    }
}

/// Exact character distribution of [`fourier_sample_gbar`].
pub fn character_distribution(family: &HidingFamily, backend: SamplingBackend) -> Result<BTreeMap<CharacterSample, f64>> {
    let n = family.bar_rank();
    let p = family.spec.p();
    match backend {
        SamplingBackend::Structured => {
            let size = space_size(n, p)?;
            let mut acc = BTreeMap::new();
            for class in family.classes()? {
                accumulate_class_distribution(&class, n, p, class.len() as f64 / size as f64, &mut acc)?;
            }
            acc.retain(|_, q| *q > NOISE_FLOOR);
            Ok(acc)
        }
        SamplingBackend::Dense => dense_distribution(&dense_state(family)?, n),
    }
}

/// `p^(-k) sum_{gbar} |gbar> (x)_i |Psi_gbar,i>` with the bar register
/// Fourier transformed, over whole-group component registers.
fn dense_state(family: &HidingFamily) -> Result<StateVector> {
    if family.spec.order() != 27 {
        return Err(Error::Unsupported("dense sampling is limited to groups of order 27".into()));
    }
    let n = family.bar_rank();
    let p = family.spec.p();
    let size = space_size(n, p)?;
    let names = character_registers(n);
    let mut regs: Vec<Register> = names.iter().map(|s| Register::zp(s.clone(), p)).collect();
    for i in 0..family.len() {
        regs.push(Register::group(format!("psi{i}"), &family.spec));
    }
    let layout = RegisterLayout::new(regs, DEFAULT_DIMENSION_BUDGET)?;
    let block = layout.total_dim() / size;
    let scale = Complex64::new(1.0 / (size as f64).sqrt(), 0.0);
    let mut amps = Vec::with_capacity(layout.total_dim());
    for i in 0..size {
        let g = family.lift_index(i);
        let mut parts = family.components(&g)?.into_iter();
        let mut acc = parts.next().ok_or(Error::EmptySubset)?.with_full_frame(GROUP_REGISTER, DEFAULT_DIMENSION_BUDGET)?;
        for (c, part) in parts.enumerate() {
            let full = part.with_full_frame(GROUP_REGISTER, DEFAULT_DIMENSION_BUDGET)?;
            let renamed = rename_single(&full, &format!("psi{}", c + 1))?;
            acc = acc.tensor(&renamed, DEFAULT_DIMENSION_BUDGET)?;
        }
        debug_assert_eq!(acc.amplitudes().len(), block);
        amps.extend(acc.amplitudes().iter().map(|a| a * scale));
    }
    let mut st = StateVector::from_amplitudes(layout, amps)?;
    for name in &names {
        st.qft_zp(name)?;
    }
    Ok(st)
}

fn rename_single(st: &StateVector, name: &str) -> Result<StateVector> {
    let mut regs = st.layout().registers().to_vec();
    regs[0].name = name.to_string();
    StateVector::from_amplitudes(RegisterLayout::new(regs, usize::MAX)?, st.amplitudes().to_vec())
}

fn dense_distribution(st: &StateVector, n: usize) -> Result<BTreeMap<CharacterSample, f64>> {
    let names = character_registers(n);
    let mut out = BTreeMap::new();
    for (vals, q) in st.marginal_distribution(&names.iter().map(String::as_str).collect::<Vec<_>>())? {
        if q > NOISE_FLOOR {
            out.insert(vals.iter().map(|&v| v as u32).collect(), q);
        }
    }
    Ok(out)
}

/// Counters shared by the hiding procedures.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct HidingStats {
    /// Hiding sets produced.
    pub families: u64,
    pub lemma4_runs: u64,
    /// Rounds of four preparations spent finding appropriate triples.
    pub triple_resamples: u64,
    /// Preparations spent waiting for `u = 0`.
    pub zero_phase_tries: u64,
}

/// Supplies a fresh hiding set for `HG'` on each call.
pub trait HidingProcedure {
    fn next_family(&mut self, rng: &mut dyn RngCore) -> Result<HidingFamily>;
    fn stats(&self) -> HidingStats;
}

/// Hiding sets built from appropriate triples of coset phase states.
#[derive(Debug)]
pub struct TripleHiding<'a> {
    oracle: &'a Oracle,
    cfg: PrepConfig,
    stats: HidingStats,
}

impl<'a> TripleHiding<'a> {
    pub fn new(oracle: &'a Oracle, cfg: PrepConfig) -> Self {
        TripleHiding { oracle, cfg, stats: HidingStats::default() }
    }
}

impl HidingProcedure for TripleHiding<'_> {
    fn next_family(&mut self, rng: &mut dyn RngCore) -> Result<HidingFamily> {
        let t = appropriate_triple(self.oracle, rng, &self.cfg)?;
        self.stats.families += 1;
        self.stats.triple_resamples += t.iterations as u64;
        self.stats.lemma4_runs += 4 * t.iterations as u64;
        HidingFamily::from_triple(&t.triple, &t.states)
    }

    fn stats(&self) -> HidingStats {
        self.stats
    }
}

/// Retry cap for [`zero_phase_state`]: `64 p`.
pub fn zero_phase_cap(p: u32) -> usize {
    64 * p as usize
}

/// Repeats the coset phase preparation until the measured phase is zero,
/// which leaves `|aHG'>`. Returns the run and the number of tries.
pub fn zero_phase_state<R: RngCore + ?Sized>(oracle: &Oracle, rng: &mut R, cfg: &PrepConfig) -> Result<(PrepOutput, usize)> {
    let cap = zero_phase_cap(oracle.spec().p().get());
    for tries in 1..=cap {
        let run = lemma4_run(oracle, rng, cfg)?;
        if run.u == 0 {
            return Ok((run, tries));
        }
    }
    Err(Error::RetryCap(cap))
}

/// Hiding sets `{|aHG'> * g}` from zero-phase coset states.
#[derive(Debug)]
pub struct ZeroPhaseHiding<'a> {
    oracle: &'a Oracle,
    cfg: PrepConfig,
    stats: HidingStats,
}

impl<'a> ZeroPhaseHiding<'a> {
    pub fn new(oracle: &'a Oracle, cfg: PrepConfig) -> Self {
        ZeroPhaseHiding { oracle, cfg, stats: HidingStats::default() }
    }
}

impl HidingProcedure for ZeroPhaseHiding<'_> {
    fn next_family(&mut self, rng: &mut dyn RngCore) -> Result<HidingFamily> {
        let (run, tries) = zero_phase_state(self.oracle, rng, &self.cfg)?;
        self.stats.families += 1;
        self.stats.lemma4_runs += tries as u64;
        self.stats.zero_phase_tries += tries as u64;
        HidingFamily::from_coset_state(&run.state)
    }

    fn stats(&self) -> HidingStats {
        self.stats
    }
}

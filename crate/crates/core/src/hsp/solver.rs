//! End-to-end recovery of a hidden subgroup.
//!
//! Dispatch on the oracle:
//! * `f(z) = f(1)`: the centre lies in `H`, so `f` descends to the bar group
//!   and an abelian Fourier sampling run finds `H/G'`.
//! * odd `p`, exponent `p^2`: `H` meets the centre trivially and lies in the
//!   subgroup `K` of elements with `e_1 = 0`, which the exponent-p group
//!   shares coordinate for coordinate; the oracle is extended there.
//! * otherwise `HG'` is found from hiding sets over the bar group, and `H` is
//!   recovered inside the abelian group `HG'`.

use std::time::Instant;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::abelian::{abelian_hsp, classical_fourier_sample, StabilizationPolicy};
use super::fourier::{fourier_sample_gbar, HidingProcedure, HidingStats, SamplingBackend, TripleHiding, ZeroPhaseHiding};
use super::oracle::Oracle;
use super::witness::LARGE_PRIME_THRESHOLD;
use crate::error::{Error, Result};
use crate::modp::row_space_basis;
use crate::simq::PrepConfig;
use crate::xgroup::{BarElement, GroupElement, GroupSpec, Subgroup, DEFAULT_CLOSURE_BUDGET};

/// Which hiding procedure finds `HG'` when `H` misses the centre.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HidingPath {
    /// Appropriate triples for exponent-p groups with `p >= 11`, zero-phase
    /// states otherwise.
    #[default]
    Auto,
    /// Products of four coset phase states twisted by `phi_j`.
    #[serde(rename = "theorem3")]
    Triples,
    /// Single coset states `|aHG'>`, repeating until the phase is zero.
    #[serde(rename = "constant-exp")]
    ZeroPhase,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SolverConfig {
    pub path: HidingPath,
    pub backend: SamplingBackend,
    pub prep: PrepConfig,
    /// Overrides [`StabilizationPolicy::for_rank`].
    pub policy: Option<StabilizationPolicy>,
}

impl SolverConfig {
    fn policy(&self, n: usize, spec: &GroupSpec) -> StabilizationPolicy {
        self.policy.unwrap_or_else(|| StabilizationPolicy::for_rank(n, spec.p()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    CenterInSubgroup,
    ExponentReduction,
    TrivialIntersection,
}

/// Outcome of one solver run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub group: String,
    pub branch: Option<Branch>,
    pub recovered: Vec<GroupElement>,
    pub planted: Option<Vec<GroupElement>>,
    /// Set by [`SolverReport::check`].
    pub success: Option<bool>,
    pub queries: u64,
    pub lemma4_runs: u64,
    pub triple_resamples: u64,
    pub zero_phase_tries: u64,
    pub fourier_samples: u64,
    pub wall_time_ms: f64,
    pub error: Option<String>,
}

impl SolverReport {
    fn failed(group: &GroupSpec, err: &Error) -> Self {
        SolverReport {
            group: group.to_string(),
            branch: None,
            recovered: Vec::new(),
            planted: None,
            success: Some(false),
            queries: 0,
            lemma4_runs: 0,
            triple_resamples: 0,
            zero_phase_tries: 0,
            fourier_samples: 0,
            wall_time_ms: 0.0,
            error: Some(err.to_string()),
        }
    }

    /// Records the plant and whether the recovered generators close to it.
    pub fn check(&mut self, planted: &Subgroup) -> Result<bool> {
        self.planted = Some(planted.generators().to_vec());
        let ok = self.error.is_none() && {
            let got = Subgroup::closure(planted.spec(), &self.recovered, DEFAULT_CLOSURE_BUDGET)?;
            got.same_elements(planted)
        };
        self.success = Some(ok);
        Ok(ok)
    }
}

#[derive(Debug, Default)]
struct Tally {
    hiding: HidingStats,
    fourier_samples: u64,
}

impl Tally {
    fn absorb(&mut self, s: HidingStats) {
        self.hiding.families += s.families;
        self.hiding.lemma4_runs += s.lemma4_runs;
        self.hiding.triple_resamples += s.triple_resamples;
        self.hiding.zero_phase_tries += s.zero_phase_tries;
    }
}

/// Runs the full reduction. Failures inside the run are recorded in the
/// report rather than returned, so batches keep going.
pub fn solve_hsp(oracle: &Oracle, rng: &mut dyn RngCore, cfg: &SolverConfig) -> SolverReport {
    let start = Instant::now();
    let q0 = oracle.queries();
    let mut tally = Tally::default();
    let result = dispatch(oracle, rng, cfg, &mut tally);
    let mut report = match &result {
        Ok(_) => SolverReport::failed(oracle.spec(), &Error::EmptySubset),
        Err(e) => SolverReport::failed(oracle.spec(), e),
    };
    if let Ok((recovered, branch)) = result {
        report.recovered = recovered;
        report.branch = Some(branch);
        report.success = None;
        report.error = None;
    }
    report.queries = oracle.queries() - q0;
    report.lemma4_runs = tally.hiding.lemma4_runs;
    report.triple_resamples = tally.hiding.triple_resamples;
    report.zero_phase_tries = tally.hiding.zero_phase_tries;
    report.fourier_samples = tally.fourier_samples;
    report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    report
}

fn dispatch(oracle: &Oracle, rng: &mut dyn RngCore, cfg: &SolverConfig, tally: &mut Tally) -> Result<(Vec<GroupElement>, Branch)> {
    let spec = oracle.spec().clone();
    if oracle.query(&spec.z()) == oracle.query(&spec.identity()) {
        return Ok((center_in_subgroup(oracle, rng, cfg, tally)?, Branch::CenterInSubgroup));
    }
    if spec.p().is_odd() && !spec.is_exponent_p() {
        let ext = Oracle::extended(oracle)?;
        let found = trivial_intersection(&ext, rng, cfg, tally)?;
        let back = found
            .iter()
            .map(|g| {
                if g.coords()[0] != 0 {
                    return Err(Error::InvalidElement(format!("{g:?} lies outside the shared subgroup")));
                }
                spec.element(g.coords())
            })
            .collect::<Result<_>>()?;
        return Ok((back, Branch::ExponentReduction));
    }
    Ok((trivial_intersection(oracle, rng, cfg, tally)?, Branch::TrivialIntersection))
}

/// `f` restricted to `z`-free normal forms hides `H/G'` in Z_p^{2k}.
fn center_in_subgroup(oracle: &Oracle, rng: &mut dyn RngCore, cfg: &SolverConfig, tally: &mut Tally) -> Result<Vec<GroupElement>> {
    let spec = oracle.spec();
    let n = 2 * spec.k();
    let out = abelian_hsp(
        || {
            tally.fourier_samples += 1;
            let q = oracle.superposition();
            classical_fourier_sample(n, spec.p(), |x| q.eval(&spec.lift(&BarElement::from_coords(x))), rng)
        },
        n,
        spec.p(),
        cfg.policy(n, spec),
    )?;
    let mut gens: Vec<GroupElement> = out.basis.iter().map(|b| spec.lift(&BarElement::from_coords(b))).collect();
    gens.push(spec.z());
    Ok(gens)
}

/// `HG'` is abelian of exponent `p` when `H` misses the centre; `H` is found
/// inside it from `f` composed with a coordinate isomorphism.
fn trivial_intersection(oracle: &Oracle, rng: &mut dyn RngCore, cfg: &SolverConfig, tally: &mut Tally) -> Result<Vec<GroupElement>> {
    let spec = oracle.spec();
    let bar_basis = hg_prime_bar_basis(oracle, rng, cfg, tally)?;
    let mut gens: Vec<GroupElement> = bar_basis.iter().map(|b| spec.lift(&BarElement::from_coords(b))).collect();
    gens.push(spec.z());
    let m = gens.len();
    let embed = |c: &[u32]| {
        c.iter()
            .zip(&gens)
            .fold(spec.identity(), |acc, (&e, g)| spec.mul(&acc, &spec.power(g, e as i64)))
    };
    let out = abelian_hsp(
        || {
            tally.fourier_samples += 1;
            let q = oracle.superposition();
            classical_fourier_sample(m, spec.p(), |c| q.eval(&embed(c)), rng)
        },
        m,
        spec.p(),
        cfg.policy(m, spec),
    )?;
    Ok(out.basis.iter().map(|c| embed(c)).collect())
}

fn resolve_path(spec: &GroupSpec, path: HidingPath) -> Result<HidingPath> {
    let large = spec.p().get() >= LARGE_PRIME_THRESHOLD;
    match path {
        HidingPath::Auto if large && spec.is_exponent_p() => Ok(HidingPath::Triples),
        HidingPath::Auto => Ok(HidingPath::ZeroPhase),
        HidingPath::Triples if !large => Err(Error::LargePrimePathOnly(spec.p().get())),
        HidingPath::Triples if !spec.is_exponent_p() => Err(Error::PhiUndefined),
        other => Ok(other),
    }
}

/// Echelon basis of the bar image of `HG'`, from Fourier sampling with a
/// fresh hiding set per sample.
fn hg_prime_bar_basis(oracle: &Oracle, rng: &mut dyn RngCore, cfg: &SolverConfig, tally: &mut Tally) -> Result<Vec<Vec<u32>>> {
    let spec = oracle.spec();
    let n = 2 * spec.k();
    let mut procedure: Box<dyn HidingProcedure + '_> = match resolve_path(spec, cfg.path)? {
        HidingPath::Triples => Box::new(TripleHiding::new(oracle, cfg.prep)),
        _ => Box::new(ZeroPhaseHiding::new(oracle, cfg.prep)),
    };
    let result = abelian_hsp(
        || {
            tally.fourier_samples += 1;
            let family = procedure.next_family(rng)?;
            fourier_sample_gbar(&family, cfg.backend, rng)
        },
        n,
        spec.p(),
        cfg.policy(n, spec),
    );
    tally.absorb(procedure.stats());
    row_space_basis(&result?.basis, n, spec.p())
}

/// `HG'`, for an oracle whose subgroup meets the centre trivially.
pub fn find_hg_prime(oracle: &Oracle, rng: &mut dyn RngCore, cfg: &SolverConfig) -> Result<Subgroup> {
    let spec = oracle.spec();
    let mut tally = Tally::default();
    let basis = hg_prime_bar_basis(oracle, rng, cfg, &mut tally)?;
    let mut gens: Vec<GroupElement> = basis.iter().map(|b| spec.lift(&BarElement::from_coords(b))).collect();
    gens.push(spec.z());
    Subgroup::closure(spec, &gens, DEFAULT_CLOSURE_BUDGET)
}

/// The extension of `oracle` to the exponent-p group of the same order.
/// Costs two queries for the centre test.
pub fn exponent_p2_reduce(oracle: &Oracle) -> Result<Oracle> {
    let spec = oracle.spec();
    if !spec.p().is_odd() || spec.is_exponent_p() {
        return Err(Error::Unsupported("needs an odd exponent-p^2 group".into()));
    }
    if oracle.query(&spec.z()) == oracle.query(&spec.identity()) {
        return Err(Error::CenterInSubgroup);
    }
    Oracle::extended(oracle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modp::Prime;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn solve(h: &Subgroup, seed: u64) -> SolverReport {
        let o = Oracle::new(h).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut r = solve_hsp(&o, &mut rng, &SolverConfig::default());
        r.check(h).unwrap();
        r
    }

    #[test]
    fn whole_group_and_center() {
        let g = GroupSpec::heisenberg(Prime::new(3).unwrap(), 1).unwrap();
        let r = solve(&Subgroup::whole(&g).unwrap(), 1);
        assert_eq!(r.success, Some(true));
        assert_eq!(r.branch, Some(Branch::CenterInSubgroup));
        assert_eq!(r.triple_resamples, 0);
        let r = solve(&Subgroup::generated(&g, &[g.z()]).unwrap(), 2);
        assert_eq!(r.success, Some(true));
        assert_eq!(r.branch, Some(Branch::CenterInSubgroup));
    }

    #[test]
    fn small_trivial_intersection() {
        let g = GroupSpec::heisenberg(Prime::new(3).unwrap(), 1).unwrap();
        let r = solve(&Subgroup::generated(&g, &[g.x(0)]).unwrap(), 3);
        assert_eq!(r.branch, Some(Branch::TrivialIntersection));
        assert_eq!(r.success, Some(true), "{r:?}");
        let r = solve(&Subgroup::trivial(&g), 4);
        assert_eq!(r.success, Some(true), "{r:?}");
    }

    #[test]
    fn exponent_reduction_keeps_subgroup() {
        let g = GroupSpec::ap_squared(Prime::new(3).unwrap(), 1).unwrap();
        let h = Subgroup::generated(&g, &[g.y(0)]).unwrap();
        let o = Oracle::new(&h).unwrap();
        let ext = exponent_p2_reduce(&o).unwrap();
        assert!(ext.spec().is_exponent_p());
        let before = o.queries();
        let heis = ext.spec().clone();
        let e = ext.query(&heis.identity());
        let members: Vec<GroupElement> = heis.elements().filter(|x| ext.query(x) == e).collect();
        assert_eq!(members.len(), 3);
        assert!(members.iter().all(|m| m.coords()[0] == 0 && m.coords()[2] == 0));
        assert_eq!(o.queries() - before, 1 + 27);
        let r = solve(&h, 5);
        assert_eq!(r.branch, Some(Branch::ExponentReduction));
        assert_eq!(r.success, Some(true), "{r:?}");
        let center = Oracle::new(&Subgroup::generated(&g, &[g.z()]).unwrap()).unwrap();
        assert_eq!(exponent_p2_reduce(&center).err(), Some(Error::CenterInSubgroup));
    }

    #[test]
    fn forced_triples_needs_large_prime() {
        let g = GroupSpec::heisenberg(Prime::new(5).unwrap(), 1).unwrap();
        let o = Oracle::new(&Subgroup::trivial(&g)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let cfg = SolverConfig { path: HidingPath::Triples, ..Default::default() };
        let r = solve_hsp(&o, &mut rng, &cfg);
        assert!(r.error.is_some());
        assert_eq!(r.success, Some(false));
    }
}

//! Batch experiments: planting, solving, and iteration-count benchmarks.

use std::path::PathBuf;

use anyhow::{bail, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use xhsp_core::hsp::{
    appropriate_triple, find_witness, good_fraction_bound, solve_hsp, zero_phase_state, HidingPath, Oracle,
    SamplingBackend, SolverConfig, SolverReport, LARGE_PRIME_THRESHOLD,
};
use xhsp_core::simq::PrepConfig;
use xhsp_core::xgroup::{enumerate_subgroups, random_subgroup, GroupElement, GroupSpec, Subgroup};

pub const SCHEMA: u32 = 1;

/// Samples of `u` drawn for the witness-rate estimate.
const WITNESS_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub group: String,
    pub trials: usize,
    pub seed: u64,
    pub path: HidingPath,
    pub backend: SamplingBackend,
    pub planted: Option<Vec<Vec<u32>>>,
    pub enumerate_subgroups: bool,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

/// Trial `i` draws from stream `i` of the seed, so results do not depend on
/// scheduling.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// The subgroup each trial plants; `None` means a fresh random subgroup.
fn plants(cfg: &ExperimentConfig, spec: &GroupSpec) -> Result<Vec<Option<Subgroup>>> {
    if cfg.enumerate_subgroups {
        return Ok(enumerate_subgroups(spec)?.into_iter().map(Some).collect());
    }
    let fixed = match &cfg.planted {
        None => None,
        Some(gens) => {
            let elems = gens.iter().map(|c| spec.element(c)).collect::<Result<Vec<GroupElement>, _>>()?;
            Some(Subgroup::generated(spec, &elems)?)
        }
    };
    Ok(vec![fixed; cfg.trials])
}

fn plant(fixed: &Option<Subgroup>, spec: &GroupSpec, rng: &mut ChaCha8Rng) -> Result<Subgroup> {
    match fixed {
        Some(h) => Ok(h.clone()),
        None => Ok(random_subgroup(spec, rng)?),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SolveAggregates {
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_queries: f64,
    pub mean_lemma4_runs: f64,
    pub mean_triple_resamples: f64,
    pub mean_zero_phase_tries: f64,
    pub mean_fourier_samples: f64,
    /// Sum of the per-trial wall times.
    pub wall_time_ms: f64,
}

impl SolveAggregates {
    pub fn from_trials(trials: &[SolverReport]) -> Self {
        let n = trials.len();
        let mean = |f: fn(&SolverReport) -> f64| if n == 0 { 0.0 } else { trials.iter().map(f).sum::<f64>() / n as f64 };
        let successes = trials.iter().filter(|t| t.success == Some(true)).count();
        SolveAggregates {
            trials: n,
            successes,
            success_rate: if n == 0 { 0.0 } else { successes as f64 / n as f64 },
            mean_queries: mean(|t| t.queries as f64),
            mean_lemma4_runs: mean(|t| t.lemma4_runs as f64),
            mean_triple_resamples: mean(|t| t.triple_resamples as f64),
            mean_zero_phase_tries: mean(|t| t.zero_phase_tries as f64),
            mean_fourier_samples: mean(|t| t.fourier_samples as f64),
            wall_time_ms: trials.iter().map(|t| t.wall_time_ms).sum(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub schema: u32,
    pub command: String,
    pub config: ExperimentConfig,
    pub trials: Vec<SolverReport>,
    pub aggregates: SolveAggregates,
}

fn failed_report(spec: &GroupSpec, err: &anyhow::Error) -> SolverReport {
    SolverReport {
        group: spec.to_string(),
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
        error: Some(format!("{err:#}")),
    }
}

pub fn cmd_solve(cfg: &ExperimentConfig) -> Result<SolveReport> {
    let spec: GroupSpec = cfg.group.parse()?;
    let plants = plants(cfg, &spec)?;
    let solver = SolverConfig { path: cfg.path, backend: cfg.backend, ..Default::default() };
    let trials: Vec<SolverReport> = plants
        .par_iter()
        .enumerate()
        .map(|(i, fixed)| {
            let mut rng = trial_rng(cfg.seed, i as u64);
            let mut run = || -> Result<SolverReport> {
                let h = plant(fixed, &spec, &mut rng)?;
                let oracle = Oracle::new(&h)?;
                let mut report = solve_hsp(&oracle, &mut rng, &solver);
                report.check(&h)?;
                Ok(report)
            };
            run().unwrap_or_else(|e| failed_report(&spec, &e))
        })
        .collect();
    let aggregates = SolveAggregates::from_trials(&trials);
    Ok(SolveReport { schema: SCHEMA, command: "solve".into(), config: cfg.clone(), trials, aggregates })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchTrial {
    pub planted: Vec<GroupElement>,
    pub center_in_subgroup: bool,
    /// Rounds of four preparations until an appropriate triple.
    pub triple_rounds: Option<u64>,
    /// Preparations until a zero phase.
    pub zero_phase_tries: Option<u64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub samples: usize,
    pub mean: f64,
    pub standard_error: f64,
    pub expected_at_most: f64,
}

impl MeanEstimate {
    fn new(xs: &[f64], expected_at_most: f64) -> Option<Self> {
        if xs.is_empty() {
            return None;
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
        Some(MeanEstimate { samples: xs.len(), mean, standard_error: (var / n).sqrt(), expected_at_most })
    }

    fn within_three_se(&self) -> bool {
        self.mean <= self.expected_at_most + 3.0 * self.standard_error
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessRate {
    pub samples: usize,
    pub rate: f64,
    pub bound: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchReport {
    pub schema: u32,
    pub command: String,
    pub config: ExperimentConfig,
    pub trials: Vec<BenchTrial>,
    /// Over trials with `z` outside `H`.
    pub triple_rounds: Option<MeanEstimate>,
    pub zero_phase_tries: Option<MeanEstimate>,
    pub witness_rate: Option<WitnessRate>,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

impl BenchReport {
    pub fn summary(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| format!("[{}] {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail))
            .collect()
    }
}

pub fn cmd_bench(cfg: &ExperimentConfig) -> Result<BenchReport> {
    let spec: GroupSpec = cfg.group.parse()?;
    let p = spec.p();
    let triples_apply = spec.is_exponent_p() && p.get() >= LARGE_PRIME_THRESHOLD;
    let (do_triples, do_zero) = match cfg.path {
        HidingPath::Auto => (triples_apply, true),
        HidingPath::Triples => {
            if !triples_apply {
                bail!("appropriate triples need exponent p and p >= {LARGE_PRIME_THRESHOLD}");
            }
            (true, false)
        }
        HidingPath::ZeroPhase => (false, true),
    };
    let plants = plants(cfg, &spec)?;
    let prep = PrepConfig::default();
    let trials: Vec<BenchTrial> = plants
        .par_iter()
        .enumerate()
        .map(|(i, fixed)| {
            let mut rng = trial_rng(cfg.seed, i as u64);
            let h = match plant(fixed, &spec, &mut rng) {
                Ok(h) => h,
                Err(e) => {
                    return BenchTrial {
                        planted: Vec::new(),
                        center_in_subgroup: false,
                        triple_rounds: None,
                        zero_phase_tries: None,
                        error: Some(format!("{e:#}")),
                    }
                }
            };
            let mut trial = BenchTrial {
                planted: h.generators().to_vec(),
                center_in_subgroup: h.contains_z(),
                triple_rounds: None,
                zero_phase_tries: None,
                error: None,
            };
            let result = (|| -> Result<()> {
                let oracle = Oracle::new(&h)?;
                if do_triples {
                    trial.triple_rounds = Some(appropriate_triple(&oracle, &mut rng, &prep)?.iterations as u64);
                }
                if do_zero {
                    trial.zero_phase_tries = Some(zero_phase_state(&oracle, &mut rng, &prep)?.1 as u64);
                }
                Ok(())
            })();
            trial.error = result.err().map(|e| format!("{e:#}"));
            trial
        })
        .collect();

    let mut checks = Vec::new();
    let errors = trials.iter().filter(|t| t.error.is_some()).count();
    checks.push(CheckResult { name: "trials completed".into(), pass: errors == 0, detail: format!("{errors} errors") });

    let outside: Vec<&BenchTrial> = trials.iter().filter(|t| !t.center_in_subgroup && t.error.is_none()).collect();
    let inside: Vec<&BenchTrial> = trials.iter().filter(|t| t.center_in_subgroup && t.error.is_none()).collect();
    let pf = p.get() as f64;
    let collect = |f: fn(&BenchTrial) -> Option<u64>| outside.iter().filter_map(|t| f(t)).map(|x| x as f64).collect::<Vec<_>>();
    let triple_rounds =
        if triples_apply { MeanEstimate::new(&collect(|t| t.triple_rounds), 2.0 * pf / (pf - 9.0)) } else { None };
    let zero_phase_tries = MeanEstimate::new(&collect(|t| t.zero_phase_tries), pf);
    for (name, est) in [("mean triple rounds", &triple_rounds), ("mean zero-phase tries", &zero_phase_tries)] {
        if let Some(e) = est {
            checks.push(CheckResult {
                name: name.into(),
                pass: e.within_three_se(),
                detail: format!(
                    "{:.3} over {} trials (se {:.3}), expected at most {:.3}",
                    e.mean, e.samples, e.standard_error, e.expected_at_most
                ),
            });
        }
    }
    if !inside.is_empty() {
        let single = inside.iter().all(|t| t.triple_rounds.unwrap_or(1) == 1 && t.zero_phase_tries.unwrap_or(1) == 1);
        checks.push(CheckResult {
            name: "centre in H needs one round".into(),
            pass: single,
            detail: format!("{} trials", inside.len()),
        });
    }

    let witness_rate = if p.get() >= LARGE_PRIME_THRESHOLD {
        let mut rng = trial_rng(cfg.seed, u64::MAX);
        let mut good = 0usize;
        for _ in 0..WITNESS_SAMPLES {
            let u = [0; 4].map(|_| rng.gen_range(0..p.get()));
            if find_witness(&u, p)?.is_some() {
                good += 1;
            }
        }
        let w = WitnessRate {
            samples: WITNESS_SAMPLES,
            rate: good as f64 / WITNESS_SAMPLES as f64,
            bound: good_fraction_bound(p).to_f64(),
            tolerance: 0.03,
        };
        checks.push(CheckResult {
            name: "sampled witness rate".into(),
            pass: w.rate >= w.bound - w.tolerance,
            detail: format!("{:.4} over {} tuples, bound {:.4}", w.rate, w.samples, w.bound),
        });
        Some(w)
    } else {
        None
    };

    let pass = checks.iter().all(|c| c.pass);
    Ok(BenchReport {
        schema: SCHEMA,
        command: "bench".into(),
        config: cfg.clone(),
        trials,
        triple_rounds,
        zero_phase_tries,
        witness_rate,
        checks,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(group: &str, trials: usize, seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            group: group.into(),
            trials,
            seed,
            path: HidingPath::Auto,
            backend: SamplingBackend::Structured,
            planted: None,
            enumerate_subgroups: false,
            out: None,
        }
    }

    #[test]
    fn aggregates_recompute_from_trials() {
        let r = cmd_solve(&config("p=3,k=1,exp=p", 6, 1)).unwrap();
        assert_eq!(r.aggregates, SolveAggregates::from_trials(&r.trials));
        assert_eq!(r.aggregates.successes, 6);
        let empty = SolveAggregates::from_trials(&[]);
        assert_eq!((empty.trials, empty.success_rate), (0, 0.0));
    }

    #[test]
    fn whole_group_plant_needs_no_triples() {
        let mut cfg = config("p=11,k=1,exp=p", 2, 3);
        cfg.planted = Some(vec![vec![1, 0, 0], vec![0, 1, 0]]);
        let r = cmd_solve(&cfg).unwrap();
        assert!(r.trials.iter().all(|t| t.success == Some(true) && t.triple_resamples == 0));
    }

    #[test]
    fn enumeration_covers_every_subgroup() {
        let mut cfg = config("p=3,k=1,exp=p2", 0, 0);
        cfg.enumerate_subgroups = true;
        let r = cmd_solve(&cfg).unwrap();
        assert_eq!(r.aggregates.trials, enumerate_subgroups(&"p=3,k=1,exp=p2".parse().unwrap()).unwrap().len());
        assert_eq!(r.aggregates.success_rate, 1.0);
    }

    #[test]
    fn bench_rejects_triples_for_small_primes() {
        let mut cfg = config("p=5,k=1,exp=p", 2, 0);
        cfg.path = HidingPath::Triples;
        assert!(cmd_bench(&cfg).is_err());
    }

    #[test]
    fn bench_center_trials_take_one_round() {
        let mut cfg = config("p=11,k=1,exp=p", 3, 0);
        cfg.planted = Some(vec![vec![0, 0, 1]]);
        let r = cmd_bench(&cfg).unwrap();
        assert!(r.pass, "{:?}", r.checks);
        assert!(r.trials.iter().all(|t| t.triple_rounds == Some(1) && t.zero_phase_tries == Some(1)));
    }
}

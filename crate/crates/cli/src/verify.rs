//! Built-in invariant suites, each printing one line per assertion.

use std::collections::{BTreeSet, HashSet};
use std::f64::consts::PI;

use anyhow::Result;
use clap::ValueEnum;
use num_complex::Complex64;
use rand::Rng;
use xhsp_core::hsp::{
    abelian_hsp, appropriate_triple, classical_fourier_sample, find_witness, good_fraction, good_fraction_bound,
    hiding_gram_check, verify_witness, Oracle, StabilizationPolicy,
};
use xhsp_core::modp::{row_space_basis, Prime};
use xhsp_core::simq::{coset_phase_state, lemma4_run, PrepConfig, PrepMode, StateVector, GROUP_REGISTER, U_REGISTER};
use xhsp_core::xgroup::{coset_label, random_subgroup, FactorType, GroupElement, GroupSpec, Subgroup};

use crate::experiment::trial_rng;

const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Defining relations and associativity.
    Relations,
    /// Coset phase state preparation against the closed form.
    Lemma4,
    /// Eigenvalue identities of `phi_j(h)` and `z` on coset phase states.
    Lemma5,
    /// Exact success fraction of the witness solver.
    Lemma6,
    /// Gram matrices of hiding states from appropriate triples.
    Gram,
    /// Abelian subgroup recovery over every subspace.
    Fact1,
}

struct Tally {
    passed: usize,
    failed: usize,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl AsRef<str>) {
        if ok {
            self.passed += 1;
            println!("[ok]   {}", what.as_ref());
        } else {
            self.failed += 1;
            println!("[FAIL] {}", what.as_ref());
        }
    }
}

pub fn run(suite: Suite, seed: u64, trials: usize) -> Result<bool> {
    let mut t = Tally { passed: 0, failed: 0 };
    match suite {
        Suite::Relations => relations(&mut t, seed, trials)?,
        Suite::Lemma4 => lemma4(&mut t, seed, trials)?,
        Suite::Lemma5 => lemma5(&mut t, seed, trials)?,
        Suite::Lemma6 => lemma6(&mut t)?,
        Suite::Gram => gram(&mut t, seed, trials)?,
        Suite::Fact1 => fact1(&mut t, seed)?,
    }
    println!("{} passed, {} failed", t.passed, t.failed);
    Ok(t.failed == 0)
}

fn prime(p: u64) -> Prime {
    Prime::new(p).expect("literal primes")
}

fn relations(t: &mut Tally, seed: u64, trials: usize) -> Result<()> {
    let specs = [
        "p=3,k=1,exp=p",
        "p=3,k=1,exp=p2",
        "p=2,k=1,type=d4",
        "p=2,k=1,type=q",
        "p=2,k=2,type=q",
        "p=13,k=2,exp=p",
        "p=13,k=2,exp=p2",
    ];
    for s in specs {
        let spec: GroupSpec = s.parse()?;
        let p = spec.p().get() as i64;
        let (e, z) = (spec.identity(), spec.z());
        let mut ok = spec.power(&z, p) == e;
        for (i, ty) in spec.factors().iter().enumerate() {
            let (x, y) = (spec.x(i), spec.y(i));
            let (xp, yp) = match ty {
                FactorType::Heisenberg | FactorType::Dihedral4 => (e.clone(), e.clone()),
                FactorType::ApSquared => (z.clone(), e.clone()),
                FactorType::Quaternion => (z.clone(), z.clone()),
            };
            ok &= spec.commutator(&x, &y) == z;
            ok &= spec.commutator(&x, &z) == e && spec.commutator(&y, &z) == e;
            ok &= spec.power(&x, p) == xp && spec.power(&y, p) == yp;
            for j in (0..spec.k()).filter(|&j| j != i) {
                ok &= [spec.x(j), spec.y(j)].iter().all(|g| spec.commutator(&x, g) == e && spec.commutator(&y, g) == e);
            }
        }
        t.check(ok, format!("{spec}: defining relations"));
        let mut rng = trial_rng(seed, 0);
        let n = spec.order_u64().unwrap_or(u64::MAX);
        let samples = 1000 * trials.max(1);
        let assoc = (0..samples).all(|_| {
            let [a, b, c] = [0; 3].map(|_| spec.element_at(rng.gen_range(0..n)));
            spec.mul(&spec.mul(&a, &b), &c) == spec.mul(&a, &spec.mul(&b, &c))
        });
        t.check(assoc, format!("{spec}: associativity on {samples} random triples"));
    }
    Ok(())
}

fn lemma4(t: &mut Tally, seed: u64, trials: usize) -> Result<()> {
    for p in [3u64, 11] {
        let spec = GroupSpec::heisenberg(prime(p), 1)?;
        let mut rng = trial_rng(seed, p);
        for _ in 0..trials {
            let h = random_subgroup(&spec, &mut rng)?;
            let o = Oracle::new(&h)?;
            for mode in [PrepMode::Full, PrepMode::Framed] {
                let cfg = PrepConfig { mode, keep_superposition: true, ..Default::default() };
                let out = lemma4_run(&o, &mut rng, &cfg)?;
                let want = coset_phase_state(&out.a, &h, out.u)?;
                let deficit = 1.0 - out.state.fidelity(&want)?;
                let mut dev: f64 = 0.0;
                let mut probs = vec![0.0; p as usize];
                for d in out.superposition.as_ref().expect("requested").outcome_distribution(U_REGISTER)? {
                    probs[d.value as usize] = d.probability;
                }
                for (u, q) in probs.iter().enumerate() {
                    let expect = if h.contains_z() { f64::from(u8::from(u == 0)) } else { 1.0 / p as f64 };
                    dev = dev.max((q - expect).abs());
                }
                t.check(
                    deficit <= TOLERANCE && dev <= TOLERANCE,
                    format!(
                        "{spec} |H|={} {mode:?}: u={}, 1-fidelity {deficit:.1e}, u-distribution deviation {dev:.1e}",
                        h.order(),
                        out.u
                    ),
                );
            }
        }
    }
    Ok(())
}

fn omega(p: u32, e: u32) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * f64::from(e % p) / f64::from(p))
}

fn eigen_residual(st: &StateVector, moved: &StateVector, lambda: Complex64) -> f64 {
    if st.layout() == moved.layout() {
        return st.amplitudes().iter().zip(moved.amplitudes()).map(|(a, b)| (b - lambda * a).norm()).fold(0.0, f64::max);
    }
    let mut worst: f64 = 0.0;
    for (i, a) in st.nonzero() {
        worst = worst.max((moved.amplitude(&st.layout().values(i)) - lambda * a).norm());
    }
    for (i, b) in moved.nonzero() {
        worst = worst.max((b - lambda * st.amplitude(&moved.layout().values(i))).norm());
    }
    worst
}

fn lemma5(t: &mut Tally, seed: u64, trials: usize) -> Result<()> {
    for p in [11u64, 13] {
        let spec = GroupSpec::heisenberg(prime(p), 1)?;
        let pr = spec.p();
        let mut rng = trial_rng(seed, p);
        for _ in 0..trials {
            let h = random_subgroup(&spec, &mut rng)?;
            let a = spec.element_at(rng.gen_range(0..spec.order_u64().unwrap_or(1)));
            let us: Vec<u32> = if h.contains_z() { vec![0] } else { (0..pr.get()).collect() };
            let (mut worst_h, mut worst_z): (f64, f64) = (0.0, 0.0);
            for &u in &us {
                let st = coset_phase_state(&a, &h, u)?;
                for j in 1..pr.get() {
                    for x in h.elements() {
                        let ell = spec.lemma5_ell(&x)?;
                        let lambda = omega(pr.get(), pr.mul(u, pr.mul(pr.sub(j, pr.mul(j, j)), ell)));
                        let mut moved = st.clone();
                        moved.right_multiply(GROUP_REGISTER, &spec.apply_phi(j, &x)?)?;
                        worst_h = worst_h.max(eigen_residual(&st, &moved, lambda));
                    }
                    let mut moved = st.clone();
                    moved.right_multiply(GROUP_REGISTER, &spec.apply_phi(j, &spec.z())?)?;
                    worst_z = worst_z.max(eigen_residual(&st, &moved, omega(pr.get(), pr.mul(u, pr.mul(j, j)))));
                }
            }
            t.check(
                worst_h <= TOLERANCE && worst_z <= TOLERANCE,
                format!("{spec} |H|={}: max residual {worst_h:.1e} for phi_j(h), {worst_z:.1e} for z", h.order()),
            );
        }
    }
    Ok(())
}

fn lemma6(t: &mut Tally) -> Result<()> {
    for p in [11u64, 13, 17, 19, 23, 29, 31] {
        let pr = prime(p);
        let frac = good_fraction(pr)?;
        let bound = good_fraction_bound(pr);
        t.check(
            frac.at_least(bound),
            format!("good_fraction({p}) = {frac} = {:.4} >= bound {:.4}", frac.to_f64(), bound.to_f64()),
        );
    }
    for p in [11u64, 13] {
        let pr = prime(p);
        let q = pr.get();
        let mut bad = 0;
        for i in 0..q.pow(4) {
            let u = [i / (q * q * q), (i / (q * q)) % q, (i / q) % q, i % q];
            if let Some(j) = find_witness(&u, pr)? {
                bad += usize::from(!verify_witness(&u, &j, pr));
            }
        }
        t.check(bad == 0, format!("p={p}: every returned witness solves the system ({bad} failures)"));
    }
    Ok(())
}

/// One `z`-free representative per coset of `hg`.
fn transversal(spec: &GroupSpec, hg: &Subgroup) -> Vec<GroupElement> {
    let mut seen = HashSet::new();
    spec.elements().filter(|g| g.z_exponent() == 0).filter(|g| seen.insert(coset_label(hg, g))).collect()
}

fn gram(t: &mut Tally, seed: u64, trials: usize) -> Result<()> {
    for p in [11u64, 13] {
        let spec = GroupSpec::heisenberg(prime(p), 1)?;
        let mut rng = trial_rng(seed, p);
        for _ in 0..trials {
            let h = random_subgroup(&spec, &mut rng)?;
            let hg = h.with_center()?;
            let at = appropriate_triple(&Oracle::new(&h)?, &mut rng, &PrepConfig::default())?;
            let mut points = transversal(&spec, &hg);
            let base = points.len();
            for i in 0..base.min(3) {
                let g = points[i].clone();
                points.push(spec.mul(&g, &spec.z()));
                if let Some(x) = h.generators().first() {
                    points.push(spec.mul(&g, x));
                }
            }
            let labels: Vec<u64> = points.iter().map(|g| coset_label(&hg, g)).collect();
            let m = hiding_gram_check(&at.triple, &at.states, &points)?;
            let (mut off, mut diag): (f64, f64) = (0.0, 0.0);
            for (i, row) in m.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    if labels[i] == labels[j] {
                        diag = diag.max((v - 1.0).abs());
                    } else {
                        off = off.max(*v);
                    }
                }
            }
            t.check(
                off <= TOLERANCE && diag <= TOLERANCE,
                format!(
                    "{spec} |H|={} u={:?} j={:?}: {base} cosets, max off-diagonal {off:.1e}, same-coset deviation {diag:.1e}",
                    h.order(),
                    at.triple.u,
                    at.triple.j
                ),
            );
        }
    }
    Ok(())
}

fn subspaces(n: usize, p: Prime) -> Vec<BTreeSet<Vec<u32>>> {
    let q = p.get();
    let vectors: Vec<Vec<u32>> =
        (0..q.pow(n as u32)).map(|i| (0..n).map(|d| (i / q.pow(d as u32)) % q).collect()).collect();
    let span = |gens: &[Vec<u32>]| {
        let mut set = BTreeSet::from([vec![0; n]]);
        for g in gens {
            for v in set.clone() {
                for c in 1..q {
                    set.insert(v.iter().zip(g).map(|(&a, &b)| p.add(a, p.mul(c, b))).collect());
                }
            }
        }
        set
    };
    let mut seen = HashSet::new();
    let mut stack = vec![Vec::<Vec<u32>>::new()];
    let mut out = Vec::new();
    while let Some(gens) = stack.pop() {
        let s = span(&gens);
        if !seen.insert(s.clone()) {
            continue;
        }
        for v in vectors.iter().filter(|v| !s.contains(*v)) {
            let mut next = gens.clone();
            next.push(v.clone());
            stack.push(next);
        }
        out.push(s);
    }
    out
}

fn echelon(rows: &[Vec<u32>], n: usize, p: Prime) -> Result<Vec<Vec<u32>>> {
    if rows.is_empty() {
        return Ok(Vec::new());
    }
    let mut b = row_space_basis(rows, n, p)?;
    b.retain(|r| r.iter().any(|&x| x != 0));
    Ok(b)
}

fn fact1(t: &mut Tally, seed: u64) -> Result<()> {
    for (n, p) in [(2usize, 3u64), (3, 3), (2, 5)] {
        let pr = prime(p);
        let q = u64::from(pr.get());
        let mut rng = trial_rng(seed, p * 10 + n as u64);
        let all = subspaces(n, pr);
        let mut ok = 0;
        for hidden in &all {
            let index = |v: &[u32]| v.iter().fold(0u64, |acc, &d| acc * q + u64::from(d));
            let f = |x: &[u32]| {
                hidden.iter().map(|h| index(&x.iter().zip(h).map(|(&a, &b)| pr.add(a, b)).collect::<Vec<_>>())).min().unwrap_or(0)
            };
            let out = abelian_hsp(|| classical_fourier_sample(n, pr, f, &mut rng), n, pr, StabilizationPolicy::for_rank(n, pr))?;
            let want = echelon(&hidden.iter().cloned().collect::<Vec<_>>(), n, pr)?;
            if echelon(&out.basis, n, pr)? == want {
                ok += 1;
            }
        }
        t.check(ok == all.len(), format!("Z_{p}^{n}: {ok}/{} subgroups recovered", all.len()));
    }
    Ok(())
}

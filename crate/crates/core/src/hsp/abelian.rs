//! Subgroup recovery in Z_p^n from Fourier samples.

use std::collections::BTreeMap;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::modp::{kernel_basis, FpMatrix, Prime};
use crate::simq::{Register, RegisterLayout, StateVector, DEFAULT_DIMENSION_BUDGET};

/// When to stop collecting character samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StabilizationPolicy {
    /// Stop once this many consecutive samples leave the span unchanged.
    pub consecutive: usize,
    /// Give up after this many samples.
    pub cap: usize,
}

impl StabilizationPolicy {
    /// `consecutive = max(10, ceil(30 / log2 p))`, so that stopping on a
    /// proper subspace has probability at most `2^-30`; `cap` leaves room
    /// for `10 (n + 1)` samples plus one full stable run.
    pub fn for_rank(n: usize, p: Prime) -> Self {
        let bits = (p.get() as f64).log2();
        let consecutive = ((30.0 / bits).ceil() as usize).max(10);
        StabilizationPolicy { consecutive, cap: 10 * (n + 1) + consecutive }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianHspOutcome {
    /// Generators of the hidden subgroup, in reduced echelon form.
    pub basis: Vec<Vec<u32>>,
    pub samples: usize,
}

/// Collects characters until their span is stable, then returns a basis of
/// the common kernel.
pub fn abelian_hsp<F>(mut sampler: F, n: usize, p: Prime, policy: StabilizationPolicy) -> Result<AbelianHspOutcome>
where
    F: FnMut() -> Result<Vec<u32>>,
{
    let mut rows: Vec<Vec<u32>> = Vec::new();
    let mut rank = 0;
    let mut stable = 0;
    for taken in 1..=policy.cap {
        let s = sampler()?;
        if s.len() != n {
            return Err(Error::DimensionMismatch(format!("sample of length {} for rank {n}", s.len())));
        }
        rows.push(s);
        let r = FpMatrix::from_rows(&rows, n, p)?.rank(p);
        if r > rank {
            rank = r;
            stable = 0;
        } else {
            stable += 1;
        }
        if stable >= policy.consecutive || rank == n {
            let m = FpMatrix::from_rows(&rows, n, p)?;
            return Ok(AbelianHspOutcome { basis: kernel_basis(&m, p), samples: taken });
        }
    }
    Err(Error::SamplingDidNotStabilize(policy.cap))
}

/// Probabilities below this are rounding residue of exact zeros.
pub(crate) const NOISE_FLOOR: f64 = 1e-12;

/// `p^n`, if it fits the simulator budget.
pub(crate) fn space_size(n: usize, p: Prime) -> Result<usize> {
    let size = (p.get() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > DEFAULT_DIMENSION_BUDGET as u128 {
        return Err(Error::DimensionBudget { needed: size, budget: DEFAULT_DIMENSION_BUDGET });
    }
    Ok(size as usize)
}

/// The tuple of Z_p^n with the given index, first coordinate most
/// significant.
pub(crate) fn tuple_at(mut index: usize, n: usize, p: Prime) -> Vec<u32> {
    let q = p.get() as usize;
    let mut out = vec![0u32; n];
    for slot in out.iter_mut().rev() {
        *slot = (index % q) as u32;
        index /= q;
    }
    out
}

pub(crate) fn character_registers(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("c{i}")).collect()
}

/// Uniform superposition over `class` (indices into Z_p^n), Fourier
/// transformed on every register.
fn transformed_class_state(class: &[usize], n: usize, p: Prime) -> Result<StateVector> {
    let names = character_registers(n);
    let layout = RegisterLayout::new(names.iter().map(|s| Register::zp(s.clone(), p)).collect(), usize::MAX)?;
    let mut st = StateVector::uniform(
        layout,
        class.iter().map(|&i| tuple_at(i, n, p).into_iter().map(u64::from).collect::<Vec<_>>()),
    )?;
    for name in &names {
        st.qft_zp(name)?;
    }
    Ok(st)
}

/// One Fourier sample from the uniform superposition over `class`.
pub(crate) fn sample_from_class<R: RngCore + ?Sized>(class: &[usize], n: usize, p: Prime, rng: &mut R) -> Result<Vec<u32>> {
    let st = transformed_class_state(class, n, p)?;
    let mut dist = st.marginal_distribution(&character_registers(n).iter().map(String::as_str).collect::<Vec<_>>())?;
    dist.retain(|(_, q)| *q > NOISE_FLOOR);
    let total: f64 = dist.iter().map(|(_, q)| q).sum();
    let mut x = rng.gen::<f64>() * total;
    for (vals, q) in &dist {
        if x < *q {
            return Ok(vals.iter().map(|&v| v as u32).collect());
        }
        x -= q;
    }
    let (vals, _) = dist.last().ok_or(Error::ZeroAmplitudeState)?;
    Ok(vals.iter().map(|&v| v as u32).collect())
}

/// Character distribution of the class state, accumulated into `acc` with
/// weight `w`.
pub(crate) fn accumulate_class_distribution(
    class: &[usize],
    n: usize,
    p: Prime,
    w: f64,
    acc: &mut BTreeMap<Vec<u32>, f64>,
) -> Result<()> {
    let st = transformed_class_state(class, n, p)?;
    let names = character_registers(n);
    for (vals, q) in st.marginal_distribution(&names.iter().map(String::as_str).collect::<Vec<_>>())? {
        *acc.entry(vals.iter().map(|&v| v as u32).collect()).or_default() += w * q;
    }
    Ok(())
}

/// Fourier sampling for a classical hiding function on Z_p^n: prepare
/// `sum_x |x>|f(x)>`, measure `f`, transform and measure `x`.
pub fn classical_fourier_sample<F, R>(n: usize, p: Prime, f: F, rng: &mut R) -> Result<Vec<u32>>
where
    F: Fn(&[u32]) -> u64,
    R: RngCore + ?Sized,
{
    let size = space_size(n, p)?;
    let x0 = rng.gen_range(0..size);
    let target = f(&tuple_at(x0, n, p));
    let class: Vec<usize> = (0..size).filter(|&i| f(&tuple_at(i, n, p)) == target).collect();
    sample_from_class(&class, n, p, rng)
}

/// Exact output distribution of [`classical_fourier_sample`].
pub fn classical_character_distribution<F>(n: usize, p: Prime, f: F) -> Result<BTreeMap<Vec<u32>, f64>>
where
    F: Fn(&[u32]) -> u64,
{
    let size = space_size(n, p)?;
    let mut classes: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for i in 0..size {
        classes.entry(f(&tuple_at(i, n, p))).or_default().push(i);
    }
    let mut acc = BTreeMap::new();
    for class in classes.values() {
        accumulate_class_distribution(class, n, p, class.len() as f64 / size as f64, &mut acc)?;
    }
    acc.retain(|_, q| *q > NOISE_FLOOR);
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    #[test]
    fn policy_values() {
        assert_eq!(StabilizationPolicy::for_rank(2, Prime::new(2).unwrap()), StabilizationPolicy { consecutive: 30, cap: 60 });
        assert_eq!(StabilizationPolicy::for_rank(2, p3()).consecutive, 19);
        assert_eq!(StabilizationPolicy::for_rank(4, Prime::new(13).unwrap()), StabilizationPolicy { consecutive: 10, cap: 60 });
    }

    #[test]
    fn diagonal_in_z3_squared() {
        // f constant on cosets of <(1,1)>
        let f = |x: &[u32]| ((x[0] + 3 - x[1]) % 3) as u64;
        let dist = classical_character_distribution(2, p3(), f).unwrap();
        let support: Vec<Vec<u32>> = dist.keys().cloned().collect();
        assert_eq!(support, vec![vec![0, 0], vec![1, 2], vec![2, 1]]);
        for q in dist.values() {
            assert!((q - 1.0 / 3.0).abs() < 1e-9);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let out = abelian_hsp(
            || classical_fourier_sample(2, p3(), f, &mut rng),
            2,
            p3(),
            StabilizationPolicy::for_rank(2, p3()),
        )
        .unwrap();
        assert_eq!(out.basis, vec![vec![1, 1]]);
    }

    #[test]
    fn trivial_and_full() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let policy = StabilizationPolicy::for_rank(2, p3());
        let injective = |x: &[u32]| (x[0] * 3 + x[1]) as u64;
        let out = abelian_hsp(|| classical_fourier_sample(2, p3(), injective, &mut rng), 2, p3(), policy).unwrap();
        assert!(out.basis.is_empty());
        let constant = |_: &[u32]| 0u64;
        let out = abelian_hsp(|| classical_fourier_sample(2, p3(), constant, &mut rng), 2, p3(), policy).unwrap();
        assert_eq!(out.basis, vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn cap_exceeded() {
        let sampler = || Ok(vec![0, 0]);
        let policy = StabilizationPolicy { consecutive: 5, cap: 3 };
        assert_eq!(abelian_hsp(sampler, 2, p3(), policy), Err(Error::SamplingDidNotStabilize(3)));
    }
}

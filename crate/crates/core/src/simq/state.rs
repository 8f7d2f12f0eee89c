use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, RngCore};
use serde_json::json;

use super::layout::{Frame, IndexSpace, RegisterLayout};
use crate::error::{Error, Result};
use crate::xgroup::GroupElement;

/// Tolerance for amplitude comparisons.
pub const AMPLITUDE_TOLERANCE: f64 = 1e-9;

/// Dense amplitude vector over a register file.
#[derive(Debug, Clone)]
pub struct StateVector {
    layout: RegisterLayout,
    amps: Vec<Complex64>,
}

/// One outcome of a projective measurement of a register.
#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    pub value: u64,
    pub probability: f64,
    pub collapsed: StateVector,
}

/// A sampled outcome, or the exact distribution when no rng is supplied.
#[derive(Debug, Clone)]
pub enum Measurement {
    Sampled(MeasurementOutcome),
    Exact(Vec<MeasurementOutcome>),
}

impl StateVector {
    pub fn from_amplitudes(layout: RegisterLayout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for dimension {}",
                amps.len(),
                layout.total_dim()
            )));
        }
        Ok(StateVector { layout, amps })
    }

    /// Computational basis state with the given register values.
    pub fn basis(layout: RegisterLayout, values: &[u64]) -> Result<Self> {
        let idx = layout.index_of_values(values)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.total_dim()];
        amps[idx] = Complex64::new(1.0, 0.0);
        Ok(StateVector { layout, amps })
    }

    /// Uniform superposition over the listed value tuples (duplicates ignored).
    pub fn uniform<I>(layout: RegisterLayout, tuples: I) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: AsRef<[u64]>,
    {
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.total_dim()];
        let mut count = 0usize;
        for t in tuples {
            let idx = layout.index_of_values(t.as_ref())?;
            if amps[idx].re == 0.0 {
                amps[idx].re = 1.0;
                count += 1;
            }
        }
        if count == 0 {
            return Err(Error::EmptySubset);
        }
        let a = 1.0 / (count as f64).sqrt();
        for x in amps.iter_mut().filter(|x| x.re != 0.0) {
            x.re = a;
        }
        Ok(StateVector { layout, amps })
    }

    /// Uniform superposition over every basis state whose values satisfy `pred`.
    pub fn uniform_where(layout: RegisterLayout, pred: impl Fn(&[u64]) -> bool) -> Result<Self> {
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.total_dim()];
        let mut count = 0usize;
        for (i, a) in amps.iter_mut().enumerate() {
            if pred(&layout.values(i)) {
                a.re = 1.0;
                count += 1;
            }
        }
        if count == 0 {
            return Err(Error::EmptySubset);
        }
        let s = 1.0 / (count as f64).sqrt();
        amps.iter_mut().filter(|a| a.re != 0.0).for_each(|a| a.re = s);
        Ok(StateVector { layout, amps })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, values: &[u64]) -> Complex64 {
        match self.layout.index_of_values(values) {
            Ok(i) => self.amps[i],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&mut self, c: Complex64) {
        self.amps.iter_mut().for_each(|a| *a *= c);
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n < AMPLITUDE_TOLERANCE {
            return Err(Error::ZeroAmplitudeState);
        }
        self.scale(Complex64::new(1.0 / n, 0.0));
        Ok(())
    }

    /// Basis indices and amplitudes of the nonzero entries.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.amps.iter().copied().enumerate().filter(|(_, a)| a.norm_sqr() > 0.0)
    }

    /// Base indices of the fibres along register `reg`.
    fn fibres(&self, reg: usize) -> impl Iterator<Item = usize> {
        let dim = self.layout.dim(reg);
        let stride = self.layout.stride(reg);
        let outer = self.layout.total_dim() / (dim * stride).max(1);
        (0..outer).flat_map(move |o| (0..stride).map(move |i| o * dim * stride + i))
    }

    fn zp_register(&self, name: &str) -> Result<(usize, u32)> {
        let r = self.layout.find(name)?;
        match &self.layout.registers()[r].space {
            IndexSpace::Zp(p) => Ok((r, p.get())),
            _ => Err(Error::DimensionMismatch(format!("register `{name}` is not a Z_p register"))),
        }
    }

    /// Fourier transform over Z_p on one register:
    /// `|a> -> p^(-1/2) sum_b w^(ab) |b>`, `w = exp(2 pi i / p)`.
    pub fn qft_zp(&mut self, reg: &str) -> Result<()> {
        self.qft_signed(reg, 1.0)
    }

    /// Inverse of [`StateVector::qft_zp`].
    pub fn inverse_qft_zp(&mut self, reg: &str) -> Result<()> {
        self.qft_signed(reg, -1.0)
    }

    fn qft_signed(&mut self, reg: &str, sign: f64) -> Result<()> {
        let (r, p) = self.zp_register(reg)?;
        let p = p as usize;
        let twiddle: Vec<Complex64> = (0..p)
            .map(|k| Complex64::from_polar(1.0, sign * 2.0 * PI * k as f64 / p as f64))
            .collect();
        let scale = 1.0 / (p as f64).sqrt();
        let stride = self.layout.stride(r);
        let mut buf = vec![Complex64::new(0.0, 0.0); p];
        let bases: Vec<usize> = self.fibres(r).collect();
        for base in bases {
            for (a, slot) in buf.iter_mut().enumerate() {
                *slot = self.amps[base + a * stride];
            }
            if buf.iter().all(|x| x.norm_sqr() == 0.0) {
                continue;
            }
            for b in 0..p {
                let mut acc = Complex64::new(0.0, 0.0);
                for (a, x) in buf.iter().enumerate() {
                    acc += x * twiddle[(a * b) % p];
                }
                self.amps[base + b * stride] = acc * scale;
            }
        }
        Ok(())
    }

    /// Applies `|h> -> |h g>` on a group register.
    pub fn right_multiply(&mut self, reg: &str, g: &GroupElement) -> Result<()> {
        let r = self.layout.find(reg)?;
        let (spec, frame) = match &self.layout.registers()[r].space {
            IndexSpace::Group { spec, frame } => (spec.clone(), frame.clone()),
            _ => return Err(Error::DimensionMismatch(format!("register `{reg}` is not a group register"))),
        };
        spec.element(g.coords())?;
        match frame {
            Frame::Full => {
                let perm: Vec<usize> = (0..self.layout.dim(r))
                    .map(|pos| spec.index_of(&spec.mul(&spec.element_at(pos as u64), g)) as usize)
                    .collect();
                self.permute_register(r, &perm);
            }
            Frame::Subset(set) => {
                let images: Vec<u64> =
                    set.iter().map(|&v| spec.index_of(&spec.mul(&spec.element_at(v), g))).collect();
                let mut sorted = images.clone();
                sorted.sort_unstable();
                let perm: Vec<usize> =
                    images.iter().map(|v| sorted.binary_search(v).expect("image is in the new frame")).collect();
                self.layout = self.layout.replace_space(
                    r,
                    IndexSpace::Group { spec: spec.clone(), frame: Frame::Subset(Arc::new(sorted)) },
                )?;
                self.permute_register(r, &perm);
            }
        }
        Ok(())
    }

    /// Moves the amplitude at register position `pos` to `perm[pos]`.
    fn permute_register(&mut self, r: usize, perm: &[usize]) {
        let stride = self.layout.stride(r);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        let bases: Vec<usize> = self.fibres(r).collect();
        for base in bases {
            for (pos, &np) in perm.iter().enumerate() {
                out[base + np * stride] = self.amps[base + pos * stride];
            }
        }
        self.amps = out;
    }

    /// `|i>|h> -> |i>|h z^(sign i)>` with `ctrl` a Z_p register and `tgt` a
    /// group register.
    pub fn controlled_z_power(&mut self, ctrl: &str, tgt: &str, sign: i64) -> Result<()> {
        let (c, p) = self.zp_register(ctrl)?;
        let t = self.layout.find(tgt)?;
        let space = self.layout.registers()[t].space.clone();
        let spec = space
            .group_spec()
            .ok_or_else(|| Error::DimensionMismatch(format!("register `{tgt}` is not a group register")))?
            .clone();
        if spec.p().get() != p {
            return Err(Error::DimensionMismatch("control and group moduli differ".into()));
        }
        let tdim = self.layout.dim(t);
        // table[i * tdim + pos] = target position after multiplying by z^(sign i)
        let mut table = vec![0usize; p as usize * tdim];
        for i in 0..p {
            let w = spec.power(&spec.z(), sign * i as i64);
            for pos in 0..tdim {
                let h = spec.element_at(space.value_at(pos));
                let v = spec.index_of(&spec.mul(&h, &w));
                table[i as usize * tdim + pos] = space.position_of(v).ok_or(Error::OutsideFrame)?;
            }
        }
        let (cs, ts) = (self.layout.stride(c), self.layout.stride(t));
        let cdim = self.layout.dim(c);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (idx, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let i = (idx / cs) % cdim;
            let pos = (idx / ts) % tdim;
            let np = table[i * tdim + pos];
            out[idx - pos * ts + np * ts] = *a;
        }
        self.amps = out;
        Ok(())
    }

    /// Born probabilities of each position of register `reg`.
    pub fn probabilities(&self, reg: &str) -> Result<Vec<f64>> {
        let r = self.layout.find(reg)?;
        let (dim, stride) = (self.layout.dim(r), self.layout.stride(r));
        let mut probs = vec![0.0; dim];
        for (idx, a) in self.amps.iter().enumerate() {
            probs[(idx / stride) % dim] += a.norm_sqr();
        }
        Ok(probs)
    }

    fn collapse(&self, r: usize, pos: usize, prob: f64) -> StateVector {
        let (dim, stride) = (self.layout.dim(r), self.layout.stride(r));
        let scale = 1.0 / prob.sqrt();
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(idx, a)| if (idx / stride) % dim == pos { a * scale } else { Complex64::new(0.0, 0.0) })
            .collect();
        StateVector { layout: self.layout.clone(), amps }
    }

    /// Samples a value of `reg` with Born probability and collapses onto it.
    pub fn measure<R: RngCore + ?Sized>(&self, reg: &str, rng: &mut R) -> Result<MeasurementOutcome> {
        let r = self.layout.find(reg)?;
        let probs = self.probabilities(reg)?;
        let total: f64 = probs.iter().sum();
        if total < AMPLITUDE_TOLERANCE {
            return Err(Error::ZeroAmplitudeState);
        }
        let mut x = rng.gen::<f64>() * total;
        let mut pos = probs.iter().rposition(|&q| q > 0.0).expect("nonzero total");
        for (i, &q) in probs.iter().enumerate() {
            if q > 0.0 && x < q {
                pos = i;
                break;
            }
            x -= q;
        }
        let probability = probs[pos] / total;
        Ok(MeasurementOutcome {
            value: self.layout.registers()[r].space.value_at(pos),
            probability,
            collapsed: self.collapse(r, pos, probs[pos]),
        })
    }

    /// Every outcome of measuring `reg` with nonzero probability.
    pub fn outcome_distribution(&self, reg: &str) -> Result<Vec<MeasurementOutcome>> {
        let r = self.layout.find(reg)?;
        let probs = self.probabilities(reg)?;
        let total: f64 = probs.iter().sum();
        Ok(probs
            .iter()
            .enumerate()
            .filter(|(_, &q)| q > AMPLITUDE_TOLERANCE * AMPLITUDE_TOLERANCE)
            .map(|(pos, &q)| MeasurementOutcome {
                value: self.layout.registers()[r].space.value_at(pos),
                probability: q / total,
                collapsed: self.collapse(r, pos, q),
            })
            .collect())
    }

    /// Samples with `rng`, or returns the exact distribution when `rng` is `None`.
    pub fn measure_with(&self, reg: &str, rng: Option<&mut dyn RngCore>) -> Result<Measurement> {
        match rng {
            Some(r) => Ok(Measurement::Sampled(self.measure(reg, r)?)),
            None => Ok(Measurement::Exact(self.outcome_distribution(reg)?)),
        }
    }

    /// Joint distribution of several registers: `(values, probability)` with
    /// probability above zero, in basis order.
    pub fn marginal_distribution(&self, regs: &[&str]) -> Result<Vec<(Vec<u64>, f64)>> {
        let ids: Vec<usize> = regs.iter().map(|n| self.layout.find(n)).collect::<Result<_>>()?;
        let mut acc: std::collections::BTreeMap<Vec<usize>, f64> = Default::default();
        for (idx, a) in self.amps.iter().enumerate() {
            let q = a.norm_sqr();
            if q == 0.0 {
                continue;
            }
            let key: Vec<usize> =
                ids.iter().map(|&r| (idx / self.layout.stride(r)) % self.layout.dim(r)).collect();
            *acc.entry(key).or_default() += q;
        }
        Ok(acc
            .into_iter()
            .map(|(pos, q)| {
                let vals = pos
                    .iter()
                    .zip(&ids)
                    .map(|(&p, &r)| self.layout.registers()[r].space.value_at(p))
                    .collect();
                (vals, q)
            })
            .collect())
    }

    /// Drops a register that holds a definite value (e.g. after measurement).
    pub fn discard(&self, reg: &str) -> Result<StateVector> {
        let r = self.layout.find(reg)?;
        let probs = self.probabilities(reg)?;
        let support: Vec<usize> = (0..probs.len()).filter(|&i| probs[i] > 0.0).collect();
        if support.len() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "register `{reg}` is not in a definite state ({} values in support)",
                support.len()
            )));
        }
        let pos = support[0];
        let (dim, stride) = (self.layout.dim(r), self.layout.stride(r));
        let layout = self.layout.without(r);
        let mut amps = Vec::with_capacity(layout.total_dim());
        let outer = self.layout.total_dim() / (dim * stride);
        for o in 0..outer {
            let base = o * dim * stride + pos * stride;
            amps.extend_from_slice(&self.amps[base..base + stride]);
        }
        Ok(StateVector { layout, amps })
    }

    /// `self (x) other`, registers of `self` first.
    pub fn tensor(&self, other: &StateVector, budget: usize) -> Result<StateVector> {
        let mut regs = self.layout.registers().to_vec();
        regs.extend_from_slice(other.layout.registers());
        let layout = RegisterLayout::new(regs, budget)?;
        let mut amps = Vec::with_capacity(layout.total_dim());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        Ok(StateVector { layout, amps })
    }

    /// `<self|other>`. Registers are matched by position and must be of
    /// compatible kinds; group frames may differ.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.layout == other.layout {
            return Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum());
        }
        let (ra, rb) = (self.layout.registers(), other.layout.registers());
        if ra.len() != rb.len() || ra.iter().zip(rb).any(|(a, b)| !a.space.compatible(&b.space)) {
            return Err(Error::DimensionMismatch("incompatible register layouts".into()));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        if ra.len() == 1 {
            // single register: merge the two sorted value lists
            let (sa, sb) = (&ra[0].space, &rb[0].space);
            let (mut i, mut j) = (0, 0);
            while i < self.amps.len() && j < other.amps.len() {
                let (va, vb) = (sa.value_at(i), sb.value_at(j));
                match va.cmp(&vb) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        acc += self.amps[i].conj() * other.amps[j];
                        i += 1;
                        j += 1;
                    }
                }
            }
            return Ok(acc);
        }
        for (idx, a) in self.nonzero() {
            let values = self.layout.values(idx);
            if let Ok(j) = other.layout.index_of_values(&values) {
                acc += a.conj() * other.amps[j];
            }
        }
        Ok(acc)
    }

    /// `|<self|other>|`: overlap ignoring global phase.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    /// Re-expresses a subset-framed group register over the whole group.
    pub fn with_full_frame(&self, reg: &str, budget: usize) -> Result<StateVector> {
        let r = self.layout.find(reg)?;
        let space = &self.layout.registers()[r].space;
        let IndexSpace::Group { spec, frame } = space else {
            return Err(Error::DimensionMismatch(format!("register `{reg}` is not a group register")));
        };
        if *frame == Frame::Full {
            return Ok(self.clone());
        }
        let mut regs = self.layout.registers().to_vec();
        regs[r].space = IndexSpace::Group { spec: spec.clone(), frame: Frame::Full };
        let layout = RegisterLayout::new(regs, budget)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.total_dim()];
        for (idx, a) in self.nonzero() {
            amps[layout.index_of_values(&self.layout.values(idx))?] = a;
        }
        Ok(StateVector { layout, amps })
    }

    /// Debug dump of the nonzero entries; `None` above 10^4 nonzeros.
    pub fn to_json(&self) -> Option<serde_json::Value> {
        let entries: Vec<_> = self.nonzero().take(10_001).collect();
        if entries.len() > 10_000 {
            return None;
        }
        let names: Vec<&str> = self.layout.registers().iter().map(|r| r.name.as_str()).collect();
        Some(json!({
            "registers": names,
            "entries": entries
                .iter()
                .map(|(i, a)| json!({
                    "index": i,
                    "values": self.layout.values(*i),
                    "re": a.re,
                    "im": a.im,
                }))
                .collect::<Vec<_>>(),
        }))
    }
}

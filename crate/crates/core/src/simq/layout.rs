use std::sync::Arc;

use crate::error::{Error, Result};
use crate::modp::Prime;
use crate::xgroup::GroupSpec;

/// Default cap on the number of basis states of a simulated register file.
pub const DEFAULT_DIMENSION_BUDGET: usize = 1 << 24;

/// Which group elements a group-indexed register has basis states for.
///
/// `Subset` holds sorted element indices; operations that would move
/// amplitude outside the subset fail with [`Error::OutsideFrame`], except
/// right multiplication, which carries the subset along.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Frame {
    Full,
    Subset(Arc<Vec<u64>>),
}

/// Value space of one register. Register values are `u64`: a residue, a
/// group element index, or an oracle label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndexSpace {
    Zp(Prime),
    Group { spec: Arc<GroupSpec>, frame: Frame },
    /// Sorted set of oracle labels.
    Labels(Arc<Vec<u64>>),
}

impl IndexSpace {
    pub fn group(spec: &GroupSpec) -> Self {
        IndexSpace::Group { spec: Arc::new(spec.clone()), frame: Frame::Full }
    }

    /// A group register whose basis is the given set of elements.
    pub fn group_subset(spec: &GroupSpec, elements: impl IntoIterator<Item = u64>) -> Self {
        let mut v: Vec<u64> = elements.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        IndexSpace::Group { spec: Arc::new(spec.clone()), frame: Frame::Subset(Arc::new(v)) }
    }

    pub fn labels(values: impl IntoIterator<Item = u64>) -> Self {
        let mut v: Vec<u64> = values.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        IndexSpace::Labels(Arc::new(v))
    }

    pub fn dim(&self) -> u128 {
        match self {
            IndexSpace::Zp(p) => p.get() as u128,
            IndexSpace::Group { spec, frame: Frame::Full } => spec.order(),
            IndexSpace::Group { frame: Frame::Subset(s), .. } => s.len() as u128,
            IndexSpace::Labels(v) => v.len() as u128,
        }
    }

    #[inline]
    pub fn value_at(&self, pos: usize) -> u64 {
        match self {
            IndexSpace::Group { frame: Frame::Subset(s), .. } => s[pos],
            IndexSpace::Labels(v) => v[pos],
            _ => pos as u64,
        }
    }

    #[inline]
    pub fn position_of(&self, value: u64) -> Option<usize> {
        match self {
            IndexSpace::Group { frame: Frame::Subset(s), .. } => s.binary_search(&value).ok(),
            IndexSpace::Labels(v) => v.binary_search(&value).ok(),
            other => (u128::from(value) < other.dim()).then_some(value as usize),
        }
    }

    pub fn group_spec(&self) -> Option<&GroupSpec> {
        match self {
            IndexSpace::Group { spec, .. } => Some(spec),
            _ => None,
        }
    }

    /// Same kind of space (ignoring frames), so values are comparable.
    pub fn compatible(&self, other: &IndexSpace) -> bool {
        match (self, other) {
            (IndexSpace::Zp(a), IndexSpace::Zp(b)) => a == b,
            (IndexSpace::Group { spec: a, .. }, IndexSpace::Group { spec: b, .. }) => a == b,
            (IndexSpace::Labels(_), IndexSpace::Labels(_)) => true,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub space: IndexSpace,
}

impl Register {
    pub fn new(name: impl Into<String>, space: IndexSpace) -> Self {
        Register { name: name.into(), space }
    }

    pub fn zp(name: impl Into<String>, p: Prime) -> Self {
        Self::new(name, IndexSpace::Zp(p))
    }

    pub fn group(name: impl Into<String>, spec: &GroupSpec) -> Self {
        Self::new(name, IndexSpace::group(spec))
    }
}

/// Ordered register file; the first register is the most significant digit
/// of a basis index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterLayout {
    registers: Vec<Register>,
    dims: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl RegisterLayout {
    pub fn new(registers: Vec<Register>, budget: usize) -> Result<Self> {
        let mut total: u128 = 1;
        for r in &registers {
            total = total.saturating_mul(r.space.dim());
        }
        if total > budget as u128 {
            return Err(Error::DimensionBudget { needed: total, budget });
        }
        for (i, r) in registers.iter().enumerate() {
            if registers[..i].iter().any(|o| o.name == r.name) {
                return Err(Error::DimensionMismatch(format!("duplicate register `{}`", r.name)));
            }
        }
        let dims: Vec<usize> = registers.iter().map(|r| r.space.dim() as usize).collect();
        let mut strides = vec![1usize; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        Ok(RegisterLayout { registers, dims, strides, total: total as usize })
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn total_dim(&self) -> usize {
        self.total
    }

    pub fn dim(&self, reg: usize) -> usize {
        self.dims[reg]
    }

    pub fn stride(&self, reg: usize) -> usize {
        self.strides[reg]
    }

    pub fn find(&self, name: &str) -> Result<usize> {
        self.registers
            .iter()
            .position(|r| r.name == name)
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    pub fn register(&self, name: &str) -> Result<&Register> {
        Ok(&self.registers[self.find(name)?])
    }

    /// Register positions of a basis index.
    pub fn positions(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (i, &d) in self.dims.iter().enumerate().rev() {
            out[i] = index % d;
            index /= d;
        }
        out
    }

    /// Register values of a basis index.
    pub fn values(&self, index: usize) -> Vec<u64> {
        self.positions(index)
            .into_iter()
            .zip(&self.registers)
            .map(|(pos, r)| r.space.value_at(pos))
            .collect()
    }

    pub fn index_of_values(&self, values: &[u64]) -> Result<usize> {
        if values.len() != self.registers.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} registers",
                values.len(),
                self.registers.len()
            )));
        }
        let mut idx = 0;
        for ((v, r), s) in values.iter().zip(&self.registers).zip(&self.strides) {
            let pos = r.space.position_of(*v).ok_or(Error::OutsideFrame)?;
            idx += pos * s;
        }
        Ok(idx)
    }

    pub(crate) fn replace_space(&self, reg: usize, space: IndexSpace) -> Result<Self> {
        let mut regs = self.registers.clone();
        regs[reg].space = space;
        RegisterLayout::new(regs, usize::MAX)
    }

    pub(crate) fn without(&self, reg: usize) -> Self {
        let mut regs = self.registers.clone();
        regs.remove(reg);
        RegisterLayout::new(regs, usize::MAX).expect("removing a register never grows the layout")
    }
}

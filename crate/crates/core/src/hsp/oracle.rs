use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::xgroup::{coset_label, GroupElement, GroupSpec, Subgroup};

/// Largest group for which coset labels are tabulated up front.
const LABEL_TABLE_LIMIT: u64 = 1 << 23;

/// A hiding function `f` for a sealed subgroup, with query accounting.
///
/// Labels are opaque `u64` values: equal exactly on left cosets of the
/// hidden subgroup.
#[derive(Clone)]
pub struct Oracle {
    spec: GroupSpec,
    kind: Arc<Kind>,
    queries: Arc<AtomicU64>,
}

enum Kind {
    Coset { hidden: Subgroup, table: Option<Vec<u64>> },
    /// `F(x_1^i rest) = (i, f(rest))` on the exponent-p group, where `f`
    /// lives on the exponent-p^2 group with the same coordinates.
    Extended { base: Oracle },
}

impl fmt::Debug for Oracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Oracle")
            .field("spec", &self.spec.to_string())
            .field("queries", &self.queries())
            .finish_non_exhaustive()
    }
}

impl Oracle {
    /// `f(g) = coset_label(H, g)`.
    pub fn new(hidden: &Subgroup) -> Result<Self> {
        let spec = hidden.spec().clone();
        let table = match spec.order_u64() {
            Some(n) if n <= LABEL_TABLE_LIMIT => Some(label_table(hidden, n)),
            _ => None,
        };
        Ok(Oracle {
            spec,
            kind: Arc::new(Kind::Coset { hidden: hidden.clone(), table }),
            queries: Arc::new(AtomicU64::new(0)),
        })
    }

    /// The extension of `base` (on `A_p . H_p ...`) to the exponent-p group
    /// of the same order. Shares the query counter with `base`.
    pub(crate) fn extended(base: &Oracle) -> Result<Self> {
        let bs = base.spec();
        if !bs.p().is_odd() || bs.is_exponent_p() {
            return Err(Error::Unsupported("extension needs an odd exponent-p^2 group".into()));
        }
        if bs.order_u64().is_none() {
            return Err(Error::Unsupported("group too large for label encoding".into()));
        }
        Ok(Oracle {
            spec: GroupSpec::heisenberg(bs.p(), bs.k())?,
            kind: Arc::new(Kind::Extended { base: base.clone() }),
            queries: base.queries.clone(),
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    /// Number of oracle calls so far; a superposition query counts once.
    pub fn queries(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    /// One classical evaluation.
    pub fn query(&self, g: &GroupElement) -> u64 {
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.eval(g)
    }

    /// One quantum query: the returned handle evaluates `f` on as many basis
    /// states as the simulator needs, for the price of one call.
    pub fn superposition(&self) -> SuperposedQuery<'_> {
        self.queries.fetch_add(1, Ordering::Relaxed);
        SuperposedQuery { oracle: self }
    }

    fn eval(&self, g: &GroupElement) -> u64 {
        match &*self.kind {
            Kind::Coset { hidden, table } => match table {
                Some(t) => t[self.spec.index_of(g) as usize],
                None => coset_label(hidden, g),
            },
            Kind::Extended { base } => {
                let bs = base.spec();
                let mut rest = g.coords().to_vec();
                let i1 = std::mem::replace(&mut rest[0], 0);
                let rest = GroupElement::from_coords_unchecked(&rest);
                let n = bs.order_u64().expect("checked at construction");
                i1 as u64 * n + base.eval(&rest)
            }
        }
    }
}

/// Uncounted evaluation access granted by one superposition query.
pub struct SuperposedQuery<'a> {
    oracle: &'a Oracle,
}

impl SuperposedQuery<'_> {
    pub fn eval(&self, g: &GroupElement) -> u64 {
        self.oracle.eval(g)
    }

    /// Evaluates at the element with the given index.
    pub fn eval_index(&self, index: u64) -> u64 {
        match &*self.oracle.kind {
            Kind::Coset { table: Some(t), .. } => t[index as usize],
            _ => self.oracle.eval(&self.oracle.spec.element_at(index)),
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        self.oracle.spec()
    }
}

/// Labels every element by the least index in its left coset. Scanning in
/// index order, the first unlabelled element is the least of its coset.
fn label_table(hidden: &Subgroup, n: u64) -> Vec<u64> {
    let spec = hidden.spec();
    let members: Vec<GroupElement> = hidden.elements().collect();
    let mut table = vec![u64::MAX; n as usize];
    for i in 0..n {
        if table[i as usize] != u64::MAX {
            continue;
        }
        let g = spec.element_at(i);
        for h in &members {
            table[spec.index_of(&spec.mul(&g, h)) as usize] = i;
        }
    }
    table
}

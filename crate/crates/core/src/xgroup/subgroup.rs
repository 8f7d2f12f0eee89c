use std::collections::{BTreeMap, HashSet, VecDeque};

use rand::Rng;

use super::element::GroupElement;
use super::spec::GroupSpec;
use crate::error::{Error, Result};

/// Default cap on the number of elements a closure may enumerate.
pub const DEFAULT_CLOSURE_BUDGET: usize = 1_000_000;

/// A subgroup given by generators together with its enumerated elements.
#[derive(Debug, Clone)]
pub struct Subgroup {
    spec: GroupSpec,
    generators: Vec<GroupElement>,
    /// Element indices (see [`GroupSpec::index_of`]), sorted.
    elements: Vec<u64>,
    contains_z: bool,
}

impl Subgroup {
    /// `<gens>` by breadth-first closure under right multiplication.
    pub fn closure(spec: &GroupSpec, gens: &[GroupElement], budget: usize) -> Result<Self> {
        for g in gens {
            spec.element(g.coords())?;
        }
        let gens: Vec<GroupElement> = gens.to_vec();
        let id = spec.identity();
        let mut seen: HashSet<u64> = HashSet::from([spec.index_of(&id)]);
        let mut queue = VecDeque::from([id]);
        while let Some(c) = queue.pop_front() {
            for g in &gens {
                let n = spec.mul(&c, g);
                if seen.insert(spec.index_of(&n)) {
                    if seen.len() > budget {
                        return Err(Error::ClosureTooLarge(budget));
                    }
                    queue.push_back(n);
                }
            }
        }
        let mut elements: Vec<u64> = seen.into_iter().collect();
        elements.sort_unstable();
        let contains_z = elements.binary_search(&spec.index_of(&spec.z())).is_ok();
        Ok(Subgroup { spec: spec.clone(), generators: gens, elements, contains_z })
    }

    pub fn generated(spec: &GroupSpec, gens: &[GroupElement]) -> Result<Self> {
        Self::closure(spec, gens, DEFAULT_CLOSURE_BUDGET)
    }

    pub fn trivial(spec: &GroupSpec) -> Self {
        Self::generated(spec, &[]).expect("trivial subgroup")
    }

    pub fn whole(spec: &GroupSpec) -> Result<Self> {
        Self::generated(spec, &spec.generators())
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains_z(&self) -> bool {
        self.contains_z
    }

    pub fn element_indices(&self) -> &[u64] {
        &self.elements
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        self.elements.iter().map(|&i| self.spec.element_at(i))
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elements.binary_search(&self.spec.index_of(g)).is_ok()
    }

    /// Equality as element sets.
    pub fn same_elements(&self, other: &Subgroup) -> bool {
        self.spec == other.spec && self.elements == other.elements
    }

    /// `H G'`: the subgroup generated by `H` and z.
    pub fn with_center(&self) -> Result<Subgroup> {
        let mut gens = self.generators.clone();
        gens.push(self.spec.z());
        Subgroup::generated(&self.spec, &gens)
    }
}

/// `<g_1, .., g_m>` for `m` uniform in `0..=3` and uniformly random `g_i`.
pub fn random_subgroup<R: Rng + ?Sized>(spec: &GroupSpec, rng: &mut R) -> Result<Subgroup> {
    let n = spec.order_u64().ok_or(Error::ClosureTooLarge(DEFAULT_CLOSURE_BUDGET))?;
    let m = rng.gen_range(0..=3);
    let gens: Vec<GroupElement> = (0..m).map(|_| spec.element_at(rng.gen_range(0..n))).collect();
    Subgroup::generated(spec, &gens)
}

/// Every subgroup of a group of order `p^3`, each once, ordered by size and
/// then by element set. Subgroups of such groups need at most two
/// generators.
pub fn enumerate_subgroups(spec: &GroupSpec) -> Result<Vec<Subgroup>> {
    if spec.k() != 1 || spec.order() > 2197 {
        return Err(Error::Unsupported("subgroup enumeration needs k = 1 and |G| <= 2197".into()));
    }
    let elems: Vec<GroupElement> = spec.elements().collect();
    let mut found: BTreeMap<Vec<u64>, Subgroup> = BTreeMap::new();
    for (i, a) in elems.iter().enumerate() {
        for b in &elems[i..] {
            let gens = if a == b { vec![a.clone()] } else { vec![a.clone(), b.clone()] };
            let h = Subgroup::generated(spec, &gens)?;
            found.entry(h.elements.clone()).or_insert(h);
        }
    }
    let mut out: Vec<Subgroup> = found.into_values().collect();
    out.sort_by(|x, y| x.order().cmp(&y.order()).then_with(|| x.elements.cmp(&y.elements)));
    Ok(out)
}

/// Canonical label of the left coset `gH`: the index of its lexicographically
/// least element.
pub fn coset_label(h: &Subgroup, g: &GroupElement) -> u64 {
    let spec = h.spec();
    h.elements()
        .map(|x| spec.index_of(&spec.mul(g, &x)))
        .min()
        .expect("subgroups are nonempty")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modp::Prime;

    fn h3() -> GroupSpec {
        GroupSpec::heisenberg(Prime::new(3).unwrap(), 1).unwrap()
    }

    #[test]
    fn heisenberg_three_has_nineteen_subgroups() {
        let subs = enumerate_subgroups(&h3()).unwrap();
        let count = |n: usize| subs.iter().filter(|s| s.order() == n).count();
        assert_eq!((count(1), count(3), count(9), count(27)), (1, 13, 4, 1));
    }

    #[test]
    fn closure_examples() {
        let g = h3();
        let center = Subgroup::generated(&g, &[g.z()]).unwrap();
        assert_eq!(center.order(), 3);
        assert!(center.contains_z());
        let xs = Subgroup::generated(&g, &[g.x(0)]).unwrap();
        assert_eq!(xs.elements().collect::<Vec<_>>(), vec![g.identity(), g.x(0), g.power(&g.x(0), 2)]);
        assert!(!xs.contains_z());
        let all = Subgroup::generated(&g, &[g.x(0), g.y(0)]).unwrap();
        assert_eq!(all.order(), 27);
        assert!(all.contains_z());
        assert_eq!(Subgroup::trivial(&g).order(), 1);
    }

    #[test]
    fn closure_budget() {
        let g = h3();
        assert_eq!(
            Subgroup::closure(&g, &[g.x(0), g.y(0)], 10).unwrap_err(),
            Error::ClosureTooLarge(10)
        );
    }

    #[test]
    fn coset_label_examples() {
        let g = h3();
        let trivial = Subgroup::trivial(&g);
        let labels: HashSet<u64> = g.elements().map(|e| coset_label(&trivial, &e)).collect();
        assert_eq!(labels.len(), 27);
        let whole = Subgroup::whole(&g).unwrap();
        let labels: HashSet<u64> = g.elements().map(|e| coset_label(&whole, &e)).collect();
        assert_eq!(labels.len(), 1);
        let xs = Subgroup::generated(&g, &[g.x(0)]).unwrap();
        assert_eq!(coset_label(&xs, &g.y(0)), coset_label(&xs, &g.mul(&g.y(0), &g.x(0))));
    }
}

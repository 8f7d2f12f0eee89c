//! Extraspecial p-groups in normal form.
//!
//! Every group is a central product of k groups of order p^3, each with
//! generators `x_i, y_i` and the shared central element `z = [x_i, y_i]`.

mod element;
mod spec;
mod subgroup;

pub use element::{BarElement, GroupElement};
pub use spec::{FactorType, GroupSpec};
pub use subgroup::{coset_label, enumerate_subgroups, random_subgroup, Subgroup, DEFAULT_CLOSURE_BUDGET};

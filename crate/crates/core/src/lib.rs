//! Hidden subgroup problem in extraspecial p-groups: exact group algebra, a
//! dense state-vector simulator of the quantum subroutines, and an
//! end-to-end solver that recovers planted subgroups.

pub mod error;
pub mod hsp;
pub mod modp;
pub mod simq;
pub mod xgroup;

pub use error::{Error, Result};

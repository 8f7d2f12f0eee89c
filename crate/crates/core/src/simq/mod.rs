//! Dense state-vector simulation over registers indexed by Z_p, group
//! elements, or oracle labels.

mod layout;
mod prep;
mod state;

pub use layout::{Frame, IndexSpace, Register, RegisterLayout, DEFAULT_DIMENSION_BUDGET};
pub use prep::{
    coset_phase_state, coset_state, lemma4_run, oracle_superposition, phase_superposition,
    prepare_coset_state, PrepConfig, PrepMode, PrepOutput, GROUP_REGISTER, ORACLE_REGISTER,
    U_REGISTER,
};
pub use state::{Measurement, MeasurementOutcome, StateVector, AMPLITUDE_TOLERANCE};

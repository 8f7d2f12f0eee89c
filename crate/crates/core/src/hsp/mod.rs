//! Hidden subgroup solver: oracles, witness search, hiding procedures,
//! Fourier sampling and the end-to-end reduction.

pub mod abelian;
pub mod fourier;
pub mod oracle;
pub mod solver;
pub mod triple;
pub mod witness;

pub use abelian::{abelian_hsp, classical_character_distribution, classical_fourier_sample, AbelianHspOutcome, StabilizationPolicy};
pub use fourier::{
    character_distribution, fourier_sample_gbar, zero_phase_state, CharacterSample, HidingFamily, HidingProcedure,
    HidingStats, SamplingBackend, TripleHiding, ZeroPhaseHiding,
};
pub use oracle::{Oracle, SuperposedQuery};
pub use solver::{exponent_p2_reduce, find_hg_prime, solve_hsp, Branch, HidingPath, SolverConfig, SolverReport};
pub use triple::{appropriate_triple, hiding_gram_check, psi_overlap, psi_state, resample_cap, AppropriateTriple, HidingTriple};
pub use witness::{
    find_witness, good_fraction, good_fraction_bound, verify_witness, verify_witness_linear, Fraction,
    LARGE_PRIME_THRESHOLD,
};

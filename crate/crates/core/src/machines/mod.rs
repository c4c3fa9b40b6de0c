//! The optimal discriminator and the measure-first learning machine.

pub mod conditioned;
pub mod optimal;
pub mod povm;
pub mod quadrature;

pub use conditioned::{
    conditioned_pair, error_from_delta, lm_delta_from_povm, lm_delta_with, ConditionedPair,
    LearningContext, DEFAULT_EMBEDDED_CAP,
};
pub use optimal::{
    brute_force_error, brute_force_error_with_cap, helstrom_error, lm_error_projection,
    lm_error_recoupling, memory_bits, optimal_error, outcome_bound, DEFAULT_BRUTE_FORCE_CAP,
};
pub use povm::{
    covariant_povm, seed_state, tetrahedron_povm, CovariantPovm, PovmExport, PovmKind, PovmOutcome,
    SeedState,
};

//! Numerical toolkit for entropic complementarity of quantum measurements.
//!
//! The crate computes relative-entropy coherence, thermal discord, and
//! conditional entropies for finite-dimensional states, evaluates the
//! measurement-overlap bound `b` for a sequence of rank-1 projective
//! measurements, and checks the complementarity relations that tie those
//! quantities together, both memoryless and with quantum memory.
//!
//! All entropies are in bits (base-2 logarithms) unless a caller converts
//! for display. Subsystems are ordered big-endian: index 0 is the leftmost
//! tensor factor.

pub mod bound;
pub mod ensemble;
pub mod error;
mod linalg;
pub mod measurement;
pub mod quantities;
pub mod relations;
pub mod state;

pub use bound::{bound_b_best_order, bound_b_oracle, bound_b_ordered, bound_b_with_policy};
pub use bound::{BoundMethod, BoundPolicy, BoundResult};
pub use ensemble::{
    child_seed, min_discord_sampled, sample_haar_unitary, sample_measurement, sample_mixed_state,
    EnsembleConfig, Sampler,
};
pub use error::{Error, Result};
pub use measurement::{
    dephase, measure_subsystem, mub_family, overlap_matrix, MeasurementOutcome,
    ProjectiveMeasurement,
};
pub use quantities::{
    conditional_entropy, post_measurement_conditional_entropy, rel_entropy_coherence,
    signals_entanglement, thermal_discord, thermal_discord_identity, DiscordBreakdown,
};
pub use relations::{
    check_coherence_relation, check_data_processing_step, check_discord_relation,
    check_memory_uncertainty, check_multipartite_conditional, check_tripartite_pair,
    check_uncertainty, MultipartiteBoundSet, RelationId, RelationOptions, RelationReport,
};
pub use state::{
    partial_trace, purify, tensor_product, von_neumann_entropy, CMatrix, CVector, DensityMatrix,
    PureStateVector, SubsystemLayout, ValidationTolerances,
};

pub use num_complex::Complex64;

use num_complex::Complex64;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while validating inputs or running a
/// computation. Messages name the violated invariant so they can be
/// surfaced verbatim as diagnostics.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |M - M^dagger| entry is {max_deviation:.3e}")]
    NotHermitian { max_deviation: f64 },

    #[error(
        "matrix is not positive semidefinite: most negative eigenvalue is {min_eigenvalue:.3e}"
    )]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace is not 1: got {trace}")]
    TraceNotOne { trace: Complex64 },

    #[error("{what} dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("subsystem index {index} is invalid for a layout with {count} subsystems")]
    BadSubsystemIndex { index: usize, count: usize },

    #[error("subsystem selection must not be empty")]
    EmptySubsystemSelection,

    #[error("eigendecomposition did not converge")]
    EigenDecompositionFailure,

    #[error("matrix is not unitary: max |U U^dagger - I| entry is {max_deviation:.3e}")]
    NotUnitary { max_deviation: f64 },

    #[error(
        "basis vectors are not orthonormal: max |<v_i|v_j> - delta_ij| is {max_deviation:.3e}"
    )]
    NotOrthonormal { max_deviation: f64 },

    #[error("state vector is not normalized: norm is {norm}")]
    NotNormalized { norm: f64 },

    #[error("mutually unbiased basis construction requires a prime dimension, got {dim}")]
    NotPrime { dim: usize },

    #[error("need at least {min} measurements, got {count}")]
    TooFewMeasurements { count: usize, min: usize },

    #[error("ordering search over {count} measurements exceeds the cap of {max}")]
    TooManyMeasurements { count: usize, max: usize },

    #[error("brute-force bound enumeration over {tuples} outcome tuples exceeds the cap of {max}")]
    InstanceTooLarge { tuples: u128, max: u128 },

    #[error("invalid ensemble: {detail}")]
    InvalidEnsemble { detail: String },
}

//! Shared fixtures for the benchmark suite: deterministic random states and
//! measurement families sized for the hot paths.

use qcr_core::{
    child_seed, sample_measurement, sample_mixed_state, DensityMatrix, ProjectiveMeasurement,
    Sampler, SubsystemLayout,
};

/// Full-rank Hilbert-Schmidt state on the given subsystem layout.
pub fn mixed_state(dims: &[usize], seed: u64) -> DensityMatrix {
    let layout = SubsystemLayout::new(dims.to_vec()).expect("static dims are valid");
    sample_mixed_state(&layout, Sampler::HilbertSchmidtMixed, seed)
        .expect("sampler produces a valid state")
}

/// `n` Haar-random rank-1 projective measurements on dimension `d`.
pub fn bases(d: usize, n: usize, seed: u64) -> Vec<ProjectiveMeasurement> {
    (0..n)
        .map(|k| sample_measurement(d, child_seed(seed, k as u64 + 1)))
        .collect()
}

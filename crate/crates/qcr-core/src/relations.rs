//! Verifiers for the entropic complementarity relations.
//!
//! Each `check_*` function evaluates one inequality, returning a
//! [`RelationReport`] with both sides, the signed residual
//! `lhs - rhs`, and a verdict. A relation holds when the residual is no
//! smaller than `-tolerance` and is saturated when |residual| is within
//! tolerance, so saturation implies holding.
//!
//! Wire identifiers (`EQ3`, `EQ5`, ...) are stable strings used by file
//! and CSV output; they name the relations, not any particular writeup.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::bound::{bound_b_with_policy, BoundPolicy, BoundResult};
use crate::error::{Error, Result};
use crate::linalg::kahan_sum;
use crate::measurement::{dephase, ProjectiveMeasurement};
use crate::quantities::{
    conditional_entropy, post_measurement_conditional_entropy, rel_entropy_coherence,
    thermal_discord,
};
use crate::state::{
    check_subset, partial_trace, purify, von_neumann_entropy, DensityMatrix, SubsystemLayout,
};

/// Stable identifiers for the supported relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelationId {
    /// Memoryless sum of post-measurement entropies.
    Uncertainty,
    /// Memoryless sum of relative-entropy coherences.
    Coherence,
    /// Sum of post-measurement conditional entropies with quantum memory.
    MemoryUncertainty,
    /// Sum of thermal discords with quantum memory.
    Discord,
    /// Single data-processing step relating two memories of one measurement.
    DataProcessing,
    /// Conditional-entropy sum with one dedicated memory per measurement.
    Multipartite,
    /// The two-measurement tripartite special case.
    MultipartitePair,
}

impl RelationId {
    pub const ALL: [RelationId; 7] = [
        RelationId::Uncertainty,
        RelationId::Coherence,
        RelationId::MemoryUncertainty,
        RelationId::Discord,
        RelationId::DataProcessing,
        RelationId::Multipartite,
        RelationId::MultipartitePair,
    ];

    /// The wire string used in files, CSV and CLI arguments.
    pub fn as_str(self) -> &'static str {
        match self {
            RelationId::Uncertainty => "EQ3",
            RelationId::Coherence => "EQ5",
            RelationId::MemoryUncertainty => "EQ7",
            RelationId::Discord => "EQ9",
            RelationId::DataProcessing => "EQ10",
            RelationId::Multipartite => "EQ11",
            RelationId::MultipartitePair => "EQ11_PAIR",
        }
    }
}

impl std::fmt::Display for RelationId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for RelationId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        RelationId::ALL
            .iter()
            .copied()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = RelationId::ALL.iter().map(|r| r.as_str()).collect();
                format!(
                    "unknown relation {s:?}, expected one of {}",
                    names.join(", ")
                )
            })
    }
}

impl Serialize for RelationId {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// Which measurements feed the bound in the multipartite relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MultipartiteBoundSet {
    /// Measurements 1..N, matching the derivation that telescopes the
    /// zeroth term away. The default.
    #[default]
    TailMeasurements,
    /// All N+1 measurements. Also valid, sometimes tighter, sometimes not.
    AllMeasurements,
}

/// Knobs shared by every verifier.
#[derive(Debug, Clone, Copy)]
pub struct RelationOptions {
    /// Verdict tolerance in bits.
    pub tolerance: f64,
    /// Ordering policy for the bound.
    pub bound_policy: BoundPolicy,
    /// Bound subset for the multipartite relation; ignored elsewhere.
    pub bound_set: MultipartiteBoundSet,
}

impl Default for RelationOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            bound_policy: BoundPolicy::default(),
            bound_set: MultipartiteBoundSet::default(),
        }
    }
}

/// Outcome of checking one relation on one instance.
#[derive(Debug, Clone, Serialize)]
pub struct RelationReport {
    pub relation_id: RelationId,
    /// Left side of the inequality, in bits.
    pub lhs: f64,
    /// Right side of the inequality, in bits.
    pub rhs: f64,
    /// lhs - rhs; the inequality asserts this is non-negative.
    pub residual: f64,
    /// The measurement bound behind rhs, when the relation has one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<BoundResult>,
    pub tolerance: f64,
    /// residual >= -tolerance.
    pub holds: bool,
    /// |residual| <= tolerance; saturation implies holding.
    pub saturated: bool,
    /// SHA-256 over the canonical bytes of every input, hex encoded.
    pub inputs_digest: String,
}

fn finish(
    relation_id: RelationId,
    lhs: f64,
    rhs: f64,
    bound: Option<BoundResult>,
    tolerance: f64,
    inputs_digest: String,
) -> RelationReport {
    let residual = lhs - rhs;
    RelationReport {
        relation_id,
        lhs,
        rhs,
        residual,
        bound,
        tolerance,
        holds: residual >= -tolerance,
        saturated: residual.abs() <= tolerance,
        inputs_digest,
    }
}

/// Canonical rolling hash of the inputs that determine a report.
struct InputDigest {
    hasher: Sha256,
}

impl InputDigest {
    fn new(relation: RelationId) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(relation.as_str().as_bytes());
        hasher.update([0u8]);
        Self { hasher }
    }

    fn u64(&mut self, v: u64) {
        self.hasher.update(v.to_le_bytes());
    }

    fn f64(&mut self, v: f64) {
        self.hasher.update(v.to_bits().to_le_bytes());
    }

    fn indices(&mut self, tag: u8, idx: &[usize]) {
        self.hasher.update([tag]);
        self.u64(idx.len() as u64);
        for &i in idx {
            self.u64(i as u64);
        }
    }

    fn state(&mut self, rho: &DensityMatrix) {
        self.hasher.update(b"S");
        self.u64(rho.layout().subsystem_count() as u64);
        for &d in rho.layout().dims() {
            self.u64(d as u64);
        }
        let m = rho.matrix();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                self.f64(m[(r, c)].re);
                self.f64(m[(r, c)].im);
            }
        }
    }

    fn measurement(&mut self, m: &ProjectiveMeasurement) {
        self.hasher.update(b"M");
        self.u64(m.dim() as u64);
        for v in m.vectors() {
            for z in v.iter() {
                self.f64(z.re);
                self.f64(z.im);
            }
        }
    }

    fn options(&mut self, opts: &RelationOptions) {
        self.hasher.update(b"O");
        self.f64(opts.tolerance);
        self.hasher.update([match opts.bound_policy {
            BoundPolicy::Auto => 0u8,
            BoundPolicy::GivenOrder => 1,
            BoundPolicy::BestOrder => 2,
        }]);
        self.hasher.update([match opts.bound_set {
            MultipartiteBoundSet::TailMeasurements => 0u8,
            MultipartiteBoundSet::AllMeasurements => 1,
        }]);
    }

    fn hex(self) -> String {
        let digest = self.hasher.finalize();
        let mut out = String::with_capacity(64);
        for byte in digest {
            use std::fmt::Write;
            write!(out, "{byte:02x}").expect("writing to a string cannot fail");
        }
        out
    }
}

fn digest_of(
    relation: RelationId,
    rho: &DensityMatrix,
    ms: &[&ProjectiveMeasurement],
    indices: &[usize],
    opts: &RelationOptions,
) -> String {
    let mut d = InputDigest::new(relation);
    d.state(rho);
    d.u64(ms.len() as u64);
    for m in ms {
        d.measurement(m);
    }
    d.indices(b'I', indices);
    d.options(opts);
    d.hex()
}

fn check_measurements_on(ms: &[ProjectiveMeasurement], dim: usize) -> Result<()> {
    if ms.len() < 2 {
        return Err(Error::TooFewMeasurements {
            count: ms.len(),
            min: 2,
        });
    }
    for m in ms {
        if m.dim() != dim {
            return Err(Error::DimensionMismatch {
                what: "measurement",
                expected: dim,
                actual: m.dim(),
            });
        }
    }
    Ok(())
}

/// Memoryless uncertainty relation: for measurements M^1..M^N on the whole
/// state, sum_k S(rho_dephased^k) >= -log2 b + (N-1) S(rho).
pub fn check_uncertainty(
    rho: &DensityMatrix,
    ms: &[ProjectiveMeasurement],
    opts: &RelationOptions,
) -> Result<RelationReport> {
    check_measurements_on(ms, rho.dim())?;
    let bound = bound_b_with_policy(ms, opts.bound_policy)?;
    let lhs = kahan_sum(
        ms.iter()
            .map(|m| von_neumann_entropy(&dephase(rho, m)?))
            .collect::<Result<Vec<f64>>>()?,
    );
    let n = ms.len() as f64;
    let rhs = bound.neg_log2_b + (n - 1.0) * von_neumann_entropy(rho)?;
    let refs: Vec<&ProjectiveMeasurement> = ms.iter().collect();
    let digest = digest_of(RelationId::Uncertainty, rho, &refs, &[], opts);
    Ok(finish(
        RelationId::Uncertainty,
        lhs,
        rhs,
        Some(bound),
        opts.tolerance,
        digest,
    ))
}

/// Coherence form of the memoryless relation:
/// sum_k C(rho, M^k) >= -log2 b - S(rho). Same content as
/// [`check_uncertainty`] with S(rho) moved across, so the residuals agree.
pub fn check_coherence_relation(
    rho: &DensityMatrix,
    ms: &[ProjectiveMeasurement],
    opts: &RelationOptions,
) -> Result<RelationReport> {
    check_measurements_on(ms, rho.dim())?;
    let bound = bound_b_with_policy(ms, opts.bound_policy)?;
    let lhs = kahan_sum(
        ms.iter()
            .map(|m| rel_entropy_coherence(rho, m))
            .collect::<Result<Vec<f64>>>()?,
    );
    let rhs = bound.neg_log2_b - von_neumann_entropy(rho)?;
    let refs: Vec<&ProjectiveMeasurement> = ms.iter().collect();
    let digest = digest_of(RelationId::Coherence, rho, &refs, &[], opts);
    Ok(finish(
        RelationId::Coherence,
        lhs,
        rhs,
        Some(bound),
        opts.tolerance,
        digest,
    ))
}

/// Reduces a joint state to the measured subsystem plus its memory and
/// reindexes both against the reduced layout.
fn reduce_to_pair(
    rho: &DensityMatrix,
    measured: usize,
    memory: &[usize],
) -> Result<(DensityMatrix, usize, Vec<usize>)> {
    let n = rho.layout().subsystem_count();
    let mem = check_subset(memory, n)?;
    if mem.contains(&measured) || measured >= n {
        return Err(Error::BadSubsystemIndex {
            index: measured,
            count: n,
        });
    }
    let mut keep = mem.clone();
    keep.push(measured);
    keep.sort_unstable();
    let reduced = partial_trace(rho, &keep)?;
    let measured_r = keep.iter().position(|&i| i == measured).expect("kept");
    let memory_r: Vec<usize> = (0..keep.len()).filter(|&i| i != measured_r).collect();
    Ok((reduced, measured_r, memory_r))
}

/// Uncertainty relation with quantum memory: spectator subsystems are
/// traced out, then sum_k S(M^k_A|B) >= -log2 b + (N-1) S(A|B).
pub fn check_memory_uncertainty(
    rho: &DensityMatrix,
    ms: &[ProjectiveMeasurement],
    measured: usize,
    memory: &[usize],
    opts: &RelationOptions,
) -> Result<RelationReport> {
    let (reduced, measured_r, memory_r) = reduce_to_pair(rho, measured, memory)?;
    check_measurements_on(ms, reduced.layout().dims()[measured_r])?;
    let bound = bound_b_with_policy(ms, opts.bound_policy)?;
    let lhs = kahan_sum(
        ms.iter()
            .map(|m| post_measurement_conditional_entropy(&reduced, m, measured_r, &memory_r))
            .collect::<Result<Vec<f64>>>()?,
    );
    let n = ms.len() as f64;
    let s_cond = conditional_entropy(&reduced, &memory_r)?;
    let rhs = bound.neg_log2_b + (n - 1.0) * s_cond;
    let refs: Vec<&ProjectiveMeasurement> = ms.iter().collect();
    let mut indices = vec![measured];
    indices.extend_from_slice(memory);
    let digest = digest_of(RelationId::MemoryUncertainty, rho, &refs, &indices, opts);
    Ok(finish(
        RelationId::MemoryUncertainty,
        lhs,
        rhs,
        Some(bound),
        opts.tolerance,
        digest,
    ))
}

/// Discord form of the memory relation:
/// sum_k D(rho, M^k) >= -log2 b - S(A|B).
pub fn check_discord_relation(
    rho: &DensityMatrix,
    ms: &[ProjectiveMeasurement],
    measured: usize,
    memory: &[usize],
    opts: &RelationOptions,
) -> Result<RelationReport> {
    let (reduced, measured_r, memory_r) = reduce_to_pair(rho, measured, memory)?;
    check_measurements_on(ms, reduced.layout().dims()[measured_r])?;
    let bound = bound_b_with_policy(ms, opts.bound_policy)?;
    let lhs = kahan_sum(
        ms.iter()
            .map(|m| thermal_discord(&reduced, m, measured_r).map(|d| d.discord))
            .collect::<Result<Vec<f64>>>()?,
    );
    let s_cond = conditional_entropy(&reduced, &memory_r)?;
    let rhs = bound.neg_log2_b - s_cond;
    let refs: Vec<&ProjectiveMeasurement> = ms.iter().collect();
    let mut indices = vec![measured];
    indices.extend_from_slice(memory);
    let digest = digest_of(RelationId::Discord, rho, &refs, &indices, opts);
    Ok(finish(
        RelationId::Discord,
        lhs,
        rhs,
        Some(bound),
        opts.tolerance,
        digest,
    ))
}

/// One data-processing step on a three-party state (A, B1, B2), measuring
/// A. For the chosen memory k in {1, 2} and the other memory j:
/// S(M_A|B_k) >= S(M_A|B_j) - S(A|B_j).
///
/// Discarding B_k from a purification of the whole state turns the memory
/// B_j side into the purifying system, which is where the inequality comes
/// from; the check also walks that purification to confirm its marginals
/// agree before comparing the two sides. No measurement bound appears.
pub fn check_data_processing_step(
    rho: &DensityMatrix,
    m: &ProjectiveMeasurement,
    k_memory: usize,
    opts: &RelationOptions,
) -> Result<RelationReport> {
    let n = rho.layout().subsystem_count();
    if n != 3 {
        return Err(Error::DimensionMismatch {
            what: "subsystem count",
            expected: 3,
            actual: n,
        });
    }
    if k_memory != 1 && k_memory != 2 {
        return Err(Error::BadSubsystemIndex {
            index: k_memory,
            count: 3,
        });
    }
    let other = 3 - k_memory;

    let lhs = post_measurement_conditional_entropy(rho, m, 0, &[k_memory])?;

    let pair = partial_trace(rho, &[0, other])?;
    let psi = purify(&pair)?;
    let purified = psi.density(SubsystemLayout::new(vec![pair.dim(), pair.dim()])?)?;
    debug_assert!(
        (purified.purity() - 1.0).abs() < 1e-9,
        "purification must be pure"
    );
    let back = partial_trace(&purified, &[0])?;
    debug_assert!(
        crate::linalg::max_abs_diff(back.matrix(), pair.matrix()) < 1e-8,
        "purification must recover the state"
    );
    debug_assert!(
        (von_neumann_entropy(&partial_trace(&purified, &[1])?)? - von_neumann_entropy(&pair)?)
            .abs()
            < 1e-8,
        "purifying marginal must mirror the state entropy"
    );

    let rhs = post_measurement_conditional_entropy(&pair, m, 0, &[1])?
        - conditional_entropy(&pair, &[1])?;

    let digest = digest_of(RelationId::DataProcessing, rho, &[m], &[0, k_memory], opts);
    Ok(finish(
        RelationId::DataProcessing,
        lhs,
        rhs,
        None,
        opts.tolerance,
        digest,
    ))
}

/// Multipartite conditional-entropy relation on (A, B_0, ..., B_N):
/// measurement M^k on A is scored against its own memory B_k, and
/// sum_{k=0}^{N} S(M^k_A|B_k) >= -log2 b.
///
/// By default b is computed from measurements 1..N (the tail), which is
/// what the telescoping derivation produces; `AllMeasurements` uses the
/// whole family instead. The reported bound ordering always indexes the
/// caller's full list.
pub fn check_multipartite_conditional(
    rho: &DensityMatrix,
    ms: &[ProjectiveMeasurement],
    opts: &RelationOptions,
) -> Result<RelationReport> {
    let n_sub = rho.layout().subsystem_count();
    if n_sub < 3 {
        return Err(Error::DimensionMismatch {
            what: "subsystem count",
            expected: 3,
            actual: n_sub,
        });
    }
    if ms.len() != n_sub - 1 {
        return Err(Error::DimensionMismatch {
            what: "measurement count",
            expected: n_sub - 1,
            actual: ms.len(),
        });
    }
    check_measurements_on(ms, rho.layout().dims()[0])?;

    let lhs = kahan_sum(
        ms.iter()
            .enumerate()
            .map(|(k, m)| post_measurement_conditional_entropy(rho, m, 0, &[k + 1]))
            .collect::<Result<Vec<f64>>>()?,
    );

    let (subset, offset): (&[ProjectiveMeasurement], usize) = match opts.bound_set {
        MultipartiteBoundSet::TailMeasurements => (&ms[1..], 1),
        MultipartiteBoundSet::AllMeasurements => (ms, 0),
    };
    let mut bound = bound_b_with_policy(subset, opts.bound_policy)?;
    for idx in &mut bound.ordering {
        *idx += offset;
    }
    let rhs = bound.neg_log2_b;

    let refs: Vec<&ProjectiveMeasurement> = ms.iter().collect();
    let digest = digest_of(RelationId::Multipartite, rho, &refs, &[], opts);
    Ok(finish(
        RelationId::Multipartite,
        lhs,
        rhs,
        Some(bound),
        opts.tolerance,
        digest,
    ))
}

/// Two-measurement tripartite case on (A, B_1, B_2):
/// S(M^1_A|B_1) + S(M^2_A|B_2) >= -log2 b with b over the pair.
pub fn check_tripartite_pair(
    rho: &DensityMatrix,
    m1: &ProjectiveMeasurement,
    m2: &ProjectiveMeasurement,
    opts: &RelationOptions,
) -> Result<RelationReport> {
    let n_sub = rho.layout().subsystem_count();
    if n_sub != 3 {
        return Err(Error::DimensionMismatch {
            what: "subsystem count",
            expected: 3,
            actual: n_sub,
        });
    }
    let pair = [m1.clone(), m2.clone()];
    check_measurements_on(&pair, rho.layout().dims()[0])?;

    let lhs = post_measurement_conditional_entropy(rho, m1, 0, &[1])?
        + post_measurement_conditional_entropy(rho, m2, 0, &[2])?;
    let bound = bound_b_with_policy(&pair, opts.bound_policy)?;
    let rhs = bound.neg_log2_b;

    let digest = digest_of(RelationId::MultipartitePair, rho, &[m1, m2], &[], opts);
    Ok(finish(
        RelationId::MultipartitePair,
        lhs,
        rhs,
        Some(bound),
        opts.tolerance,
        digest,
    ))
}

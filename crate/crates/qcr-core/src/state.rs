//! Density matrices over a tensor product of finite-dimensional subsystems.
//!
//! A [`DensityMatrix`] is validated on construction (Hermitian, positive
//! semidefinite, unit trace) and every operation in this crate preserves
//! those invariants, so downstream code never re-checks. Subsystems are
//! big-endian: subsystem 0 is the leftmost Kronecker factor, and the joint
//! index of basis state |i_0 i_1 ... i_{n-1}> is
//! sum_k i_k * prod_{j>k} d_j.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{entropy_of_spectrum, hermitian_eigen, max_abs, EIGEN_CLIP};

/// Dense complex matrix used throughout the crate.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVector = DVector<Complex64>;

/// Dimensions of the tensor factors, left to right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemLayout {
    dims: Vec<usize>,
}

impl SubsystemLayout {
    /// Layout from per-subsystem dimensions. Every dimension must be >= 1
    /// and the list must be non-empty.
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::DimensionMismatch {
                what: "subsystem count",
                expected: 1,
                actual: 0,
            });
        }
        if let Some(&bad) = dims.iter().find(|&&d| d == 0) {
            return Err(Error::DimensionMismatch {
                what: "subsystem",
                expected: 1,
                actual: bad,
            });
        }
        Ok(Self { dims })
    }

    /// Single subsystem of dimension `d`.
    pub fn single(d: usize) -> Self {
        Self::new(vec![d]).expect("dimension must be positive")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of subsystems.
    pub fn subsystem_count(&self) -> usize {
        self.dims.len()
    }

    /// Total Hilbert-space dimension, the product of all factors.
    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn dim_of(&self, index: usize) -> Result<usize> {
        self.dims
            .get(index)
            .copied()
            .ok_or(Error::BadSubsystemIndex {
                index,
                count: self.dims.len(),
            })
    }

    /// Row-major strides: `strides()[k]` is the joint-index step when
    /// subsystem k advances by one basis state.
    pub(crate) fn strides(&self) -> Vec<usize> {
        let n = self.dims.len();
        let mut s = vec![1usize; n];
        for k in (0..n.saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.dims[k + 1];
        }
        s
    }

    /// Layout of `self` followed by `other`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { dims }
    }

    /// Layout with one extra subsystem of dimension `d` appended.
    pub fn append(&self, d: usize) -> Self {
        self.concat(&Self::single(d))
    }

    /// Sub-layout formed from the given subsystem indices (ascending,
    /// duplicate-free, all in range).
    pub fn keep(&self, indices: &[usize]) -> Result<Self> {
        let checked = check_subset(indices, self.dims.len())?;
        Self::new(checked.iter().map(|&i| self.dims[i]).collect())
    }
}

/// Validates that `indices` is a non-empty, duplicate-free subset of
/// `0..count` and returns it sorted ascending.
pub(crate) fn check_subset(indices: &[usize], count: usize) -> Result<Vec<usize>> {
    if indices.is_empty() {
        return Err(Error::EmptySubsystemSelection);
    }
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::BadSubsystemIndex { index: w[0], count });
        }
    }
    if let Some(&bad) = sorted.iter().find(|&&i| i >= count) {
        return Err(Error::BadSubsystemIndex { index: bad, count });
    }
    Ok(sorted)
}

/// Tolerances applied when a candidate matrix is promoted to a
/// [`DensityMatrix`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationTolerances {
    /// Max allowed |M - M^dagger| entry.
    pub hermiticity: f64,
    /// Most negative eigenvalue allowed.
    pub psd: f64,
    /// Max allowed |tr M - 1|.
    pub trace: f64,
}

impl Default for ValidationTolerances {
    fn default() -> Self {
        Self {
            hermiticity: 1e-9,
            psd: 1e-9,
            trace: 1e-9,
        }
    }
}

/// A validated quantum state on a [`SubsystemLayout`].
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: CMatrix,
    layout: SubsystemLayout,
    tolerances: ValidationTolerances,
}

impl DensityMatrix {
    /// Validates `matrix` against the default tolerances and wraps it.
    pub fn new(matrix: CMatrix, layout: SubsystemLayout) -> Result<Self> {
        Self::with_tolerances(matrix, layout, ValidationTolerances::default())
    }

    /// Validates `matrix` (square of the layout's total dimension, Hermitian,
    /// positive semidefinite, unit trace) against explicit tolerances.
    ///
    /// The checks are NaN-proof: any NaN entry fails hermiticity.
    pub fn with_tolerances(
        matrix: CMatrix,
        layout: SubsystemLayout,
        tolerances: ValidationTolerances,
    ) -> Result<Self> {
        let d = layout.total();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                what: "matrix",
                expected: d,
                actual: matrix.nrows().max(matrix.ncols()),
            });
        }

        let herm_dev = max_abs(&(&matrix - matrix.adjoint()));
        if !(herm_dev <= tolerances.hermiticity) {
            return Err(Error::NotHermitian {
                max_deviation: herm_dev,
            });
        }

        let trace = matrix.trace();
        let trace_dev = (trace - Complex64::new(1.0, 0.0)).norm();
        if !(trace_dev <= tolerances.trace) {
            return Err(Error::TraceNotOne { trace });
        }

        let eig = hermitian_eigen(&matrix)?;
        let min_eig = eig.values.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min_eig >= -tolerances.psd) {
            return Err(Error::NotPositive {
                min_eigenvalue: min_eig,
            });
        }

        Ok(Self {
            matrix,
            layout,
            tolerances,
        })
    }

    /// Wraps a matrix that is valid by construction (output of a
    /// trace-preserving positive map applied to a validated state).
    pub(crate) fn from_parts_unchecked(
        matrix: CMatrix,
        layout: SubsystemLayout,
        tolerances: ValidationTolerances,
    ) -> Self {
        debug_assert_eq!(matrix.nrows(), layout.total());
        debug_assert!((matrix.trace().re - 1.0).abs() < 1e-6);
        Self {
            matrix,
            layout,
            tolerances,
        }
    }

    /// State |psi><psi| of a pure vector on the given layout.
    pub fn from_pure(psi: &PureStateVector, layout: SubsystemLayout) -> Result<Self> {
        if psi.dim() != layout.total() {
            return Err(Error::DimensionMismatch {
                what: "matrix",
                expected: layout.total(),
                actual: psi.dim(),
            });
        }
        Ok(Self::from_parts_unchecked(
            psi.projector(),
            layout,
            ValidationTolerances::default(),
        ))
    }

    /// The maximally mixed state I/d on the given layout.
    pub fn maximally_mixed(layout: SubsystemLayout) -> Self {
        let d = layout.total();
        let m = CMatrix::identity(d, d).scale(1.0 / d as f64);
        Self::from_parts_unchecked(m, layout, ValidationTolerances::default())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn tolerances(&self) -> ValidationTolerances {
        self.tolerances
    }

    /// Total Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.layout.total()
    }

    /// tr(rho^2), 1 for pure states.
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }
}

/// A normalized pure-state amplitude vector.
#[derive(Debug, Clone)]
pub struct PureStateVector {
    amplitudes: CVector,
}

impl PureStateVector {
    /// Wraps an amplitude vector whose norm is within 1e-10 of 1.
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !((norm - 1.0).abs() <= 1e-10) {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes and wraps; the input must have nonzero norm.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(norm),
        })
    }

    /// Computational basis state |index> in dimension `dim`.
    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::BadSubsystemIndex { index, count: dim });
        }
        let mut amplitudes = CVector::zeros(dim);
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// Rank-1 projector |psi><psi|.
    pub fn projector(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    /// Density matrix |psi><psi| on the given layout.
    pub fn density(&self, layout: SubsystemLayout) -> Result<DensityMatrix> {
        DensityMatrix::from_pure(self, layout)
    }
}

/// Von Neumann entropy S(rho) in bits. Eigenvalues at or below 1e-12 are
/// clipped out; pure states give exactly 0.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let eig = hermitian_eigen(rho.matrix())?;
    Ok(entropy_of_spectrum(&eig.values))
}

/// Kronecker product of two states; the layouts concatenate.
pub fn tensor_product(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    let matrix = a.matrix().kronecker(b.matrix());
    DensityMatrix::from_parts_unchecked(matrix, a.layout().concat(b.layout()), a.tolerances())
}

/// Traces out every subsystem not listed in `keep`. `keep` must be a
/// non-empty duplicate-free set of in-range indices (any order); the result
/// preserves the relative order of the kept subsystems.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let layout = rho.layout();
    let n = layout.subsystem_count();
    let kept = check_subset(keep, n)?;
    let traced: Vec<usize> = (0..n).filter(|i| !kept.contains(i)).collect();

    let strides = layout.strides();
    let kept_offsets = index_offsets(&kept, layout.dims(), &strides);
    let traced_offsets = index_offsets(&traced, layout.dims(), &strides);

    let out_dim: usize = kept.iter().map(|&i| layout.dims()[i]).product();
    let mut out = CMatrix::zeros(out_dim, out_dim);
    let m = rho.matrix();
    for (r, &ro) in kept_offsets.iter().enumerate() {
        for (c, &co) in kept_offsets.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &to in &traced_offsets {
                acc += m[(ro + to, co + to)];
            }
            out[(r, c)] = acc;
        }
    }

    Ok(DensityMatrix::from_parts_unchecked(
        out,
        layout.keep(&kept)?,
        rho.tolerances(),
    ))
}

/// Joint-index offsets of every multi-index over the chosen subsystems,
/// enumerated with the last chosen subsystem varying fastest. An empty
/// choice yields the single offset 0.
fn index_offsets(chosen: &[usize], dims: &[usize], strides: &[usize]) -> Vec<usize> {
    let total: usize = chosen.iter().map(|&i| dims[i]).product();
    let mut offsets = Vec::with_capacity(total);
    let mut digits = vec![0usize; chosen.len()];
    for _ in 0..total {
        let off = digits
            .iter()
            .zip(chosen)
            .map(|(&v, &sub)| v * strides[sub])
            .sum();
        offsets.push(off);
        for pos in (0..chosen.len()).rev() {
            digits[pos] += 1;
            if digits[pos] < dims[chosen[pos]] {
                break;
            }
            digits[pos] = 0;
        }
    }
    offsets
}

/// Purification of `rho`: a pure state on system x ancilla (ancilla second,
/// same dimension d) whose partial trace over the ancilla recovers `rho`.
///
/// Built as sum_i sqrt(lambda_i) |v_i>|i>, with the spectrum sorted
/// descending and eigenvector phases anchored, so the output is
/// deterministic. A pure input returns (up to phase) |psi>|0>.
pub fn purify(rho: &DensityMatrix) -> Result<PureStateVector> {
    let d = rho.dim();
    let eig = hermitian_eigen(rho.matrix())?;
    let mut amplitudes = CVector::zeros(d * d);
    for (i, &value) in eig.values.iter().enumerate() {
        // Eigenvalues inside the clip window would inject sqrt-sized noise
        // into the amplitudes, so they are dropped before the square root.
        let lambda = value.max(0.0);
        if lambda <= EIGEN_CLIP {
            continue;
        }
        let root = lambda.sqrt();
        for r in 0..d {
            // |v_i> on the system slot, |i> on the ancilla slot.
            amplitudes[r * d + i] = eig.vectors[(r, i)].scale(root);
        }
    }
    PureStateVector::normalized(amplitudes)
}

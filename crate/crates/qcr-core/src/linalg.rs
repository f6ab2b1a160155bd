//! Internal dense linear-algebra helpers shared across the crate.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) type CMatrix = DMatrix<Complex64>;

/// Entries smaller than this are treated as numerically zero when clipping
/// eigenvalues and probabilities.
pub(crate) const EIGEN_CLIP: f64 = 1e-12;

/// Phases are anchored on the first amplitude whose modulus exceeds this.
const PHASE_ANCHOR: f64 = 1e-12;

/// Eigendecomposition of a Hermitian matrix with a deterministic layout:
/// eigenvalues sorted descending, each eigenvector rephased so its first
/// non-negligible component is real and non-negative.
pub(crate) struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

pub(crate) fn hermitian_eigen(m: &CMatrix) -> Result<HermitianEigen> {
    // Symmetrize first so validated-but-inexact inputs stay on the Hermitian
    // manifold the solver assumes.
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym
        .try_symmetric_eigen(f64::EPSILON, 0)
        .ok_or(Error::EigenDecompositionFailure)?;

    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("Hermitian eigenvalue is NaN")
    });

    let mut values = Vec::with_capacity(n);
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        values.push(eig.eigenvalues[src]);
        let col = eig.eigenvectors.column(src);
        let phase = col
            .iter()
            .find(|z| z.norm() > PHASE_ANCHOR)
            .map(|z| z / z.norm())
            .unwrap_or(Complex64::new(1.0, 0.0));
        let fix = phase.conj();
        for r in 0..n {
            vectors[(r, dst)] = col[r] * fix;
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Largest entry modulus. Hand-rolled for complex matrices
/// (`DMatrix::amax` needs a real scalar) and NaN-propagating, unlike
/// `f64::max`, so corrupted inputs fail validation instead of passing it.
pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for z in m.iter() {
        let v = z.norm();
        if v.is_nan() {
            return f64::NAN;
        }
        if v > worst {
            worst = v;
        }
    }
    worst
}

pub(crate) fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&(a - b))
}

/// Shannon entropy in bits of a clipped spectrum. Values at or below the
/// clip threshold contribute nothing; a tiny negative total rounds to zero.
pub(crate) fn entropy_of_spectrum(values: &[f64]) -> f64 {
    let mut s = 0.0;
    for &v in values {
        if v > EIGEN_CLIP {
            s -= v * v.log2();
        }
    }
    if s > -1e-9 && s < 0.0 {
        0.0
    } else {
        s
    }
}

/// Compensated (Kahan) summation, used where many small terms accumulate.
pub(crate) fn kahan_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

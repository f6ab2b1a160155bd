//! Rank-1 projective measurements and the channels they induce.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::max_abs;
use crate::state::{partial_trace, CMatrix, CVector, DensityMatrix, SubsystemLayout};

/// Probabilities below this floor are treated as zero; the matching
/// conditional state is undefined and reported as `None`.
pub const PROB_FLOOR: f64 = 1e-12;

const ORTHONORMALITY_TOL: f64 = 1e-10;
const UNITARITY_TOL: f64 = 1e-9;

/// A complete rank-1 projective measurement: an orthonormal basis
/// {|v_i>} of a d-dimensional space, one projector per outcome.
#[derive(Debug, Clone)]
pub struct ProjectiveMeasurement {
    dim: usize,
    vectors: Vec<CVector>,
    label: String,
}

impl ProjectiveMeasurement {
    /// Builds a measurement from `dim` basis vectors, checking pairwise
    /// orthonormality within 1e-10 (completeness follows for a full set).
    pub fn new(dim: usize, vectors: Vec<CVector>, label: impl Into<String>) -> Result<Self> {
        if vectors.len() != dim {
            return Err(Error::DimensionMismatch {
                what: "basis vector count",
                expected: dim,
                actual: vectors.len(),
            });
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                what: "basis vector",
                expected: dim,
                actual: v.len(),
            });
        }
        let mut worst = 0.0f64;
        for (i, vi) in vectors.iter().enumerate() {
            for (j, vj) in vectors.iter().enumerate() {
                let inner = vi.dotc(vj);
                let target = if i == j { 1.0 } else { 0.0 };
                let dev = (inner - Complex64::new(target, 0.0)).norm();
                worst = worst.max(dev);
            }
        }
        if !(worst <= ORTHONORMALITY_TOL) {
            return Err(Error::NotOrthonormal {
                max_deviation: worst,
            });
        }
        Ok(Self {
            dim,
            vectors,
            label: label.into(),
        })
    }

    /// The computational (standard) basis in dimension `d`.
    pub fn standard(d: usize) -> Self {
        let vectors = (0..d)
            .map(|i| {
                let mut v = CVector::zeros(d);
                v[i] = Complex64::new(1.0, 0.0);
                v
            })
            .collect();
        Self {
            dim: d,
            vectors,
            label: "standard".to_string(),
        }
    }

    /// Measurement whose basis vectors are the columns of `u`. Fails with
    /// `NotUnitary` when |U U^dagger - I| exceeds 1e-9 anywhere.
    pub fn from_unitary(u: &CMatrix, label: impl Into<String>) -> Result<Self> {
        let d = u.nrows();
        if u.ncols() != d {
            return Err(Error::DimensionMismatch {
                what: "matrix",
                expected: d,
                actual: u.ncols(),
            });
        }
        let dev = max_abs(&(u * u.adjoint() - CMatrix::identity(d, d)));
        if !(dev <= UNITARITY_TOL) {
            return Err(Error::NotUnitary { max_deviation: dev });
        }
        let vectors = (0..d).map(|i| u.column(i).into_owned()).collect();
        Self::new(d, vectors, label)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn vector(&self, outcome: usize) -> &CVector {
        &self.vectors[outcome]
    }

    /// Projector |v_i><v_i| for one outcome.
    pub fn projector(&self, outcome: usize) -> CMatrix {
        let v = &self.vectors[outcome];
        v * v.adjoint()
    }
}

/// A full family of d+1 mutually unbiased bases in prime dimension d.
///
/// For d = 2 these are the Z, X, Y eigenbases. For odd prime d the family
/// is the standard basis plus d phase bases with components
/// omega^(k j^2 + i j) / sqrt(d), omega = exp(2 pi i / d); every pair of
/// distinct bases has all cross overlaps equal to 1/d.
pub fn mub_family(d: usize) -> Result<Vec<ProjectiveMeasurement>> {
    if !is_prime(d) {
        return Err(Error::NotPrime { dim: d });
    }
    if d == 2 {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut z = ProjectiveMeasurement::standard(2);
        z.label = "Z".to_string();
        let x = ProjectiveMeasurement::new(
            2,
            vec![
                CVector::from_vec(vec![Complex64::new(h, 0.0), Complex64::new(h, 0.0)]),
                CVector::from_vec(vec![Complex64::new(h, 0.0), Complex64::new(-h, 0.0)]),
            ],
            "X",
        )?;
        let y = ProjectiveMeasurement::new(
            2,
            vec![
                CVector::from_vec(vec![Complex64::new(h, 0.0), Complex64::new(0.0, h)]),
                CVector::from_vec(vec![Complex64::new(h, 0.0), Complex64::new(0.0, -h)]),
            ],
            "Y",
        )?;
        return Ok(vec![z, x, y]);
    }

    let mut family = Vec::with_capacity(d + 1);
    family.push(ProjectiveMeasurement::standard(d));
    let root = 1.0 / (d as f64).sqrt();
    for k in 0..d {
        let mut vectors = Vec::with_capacity(d);
        for i in 0..d {
            let mut v = CVector::zeros(d);
            for j in 0..d {
                // Exponent reduced mod d before the trig call keeps phases exact.
                let e = (k * j * j + i * j) % d;
                let angle = 2.0 * std::f64::consts::PI * e as f64 / d as f64;
                v[j] = Complex64::from_polar(root, angle);
            }
            vectors.push(v);
        }
        family.push(ProjectiveMeasurement::new(d, vectors, format!("f{k}"))?);
    }
    Ok(family)
}

fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// The dephasing (complete-measurement) channel: kills every off-diagonal
/// element of `rho` in the measurement basis,
/// rho_tilde = sum_i <v_i|rho|v_i> |v_i><v_i|.
pub fn dephase(rho: &DensityMatrix, m: &ProjectiveMeasurement) -> Result<DensityMatrix> {
    if m.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            what: "measurement",
            expected: rho.dim(),
            actual: m.dim(),
        });
    }
    let d = rho.dim();
    let mut out = CMatrix::zeros(d, d);
    for v in m.vectors() {
        let weight = v.dotc(&(rho.matrix() * v)).re;
        out += (v * v.adjoint()).scale(weight);
    }
    Ok(DensityMatrix::from_parts_unchecked(
        out,
        rho.layout().clone(),
        rho.tolerances(),
    ))
}

/// Result of measuring one subsystem of a joint state.
#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    /// Outcome probabilities, ordered like the basis vectors. They sum to 1
    /// up to floating-point error; tiny negatives are clamped to 0.
    pub probabilities: Vec<f64>,
    /// Normalized state of the unmeasured subsystems for each outcome.
    /// `None` when the probability is at or below [`PROB_FLOOR`]. When every
    /// subsystem was measured this is the trivial 1-dimensional state.
    pub conditional_states: Vec<Option<DensityMatrix>>,
    /// Unnormalized-sum channel output sum_i (Pi_i rho Pi_i) on the full
    /// layout: the joint state after the measurement with the outcome
    /// forgotten.
    pub post_joint: DensityMatrix,
}

/// Projectively measures subsystem `target` of `rho`, keeping the joint
/// layout. The measurement dimension must match the target subsystem.
pub fn measure_subsystem(
    rho: &DensityMatrix,
    m: &ProjectiveMeasurement,
    target: usize,
) -> Result<MeasurementOutcome> {
    let layout = rho.layout();
    let n = layout.subsystem_count();
    if target >= n {
        return Err(Error::BadSubsystemIndex {
            index: target,
            count: n,
        });
    }
    if m.dim() != layout.dims()[target] {
        return Err(Error::DimensionMismatch {
            what: "measurement",
            expected: layout.dims()[target],
            actual: m.dim(),
        });
    }

    let before: usize = layout.dims()[..target].iter().product();
    let after: usize = layout.dims()[target + 1..].iter().product();
    let eye_before = CMatrix::identity(before, before);
    let eye_after = CMatrix::identity(after, after);
    let total = rho.dim();
    let rest: Vec<usize> = (0..n).filter(|&i| i != target).collect();

    let mut probabilities = Vec::with_capacity(m.dim());
    let mut conditional_states = Vec::with_capacity(m.dim());
    let mut post = CMatrix::zeros(total, total);
    for outcome in 0..m.dim() {
        let proj = eye_before
            .kronecker(&m.projector(outcome))
            .kronecker(&eye_after);
        let picked = &proj * rho.matrix() * &proj;
        let p = picked.trace().re.max(0.0);
        post += &picked;
        if p > PROB_FLOOR {
            let normalized = DensityMatrix::from_parts_unchecked(
                picked.unscale(p),
                layout.clone(),
                rho.tolerances(),
            );
            let conditional = if rest.is_empty() {
                trivial_state(rho.tolerances())
            } else {
                partial_trace(&normalized, &rest)?
            };
            conditional_states.push(Some(conditional));
        } else {
            conditional_states.push(None);
        }
        probabilities.push(p);
    }

    Ok(MeasurementOutcome {
        probabilities,
        conditional_states,
        post_joint: DensityMatrix::from_parts_unchecked(post, layout.clone(), rho.tolerances()),
    })
}

fn trivial_state(tol: crate::state::ValidationTolerances) -> DensityMatrix {
    DensityMatrix::from_parts_unchecked(CMatrix::identity(1, 1), SubsystemLayout::single(1), tol)
}

/// Overlap matrix c[i][j] = |<v_i|w_j>|^2 between two bases of the same
/// dimension. Both rows and columns sum to 1 (doubly stochastic).
pub fn overlap_matrix(
    a: &ProjectiveMeasurement,
    b: &ProjectiveMeasurement,
) -> Result<DMatrix<f64>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            what: "measurement",
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    let d = a.dim();
    let mut c = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            c[(i, j)] = a.vector(i).dotc(b.vector(j)).norm_sqr();
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{tensor_product, von_neumann_entropy, PureStateVector};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell() -> DensityMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let amp = CVector::from_vec(vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]);
        PureStateVector::new(amp)
            .unwrap()
            .density(SubsystemLayout::new(vec![2, 2]).unwrap())
            .unwrap()
    }

    fn x_basis() -> ProjectiveMeasurement {
        mub_family(2).unwrap().remove(1)
    }

    #[test]
    fn rejects_non_orthonormal_vectors() {
        let v = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let err = ProjectiveMeasurement::new(2, vec![v.clone(), v], "bad");
        assert!(matches!(err, Err(Error::NotOrthonormal { .. })));
    }

    #[test]
    fn rejects_non_unitary_matrix() {
        let m =
            CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            ProjectiveMeasurement::from_unitary(&m, "bad"),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn mub_family_qubit_overlaps_are_half() {
        let fam = mub_family(2).unwrap();
        assert_eq!(fam.len(), 3);
        assert_eq!(fam[0].label(), "Z");
        for i in 0..3 {
            for j in (i + 1)..3 {
                let c = overlap_matrix(&fam[i], &fam[j]).unwrap();
                for v in c.iter() {
                    assert_abs_diff_eq!(*v, 0.5, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn mub_family_prime_dims_are_unbiased() {
        for d in [3usize, 5] {
            let fam = mub_family(d).unwrap();
            assert_eq!(fam.len(), d + 1);
            for i in 0..fam.len() {
                for j in (i + 1)..fam.len() {
                    let c = overlap_matrix(&fam[i], &fam[j]).unwrap();
                    for v in c.iter() {
                        assert_abs_diff_eq!(*v, 1.0 / d as f64, epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn mub_family_rejects_composite_dimension() {
        assert!(matches!(mub_family(4), Err(Error::NotPrime { dim: 4 })));
        assert!(matches!(mub_family(1), Err(Error::NotPrime { dim: 1 })));
    }

    #[test]
    fn dephase_fixes_diagonal_states() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[c(0.75, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.25, 0.0)],
        );
        let rho = DensityMatrix::new(m.clone(), SubsystemLayout::single(2)).unwrap();
        let out = dephase(&rho, &ProjectiveMeasurement::standard(2)).unwrap();
        assert!(crate::linalg::max_abs_diff(out.matrix(), &m) < 1e-14);
    }

    #[test]
    fn dephase_plus_state_in_standard_basis_is_mixed() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = PureStateVector::new(CVector::from_vec(vec![c(h, 0.0), c(h, 0.0)]))
            .unwrap()
            .density(SubsystemLayout::single(2))
            .unwrap();
        let out = dephase(&plus, &ProjectiveMeasurement::standard(2)).unwrap();
        let expect = CMatrix::identity(2, 2).scale(0.5);
        assert!(crate::linalg::max_abs_diff(out.matrix(), &expect) < 1e-14);
        assert_abs_diff_eq!(von_neumann_entropy(&out).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn dephase_is_idempotent() {
        let rho = DensityMatrix::new(
            CMatrix::from_row_slice(2, 2, &[c(0.7, 0.0), c(0.2, 0.1), c(0.2, -0.1), c(0.3, 0.0)]),
            SubsystemLayout::single(2),
        )
        .unwrap();
        let x = x_basis();
        let once = dephase(&rho, &x).unwrap();
        let twice = dephase(&once, &x).unwrap();
        assert!(crate::linalg::max_abs_diff(once.matrix(), twice.matrix()) < 1e-14);
    }

    #[test]
    fn measure_bell_in_standard_basis() {
        let out = measure_subsystem(&bell(), &ProjectiveMeasurement::standard(2), 0).unwrap();
        assert_abs_diff_eq!(out.probabilities[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(out.probabilities[1], 0.5, epsilon = 1e-12);
        for (i, cond) in out.conditional_states.iter().enumerate() {
            let cond = cond.as_ref().unwrap();
            // Outcome i leaves B in |i><i|.
            assert_abs_diff_eq!(cond.matrix()[(i, i)].re, 1.0, epsilon = 1e-12);
        }
        // Forgotten-outcome state is the classically correlated mixture.
        let mut expect = CMatrix::zeros(4, 4);
        expect[(0, 0)] = c(0.5, 0.0);
        expect[(3, 3)] = c(0.5, 0.0);
        assert!(crate::linalg::max_abs_diff(out.post_joint.matrix(), &expect) < 1e-14);
    }

    #[test]
    fn measure_product_state_leaves_partner_alone() {
        let a = PureStateVector::basis_state(2, 0)
            .unwrap()
            .density(SubsystemLayout::single(2))
            .unwrap();
        let b = DensityMatrix::new(
            CMatrix::from_row_slice(
                2,
                2,
                &[c(0.8, 0.0), c(0.1, 0.05), c(0.1, -0.05), c(0.2, 0.0)],
            ),
            SubsystemLayout::single(2),
        )
        .unwrap();
        let joint = tensor_product(&a, &b);
        let out = measure_subsystem(&joint, &x_basis(), 0).unwrap();
        assert_abs_diff_eq!(out.probabilities[0], 0.5, epsilon = 1e-12);
        for cond in out.conditional_states.iter().flatten() {
            assert!(crate::linalg::max_abs_diff(cond.matrix(), b.matrix()) < 1e-12);
        }
    }

    #[test]
    fn measure_single_party_gives_trivial_conditionals() {
        let rho = DensityMatrix::maximally_mixed(SubsystemLayout::single(2));
        let out = measure_subsystem(&rho, &ProjectiveMeasurement::standard(2), 0).unwrap();
        for cond in out.conditional_states.iter().flatten() {
            assert_eq!(cond.dim(), 1);
            assert_abs_diff_eq!(cond.matrix()[(0, 0)].re, 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn impossible_outcome_has_no_conditional() {
        let zero = PureStateVector::basis_state(2, 0)
            .unwrap()
            .density(SubsystemLayout::single(2))
            .unwrap();
        let out = measure_subsystem(&zero, &ProjectiveMeasurement::standard(2), 0).unwrap();
        assert!(out.conditional_states[0].is_some());
        assert!(out.conditional_states[1].is_none());
        assert_abs_diff_eq!(out.probabilities[1], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn measure_rejects_bad_target_and_dimension() {
        let rho = bell();
        assert!(matches!(
            measure_subsystem(&rho, &ProjectiveMeasurement::standard(2), 2),
            Err(Error::BadSubsystemIndex { .. })
        ));
        assert!(matches!(
            measure_subsystem(&rho, &ProjectiveMeasurement::standard(3), 0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn overlap_same_basis_is_identity() {
        let z = ProjectiveMeasurement::standard(3);
        let c = overlap_matrix(&z, &z).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(c[(i, j)], expect, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn overlap_rows_and_columns_sum_to_one() {
        let fam = mub_family(3).unwrap();
        let c = overlap_matrix(&fam[1], &fam[2]).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(c.row(i).sum(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(c.column(i).sum(), 1.0, epsilon = 1e-12);
        }
    }
}

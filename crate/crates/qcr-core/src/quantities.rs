//! The entropic quantities the complementarity relations trade in.
//!
//! Everything is reported in bits. Quantities that are non-negative by
//! theory (coherence, discord) clamp roundoff negatives no larger than
//! 1e-12 to zero; genuinely signed quantities (conditional entropy) are
//! never clamped.

use crate::error::{Error, Result};
use crate::linalg::kahan_sum;
use crate::measurement::{dephase, measure_subsystem, ProjectiveMeasurement, PROB_FLOOR};
use crate::state::{check_subset, partial_trace, von_neumann_entropy, DensityMatrix};

/// Roundoff negatives inside this window collapse to exactly zero.
const NONNEG_CLAMP: f64 = 1e-12;

fn clamp_nonneg(x: f64) -> f64 {
    if x < 0.0 && x > -NONNEG_CLAMP {
        0.0
    } else {
        x
    }
}

/// Relative-entropy coherence of `rho` with respect to the basis of `m`:
/// the entropy gained by erasing all off-diagonal structure,
/// C = S(rho_dephased) - S(rho). Zero iff `rho` is diagonal in the basis.
pub fn rel_entropy_coherence(rho: &DensityMatrix, m: &ProjectiveMeasurement) -> Result<f64> {
    let dephased = dephase(rho, m)?;
    let c = von_neumann_entropy(&dephased)? - von_neumann_entropy(rho)?;
    Ok(clamp_nonneg(c))
}

/// Conditional entropy S(A|B) = S(rho) - S(rho_B), where B is the
/// `conditioning` subsystem set and A everything else. Negative values are
/// meaningful: they witness entanglement across the A|B cut.
pub fn conditional_entropy(rho: &DensityMatrix, conditioning: &[usize]) -> Result<f64> {
    let n = rho.layout().subsystem_count();
    let cond = check_subset(conditioning, n)?;
    if cond.len() == n {
        return Err(Error::DimensionMismatch {
            what: "conditioning subsystem count",
            expected: n - 1,
            actual: n,
        });
    }
    let marginal = partial_trace(rho, &cond)?;
    Ok(von_neumann_entropy(rho)? - von_neumann_entropy(&marginal)?)
}

/// True when a conditional entropy is negative beyond roundoff, which
/// certifies entanglement across the cut.
pub fn signals_entanglement(conditional_entropy_bits: f64, tolerance: f64) -> bool {
    conditional_entropy_bits < -tolerance.abs()
}

/// Conditional entropy after projectively measuring subsystem `measured`
/// with `m` and forgetting the outcome, evaluated against the `memory`
/// subsystems: S(M_A|B) = S(post_{A,B}) - S(post_B). Non-negative because
/// the measured side is classical afterwards.
pub fn post_measurement_conditional_entropy(
    rho: &DensityMatrix,
    m: &ProjectiveMeasurement,
    measured: usize,
    memory: &[usize],
) -> Result<f64> {
    let n = rho.layout().subsystem_count();
    let mem = check_subset(memory, n)?;
    if mem.contains(&measured) {
        return Err(Error::BadSubsystemIndex {
            index: measured,
            count: n,
        });
    }
    let out = measure_subsystem(rho, m, measured)?;

    let mut pair = mem.clone();
    pair.push(measured);
    pair.sort_unstable();
    let joint = partial_trace(&out.post_joint, &pair)?;
    let memory_marginal = partial_trace(&out.post_joint, &mem)?;
    Ok(von_neumann_entropy(&joint)? - von_neumann_entropy(&memory_marginal)?)
}

/// The pieces of a thermal-discord evaluation. The identity
/// `discord = avg_conditional_entropy + post_meas_marginal_entropy -
/// joint_entropy` holds up to the clamp window.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DiscordBreakdown {
    /// sum_i p_i S(rho_B|i): residual uncertainty about the unmeasured
    /// side after learning the outcome.
    pub avg_conditional_entropy: f64,
    /// S of the dephased measured marginal, the Shannon entropy of the
    /// outcome distribution.
    pub post_meas_marginal_entropy: f64,
    /// S(rho) of the joint input state.
    pub joint_entropy: f64,
    /// Thermal discord for this measurement, clamped to be non-negative.
    pub discord: f64,
}

/// Thermal discord of measuring subsystem `measured` of a joint state with
/// `m`: sum_i p_i S(rho_B|i) + S(rho_tilde_A) - S(rho_AB). The unmeasured
/// side B is every other subsystem.
pub fn thermal_discord(
    rho: &DensityMatrix,
    m: &ProjectiveMeasurement,
    measured: usize,
) -> Result<DiscordBreakdown> {
    let n = rho.layout().subsystem_count();
    if n < 2 {
        return Err(Error::DimensionMismatch {
            what: "subsystem count",
            expected: 2,
            actual: n,
        });
    }
    let out = measure_subsystem(rho, m, measured)?;

    let avg = kahan_sum(
        out.probabilities
            .iter()
            .zip(&out.conditional_states)
            .filter(|(&p, _)| p > PROB_FLOOR)
            .map(|(&p, cond)| {
                let cond = cond.as_ref().expect("probability above floor");
                von_neumann_entropy(cond).map(|s| p * s)
            })
            .collect::<Result<Vec<f64>>>()?,
    );

    let measured_marginal = partial_trace(&out.post_joint, &[measured])?;
    let post_meas_marginal_entropy = von_neumann_entropy(&measured_marginal)?;
    let joint_entropy = von_neumann_entropy(rho)?;
    let discord = clamp_nonneg(avg + post_meas_marginal_entropy - joint_entropy);

    Ok(DiscordBreakdown {
        avg_conditional_entropy: avg,
        post_meas_marginal_entropy,
        joint_entropy,
        discord,
    })
}

/// The identity route to thermal discord: S(M_A|B) - S(A|B) with B the
/// full unmeasured set. Agrees with [`thermal_discord`] up to roundoff and
/// the clamp window; kept separate so the two derivations cross-check.
pub fn thermal_discord_identity(
    rho: &DensityMatrix,
    m: &ProjectiveMeasurement,
    measured: usize,
) -> Result<f64> {
    let n = rho.layout().subsystem_count();
    if n < 2 {
        return Err(Error::DimensionMismatch {
            what: "subsystem count",
            expected: 2,
            actual: n,
        });
    }
    if measured >= n {
        return Err(Error::BadSubsystemIndex {
            index: measured,
            count: n,
        });
    }
    let memory: Vec<usize> = (0..n).filter(|&i| i != measured).collect();
    let s_meas = post_measurement_conditional_entropy(rho, m, measured, &memory)?;
    let s_cond = conditional_entropy(rho, &memory)?;
    Ok(s_meas - s_cond)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::{dephase, mub_family};
    use crate::state::{tensor_product, CMatrix, CVector, PureStateVector, SubsystemLayout};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn qubit(d: CMatrix) -> DensityMatrix {
        DensityMatrix::new(d, SubsystemLayout::single(2)).unwrap()
    }

    fn diag_qubit(p: f64) -> DensityMatrix {
        qubit(CMatrix::from_row_slice(
            2,
            2,
            &[c(p, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0 - p, 0.0)],
        ))
    }

    fn bell() -> DensityMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureStateVector::new(CVector::from_vec(vec![
            c(h, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(h, 0.0),
        ]))
        .unwrap()
        .density(SubsystemLayout::new(vec![2, 2]).unwrap())
        .unwrap()
    }

    fn classically_correlated() -> DensityMatrix {
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = c(0.5, 0.0);
        m[(3, 3)] = c(0.5, 0.0);
        DensityMatrix::new(m, SubsystemLayout::new(vec![2, 2]).unwrap()).unwrap()
    }

    fn x_basis() -> ProjectiveMeasurement {
        mub_family(2).unwrap().remove(1)
    }

    #[test]
    fn coherence_of_maximally_mixed_is_zero() {
        let rho = DensityMatrix::maximally_mixed(SubsystemLayout::single(2));
        for m in mub_family(2).unwrap() {
            assert_eq!(rel_entropy_coherence(&rho, &m).unwrap(), 0.0);
        }
    }

    #[test]
    fn coherence_of_plus_state_in_standard_basis_is_one() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = PureStateVector::new(CVector::from_vec(vec![c(h, 0.0), c(h, 0.0)]))
            .unwrap()
            .density(SubsystemLayout::single(2))
            .unwrap();
        let m = ProjectiveMeasurement::standard(2);
        assert_abs_diff_eq!(
            rel_entropy_coherence(&plus, &m).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn coherence_of_diagonal_state_is_exactly_zero() {
        let rho = diag_qubit(0.75);
        let m = ProjectiveMeasurement::standard(2);
        assert_eq!(rel_entropy_coherence(&rho, &m).unwrap(), 0.0);
    }

    #[test]
    fn conditional_entropy_of_bell_is_minus_one() {
        let s = conditional_entropy(&bell(), &[1]).unwrap();
        assert_abs_diff_eq!(s, -1.0, epsilon = 1e-12);
        assert!(signals_entanglement(s, 1e-9));
    }

    #[test]
    fn conditional_entropy_of_product_is_marginal_entropy() {
        let a = diag_qubit(0.75);
        let b = diag_qubit(0.5);
        let joint = tensor_product(&a, &b);
        let expect = 2.0 - 0.75 * 3.0_f64.log2();
        assert_abs_diff_eq!(
            conditional_entropy(&joint, &[1]).unwrap(),
            expect,
            epsilon = 1e-12
        );
        assert!(!signals_entanglement(expect, 1e-9));
    }

    #[test]
    fn conditional_entropy_of_classical_correlation_is_zero() {
        assert_abs_diff_eq!(
            conditional_entropy(&classically_correlated(), &[1]).unwrap(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn conditional_entropy_rejects_full_conditioning_set() {
        assert!(matches!(
            conditional_entropy(&bell(), &[0, 1]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn post_measurement_entropy_of_bell_in_standard_basis_is_zero() {
        let s = post_measurement_conditional_entropy(
            &bell(),
            &ProjectiveMeasurement::standard(2),
            0,
            &[1],
        )
        .unwrap();
        // Dephasing in Z leaves perfect classical correlation.
        assert_abs_diff_eq!(s, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn post_measurement_entropy_of_zero_zero_in_x_is_one() {
        let zero = PureStateVector::basis_state(4, 0)
            .unwrap()
            .density(SubsystemLayout::new(vec![2, 2]).unwrap())
            .unwrap();
        let s = post_measurement_conditional_entropy(&zero, &x_basis(), 0, &[1]).unwrap();
        assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn post_measurement_entropy_decouples_on_products() {
        let a = qubit(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.7, 0.0), c(0.2, 0.1), c(0.2, -0.1), c(0.3, 0.0)],
        ));
        let b = diag_qubit(0.8);
        let joint = tensor_product(&a, &b);
        let m = x_basis();
        let s = post_measurement_conditional_entropy(&joint, &m, 0, &[1]).unwrap();
        let expect = von_neumann_entropy(&dephase(&a, &m).unwrap()).unwrap();
        assert_abs_diff_eq!(s, expect, epsilon = 1e-12);
    }

    #[test]
    fn post_measurement_entropy_rejects_overlapping_memory() {
        assert!(matches!(
            post_measurement_conditional_entropy(
                &bell(),
                &ProjectiveMeasurement::standard(2),
                1,
                &[1]
            ),
            Err(Error::BadSubsystemIndex { .. })
        ));
    }

    #[test]
    fn discord_of_bell_in_standard_basis_is_one() {
        let d = thermal_discord(&bell(), &ProjectiveMeasurement::standard(2), 0).unwrap();
        assert_abs_diff_eq!(d.avg_conditional_entropy, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.post_meas_marginal_entropy, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.joint_entropy, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.discord, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn discord_breakdown_identity_holds() {
        let d = thermal_discord(&bell(), &x_basis(), 0).unwrap();
        let recomposed = d.avg_conditional_entropy + d.post_meas_marginal_entropy - d.joint_entropy;
        assert!((d.discord - recomposed).abs() <= 1e-12);
    }

    #[test]
    fn discord_of_diagonal_product_in_eigenbasis_is_zero() {
        let joint = tensor_product(&diag_qubit(0.75), &diag_qubit(0.6));
        let d = thermal_discord(&joint, &ProjectiveMeasurement::standard(2), 0).unwrap();
        assert_eq!(d.discord, 0.0);
    }

    #[test]
    fn discord_of_classical_correlation_in_its_basis_is_zero() {
        let d = thermal_discord(
            &classically_correlated(),
            &ProjectiveMeasurement::standard(2),
            0,
        )
        .unwrap();
        assert_eq!(d.discord, 0.0);
    }

    #[test]
    fn identity_route_matches_direct_discord() {
        for m in mub_family(2).unwrap() {
            let direct = thermal_discord(&bell(), &m, 0).unwrap().discord;
            let via_identity = thermal_discord_identity(&bell(), &m, 0).unwrap();
            assert_abs_diff_eq!(direct, via_identity, epsilon = 1e-9);
            assert_abs_diff_eq!(direct, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn discord_with_trivial_memory_reduces_to_coherence() {
        let a = qubit(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.6, 0.0), c(0.25, -0.15), c(0.25, 0.15), c(0.4, 0.0)],
        ));
        let trivial =
            DensityMatrix::new(CMatrix::identity(1, 1), SubsystemLayout::single(1)).unwrap();
        let joint = tensor_product(&a, &trivial);
        for m in mub_family(2).unwrap() {
            let d = thermal_discord(&joint, &m, 0).unwrap().discord;
            let coh = rel_entropy_coherence(&a, &m).unwrap();
            assert_abs_diff_eq!(d, coh, epsilon = 1e-9);
        }
    }

    #[test]
    fn discord_rejects_single_subsystem_states() {
        let rho = diag_qubit(0.5);
        assert!(matches!(
            thermal_discord(&rho, &ProjectiveMeasurement::standard(2), 0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn measured_side_entropy_is_outcome_shannon_entropy() {
        // Measuring |+> in Z gives p = (1/2, 1/2), so the dephased marginal
        // carries exactly one bit.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = PureStateVector::new(CVector::from_vec(vec![c(h, 0.0), c(h, 0.0)]))
            .unwrap()
            .density(SubsystemLayout::single(2))
            .unwrap();
        let joint = tensor_product(&plus, &diag_qubit(1.0));
        let d = thermal_discord(&joint, &ProjectiveMeasurement::standard(2), 0).unwrap();
        assert_abs_diff_eq!(d.post_meas_marginal_entropy, 1.0, epsilon = 1e-12);
    }
}

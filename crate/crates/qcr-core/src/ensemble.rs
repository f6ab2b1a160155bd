//! Seeded random ensembles of states and measurements.
//!
//! Determinism contract: every sampled object is a pure function of
//! (master seed, instance index). Instance i derives its own seed with
//! [`child_seed`]`(master, i)`, and the k-th measurement of that instance
//! uses `child_seed(instance_seed, k + 1)`, so inserting or removing
//! instances never shifts the randomness of the others. The derivation is
//! the SplitMix64 finalizer, fixed for the life of the file formats.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::measurement::ProjectiveMeasurement;
use crate::state::{CMatrix, CVector, DensityMatrix, SubsystemLayout};

/// Stateless seed derivation: mixes `master` with `index` through the
/// SplitMix64 increment-and-finalize step.
pub fn child_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix of iid standard complex Gaussians (Ginibre ensemble).
fn ginibre(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-distributed d x d unitary: QR of a Ginibre matrix with the R
/// diagonal phases absorbed into Q, which removes the QR gauge freedom.
pub fn sample_haar_unitary(d: usize, seed: u64) -> CMatrix {
    let mut rng = rng_from(seed);
    let g = ginibre(&mut rng, d, d);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut u = q;
    for j in 0..d {
        let diag = r[(j, j)];
        let phase = if diag.norm() > 0.0 {
            diag / diag.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            u[(i, j)] *= phase;
        }
    }
    u
}

/// Haar-random measurement basis, labeled by its seed.
pub fn sample_measurement(d: usize, seed: u64) -> ProjectiveMeasurement {
    let u = sample_haar_unitary(d, seed);
    ProjectiveMeasurement::from_unitary(&u, format!("haar{seed:016x}"))
        .expect("Haar sample is unitary")
}

/// Distribution the state sampler draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampler {
    /// Haar-random pure state |psi><psi|.
    HaarPure,
    /// Hilbert-Schmidt distributed mixed state G G^dagger / tr.
    HilbertSchmidtMixed,
    /// Mixed state of rank at most r, from a d x r Ginibre factor.
    RankLimitedMixed(usize),
}

/// Draws one state on `layout` from the given distribution.
pub fn sample_mixed_state(
    layout: &SubsystemLayout,
    sampler: Sampler,
    seed: u64,
) -> Result<DensityMatrix> {
    let d = layout.total();
    let mut rng = rng_from(seed);
    let matrix = match sampler {
        Sampler::HaarPure => {
            let g = ginibre(&mut rng, d, 1);
            let v = CVector::from_column_slice(g.as_slice());
            let v = v.unscale(v.norm());
            &v * v.adjoint()
        }
        Sampler::HilbertSchmidtMixed => {
            let g = ginibre(&mut rng, d, d);
            let gg = &g * g.adjoint();
            let tr = gg.trace().re;
            gg.unscale(tr)
        }
        Sampler::RankLimitedMixed(r) => {
            if r == 0 || r > d {
                return Err(Error::InvalidEnsemble {
                    detail: format!("rank {r} must be between 1 and the total dimension {d}"),
                });
            }
            let g = ginibre(&mut rng, d, r);
            let gg = &g * g.adjoint();
            let tr = gg.trace().re;
            gg.unscale(tr)
        }
    };
    DensityMatrix::new(matrix, layout.clone())
}

/// A reproducible stream of sampled states.
#[derive(Debug, Clone)]
pub struct EnsembleConfig {
    layout: SubsystemLayout,
    sampler: Sampler,
    count: usize,
    seed: u64,
}

impl EnsembleConfig {
    pub fn new(layout: SubsystemLayout, sampler: Sampler, count: usize, seed: u64) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidEnsemble {
                detail: "instance count must be at least 1".to_string(),
            });
        }
        if let Sampler::RankLimitedMixed(r) = sampler {
            if r == 0 || r > layout.total() {
                return Err(Error::InvalidEnsemble {
                    detail: format!(
                        "rank {r} must be between 1 and the total dimension {}",
                        layout.total()
                    ),
                });
            }
        }
        Ok(Self {
            layout,
            sampler,
            count,
            seed,
        })
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn sampler(&self) -> Sampler {
        self.sampler
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Seed of instance `index`, exposed so reports can cite it.
    pub fn seed_at(&self, index: usize) -> u64 {
        child_seed(self.seed, index as u64)
    }

    /// State of instance `index`, independent of all other instances.
    pub fn state_at(&self, index: usize) -> Result<DensityMatrix> {
        sample_mixed_state(&self.layout, self.sampler, self.seed_at(index))
    }

    /// All states in index order.
    pub fn states(&self) -> impl Iterator<Item = Result<DensityMatrix>> + '_ {
        (0..self.count).map(|i| self.state_at(i))
    }
}

/// Minimizes thermal discord of measuring `measured` over `trials`
/// Haar-random bases plus the standard basis, returning the best basis and
/// value. A coarse search: useful for spotting classical states (minimum
/// near zero), not for tight optimization.
pub fn min_discord_sampled(
    rho: &DensityMatrix,
    measured: usize,
    trials: usize,
    seed: u64,
) -> Result<(ProjectiveMeasurement, f64)> {
    let d = rho.layout().dim_of(measured)?;
    let mut best_m = ProjectiveMeasurement::standard(d);
    let mut best = crate::quantities::thermal_discord(rho, &best_m, measured)?.discord;
    for t in 0..trials {
        let m = sample_measurement(d, child_seed(seed, t as u64));
        let value = crate::quantities::thermal_discord(rho, &m, measured)?.discord;
        if value < best {
            best = value;
            best_m = m;
        }
    }
    Ok((best_m, best))
}

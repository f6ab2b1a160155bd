//! Monte Carlo sweep: sample states, check one relation per instance,
//! stream CSV rows, and write counterexample bundles for violations.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Deserialize;

use qcr_core::{
    check_coherence_relation, check_data_processing_step, check_discord_relation,
    check_memory_uncertainty, check_multipartite_conditional, check_tripartite_pair,
    check_uncertainty, child_seed, mub_family, sample_measurement, BoundPolicy, DensityMatrix,
    EnsembleConfig, MultipartiteBoundSet, ProjectiveMeasurement, RelationId, RelationOptions,
    RelationReport, Sampler, SubsystemLayout,
};

use crate::bundle::Counterexample;
use crate::fail::{CliError, CliResult};
use crate::files::read_measurements;

pub const CSV_HEADER: &str =
    "instance_index,seed,relation_id,n_measurements,lhs_bits,rhs_bits,residual_bits,b,saturated,holds";

/// Sweep description, read from a JSON file.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Relation wire name: EQ3, EQ5, EQ7, EQ9, EQ10, EQ11 or EQ11_PAIR.
    pub relation: String,
    /// Subsystem dimensions of the sampled states.
    pub dims: Vec<usize>,
    pub sampler: SamplerSpec,
    /// Number of instances.
    pub count: usize,
    /// Master seed; instance i uses a child seed derived from it.
    pub seed: u64,
    pub measurements: MeasurementSpec,
    /// Verdict tolerance in bits (default 1e-9).
    #[serde(default)]
    pub tolerance: Option<f64>,
    /// Measured subsystem for EQ7/EQ9 (default 0).
    #[serde(default)]
    pub measured: Option<usize>,
    /// Memory subsystems for EQ7/EQ9 (default: all others); for EQ10 a
    /// single index in {1, 2} (default 2).
    #[serde(default)]
    pub memory: Option<Vec<usize>>,
    #[serde(default)]
    pub b_policy: Option<PolicySpec>,
    /// Bound subset for EQ11 (default tail).
    #[serde(default)]
    pub b_set: Option<BoundSetSpec>,
    /// CSV destination; stdout when absent.
    #[serde(default)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerSpec {
    HaarPure,
    HilbertSchmidtMixed,
    RankLimitedMixed(usize),
}

impl SamplerSpec {
    fn resolve(self) -> Sampler {
        match self {
            SamplerSpec::HaarPure => Sampler::HaarPure,
            SamplerSpec::HilbertSchmidtMixed => Sampler::HilbertSchmidtMixed,
            SamplerSpec::RankLimitedMixed(r) => Sampler::RankLimitedMixed(r),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasurementSpec {
    /// The same bases, loaded from files, for every instance.
    Fixed { files: Vec<PathBuf> },
    /// `n` fresh Haar-random bases per instance.
    Random { n: usize },
    /// A mutually unbiased family (prime dimension), optionally truncated
    /// to the first `n` bases.
    Mub {
        #[serde(default)]
        n: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicySpec {
    GivenOrder,
    BestOrder,
}

impl PolicySpec {
    pub fn resolve(opt: Option<Self>) -> BoundPolicy {
        match opt {
            None => BoundPolicy::Auto,
            Some(PolicySpec::GivenOrder) => BoundPolicy::GivenOrder,
            Some(PolicySpec::BestOrder) => BoundPolicy::BestOrder,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSetSpec {
    Tail,
    All,
}

impl BoundSetSpec {
    fn resolve(opt: Option<Self>) -> MultipartiteBoundSet {
        match opt {
            None | Some(BoundSetSpec::Tail) => MultipartiteBoundSet::TailMeasurements,
            Some(BoundSetSpec::All) => MultipartiteBoundSet::AllMeasurements,
        }
    }
}

/// Per-instance measurement source, resolved from [`MeasurementSpec`].
enum Pool {
    Fixed(Vec<ProjectiveMeasurement>),
    Random { n: usize, dim: usize },
}

impl Pool {
    fn len(&self) -> usize {
        match self {
            Pool::Fixed(ms) => ms.len(),
            Pool::Random { n, .. } => *n,
        }
    }

    /// Bases for the instance with the given child seed. Random bases use
    /// seeds derived from it, so instances stay independent.
    fn for_instance(&self, instance_seed: u64) -> Vec<ProjectiveMeasurement> {
        match self {
            Pool::Fixed(ms) => ms.clone(),
            Pool::Random { n, dim } => (0..*n)
                .map(|k| sample_measurement(*dim, child_seed(instance_seed, k as u64 + 1)))
                .collect(),
        }
    }
}

/// A validated sweep, ready to run.
pub struct Plan {
    relation: RelationId,
    ensemble: EnsembleConfig,
    opts: RelationOptions,
    /// EQ7/EQ9 only.
    measured: usize,
    /// EQ7/EQ9: conditioning set. EQ10: the single memory index.
    memory: Vec<usize>,
    pool: Pool,
    out: Option<PathBuf>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl Plan {
    pub fn from_config(config: SweepConfig) -> CliResult<Self> {
        let relation: RelationId = config.relation.parse().map_err(config_err)?;
        let layout = SubsystemLayout::new(config.dims.clone())
            .map_err(|e| config_err(format!("bad dims: {e}")))?;
        let parties = layout.subsystem_count();

        let mut opts = RelationOptions {
            bound_policy: PolicySpec::resolve(config.b_policy),
            bound_set: BoundSetSpec::resolve(config.b_set),
            ..RelationOptions::default()
        };
        if let Some(tol) = config.tolerance {
            if !(tol.is_finite() && tol >= 0.0) {
                return Err(config_err(format!(
                    "tolerance must be a finite non-negative number of bits, got {tol}"
                )));
            }
            opts.tolerance = tol;
        }

        match relation {
            RelationId::MemoryUncertainty | RelationId::Discord => {}
            RelationId::DataProcessing => {
                if config.measured.is_some() {
                    return Err(config_err(format!(
                        "`measured` does not apply to {relation}: it always measures subsystem 0"
                    )));
                }
            }
            _ => {
                if config.measured.is_some() || config.memory.is_some() {
                    return Err(config_err(format!(
                        "`measured`/`memory` do not apply to {relation}"
                    )));
                }
            }
        }

        let measured = config.measured.unwrap_or(0);
        // Which dimension the bases act on and, where the relation pins
        // it, how many of them it takes (None = any count >= 2).
        let (meas_dim, required): (usize, Option<usize>) = match relation {
            RelationId::Uncertainty | RelationId::Coherence => (layout.total(), None),
            RelationId::MemoryUncertainty | RelationId::Discord => {
                if measured >= parties {
                    return Err(config_err(format!(
                        "`measured` index {measured} is out of range for {parties} subsystems"
                    )));
                }
                (layout.dims()[measured], None)
            }
            RelationId::DataProcessing => (layout.dims()[0], Some(1)),
            RelationId::Multipartite => {
                if parties < 3 {
                    return Err(config_err(format!(
                        "{relation} needs at least 3 subsystems, got {parties}"
                    )));
                }
                (layout.dims()[0], Some(parties - 1))
            }
            RelationId::MultipartitePair => {
                if parties != 3 {
                    return Err(config_err(format!(
                        "{relation} needs exactly 3 subsystems, got {parties}"
                    )));
                }
                (layout.dims()[0], Some(2))
            }
        };

        let memory = match relation {
            RelationId::MemoryUncertainty | RelationId::Discord => match config.memory {
                Some(mem) => mem,
                None => (0..parties).filter(|&i| i != measured).collect(),
            },
            RelationId::DataProcessing => {
                let k = match config.memory.as_deref() {
                    None => 2,
                    Some([k]) => *k,
                    Some(other) => {
                        return Err(config_err(format!(
                            "{relation} takes a single memory index, got {} entries",
                            other.len()
                        )))
                    }
                };
                if k != 1 && k != 2 {
                    return Err(config_err(format!(
                        "{relation} memory index must be 1 or 2, got {k}"
                    )));
                }
                vec![k]
            }
            _ => Vec::new(),
        };

        let pool = match config.measurements {
            MeasurementSpec::Fixed { files } => Pool::Fixed(read_measurements(&files)?),
            MeasurementSpec::Random { n } => Pool::Random { n, dim: meas_dim },
            MeasurementSpec::Mub { n } => {
                let family = mub_family(meas_dim)
                    .map_err(|e| config_err(format!("mub measurements: {e}")))?;
                let family = match n {
                    None => family,
                    Some(n) if n >= 1 && n <= family.len() => family[..n].to_vec(),
                    Some(n) => {
                        return Err(config_err(format!(
                            "mub `n` must be between 1 and {}, got {n}",
                            family.len()
                        )))
                    }
                };
                Pool::Fixed(family)
            }
        };

        if let Pool::Fixed(ms) = &pool {
            for (i, m) in ms.iter().enumerate() {
                if m.dim() != meas_dim {
                    return Err(config_err(format!(
                        "measurement {i} has dimension {}, but {relation} on these dims \
                         measures a {meas_dim}-dimensional system",
                        m.dim()
                    )));
                }
            }
        }
        match required {
            Some(req) if pool.len() != req => {
                return Err(config_err(format!(
                    "{relation} on {parties} subsystems takes exactly {req} measurement(s), \
                     got {}",
                    pool.len()
                )))
            }
            None if pool.len() < 2 => {
                return Err(config_err(format!(
                    "{relation} needs at least 2 measurements, got {}",
                    pool.len()
                )))
            }
            _ => {}
        }

        let ensemble =
            EnsembleConfig::new(layout, config.sampler.resolve(), config.count, config.seed)
                .map_err(|e| config_err(format!("bad ensemble: {e}")))?;

        Ok(Self {
            relation,
            ensemble,
            opts,
            measured,
            memory,
            pool,
            out: config.out,
        })
    }

    fn check_instance(
        &self,
        state: &DensityMatrix,
        ms: &[ProjectiveMeasurement],
    ) -> qcr_core::Result<RelationReport> {
        match self.relation {
            RelationId::Uncertainty => check_uncertainty(state, ms, &self.opts),
            RelationId::Coherence => check_coherence_relation(state, ms, &self.opts),
            RelationId::MemoryUncertainty => {
                check_memory_uncertainty(state, ms, self.measured, &self.memory, &self.opts)
            }
            RelationId::Discord => {
                check_discord_relation(state, ms, self.measured, &self.memory, &self.opts)
            }
            RelationId::DataProcessing => {
                check_data_processing_step(state, &ms[0], self.memory[0], &self.opts)
            }
            RelationId::Multipartite => check_multipartite_conditional(state, ms, &self.opts),
            RelationId::MultipartitePair => {
                check_tripartite_pair(state, &ms[0], &ms[1], &self.opts)
            }
        }
    }

    fn bundle_target(&self) -> (Option<usize>, Option<Vec<usize>>) {
        match self.relation {
            RelationId::MemoryUncertainty | RelationId::Discord => {
                (Some(self.measured), Some(self.memory.clone()))
            }
            RelationId::DataProcessing => (Some(0), Some(self.memory.clone())),
            _ => (None, None),
        }
    }
}

/// Totals reported after a sweep.
pub struct SweepSummary {
    pub instances: usize,
    pub violations: usize,
    pub saturated: usize,
    pub min_residual: f64,
}

fn csv_row(index: usize, seed: u64, n_measurements: usize, report: &RelationReport) -> String {
    let b = report
        .bound
        .as_ref()
        .map(|bound| bound.b.to_string())
        .unwrap_or_default();
    format!(
        "{index},{seed},{rel},{n_measurements},{lhs},{rhs},{res},{b},{sat},{holds}",
        rel = report.relation_id,
        lhs = report.lhs,
        rhs = report.rhs,
        res = report.residual,
        sat = report.saturated,
        holds = report.holds,
    )
}

/// Runs the sweep: every instance is checked and written to the CSV even
/// when violations appear, so the full picture survives a failing run.
/// Returns the summary; the caller maps violations to the exit code.
pub fn run(
    config_path: &Path,
    seed_override: Option<u64>,
    out_override: Option<PathBuf>,
) -> CliResult<SweepSummary> {
    let text = fs::read_to_string(config_path).map_err(|source| CliError::Read {
        path: config_path.to_path_buf(),
        source,
    })?;
    let mut config: SweepConfig =
        serde_json::from_str(&text).map_err(|source| CliError::Parse {
            path: config_path.to_path_buf(),
            source,
        })?;
    if let Some(seed) = seed_override {
        config.seed = seed;
    }
    if let Some(out) = out_override {
        config.out = Some(out);
    }
    let plan = Plan::from_config(config)?;

    let bundle_dir: PathBuf = plan
        .out
        .as_ref()
        .and_then(|p| p.parent().map(Path::to_path_buf))
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or_else(|| PathBuf::from("."));

    let mut sink: Box<dyn Write> = match &plan.out {
        Some(path) => Box::new(fs::File::create(path).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?),
        None => Box::new(io::stdout().lock()),
    };
    let write_err = |path: &Option<PathBuf>, source: io::Error| CliError::Write {
        path: path.clone().unwrap_or_else(|| PathBuf::from("<stdout>")),
        source,
    };

    writeln!(sink, "{CSV_HEADER}").map_err(|e| write_err(&plan.out, e))?;

    let mut summary = SweepSummary {
        instances: plan.ensemble.count(),
        violations: 0,
        saturated: 0,
        min_residual: f64::INFINITY,
    };

    for index in 0..plan.ensemble.count() {
        let instance_seed = plan.ensemble.seed_at(index);
        let state = plan.ensemble.state_at(index)?;
        let ms = plan.pool.for_instance(instance_seed);
        let report = plan.check_instance(&state, &ms)?;

        writeln!(sink, "{}", csv_row(index, instance_seed, ms.len(), &report))
            .map_err(|e| write_err(&plan.out, e))?;

        summary.min_residual = summary.min_residual.min(report.residual);
        if report.saturated {
            summary.saturated += 1;
        }
        if !report.holds {
            summary.violations += 1;
            let (measured, memory) = plan.bundle_target();
            let bundle = Counterexample::new(
                report,
                index,
                Some(instance_seed),
                measured,
                memory,
                &state,
                &ms,
            );
            let path = bundle.write(&bundle_dir)?;
            eprintln!("counterexample written: {}", path.display());
        }
    }
    sink.flush().map_err(|e| write_err(&plan.out, e))?;

    // The summary goes to stderr when the CSV owns stdout.
    let summary_text = format!(
        "sweep {rel}: {n} instances on {dims:?}\nmin residual: {min} bits\nviolations:   {v}\nsaturated:    {s}",
        rel = plan.relation,
        n = summary.instances,
        dims = plan.ensemble.layout().dims(),
        min = summary.min_residual,
        v = summary.violations,
        s = summary.saturated,
    );
    if plan.out.is_some() {
        println!("{summary_text}");
    } else {
        eprintln!("{summary_text}");
    }

    Ok(summary)
}

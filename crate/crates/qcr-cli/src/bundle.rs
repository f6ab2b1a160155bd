//! Counterexample bundles: everything needed to replay a failing instance.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use qcr_core::{DensityMatrix, ProjectiveMeasurement, RelationReport};

use crate::fail::{CliError, CliResult};
use crate::files::{MeasurementFile, StateFile};

/// Self-contained record of one inequality violation. The embedded state
/// and measurement files replay through the same commands that produced
/// the report.
#[derive(Debug, Serialize)]
pub struct Counterexample {
    pub relation_id: String,
    pub instance_index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub memory: Option<Vec<usize>>,
    pub report: RelationReport,
    pub state: StateFile,
    pub measurements: Vec<MeasurementFile>,
}

impl Counterexample {
    pub fn new(
        report: RelationReport,
        instance_index: usize,
        seed: Option<u64>,
        measured: Option<usize>,
        memory: Option<Vec<usize>>,
        state: &DensityMatrix,
        measurements: &[ProjectiveMeasurement],
    ) -> Self {
        Self {
            relation_id: report.relation_id.to_string(),
            instance_index,
            seed,
            tolerance: report.tolerance,
            measured,
            memory,
            report,
            state: StateFile::from_density(state),
            measurements: measurements
                .iter()
                .map(MeasurementFile::from_measurement)
                .collect(),
        }
    }

    /// Writes `counterexample_{relation}_{index}.json` into `dir` and
    /// returns the path.
    pub fn write(&self, dir: &Path) -> CliResult<PathBuf> {
        let path = dir.join(format!(
            "counterexample_{}_{}.json",
            self.relation_id, self.instance_index
        ));
        let text = serde_json::to_string_pretty(self).expect("bundle serialization is infallible");
        fs::write(&path, text).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?;
        Ok(path)
    }
}

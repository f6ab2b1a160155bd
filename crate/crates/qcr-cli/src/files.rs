//! On-disk JSON schemas for states and measurement bases.
//!
//! Matrices are split into real and imaginary parts so files stay plain
//! JSON. A state file holds a full density matrix plus its subsystem
//! dimensions; a measurement file holds one basis, one vector per row.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use qcr_core::{
    CMatrix, CVector, Complex64, DensityMatrix, ProjectiveMeasurement, SubsystemLayout,
};

use crate::fail::{CliError, CliResult};

/// A density matrix with its tensor-factor dimensions. `re` and `im` must
/// both be D x D where D is the product of `dims`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl StateFile {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let d = rho.dim();
        let m = rho.matrix();
        let grab = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..d)
                .map(|r| (0..d).map(|c| f(&m[(r, c)])).collect())
                .collect()
        };
        Self {
            dims: rho.layout().dims().to_vec(),
            re: grab(|z| z.re),
            im: grab(|z| z.im),
        }
    }

    pub fn to_density(&self, path: &Path) -> CliResult<DensityMatrix> {
        let layout =
            SubsystemLayout::new(self.dims.clone()).map_err(|source| CliError::Invalid {
                path: path.to_path_buf(),
                source,
            })?;
        let d = layout.total();
        check_square(path, "re", &self.re, d)?;
        check_square(path, "im", &self.im, d)?;
        let matrix = CMatrix::from_fn(d, d, |r, c| Complex64::new(self.re[r][c], self.im[r][c]));
        DensityMatrix::new(matrix, layout).map_err(|source| CliError::Invalid {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// One orthonormal basis. Row i of `vectors_re`/`vectors_im` is the
/// amplitude vector of outcome i.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementFile {
    pub dim: usize,
    pub label: String,
    pub vectors_re: Vec<Vec<f64>>,
    pub vectors_im: Vec<Vec<f64>>,
}

impl MeasurementFile {
    pub fn from_measurement(m: &ProjectiveMeasurement) -> Self {
        let d = m.dim();
        let grab = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            m.vectors()
                .iter()
                .map(|v| (0..d).map(|i| f(&v[i])).collect())
                .collect()
        };
        Self {
            dim: d,
            label: m.label().to_string(),
            vectors_re: grab(|z| z.re),
            vectors_im: grab(|z| z.im),
        }
    }

    pub fn to_measurement(&self, path: &Path) -> CliResult<ProjectiveMeasurement> {
        check_square(path, "vectors_re", &self.vectors_re, self.dim)?;
        check_square(path, "vectors_im", &self.vectors_im, self.dim)?;
        let vectors: Vec<CVector> = (0..self.dim)
            .map(|i| {
                CVector::from_fn(self.dim, |j, _| {
                    Complex64::new(self.vectors_re[i][j], self.vectors_im[i][j])
                })
            })
            .collect();
        ProjectiveMeasurement::new(self.dim, vectors, self.label.clone()).map_err(|source| {
            CliError::Invalid {
                path: path.to_path_buf(),
                source,
            }
        })
    }
}

fn check_square(path: &Path, field: &str, rows: &[Vec<f64>], d: usize) -> CliResult<()> {
    if rows.len() != d {
        return Err(CliError::Shape {
            path: path.to_path_buf(),
            detail: format!("`{field}` must have {d} rows, got {}", rows.len()),
        });
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != d {
            return Err(CliError::Shape {
                path: path.to_path_buf(),
                detail: format!(
                    "`{field}` must be {d}x{d}, but row {i} has {} entries",
                    row.len()
                ),
            });
        }
    }
    Ok(())
}

fn parse_file<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_state(path: &Path) -> CliResult<DensityMatrix> {
    parse_file::<StateFile>(path)?.to_density(path)
}

pub fn read_measurement(path: &Path) -> CliResult<ProjectiveMeasurement> {
    parse_file::<MeasurementFile>(path)?.to_measurement(path)
}

pub fn read_measurements(paths: &[std::path::PathBuf]) -> CliResult<Vec<ProjectiveMeasurement>> {
    paths.iter().map(|p| read_measurement(p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    // Save -> load must reproduce every amplitude bit for bit; the JSON
    // layer prints floats with enough digits to round-trip exactly.
    #[test]
    fn state_round_trip_is_bit_exact() {
        let dir = std::env::temp_dir();
        let third = 1.0 / 3.0;
        let matrix = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(third, 0.0),
                Complex64::new(0.2, 0.1),
                Complex64::new(0.2, -0.1),
                Complex64::new(1.0 - third, 0.0),
            ],
        );
        let rho = DensityMatrix::new(matrix, SubsystemLayout::new(vec![2]).unwrap()).unwrap();
        let text = serde_json::to_string(&StateFile::from_density(&rho)).unwrap();
        let parsed: StateFile = serde_json::from_str(&text).unwrap();
        let back = parsed.to_density(&dir.join("roundtrip.json")).unwrap();
        for (a, b) in rho.matrix().iter().zip(back.matrix().iter()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn measurement_round_trip_is_bit_exact() {
        let dir = std::env::temp_dir();
        let m = qcr_core::mub_family(3).unwrap().pop().unwrap();
        let text = serde_json::to_string(&MeasurementFile::from_measurement(&m)).unwrap();
        let parsed: MeasurementFile = serde_json::from_str(&text).unwrap();
        let back = parsed.to_measurement(&dir.join("roundtrip.json")).unwrap();
        assert_eq!(back.label(), m.label());
        for (v, w) in m.vectors().iter().zip(back.vectors().iter()) {
            for (a, b) in v.iter().zip(w.iter()) {
                assert_eq!(a.re.to_bits(), b.re.to_bits());
                assert_eq!(a.im.to_bits(), b.im.to_bits());
            }
        }
    }

    #[test]
    fn shape_errors_name_the_field_and_expectation() {
        let path = std::path::Path::new("demo.json");
        let bad = StateFile {
            dims: vec![2],
            re: vec![vec![1.0, 0.0]],
            im: vec![vec![0.0, 0.0], vec![0.0, 0.0]],
        };
        let err = bad.to_density(path).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("`re` must have 2 rows"), "got: {msg}");
    }
}

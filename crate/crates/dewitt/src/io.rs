//! JSON document formats for fields and paths.
//!
//! Matrices are stored as flat row-major arrays of `n*n` reals. Floats are
//! serialized in shortest round-trip decimal form, so write-then-read is
//! bit-exact and output bytes are deterministic.

use std::path::Path;
use std::sync::Arc;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{MetricField, MetricPath, SampledBase, TangentField};
use crate::sym::{SpdMatrix, SymMatrix};

pub const FORMAT_VERSION: &str = "1";

/// One field value: a point id, its quadrature weight, and the matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointRecord {
    pub id: String,
    pub weight: f64,
    pub matrix: Vec<f64>,
}

/// A sampled field of symmetric (or SPD) matrices over named points.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldDocument {
    pub format_version: String,
    pub n: usize,
    pub points: Vec<PointRecord>,
}

impl FieldDocument {
    pub fn from_metric_field(field: &MetricField) -> Self {
        Self::build(
            field.base(),
            field.values().iter().map(|v| v.matrix().as_slice().to_vec()),
        )
    }

    pub fn from_tangent_field(field: &TangentField) -> Self {
        Self::build(
            field.base(),
            field.values().iter().map(|v| v.matrix().as_slice().to_vec()),
        )
    }

    fn build(base: &Arc<SampledBase>, matrices: impl Iterator<Item = Vec<f64>>) -> Self {
        // nalgebra stores column-major; symmetric matrices are invariant
        // under the transpose, so the slice already is row-major data.
        let points = base
            .ids()
            .iter()
            .zip(base.weights())
            .zip(matrices)
            .map(|((id, &weight), matrix)| PointRecord {
                id: id.clone(),
                weight,
                matrix,
            })
            .collect();
        Self {
            format_version: FORMAT_VERSION.into(),
            n: base.dim(),
            points,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Document(format!(
                "unsupported format_version '{}' (expected '{FORMAT_VERSION}')",
                self.format_version
            )));
        }
        if self.n == 0 {
            return Err(Error::Document("field dimension n must be >= 1".into()));
        }
        for p in &self.points {
            if p.matrix.len() != self.n * self.n {
                return Err(Error::Document(format!(
                    "point '{}': matrix has {} entries, expected {}",
                    p.id,
                    p.matrix.len(),
                    self.n * self.n
                )));
            }
        }
        Ok(())
    }

    pub fn base(&self) -> Result<Arc<SampledBase>> {
        self.validate()?;
        SampledBase::new(
            self.n,
            self.points.iter().map(|p| p.id.clone()).collect(),
            self.points.iter().map(|p| p.weight).collect(),
        )
    }

    /// Interprets every matrix as a metric value (must be SPD).
    pub fn to_metric_field(&self) -> Result<MetricField> {
        let base = self.base()?;
        let values = self
            .points
            .iter()
            .map(|p| SpdMatrix::from_row_major(self.n, &p.matrix).map_err(|e| e.at_point(&p.id)))
            .collect::<Result<Vec<_>>>()?;
        MetricField::new(base, values)
    }

    /// Interprets every matrix as a tangent value (symmetric only).
    pub fn to_tangent_field(&self) -> Result<TangentField> {
        let base = self.base()?;
        let values = self
            .points
            .iter()
            .map(|p| SymMatrix::from_row_major(self.n, &p.matrix).map_err(|e| e.at_point(&p.id)))
            .collect::<Result<Vec<_>>>()?;
        TangentField::new(base, values)
    }
}

/// Base-point header of a path document (matrices live in `frames`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathPoint {
    pub id: String,
    pub weight: f64,
}

/// A curve of fields: per-time frames, each one matrix per point, in the
/// header's point order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathDocument {
    pub format_version: String,
    pub n: usize,
    pub points: Vec<PathPoint>,
    pub times: Vec<f64>,
    pub frames: Vec<Vec<Vec<f64>>>,
}

impl PathDocument {
    pub fn from_metric_path(path: &MetricPath) -> Self {
        Self::build(
            path.base(),
            path.times().to_vec(),
            path.frames()
                .iter()
                .map(|f| {
                    f.values()
                        .iter()
                        .map(|v| v.matrix().as_slice().to_vec())
                        .collect()
                })
                .collect(),
        )
    }

    pub fn from_tangent_frames(
        base: &Arc<SampledBase>,
        times: &[f64],
        frames: &[TangentField],
    ) -> Self {
        Self::build(
            base,
            times.to_vec(),
            frames
                .iter()
                .map(|f| {
                    f.values()
                        .iter()
                        .map(|v| v.matrix().as_slice().to_vec())
                        .collect()
                })
                .collect(),
        )
    }

    fn build(base: &Arc<SampledBase>, times: Vec<f64>, frames: Vec<Vec<Vec<f64>>>) -> Self {
        Self {
            format_version: FORMAT_VERSION.into(),
            n: base.dim(),
            points: base
                .ids()
                .iter()
                .zip(base.weights())
                .map(|(id, &weight)| PathPoint {
                    id: id.clone(),
                    weight,
                })
                .collect(),
            times,
            frames,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Document(format!(
                "unsupported format_version '{}' (expected '{FORMAT_VERSION}')",
                self.format_version
            )));
        }
        if self.times.len() != self.frames.len() {
            return Err(Error::Document(format!(
                "{} times vs {} frames",
                self.times.len(),
                self.frames.len()
            )));
        }
        for (ti, frame) in self.frames.iter().enumerate() {
            if frame.len() != self.points.len() {
                return Err(Error::Document(format!(
                    "frame {ti} has {} matrices for {} points",
                    frame.len(),
                    self.points.len()
                )));
            }
            for (pi, m) in frame.iter().enumerate() {
                if m.len() != self.n * self.n {
                    return Err(Error::Document(format!(
                        "frame {ti}, point '{}': matrix has {} entries, expected {}",
                        self.points[pi].id,
                        m.len(),
                        self.n * self.n
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn base(&self) -> Result<Arc<SampledBase>> {
        self.validate()?;
        SampledBase::new(
            self.n,
            self.points.iter().map(|p| p.id.clone()).collect(),
            self.points.iter().map(|p| p.weight).collect(),
        )
    }

    pub fn to_metric_path(&self) -> Result<MetricPath> {
        let base = self.base()?;
        let frames = self
            .frames
            .iter()
            .map(|frame| {
                let values = frame
                    .iter()
                    .zip(&self.points)
                    .map(|(m, p)| {
                        SpdMatrix::from_row_major(self.n, m).map_err(|e| e.at_point(&p.id))
                    })
                    .collect::<Result<Vec<_>>>()?;
                MetricField::new(base.clone(), values)
            })
            .collect::<Result<Vec<_>>>()?;
        MetricPath::new(base, self.times.clone(), frames)
    }
}

/// Reads and deserializes a JSON document, reporting parse positions.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Document(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        Error::Document(format!(
            "{}:{}:{}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

/// Serializes a document as pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("serializable document");
    out.push('\n');
    out
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json_string(value))
        .map_err(|e| Error::Document(format!("{}: {e}", path.display())))
}

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of a seeded cluster. Preserved verbatim from the seed labels.
pub type ClusterId = u32;

/// Per-point label: `-1` marks an anomaly (or an unassigned point),
/// non-negative values are cluster ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct Label(i64);

impl Label {
    pub const ANOMALY: Label = Label(-1);

    pub fn new(value: i64) -> Result<Self> {
        if value < -1 || value > i64::from(ClusterId::MAX) {
            return Err(Error::InvalidLabel(value));
        }
        Ok(Label(value))
    }

    pub fn cluster(id: ClusterId) -> Self {
        Label(i64::from(id))
    }

    pub fn value(self) -> i64 {
        self.0
    }

    pub fn is_anomaly(self) -> bool {
        self.0 == -1
    }

    pub fn as_cluster(self) -> Option<ClusterId> {
        ClusterId::try_from(self.0).ok()
    }
}

impl TryFrom<i64> for Label {
    type Error = Error;

    fn try_from(value: i64) -> Result<Self> {
        Label::new(value)
    }
}

impl From<Label> for i64 {
    fn from(label: Label) -> i64 {
        label.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An owned observation: non-empty, all entries finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        if let Some((coord, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite {
                point: 0,
                coord,
                value,
            });
        }
        Ok(FeatureVector(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for FeatureVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for FeatureVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        FeatureVector::new(values)
    }
}

impl From<FeatureVector> for Vec<f64> {
    fn from(v: FeatureVector) -> Vec<f64> {
        v.0
    }
}

/// Rows of equal-dimension feature vectors with dense ids `0..n`, stored
/// row-major, plus optional ground-truth labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    values: Vec<f64>,
    truth: Option<Vec<Label>>,
}

impl Dataset {
    pub fn new(dim: usize, values: Vec<f64>, truth: Option<Vec<Label>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        if values.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if values.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: values.len() % dim,
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                point: i / dim,
                coord: i % dim,
                value: values[i],
            });
        }
        let n = values.len() / dim;
        if let Some(t) = &truth {
            if t.len() != n {
                return Err(Error::LengthMismatch {
                    left: n,
                    right: t.len(),
                });
            }
        }
        Ok(Dataset { dim, values, truth })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>, truth: Option<Vec<Label>>) -> Result<Self> {
        let dim = rows.first().map(Vec::len).ok_or(Error::EmptyDataset)?;
        let mut values = Vec::with_capacity(rows.len() * dim);
        for row in &rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Dataset::new(dim, values, truth)
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, id: usize) -> &[f64] {
        &self.values[id * self.dim..(id + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.dim)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn truth(&self) -> Option<&[Label]> {
        self.truth.as_deref()
    }

    pub fn with_truth(mut self, truth: Option<Vec<Label>>) -> Result<Self> {
        if let Some(t) = &truth {
            if t.len() != self.len() {
                return Err(Error::LengthMismatch {
                    left: self.len(),
                    right: t.len(),
                });
            }
        }
        self.truth = truth;
        Ok(self)
    }

    /// Applies `x -> scale * x + shift` to every coordinate.
    pub fn affine(&self, scale: f64, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: shift.len(),
            });
        }
        let values = self
            .values
            .chunks_exact(self.dim)
            .flat_map(|p| p.iter().zip(shift).map(|(x, t)| scale * x + t))
            .collect();
        Dataset::new(self.dim, values, self.truth.clone())
    }
}

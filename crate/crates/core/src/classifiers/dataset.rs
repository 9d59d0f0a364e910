use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ground-truth class; `0 = benign`, `1 = malignant` on disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Class {
    Benign,
    Malignant,
}

impl Class {
    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(Class::Benign),
            1 => Ok(Class::Malignant),
            other => Err(Error::InvalidArgument(format!("label must be 0 or 1, got {other}"))),
        }
    }

    pub fn code(&self) -> u8 {
        match self {
            Class::Benign => 0,
            Class::Malignant => 1,
        }
    }

    pub fn target(&self) -> f64 {
        self.code() as f64
    }

    /// `-1` for benign, `+1` for malignant.
    pub fn sign(&self) -> f64 {
        match self {
            Class::Benign => -1.0,
            Class::Malignant => 1.0,
        }
    }
}

/// Named feature matrix with binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    feature_names: Vec<String>,
    rows: Vec<Vec<f64>>,
    labels: Vec<Class>,
}

impl LabeledDataset {
    pub fn new(feature_names: Vec<String>, rows: Vec<Vec<f64>>, labels: Vec<Class>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len(),
                actual: labels.len(),
            });
        }
        let d = feature_names.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!("row {i} has a non-finite entry")));
            }
        }
        Ok(Self {
            feature_names,
            rows,
            labels,
        })
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn labels(&self) -> &[Class] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }

    /// `(benign, malignant)` counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let m = self.labels.iter().filter(|&&c| c == Class::Malignant).count();
        (self.labels.len() - m, m)
    }

    pub fn has_both_classes(&self) -> bool {
        let (b, m) = self.class_counts();
        b > 0 && m > 0
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            feature_names: self.feature_names.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    pub fn select_columns(&self, columns: &[usize]) -> Result<Self> {
        if let Some(&bad) = columns.iter().find(|&&c| c >= self.dim()) {
            return Err(Error::OutOfBounds(format!(
                "column {bad} of a {}-feature dataset",
                self.dim()
            )));
        }
        Ok(Self {
            feature_names: columns.iter().map(|&c| self.feature_names[c].clone()).collect(),
            rows: self
                .rows
                .iter()
                .map(|r| columns.iter().map(|&c| r[c]).collect())
                .collect(),
            labels: self.labels.clone(),
        })
    }

    pub fn map_rows(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Self {
        Self {
            feature_names: self.feature_names.clone(),
            rows: self.rows.iter().map(|r| f(r)).collect(),
            labels: self.labels.clone(),
        }
    }
}

/// Per-feature min-max scaling to `[0, 1]` using training extremes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

impl Normalization {
    pub fn fit(data: &LabeledDataset) -> Self {
        let d = data.dim();
        let mut mins = vec![f64::INFINITY; d];
        let mut maxs = vec![f64::NEG_INFINITY; d];
        for row in data.rows() {
            for (k, &v) in row.iter().enumerate() {
                mins[k] = mins[k].min(v);
                maxs[k] = maxs[k].max(v);
            }
        }
        if data.is_empty() {
            mins.fill(0.0);
            maxs.fill(1.0);
        }
        Self { mins, maxs }
    }

    /// Leaves values unchanged.
    pub fn identity(dim: usize) -> Self {
        Self {
            mins: vec![0.0; dim],
            maxs: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.mins.len()
    }

    /// Scales one row; constant columns map to 0.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mins.iter().zip(&self.maxs))
            .map(|(&v, (&lo, &hi))| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 })
            .collect()
    }

    pub fn apply_dataset(&self, data: &LabeledDataset) -> LabeledDataset {
        data.map_rows(|r| self.apply(r))
    }
}

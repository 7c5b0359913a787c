//! Column-stacked datasets, preprocessing and synthetic union-of-subspaces data.
//!
//! Every downstream module assumes unit-norm columns; construct through
//! [`DataMatrix::new`] and call [`normalize_columns`] (or use the synthetic
//! generator, which normalizes for you).

mod csv_io;
mod pca;
mod synth;

pub use csv_io::{load_csv, read_csv, save_csv, write_csv, CsvOptions};
pub use pca::{pca, pca_project, Pca};
pub use synth::{synth_union_of_subspaces, SubspaceSpec};

use nalgebra::{DMatrix, DVector, DVectorView};

use crate::error::{Error, Result};

/// Columns with norm below this are treated as zero.
pub const ZERO_NORM: f64 = 1e-14;

/// A `D x N` matrix whose columns are samples, with optional class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    points: DMatrix<f64>,
    labels: Option<Vec<usize>>,
}

impl DataMatrix {
    pub fn new(points: DMatrix<f64>, labels: Option<Vec<usize>>) -> Result<Self> {
        if points.nrows() == 0 || points.ncols() == 0 {
            return Err(Error::InvalidData(format!(
                "empty matrix ({}x{})",
                points.nrows(),
                points.ncols()
            )));
        }
        if let Some(l) = &labels {
            if l.len() != points.ncols() {
                return Err(Error::LengthMismatch(l.len(), points.ncols()));
            }
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("non-finite entry".into()));
        }
        Ok(DataMatrix { points, labels })
    }

    /// Builds a dataset from sample vectors (each of length `D`).
    pub fn from_columns(columns: &[Vec<f64>], labels: Option<Vec<usize>>) -> Result<Self> {
        let n = columns.len();
        let d = columns.first().map_or(0, Vec::len);
        if let Some((j, c)) = columns.iter().enumerate().find(|(_, c)| c.len() != d) {
            return Err(Error::RaggedRows {
                line: j + 1,
                found: c.len(),
                expected: d,
            });
        }
        let points = DMatrix::from_fn(d, n, |i, j| columns[j][i]);
        Self::new(points, labels)
    }

    pub fn dim(&self) -> usize {
        self.points.nrows()
    }

    pub fn len(&self) -> usize {
        self.points.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.points.ncols() == 0
    }

    pub fn points(&self) -> &DMatrix<f64> {
        &self.points
    }

    pub fn column(&self, j: usize) -> DVectorView<'_, f64> {
        self.points.column(j)
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn with_labels(mut self, labels: Option<Vec<usize>>) -> Result<Self> {
        if let Some(l) = &labels {
            if l.len() != self.len() {
                return Err(Error::LengthMismatch(l.len(), self.len()));
            }
        }
        self.labels = labels;
        Ok(self)
    }

    /// Copies the listed columns (in the given order) into a new `D x M` matrix.
    pub fn select_columns(&self, indices: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim(), indices.len(), |i, j| {
            self.points[(i, indices[j])]
        })
    }

    /// Gram matrix `X^T X` of inner products between samples.
    pub fn gram(&self) -> DMatrix<f64> {
        self.points.transpose() * &self.points
    }

    pub fn into_parts(self) -> (DMatrix<f64>, Option<Vec<usize>>) {
        (self.points, self.labels)
    }
}

/// Scales every column to unit Euclidean norm.
pub fn normalize_columns(m: &DataMatrix) -> Result<DataMatrix> {
    let mut points = m.points.clone();
    for (j, mut col) in points.column_iter_mut().enumerate() {
        let norm = col.norm();
        if norm < ZERO_NORM {
            return Err(Error::ZeroColumn(j));
        }
        // Leave exact unit columns untouched so normalization is idempotent bitwise.
        if norm != 1.0 {
            col /= norm;
        }
    }
    Ok(DataMatrix {
        points,
        labels: m.labels.clone(),
    })
}

pub(crate) fn unit(v: DVector<f64>) -> Option<DVector<f64>> {
    let n = v.norm();
    (n >= ZERO_NORM).then(|| v / n)
}

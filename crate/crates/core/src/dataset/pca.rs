use nalgebra::{DMatrix, DVector};

use super::DataMatrix;
use crate::error::{Error, Result};

/// A fitted principal component projection.
#[derive(Debug, Clone)]
pub struct Pca {
    /// Per-feature mean that was subtracted (length `D`).
    pub mean: DVector<f64>,
    /// `D x k` principal directions, ordered by descending singular value.
    pub components: DMatrix<f64>,
    /// All singular values of the centered data, descending.
    pub singular_values: Vec<f64>,
    pub projected: DataMatrix,
}

impl Pca {
    /// Fraction of total variance retained by the kept components.
    pub fn captured_variance(&self) -> f64 {
        let k = self.components.ncols();
        let total: f64 = self.singular_values.iter().map(|s| s * s).sum();
        if total == 0.0 {
            return 1.0;
        }
        self.singular_values[..k].iter().map(|s| s * s).sum::<f64>() / total
    }
}

/// Centers the data and projects it onto its top `target_dim` principal directions.
pub fn pca(m: &DataMatrix, target_dim: usize) -> Result<Pca> {
    let (d, n) = (m.dim(), m.len());
    let max = d.min(n);
    if target_dim == 0 || target_dim > max {
        return Err(Error::BadDim {
            target: target_dim,
            max,
        });
    }
    let mean = m.points().column_mean();
    let mut centered = m.points().clone();
    for mut col in centered.column_iter_mut() {
        col -= &mean;
    }

    let svd = centered.clone().svd(true, false);
    let u = svd
        .u
        .as_ref()
        .ok_or_else(|| Error::Lp("SVD failed".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .total_cmp(&svd.singular_values[a])
            .then(a.cmp(&b))
    });
    let singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();

    let mut components = DMatrix::zeros(d, target_dim);
    for (c, &i) in order.iter().take(target_dim).enumerate() {
        let mut dir = u.column(i).into_owned();
        // Sign convention: the largest-magnitude entry is positive.
        let pivot = dir
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |best, (r, v)| {
                if v.abs() > best.1.abs() {
                    (r, *v)
                } else {
                    best
                }
            })
            .1;
        if pivot < 0.0 {
            dir.neg_mut();
        }
        components.set_column(c, &dir);
    }

    let projected = components.transpose() * centered;
    let projected = DataMatrix::new(projected, m.labels().map(<[usize]>::to_vec))?;
    Ok(Pca {
        mean,
        components,
        singular_values,
        projected,
    })
}

pub fn pca_project(m: &DataMatrix, target_dim: usize) -> Result<DataMatrix> {
    pca(m, target_dim).map(|p| p.projected)
}

//! Clustering and selection quality measures.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `counts[(i, j)] = |C_i ∩ G_j|`, square and zero-padded to the larger label count.
#[derive(Debug, Clone, PartialEq)]
pub struct ContingencyTable {
    pub counts: DMatrix<usize>,
    pub class_sizes: Vec<usize>,
    pub group_sizes: Vec<usize>,
    /// Distinct truth labels in row order.
    pub classes: Vec<usize>,
    /// Distinct predicted labels in column order.
    pub groups: Vec<usize>,
}

fn relabel(labels: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let distinct: Vec<usize> = labels
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let rank: BTreeMap<usize, usize> = distinct.iter().enumerate().map(|(r, &l)| (l, r)).collect();
    (labels.iter().map(|l| rank[l]).collect(), distinct)
}

impl ContingencyTable {
    pub fn new(truth: &[usize], pred: &[usize]) -> Result<Self> {
        if truth.len() != pred.len() {
            return Err(Error::LengthMismatch(truth.len(), pred.len()));
        }
        let (t, classes) = relabel(truth);
        let (p, groups) = relabel(pred);
        let n = classes.len().max(groups.len());
        let mut counts = DMatrix::zeros(n, n);
        for (&i, &j) in t.iter().zip(&p) {
            counts[(i, j)] += 1;
        }
        let class_sizes = (0..n).map(|i| counts.row(i).sum()).collect();
        let group_sizes = (0..n).map(|j| counts.column(j).sum()).collect();
        Ok(ContingencyTable {
            counts,
            class_sizes,
            group_sizes,
            classes,
            groups,
        })
    }

    pub fn n(&self) -> usize {
        self.counts.nrows()
    }

    pub fn total(&self) -> usize {
        self.counts.sum()
    }
}

/// Maximum-weight perfect matching on a square matrix; returns `col[i]` for each row.
pub fn max_weight_assignment(w: &DMatrix<f64>) -> Vec<usize> {
    let n = w.nrows();
    assert_eq!(n, w.ncols(), "assignment needs a square matrix");
    if n == 0 {
        return Vec::new();
    }
    // Shortest augmenting path with potentials on cost = -w, 1-based with a virtual row/col 0.
    let cost = |i: usize, j: usize| -w[(i - 1, j - 1)];
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0, j) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col = vec![0; n];
    for j in 1..=n {
        col[owner[j] - 1] = j - 1;
    }
    col
}

fn matched_sum(w: &DMatrix<f64>) -> f64 {
    max_weight_assignment(w)
        .iter()
        .enumerate()
        .map(|(i, &j)| w[(i, j)])
        .sum()
}

/// Percentage of points correctly labeled under the best matching of groups to classes.
pub fn clustering_accuracy(truth: &[usize], pred: &[usize]) -> Result<f64> {
    let t = ContingencyTable::new(truth, pred)?;
    if t.total() == 0 {
        return Ok(100.0);
    }
    let w = t.counts.map(|c| c as f64);
    Ok(100.0 * matched_sum(&w) / t.total() as f64)
}

/// Per-pair F measures `F[(i, j)]` between class `i` and group `j`.
pub fn fscore_matrix(t: &ContingencyTable) -> DMatrix<f64> {
    DMatrix::from_fn(t.n(), t.n(), |i, j| {
        let nij = t.counts[(i, j)];
        if nij == 0 {
            return 0.0;
        }
        let p = nij as f64 / t.group_sizes[j] as f64;
        let r = nij as f64 / t.class_sizes[i] as f64;
        2.0 * p * r / (p + r)
    })
}

/// F-score averaged over classes under the best matching, in percent.
pub fn clustering_fscore(truth: &[usize], pred: &[usize]) -> Result<f64> {
    let t = ContingencyTable::new(truth, pred)?;
    if t.n() == 0 {
        return Ok(100.0);
    }
    Ok(100.0 * matched_sum(&fscore_matrix(&t)) / t.n() as f64)
}

/// `1 - entropy` of the class proportions, with the logarithm taken in base `n = counts.len()`.
pub fn imbalance(counts: &[usize]) -> Result<f64> {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(Error::EmptySelection);
    }
    let n = counts.len();
    if n == 1 {
        return Ok(0.0);
    }
    let entropy: f64 = counts
        .iter()
        .filter(|&&s| s > 0)
        .map(|&s| {
            let p = s as f64 / total as f64;
            -p * p.ln()
        })
        .sum::<f64>()
        / (n as f64).ln();
    Ok((1.0 - entropy).clamp(0.0, 1.0))
}

/// Selected counts per class `0..n_classes` for the given exemplar indices.
pub fn class_counts(indices: &[usize], labels: &[usize], n_classes: usize) -> Vec<usize> {
    let mut c = vec![0; n_classes];
    for &i in indices {
        c[labels[i]] += 1;
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubspacePreserving {
    /// Mean fraction of l1 mass on same-class exemplars over codes with nonzero mass.
    pub rate: f64,
    pub scored: usize,
    /// Codes with zero l1 mass, left out of `rate`.
    pub zero_codes: usize,
}

/// `codes[j][i]` is the coefficient of exemplar `i` in the code of point `j`.
pub fn subspace_preserving_rate(
    codes: &[Vec<f64>],
    exemplar_labels: &[usize],
    point_labels: &[usize],
) -> Result<SubspacePreserving> {
    if codes.len() != point_labels.len() {
        return Err(Error::LengthMismatch(codes.len(), point_labels.len()));
    }
    let mut sum = 0.0;
    let mut scored = 0;
    let mut zero_codes = 0;
    for (code, &l) in codes.iter().zip(point_labels) {
        if code.len() != exemplar_labels.len() {
            return Err(Error::LengthMismatch(code.len(), exemplar_labels.len()));
        }
        let total: f64 = code.iter().map(|c| c.abs()).sum();
        if total == 0.0 {
            zero_codes += 1;
            continue;
        }
        let same: f64 = code
            .iter()
            .zip(exemplar_labels)
            .filter(|(_, &e)| e == l)
            .map(|(c, _)| c.abs())
            .sum();
        sum += same / total;
        scored += 1;
    }
    Ok(SubspacePreserving {
        rate: if scored == 0 {
            0.0
        } else {
            sum / scored as f64
        },
        scored,
        zero_codes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: Option<f64>,
    pub fscore: Option<f64>,
    pub imbalance: Option<f64>,
    pub sp_rate: Option<f64>,
}

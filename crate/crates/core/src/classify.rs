//! Sparse-representation classification over labeled exemplars: each point
//! takes the class whose exemplars reconstruct it with the smallest residual.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cluster::ClusterAssignment;
use crate::dataset::DataMatrix;
use crate::error::{Error, Result};
use crate::lasso::{solve_lasso_batch, SolverOptions, SparseCode};
use crate::selfrep::exemplar_dictionary;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExemplars {
    /// Exemplar indices in dictionary order.
    pub indices: Vec<usize>,
    pub class_of: BTreeMap<usize, usize>,
    /// Sorted class ids.
    pub classes: Vec<usize>,
}

impl LabeledExemplars {
    /// `pairs` are `(index, class)`; when `classes` is given every one of them
    /// must have an exemplar.
    pub fn new(pairs: &[(usize, usize)], classes: Option<&[usize]>) -> Result<Self> {
        let mut seen = HashSet::new();
        for &(i, _) in pairs {
            if !seen.insert(i) {
                return Err(Error::InvalidParam(format!("exemplar {i} listed twice")));
            }
        }
        let present: BTreeSet<usize> = pairs.iter().map(|&(_, c)| c).collect();
        let classes: Vec<usize> = match classes {
            Some(expected) => {
                if let Some(&missing) = expected.iter().find(|c| !present.contains(c)) {
                    return Err(Error::NoExemplarsForClass(missing));
                }
                let mut all: BTreeSet<usize> = expected.iter().copied().collect();
                all.extend(&present);
                all.into_iter().collect()
            }
            None => present.into_iter().collect(),
        };
        if classes.is_empty() {
            return Err(Error::InvalidParam("no labeled exemplars".into()));
        }
        Ok(LabeledExemplars {
            indices: pairs.iter().map(|&(i, _)| i).collect(),
            class_of: pairs.iter().copied().collect(),
            classes,
        })
    }

    /// Labels the given indices from the dataset's label column; every class
    /// present in the dataset must be covered.
    pub fn from_dataset(data: &DataMatrix, indices: &[usize]) -> Result<Self> {
        let labels = data
            .labels()
            .ok_or_else(|| Error::InvalidData("dataset has no labels".into()))?;
        let pairs = indices
            .iter()
            .map(|&i| {
                labels
                    .get(i)
                    .map(|&l| (i, l))
                    .ok_or_else(|| Error::InvalidParam(format!("exemplar {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        let classes: Vec<usize> = labels
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        Self::new(&pairs, Some(&classes))
    }

    /// Parses `{"index": class, ...}`.
    pub fn from_json(s: &str, classes: Option<&[usize]>) -> Result<Self> {
        let map: BTreeMap<String, usize> = serde_json::from_str(s)?;
        let pairs = map
            .into_iter()
            .map(|(k, c)| {
                k.trim()
                    .parse::<usize>()
                    .map(|i| (i, c))
                    .map_err(|e| Error::InvalidParam(format!("exemplar key {k:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(&pairs, classes)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// `||x - sum_{i in class} c_i a_i||` for each class, in `classes` order.
pub fn class_residuals(
    data: &DataMatrix,
    x: usize,
    code: &SparseCode,
    ex: &LabeledExemplars,
) -> Vec<f64> {
    ex.classes
        .iter()
        .map(|&class| {
            let mut r: DVector<f64> = data.column(x).into_owned();
            for (pos, &i) in ex.indices.iter().enumerate() {
                let c = code.coeffs[pos];
                if c != 0.0 && ex.class_of[&i] == class {
                    r.axpy(-c, &data.column(i), 1.0);
                }
            }
            r.norm()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub assignment: ClusterAssignment,
    pub codes: Vec<SparseCode>,
    /// Per-point residual for each class in `LabeledExemplars::classes` order.
    pub residuals: Vec<Vec<f64>>,
}

pub fn src_classify(
    data: &DataMatrix,
    ex: &LabeledExemplars,
    lambda: f64,
    opts: &SolverOptions,
) -> Result<Classification> {
    if ex.is_empty() {
        return Err(Error::InvalidParam("no labeled exemplars".into()));
    }
    let dict = exemplar_dictionary(data, &ex.indices)?;
    let codes = solve_lasso_batch(&dict, data.points(), lambda, opts)?;
    let residuals: Vec<Vec<f64>> = (0..data.len())
        .into_par_iter()
        .map(|j| class_residuals(data, j, &codes[j], ex))
        .collect();
    let labels = (0..data.len())
        .map(|j| {
            if let Some(&c) = ex.class_of.get(&j) {
                return c;
            }
            let r = &residuals[j];
            let mut best = 0;
            for k in 1..r.len() {
                if r[k] < r[best] {
                    best = k;
                }
            }
            ex.classes[best]
        })
        .collect();
    Ok(Classification {
        assignment: ClusterAssignment {
            labels,
            n_clusters: ex.classes.len(),
            isolated: Vec::new(),
        },
        codes,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{synth_union_of_subspaces, SubspaceSpec};
    use crate::ffs::{ffs_lazy, FfsOptions};

    #[test]
    fn subspace_preserving_code_residuals() {
        let data = DataMatrix::from_columns(
            &[
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
                vec![0.6, 0.8, 0.0],
            ],
            None,
        )
        .unwrap();
        let ex = LabeledExemplars::new(&[(0, 0), (1, 0), (2, 1)], None).unwrap();
        let code = SparseCode {
            coeffs: vec![0.6, 0.8, 0.0],
            residual: vec![0.0; 3],
            objective: 0.0,
            gap: 0.0,
            sweeps: 0,
        };
        let r = class_residuals(&data, 3, &code, &ex);
        assert!(r[0].abs() < 1e-15);
        assert!((r[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_code_ties_to_lowest_class() {
        // At lambda below the threshold every non-exemplar code is zero.
        let data =
            DataMatrix::from_columns(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.6, 0.8]], None)
                .unwrap();
        let ex = LabeledExemplars::new(&[(1, 4), (0, 2)], None).unwrap();
        let out = src_classify(&data, &ex, 1.1, &SolverOptions::default()).unwrap();
        assert!(out.codes[2].coeffs.iter().all(|&c| c == 0.0));
        assert!(out.residuals[2].iter().all(|&r| (r - 1.0).abs() < 1e-12));
        assert_eq!(out.assignment.labels, vec![2, 4, 2]);
    }

    #[test]
    fn missing_class_and_duplicates() {
        assert!(matches!(
            LabeledExemplars::new(&[(0, 0)], Some(&[0, 1])),
            Err(Error::NoExemplarsForClass(1))
        ));
        assert!(LabeledExemplars::new(&[(0, 0), (0, 1)], None).is_err());
    }

    #[test]
    fn json_labels() {
        let ex = LabeledExemplars::from_json(r#"{"4": 1, "2": 0}"#, None).unwrap();
        assert_eq!(ex.class_of[&4], 1);
        assert_eq!(ex.classes, vec![0, 1]);
    }

    #[test]
    fn classifies_independent_subspaces() {
        let spec = SubspaceSpec {
            ambient_dim: 10,
            dims: vec![3, 2, 4],
            counts: vec![30, 12, 50],
            noise_sigma: 0.0,
            seed: 5,
        };
        let data = synth_union_of_subspaces(&spec).unwrap();
        let sel = ffs_lazy(&data, 1e4, 9, 2, &FfsOptions::default()).unwrap();
        let ex = LabeledExemplars::from_dataset(&data, &sel.indices).unwrap();
        let out = src_classify(&data, &ex, 1e4, &SolverOptions::default()).unwrap();
        assert_eq!(out.assignment.labels, data.labels().unwrap());
    }
}

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{normalize_columns, DataMatrix};
use crate::error::{Error, Result};
use crate::rng::{seeded, Rng};

/// Parameters for sampling points from a union of random linear subspaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceSpec {
    pub ambient_dim: usize,
    pub dims: Vec<usize>,
    pub counts: Vec<usize>,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SubspaceSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.ambient_dim == 0 {
            return bad("ambient dimension must be positive".into());
        }
        if self.dims.is_empty() {
            return bad("at least one subspace is required".into());
        }
        if self.dims.len() != self.counts.len() {
            return bad(format!(
                "{} dims but {} counts",
                self.dims.len(),
                self.counts.len()
            ));
        }
        for (l, (&d, &n)) in self.dims.iter().zip(&self.counts).enumerate() {
            if d == 0 || d > self.ambient_dim {
                return bad(format!(
                    "subspace {l}: dim {d} not in 1..={}",
                    self.ambient_dim
                ));
            }
            if n < d {
                return bad(format!("subspace {l}: count {n} < dim {d}"));
            }
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad(format!("noise sigma {} must be >= 0", self.noise_sigma));
        }
        Ok(())
    }

    /// Random subspaces are independent almost surely iff their dimensions fit.
    pub fn is_independent(&self) -> bool {
        self.dims.iter().sum::<usize>() <= self.ambient_dim
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

fn gaussian_matrix(rng: &mut Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Orthonormal basis of a uniformly random `d`-dimensional subspace of `R^D`.
pub(crate) fn random_basis(rng: &mut Rng, ambient: usize, d: usize) -> DMatrix<f64> {
    gaussian_matrix(rng, ambient, d).qr().q()
}

/// Samples `counts[l]` points from each random subspace `l`; labels are subspace ids.
///
/// Columns are grouped by subspace, in subspace order.
pub fn synth_union_of_subspaces(spec: &SubspaceSpec) -> Result<DataMatrix> {
    spec.validate()?;
    let mut rng = seeded(spec.seed);
    let bases: Vec<DMatrix<f64>> = spec
        .dims
        .iter()
        .map(|&d| random_basis(&mut rng, spec.ambient_dim, d))
        .collect();

    let total = spec.total();
    let mut points = DMatrix::zeros(spec.ambient_dim, total);
    let mut labels = Vec::with_capacity(total);
    let mut col = 0;
    for (l, (basis, &count)) in bases.iter().zip(&spec.counts).enumerate() {
        let d = basis.ncols();
        for _ in 0..count {
            // Uniform on the unit sphere of R^d, then mapped into the subspace.
            let a = loop {
                let g = DVector::from_fn(d, |_, _| StandardNormal.sample(&mut rng));
                if let Some(u) = super::unit(g) {
                    break u;
                }
            };
            let mut x = basis * a;
            if spec.noise_sigma > 0.0 {
                for v in x.iter_mut() {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    *v += spec.noise_sigma * z;
                }
            }
            points.set_column(col, &x);
            labels.push(l);
            col += 1;
        }
    }
    normalize_columns(&DataMatrix::new(points, Some(labels))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rank(m: &DMatrix<f64>, tol: f64) -> usize {
        m.clone().svd(false, false).rank(tol)
    }

    fn class_block(m: &DataMatrix, class: usize) -> DMatrix<f64> {
        let idx: Vec<usize> = (0..m.len())
            .filter(|&j| m.labels().unwrap()[j] == class)
            .collect();
        m.select_columns(&idx)
    }

    fn fig2_spec() -> SubspaceSpec {
        SubspaceSpec {
            ambient_dim: 5,
            dims: vec![3, 3],
            counts: vec![10, 90],
            noise_sigma: 0.0,
            seed: 7,
        }
    }

    #[test]
    fn imbalanced_pair_of_three_planes() {
        let m = synth_union_of_subspaces(&fig2_spec()).unwrap();
        assert_eq!(m.len(), 100);
        assert_eq!(m.dim(), 5);
        for j in 0..m.len() {
            assert!((m.column(j).norm() - 1.0).abs() < 1e-12);
        }
        assert_eq!(rank(&class_block(&m, 0), 1e-10), 3);
        assert_eq!(rank(&class_block(&m, 1), 1e-10), 3);
        let labels = m.labels().unwrap();
        assert_eq!(labels.iter().filter(|&&l| l == 0).count(), 10);
    }

    #[test]
    fn full_space_has_full_rank() {
        let spec = SubspaceSpec {
            ambient_dim: 4,
            dims: vec![4],
            counts: vec![20],
            noise_sigma: 0.0,
            seed: 3,
        };
        let m = synth_union_of_subspaces(&spec).unwrap();
        assert_eq!(rank(m.points(), 1e-10), 4);
    }

    #[test]
    fn deterministic_given_seed() {
        let a = synth_union_of_subspaces(&fig2_spec()).unwrap();
        let b = synth_union_of_subspaces(&fig2_spec()).unwrap();
        assert_eq!(a, b);
        let mut other = fig2_spec();
        other.seed = 8;
        assert_ne!(a, synth_union_of_subspaces(&other).unwrap());
    }

    #[test]
    fn noiseless_points_lie_in_their_subspace() {
        let spec = SubspaceSpec {
            ambient_dim: 12,
            dims: vec![2, 3, 4],
            counts: vec![15, 20, 25],
            noise_sigma: 0.0,
            seed: 11,
        };
        let m = synth_union_of_subspaces(&spec).unwrap();
        for class in 0..3 {
            let block = class_block(&m, class);
            let d = spec.dims[class];
            // Basis from the first d points; every other point must be in their span.
            let q = block.columns(0, d).into_owned().qr().q();
            for x in block.column_iter() {
                let resid = x - &q * (q.transpose() * x);
                assert!(resid.norm() < 1e-10);
            }
        }
    }

    #[test]
    fn validation() {
        let mut s = fig2_spec();
        s.dims = vec![3];
        s.counts = vec![2];
        assert!(matches!(
            synth_union_of_subspaces(&s),
            Err(Error::InvalidSpec(_))
        ));
        let mut s = fig2_spec();
        s.dims = vec![6, 1];
        assert!(s.validate().is_err());
        let mut s = fig2_spec();
        s.noise_sigma = -1.0;
        assert!(s.validate().is_err());
        assert!(!fig2_spec().is_independent());
    }
}

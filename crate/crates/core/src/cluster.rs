//! Exemplar-based subspace clustering: code every point over the exemplars,
//! connect each point to its `t` most correlated codes, and cut the graph
//! spectrally.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::DataMatrix;
use crate::error::{Error, Result};
use crate::ffs::{ffs_lazy, ExemplarSet, FfsOptions};
use crate::lasso::{solve_lasso_batch, SolverOptions, SparseCode};
use crate::rng::{seeded, Rng};
use crate::selfrep::exemplar_dictionary;

/// Codes with a smaller Euclidean norm carry no direction.
pub const ZERO_CODE_NORM: f64 = 1e-12;

/// `A = W + W^T` for a 0/1 neighbor matrix `W`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityGraph {
    /// Out-neighbors of each point in `W`, strongest first.
    pub neighbors: Vec<Vec<usize>>,
}

impl AffinityGraph {
    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    /// Dense `A` with entries in `{0, 1, 2}`.
    pub fn affinity(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut a = DMatrix::zeros(n, n);
        for (i, nb) in self.neighbors.iter().enumerate() {
            for &j in nb {
                a[(i, j)] += 1.0;
                a[(j, i)] += 1.0;
            }
        }
        a
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub labels: Vec<usize>,
    pub n_clusters: usize,
    /// Points with no edges; they were given unit degree.
    #[serde(default)]
    pub isolated: Vec<usize>,
}

/// Exact t-nearest-neighbor graph on normalized codes under positive inner product.
///
/// Ties between equal inner products go to the lower index.
pub fn build_knn_graph<C: AsRef<[f64]> + Sync>(codes: &[C], t: usize) -> Result<AffinityGraph> {
    if t == 0 {
        return Err(Error::InvalidParam("t must be at least 1".into()));
    }
    let n = codes.len();
    let width = codes.first().map_or(0, |c| c.as_ref().len());
    let mut unit = DMatrix::zeros(width, n);
    for (j, c) in codes.iter().enumerate() {
        let c = c.as_ref();
        if c.len() != width {
            return Err(Error::LengthMismatch(c.len(), width));
        }
        let v = DVector::from_column_slice(c);
        let norm = v.norm();
        if norm < ZERO_CODE_NORM {
            return Err(Error::ZeroCode(j));
        }
        unit.set_column(j, &(v / norm));
    }
    let gram = unit.transpose() * &unit;
    let neighbors = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut cand: Vec<(usize, f64)> = (0..n)
                .filter(|&j| j != i && gram[(i, j)] > 0.0)
                .map(|j| (j, gram[(i, j)]))
                .collect();
            cand.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            cand.truncate(t);
            cand.into_iter().map(|(j, _)| j).collect()
        })
        .collect();
    Ok(AffinityGraph { neighbors })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansOptions {
    pub restarts: usize,
    pub max_iter: usize,
    /// Stop when the relative decrease in inertia falls below this.
    pub tol: f64,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        KMeansOptions {
            restarts: 10,
            max_iter: 300,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub labels: Vec<usize>,
    pub centers: DMatrix<f64>,
    pub inertia: f64,
}

fn sq_dist(points: &DMatrix<f64>, i: usize, centers: &DMatrix<f64>, c: usize) -> f64 {
    (0..points.ncols())
        .map(|d| (points[(i, d)] - centers[(c, d)]).powi(2))
        .sum()
}

fn nearest(points: &DMatrix<f64>, i: usize, centers: &DMatrix<f64>) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for c in 0..centers.nrows() {
        let d = sq_dist(points, i, centers, c);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn plus_plus(points: &DMatrix<f64>, k: usize, rng: &mut Rng) -> DMatrix<f64> {
    let n = points.nrows();
    let mut centers = DMatrix::zeros(k, points.ncols());
    centers.set_row(0, &points.row(rng.random_range(0..n)));
    let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(points, i, &centers, 0)).collect();
    for c in 1..k {
        let pick = match WeightedIndex::new(&d2) {
            Ok(w) => w.sample(rng),
            // All points coincide with chosen centers.
            Err(_) => rng.random_range(0..n),
        };
        centers.set_row(c, &points.row(pick));
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(sq_dist(points, i, &centers, c));
        }
    }
    centers
}

fn lloyd(points: &DMatrix<f64>, mut centers: DMatrix<f64>, opts: &KMeansOptions) -> KMeansResult {
    let (n, dim) = points.shape();
    let k = centers.nrows();
    let mut labels = vec![0; n];
    let mut prev = f64::INFINITY;
    for _ in 0..opts.max_iter {
        let mut inertia = 0.0;
        for (i, l) in labels.iter_mut().enumerate() {
            let (c, d) = nearest(points, i, &centers);
            *l = c;
            inertia += d;
        }
        let mut sums = DMatrix::<f64>::zeros(k, dim);
        let mut counts = vec![0usize; k];
        for (i, &l) in labels.iter().enumerate() {
            counts[l] += 1;
            for d in 0..dim {
                sums[(l, d)] += points[(i, d)];
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                for d in 0..dim {
                    centers[(c, d)] = sums[(c, d)] / counts[c] as f64;
                }
            } else {
                // Reseed an empty cluster at the point farthest from its center.
                let far = (0..n)
                    .map(|i| (i, sq_dist(points, i, &centers, labels[i])))
                    .fold((0, -1.0), |b, x| if x.1 > b.1 { x } else { b })
                    .0;
                centers.set_row(c, &points.row(far));
            }
        }
        if prev.is_finite() && prev - inertia <= opts.tol * prev.max(f64::MIN_POSITIVE) {
            break;
        }
        prev = inertia;
    }
    // Final assignment against the final centers.
    let mut inertia = 0.0;
    for (i, l) in labels.iter_mut().enumerate() {
        let (c, d) = nearest(points, i, &centers);
        *l = c;
        inertia += d;
    }
    KMeansResult {
        labels,
        centers,
        inertia,
    }
}

/// Seeded k-means with k-means++ starts; rows of `points` are samples.
pub fn kmeans(
    points: &DMatrix<f64>,
    k: usize,
    seed: u64,
    opts: &KMeansOptions,
) -> Result<KMeansResult> {
    let n = points.nrows();
    if k == 0 || k > n {
        return Err(Error::InvalidParam(format!(
            "k-means with k = {k} on {n} points"
        )));
    }
    let mut rng = seeded(seed);
    let mut best: Option<KMeansResult> = None;
    for _ in 0..opts.restarts.max(1) {
        let start = plus_plus(points, k, &mut rng);
        let r = lloyd(points, start, opts);
        if best.as_ref().is_none_or(|b| r.inertia < b.inertia) {
            best = Some(r);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Renumbers labels by order of first appearance.
pub fn canonical_labels(labels: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}

/// Normalized spectral clustering of `A` into `n_clusters` groups.
pub fn spectral_cluster(
    g: &AffinityGraph,
    n_clusters: usize,
    seed: u64,
) -> Result<ClusterAssignment> {
    let n = g.len();
    if n_clusters == 0 || n_clusters > n {
        return Err(Error::InvalidParam(format!(
            "n_clusters = {n_clusters} not in 1..={n}"
        )));
    }
    if g.edge_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let a = g.affinity();
    let deg: Vec<f64> = (0..n).map(|i| a.row(i).sum()).collect();
    let isolated: Vec<usize> = (0..n).filter(|&i| deg[i] == 0.0).collect();
    if n_clusters == 1 {
        return Ok(ClusterAssignment {
            labels: vec![0; n],
            n_clusters,
            isolated,
        });
    }
    let inv_sqrt: Vec<f64> = deg
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 1.0 })
        .collect();
    let m = DMatrix::from_fn(n, n, |i, j| inv_sqrt[i] * a[(i, j)] * inv_sqrt[j]);
    let eig = SymmetricEigen::new(m);
    // Largest eigenvalues of D^-1/2 A D^-1/2 are the smallest of the Laplacian.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| {
        eig.eigenvalues[y]
            .total_cmp(&eig.eigenvalues[x])
            .then(x.cmp(&y))
    });
    let mut emb = DMatrix::zeros(n, n_clusters);
    for (c, &k) in order.iter().take(n_clusters).enumerate() {
        emb.set_column(c, &eig.eigenvectors.column(k));
    }
    for mut row in emb.row_iter_mut() {
        let norm = row.norm();
        if norm > 0.0 {
            row /= norm;
        }
    }
    let km = kmeans(&emb, n_clusters, seed, &KMeansOptions::default())?;
    Ok(ClusterAssignment {
        labels: canonical_labels(&km.labels),
        n_clusters,
        isolated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscParams {
    pub lambda: f64,
    pub t: usize,
    pub n_clusters: usize,
    pub seed: u64,
    pub solver: SolverOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EscResult {
    pub assignment: ClusterAssignment,
    pub exemplars: Vec<usize>,
    pub codes: Vec<SparseCode>,
    /// Points whose code vanished; each took the cluster of its most correlated exemplar.
    pub zero_codes: Vec<usize>,
}

/// Clusters `data` using the given exemplar indices as the dictionary.
pub fn esc_with_exemplars(
    data: &DataMatrix,
    exemplars: &[usize],
    p: &EscParams,
) -> Result<EscResult> {
    if exemplars.is_empty() {
        return Err(Error::InvalidParam("no exemplars".into()));
    }
    let dict = exemplar_dictionary(data, exemplars)?;
    let codes = solve_lasso_batch(&dict, data.points(), p.lambda, &p.solver)?;
    let (kept, zero_codes): (Vec<usize>, Vec<usize>) = (0..data.len())
        .partition(|&j| DVector::from_column_slice(&codes[j].coeffs).norm() >= ZERO_CODE_NORM);
    let kept_codes: Vec<&[f64]> = kept.iter().map(|&j| &codes[j].coeffs[..]).collect();
    let graph = build_knn_graph(&kept_codes, p.t)?;
    let sub = spectral_cluster(&graph, p.n_clusters, p.seed)?;

    let mut labels = vec![usize::MAX; data.len()];
    for (pos, &j) in kept.iter().enumerate() {
        labels[j] = sub.labels[pos];
    }
    for &j in &zero_codes {
        // Most correlated exemplar in absolute value, first on ties.
        let x = data.column(j);
        let mut best = (0, f64::NEG_INFINITY);
        for (pos, &e) in exemplars.iter().enumerate() {
            let v = x.dot(&data.column(e)).abs();
            if v > best.1 {
                best = (pos, v);
            }
        }
        labels[j] = labels[exemplars[best.0]];
    }
    let isolated = sub.isolated.iter().map(|&pos| kept[pos]).collect();
    Ok(EscResult {
        assignment: ClusterAssignment {
            labels,
            n_clusters: p.n_clusters,
            isolated,
        },
        exemplars: exemplars.to_vec(),
        codes,
        zero_codes,
    })
}

/// FFS selection of `k` exemplars followed by [`esc_with_exemplars`].
pub fn esc_pipeline(
    data: &DataMatrix,
    lambda: f64,
    k: usize,
    t: usize,
    n_clusters: usize,
    seed: u64,
) -> Result<(EscResult, ExemplarSet)> {
    let params = EscParams {
        lambda,
        t,
        n_clusters,
        seed,
        solver: SolverOptions::default(),
    };
    let sel = ffs_lazy(data, lambda, k, seed, &FfsOptions::default())?;
    Ok((esc_with_exemplars(data, &sel.indices, &params)?, sel))
}

impl AsRef<[f64]> for SparseCode {
    fn as_ref(&self) -> &[f64] {
        &self.coeffs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{synth_union_of_subspaces, SubspaceSpec};
    use crate::metrics::clustering_accuracy;

    #[test]
    fn orthogonal_groups_do_not_connect() {
        let codes = vec![
            vec![1.0, 0.5, 0.0, 0.0],
            vec![0.5, 1.0, 0.0, 0.0],
            vec![1.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.2],
            vec![0.0, 0.0, 0.3, 1.0],
        ];
        let g = build_knn_graph(&codes, 3).unwrap();
        let a = g.affinity();
        for i in 0..3 {
            for j in 3..5 {
                assert_eq!(a[(i, j)], 0.0);
            }
        }
        assert_eq!(a, a.transpose());
        assert!(g.neighbors.iter().all(|nb| nb.len() <= 3));
    }

    #[test]
    fn saturated_graph() {
        let codes: Vec<Vec<f64>> = (0..5).map(|i| vec![1.0, 0.1 * i as f64]).collect();
        let g = build_knn_graph(&codes, 4).unwrap();
        let a = g.affinity();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(a[(i, j)], if i == j { 0.0 } else { 2.0 });
            }
        }
    }

    #[test]
    fn zero_code_rejected() {
        let codes = vec![vec![1.0, 0.0], vec![0.0, 0.0]];
        assert!(matches!(
            build_knn_graph(&codes, 1),
            Err(Error::ZeroCode(1))
        ));
        assert!(build_knn_graph(&codes, 0).is_err());
    }

    #[test]
    fn block_diagonal_components() {
        // Two cliques of sizes 4 and 6 with shuffled ordering.
        let truth = [0, 1, 1, 0, 1, 0, 1, 1, 0, 1];
        let neighbors = (0..10)
            .map(|i| {
                (0..10)
                    .filter(|&j| j != i && truth[j] == truth[i])
                    .collect()
            })
            .collect();
        let g = AffinityGraph { neighbors };
        let c = spectral_cluster(&g, 2, 3).unwrap();
        assert_eq!(clustering_accuracy(&truth, &c.labels).unwrap(), 100.0);
        let one = spectral_cluster(&g, 1, 3).unwrap();
        assert!(one.labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn empty_graph() {
        let g = AffinityGraph {
            neighbors: vec![vec![], vec![]],
        };
        assert!(matches!(spectral_cluster(&g, 2, 0), Err(Error::EmptyGraph)));
    }

    #[test]
    fn isolated_vertex_is_flagged() {
        let g = AffinityGraph {
            neighbors: vec![vec![1], vec![0], vec![3], vec![2], vec![]],
        };
        let c = spectral_cluster(&g, 3, 0).unwrap();
        assert_eq!(c.isolated, vec![4]);
        assert_eq!(c.labels[0], c.labels[1]);
        assert_eq!(c.labels[2], c.labels[3]);
        assert_ne!(c.labels[0], c.labels[2]);
    }

    #[test]
    fn kmeans_separates_blobs_deterministically() {
        let pts = DMatrix::from_row_slice(
            6,
            2,
            &[0.0, 0.0, 0.1, 0.0, 0.0, 0.1, 5.0, 5.0, 5.1, 5.0, 5.0, 5.1],
        );
        let a = kmeans(&pts, 2, 1, &KMeansOptions::default()).unwrap();
        let b = kmeans(&pts, 2, 1, &KMeansOptions::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(canonical_labels(&a.labels), vec![0, 0, 0, 1, 1, 1]);
        assert!((a.inertia - 4.0 * 0.02 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn independent_subspaces_cluster_perfectly() {
        let spec = SubspaceSpec {
            ambient_dim: 9,
            dims: vec![2, 3],
            counts: vec![15, 40],
            noise_sigma: 0.0,
            seed: 21,
        };
        let data = synth_union_of_subspaces(&spec).unwrap();
        let (res, sel) = esc_pipeline(&data, 1e4, 9, 3, 2, 5).unwrap();
        assert_eq!(sel.indices.len(), 9);
        let acc = clustering_accuracy(data.labels().unwrap(), &res.assignment.labels).unwrap();
        assert_eq!(acc, 100.0);
    }
}

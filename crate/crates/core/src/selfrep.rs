//! Self-representation cost of a point (and of the whole dataset) with respect
//! to an exemplar subset.
//!
//! `f(x_j, X0)` is the optimal LASSO objective of `x_j` over the atoms `X0`,
//! with `f(x_j, {}) = lambda / 2` by convention; `F(X0)` is its maximum over
//! the dataset.

use nalgebra::DVectorView;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::DataMatrix;
use crate::error::{Error, Result};
use crate::lasso::{check_lambda, solve_from, Dictionary, LassoProblem, SolverOptions, SparseCode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub per_point: Vec<f64>,
    pub sup_value: f64,
    pub argmax_index: usize,
}

impl CostReport {
    pub fn from_values(per_point: Vec<f64>) -> Self {
        let (argmax_index, sup_value) = argmax(&per_point);
        CostReport {
            per_point,
            sup_value,
            argmax_index,
        }
    }
}

/// First index attaining the maximum.
pub(crate) fn argmax(values: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &v) in values.iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

/// Dictionary made of the listed data columns, in the listed order.
pub fn exemplar_dictionary(data: &DataMatrix, exemplars: &[usize]) -> Result<Dictionary> {
    if let Some(&bad) = exemplars.iter().find(|&&i| i >= data.len()) {
        return Err(Error::InvalidParam(format!(
            "exemplar index {bad} out of range (N = {})",
            data.len()
        )));
    }
    Dictionary::new(data.select_columns(exemplars))
}

/// `f_lambda(x, X0)` for an arbitrary unit vector `x`.
pub fn f_cost(
    x: DVectorView<'_, f64>,
    exemplars: &[usize],
    data: &DataMatrix,
    lambda: f64,
    opts: &SolverOptions,
) -> Result<f64> {
    check_lambda(lambda)?;
    if exemplars.is_empty() {
        return Ok(lambda / 2.0);
    }
    let dict = exemplar_dictionary(data, exemplars)?;
    LassoProblem::new(&dict, x, lambda)?
        .solve(opts)
        .map(|c| c.objective)
}

/// `F_lambda(X0)` together with every per-point value; ties go to the lowest index.
pub fn sup_cost(
    exemplars: &[usize],
    data: &DataMatrix,
    lambda: f64,
    opts: &SolverOptions,
) -> Result<CostReport> {
    check_lambda(lambda)?;
    if exemplars.is_empty() {
        return Ok(CostReport::from_values(vec![lambda / 2.0; data.len()]));
    }
    let dict = exemplar_dictionary(data, exemplars)?;
    let values = (0..data.len())
        .into_par_iter()
        .map(|j| {
            LassoProblem::new(&dict, data.column(j), lambda)
                .and_then(|p| p.solve(opts))
                .map(|c| c.objective)
                .map_err(|e| e.at_target(j))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(CostReport::from_values(values))
}

/// `1 / max_{i != j} |<x_i, x_j>|`: below this lambda every non-exemplar costs `lambda / 2`.
///
/// Returns `f64::INFINITY` when all points are mutually orthogonal.
pub fn lambda_threshold(data: &DataMatrix) -> Result<f64> {
    let n = data.len();
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    let gram = data.gram();
    let mut mu = 0.0f64;
    for j in 0..n {
        for i in 0..j {
            mu = mu.max(gram[(i, j)].abs());
        }
    }
    Ok(if mu == 0.0 { f64::INFINITY } else { 1.0 / mu })
}

/// Lower end of the cost range, attained exactly when `±x` is an exemplar.
pub fn min_cost(lambda: f64) -> f64 {
    1.0 - 1.0 / (2.0 * lambda)
}

/// Incremental evaluator of `f(x_j, X0)` for a growing exemplar set.
///
/// Values are memoized per (point, set version), where the version is the
/// current number of exemplars; codes from the last evaluation of each point
/// seed the next solve when `warm_start` is on.
#[derive(Debug)]
pub struct CostEvaluator<'a> {
    data: &'a DataMatrix,
    lambda: f64,
    opts: SolverOptions,
    warm_start: bool,
    dictionary: Dictionary,
    exemplars: Vec<usize>,
    memo: Vec<Option<(usize, f64)>>,
    codes: Vec<Vec<f64>>,
    evaluations: usize,
}

impl<'a> CostEvaluator<'a> {
    pub fn new(data: &'a DataMatrix, lambda: f64, opts: SolverOptions) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(CostEvaluator {
            data,
            lambda,
            opts,
            warm_start: true,
            dictionary: Dictionary::empty(data.dim()),
            exemplars: Vec::new(),
            memo: vec![None; data.len()],
            codes: vec![Vec::new(); data.len()],
            evaluations: 0,
        })
    }

    pub fn warm_start(mut self, on: bool) -> Self {
        self.warm_start = on;
        self
    }

    pub fn exemplars(&self) -> &[usize] {
        &self.exemplars
    }

    pub fn version(&self) -> usize {
        self.exemplars.len()
    }

    /// Number of LASSO solves performed so far (cache hits excluded).
    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    pub fn add_exemplar(&mut self, index: usize) -> Result<()> {
        if index >= self.data.len() {
            return Err(Error::InvalidParam(format!(
                "exemplar index {index} out of range"
            )));
        }
        self.dictionary.push(self.data.column(index))?;
        self.exemplars.push(index);
        Ok(())
    }

    fn solve(&self, j: usize) -> Result<SparseCode> {
        let problem = LassoProblem::new(&self.dictionary, self.data.column(j), self.lambda)?;
        let warm = (self.warm_start && !self.codes[j].is_empty()).then(|| &self.codes[j][..]);
        solve_from(&problem, &self.opts, warm).map_err(|e| e.at_target(j))
    }

    /// `f(x_j, current set)`.
    pub fn value(&mut self, j: usize) -> Result<f64> {
        let version = self.version();
        if version == 0 {
            return Ok(self.lambda / 2.0);
        }
        if let Some((v, f)) = self.memo[j] {
            if v == version {
                return Ok(f);
            }
        }
        let code = self.solve(j)?;
        self.evaluations += 1;
        let f = code.objective;
        self.memo[j] = Some((version, f));
        self.codes[j] = code.coeffs;
        Ok(f)
    }

    /// `f(x_j, current set)` for every point, solving uncached points in parallel.
    pub fn values_all(&mut self) -> Result<Vec<f64>> {
        let version = self.version();
        if version == 0 {
            return Ok(vec![self.lambda / 2.0; self.data.len()]);
        }
        let stale: Vec<usize> = (0..self.data.len())
            .filter(|&j| !matches!(self.memo[j], Some((v, _)) if v == version))
            .collect();
        let solved = stale
            .par_iter()
            .map(|&j| self.solve(j))
            .collect::<Result<Vec<SparseCode>>>()?;
        for (&j, code) in stale.iter().zip(solved) {
            self.evaluations += 1;
            self.memo[j] = Some((version, code.objective));
            self.codes[j] = code.coeffs;
        }
        Ok(self
            .memo
            .iter()
            .map(|m| m.expect("all points evaluated").1)
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn random_unit_data(d: usize, n: usize, seed: u64) -> DataMatrix {
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = crate::rng::seeded(seed);
        let mut m = DMatrix::from_fn(d, n, |_, _| StandardNormal.sample(&mut rng));
        for mut c in m.column_iter_mut() {
            c.normalize_mut();
        }
        DataMatrix::new(m, None).unwrap()
    }

    #[test]
    fn empty_set_convention() {
        let data = random_unit_data(4, 6, 1);
        let f = f_cost(data.column(0), &[], &data, 150.0, &SolverOptions::default()).unwrap();
        assert_eq!(f, 75.0);
        let rep = sup_cost(&[], &data, 150.0, &SolverOptions::default()).unwrap();
        assert_eq!(rep.sup_value, 75.0);
        assert_eq!(rep.argmax_index, 0);
    }

    #[test]
    fn member_and_negated_member() {
        let mut data = random_unit_data(5, 6, 2);
        let opts = SolverOptions::default();
        let expected = 1.0 - 1.0 / 30.0;
        let f = f_cost(data.column(3), &[1, 3], &data, 15.0, &opts).unwrap();
        assert!((f - expected).abs() < 1e-6);

        // Replace column 4 with -x_0 and use it as the only exemplar for x_0.
        let neg = -data.column(0).into_owned();
        let (mut p, _) = data.clone().into_parts();
        p.set_column(4, &neg);
        data = DataMatrix::new(p, None).unwrap();
        let f = f_cost(data.column(0), &[4], &data, 15.0, &opts).unwrap();
        assert!((f - expected).abs() < 1e-6);
    }

    #[test]
    fn all_points_as_exemplars_hits_minimum() {
        let data = random_unit_data(3, 8, 3);
        let all: Vec<usize> = (0..8).collect();
        let rep = sup_cost(&all, &data, 20.0, &SolverOptions::default()).unwrap();
        assert!((rep.sup_value - min_cost(20.0)).abs() < 1e-6);
    }

    #[test]
    fn threshold_special_cases() {
        let e = DataMatrix::new(DMatrix::identity(2, 2), None).unwrap();
        assert_eq!(lambda_threshold(&e).unwrap(), f64::INFINITY);

        let x = DataMatrix::from_columns(&[vec![0.6, 0.8], vec![-0.6, -0.8], vec![1.0, 0.0]], None)
            .unwrap();
        assert!((lambda_threshold(&x).unwrap() - 1.0).abs() < 1e-15);

        let one = DataMatrix::from_columns(&[vec![1.0]], None).unwrap();
        assert!(matches!(
            lambda_threshold(&one),
            Err(Error::TooFewPoints(1))
        ));
    }

    #[test]
    fn evaluator_memoizes_per_version() {
        let data = random_unit_data(6, 20, 4);
        let mut ev = CostEvaluator::new(&data, 50.0, SolverOptions::default()).unwrap();
        assert_eq!(ev.value(3).unwrap(), 25.0);
        assert_eq!(ev.evaluations(), 0);
        ev.add_exemplar(0).unwrap();
        let a = ev.value(3).unwrap();
        let b = ev.value(3).unwrap();
        assert_eq!(a, b);
        assert_eq!(ev.evaluations(), 1);
        let all = ev.values_all().unwrap();
        assert_eq!(all[3], a);
        assert_eq!(ev.evaluations(), 20);
        ev.add_exemplar(7).unwrap();
        let c = ev.value(3).unwrap();
        assert!(c <= a + 1e-9);
        assert_eq!(ev.evaluations(), 21);
    }

    #[test]
    fn evaluator_matches_direct_cost() {
        let data = random_unit_data(5, 15, 5);
        let opts = SolverOptions::default();
        let mut ev = CostEvaluator::new(&data, 30.0, opts).unwrap();
        for &i in &[2, 9, 11] {
            ev.add_exemplar(i).unwrap();
            ev.values_all().unwrap();
        }
        for j in 0..15 {
            let direct = f_cost(data.column(j), &[2, 9, 11], &data, 30.0, &opts).unwrap();
            assert!((ev.value(j).unwrap() - direct).abs() < 1e-8);
        }
    }
}

//! Farthest-first exemplar selection: repeatedly add the point with the largest
//! self-representation cost. `ffs_lazy` reuses stale costs as upper bounds and
//! returns exactly what `ffs_naive` returns.

use rand::seq::index::sample;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::dataset::DataMatrix;
use crate::error::{Error, Result};
use crate::lasso::{check_lambda, SolverOptions};
use crate::rng::seeded;
use crate::selfrep::CostEvaluator;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub selected: usize,
    /// Cost of `selected` against the set before it was added (`lambda / 2` for the first pick).
    pub f_value: f64,
    /// Cost evaluations spent in this iteration.
    pub evals: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExemplarSet {
    pub indices: Vec<usize>,
    pub k: usize,
    /// `None` for selections that do not depend on lambda.
    pub lambda: Option<f64>,
    pub seed: u64,
    pub trace: Vec<TraceEntry>,
}

impl ExemplarSet {
    pub fn total_evals(&self) -> usize {
        self.trace.iter().map(|t| t.evals).sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FfsOptions {
    pub solver: SolverOptions,
    /// Replaces the seeded random first pick.
    pub first_index: Option<usize>,
    pub warm_start: bool,
}

impl Default for FfsOptions {
    fn default() -> Self {
        FfsOptions {
            solver: SolverOptions::default(),
            first_index: None,
            warm_start: true,
        }
    }
}

fn first_pick(n: usize, seed: u64, opts: &FfsOptions) -> Result<usize> {
    match opts.first_index {
        Some(i) if i >= n => Err(Error::InvalidParam(format!(
            "first index {i} out of range (N = {n})"
        ))),
        Some(i) => Ok(i),
        None => Ok(seeded(seed).random_range(0..n)),
    }
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::InvalidParam(format!("k = {k} not in 1..={n}")));
    }
    Ok(())
}

struct Selection<'a> {
    ev: CostEvaluator<'a>,
    chosen: Vec<bool>,
    out: ExemplarSet,
}

impl<'a> Selection<'a> {
    fn start(
        data: &'a DataMatrix,
        lambda: f64,
        k: usize,
        seed: u64,
        opts: &FfsOptions,
    ) -> Result<Self> {
        check_lambda(lambda)?;
        check_k(k, data.len())?;
        let first = first_pick(data.len(), seed, opts)?;
        let ev = CostEvaluator::new(data, lambda, opts.solver)?.warm_start(opts.warm_start);
        let mut s = Selection {
            ev,
            chosen: vec![false; data.len()],
            out: ExemplarSet {
                indices: Vec::with_capacity(k),
                k,
                lambda: Some(lambda),
                seed,
                trace: Vec::with_capacity(k),
            },
        };
        s.add(first, lambda / 2.0, 0)?;
        Ok(s)
    }

    fn add(&mut self, index: usize, f_value: f64, evals: usize) -> Result<()> {
        self.ev.add_exemplar(index)?;
        self.chosen[index] = true;
        self.out.indices.push(index);
        self.out.trace.push(TraceEntry {
            selected: index,
            f_value,
            evals,
        });
        Ok(())
    }
}

/// Evaluates every point against the current set at each iteration.
pub fn ffs_naive(
    data: &DataMatrix,
    lambda: f64,
    k: usize,
    seed: u64,
    opts: &FfsOptions,
) -> Result<ExemplarSet> {
    let mut s = Selection::start(data, lambda, k, seed, opts)?;
    while s.out.indices.len() < k {
        let before = s.ev.evaluations();
        let values = s.ev.values_all()?;
        let mut best: Option<(usize, f64)> = None;
        for (j, &v) in values.iter().enumerate() {
            if !s.chosen[j] && best.is_none_or(|(_, b)| v > b) {
                best = Some((j, v));
            }
        }
        let (j, v) = best.expect("k <= N leaves a candidate");
        let evals = s.ev.evaluations() - before;
        s.add(j, v, evals)?;
    }
    Ok(s.out)
}

/// Same output as [`ffs_naive`], skipping candidates whose stale cost cannot win.
///
/// Costs only decrease as the set grows, so the cost of a point from an
/// earlier iteration bounds its current cost. Candidates are scanned by
/// decreasing bound (ties by index) and the scan stops once the best fresh
/// value beats every remaining bound under the lowest-index tie rule.
pub fn ffs_lazy(
    data: &DataMatrix,
    lambda: f64,
    k: usize,
    seed: u64,
    opts: &FfsOptions,
) -> Result<ExemplarSet> {
    let mut s = Selection::start(data, lambda, k, seed, opts)?;
    // Bounds are initialized against the first pick even when no scan follows.
    let mut bound = s.ev.values_all()?;
    s.out.trace[0].evals = s.ev.evaluations();

    let n = data.len();
    while s.out.indices.len() < k {
        let before = s.ev.evaluations();
        let mut order: Vec<usize> = (0..n).filter(|&j| !s.chosen[j]).collect();
        order.sort_by(|&a, &b| bound[b].total_cmp(&bound[a]).then(a.cmp(&b)));

        let mut best = (usize::MAX, f64::NEG_INFINITY);
        for (pos, &j) in order.iter().enumerate() {
            let v = s.ev.value(j)?;
            bound[j] = v;
            if v > best.1 || (v == best.1 && j < best.0) {
                best = (j, v);
            }
            let Some(&next) = order.get(pos + 1) else {
                break;
            };
            let b = bound[next];
            if best.1 > b || (best.1 == b && best.0 < next) {
                break;
            }
        }
        let evals = s.ev.evaluations() - before;
        s.add(best.0, best.1, evals)?;
    }
    Ok(s.out)
}

/// `k` distinct indices drawn uniformly without replacement.
pub fn select_random(data: &DataMatrix, k: usize, seed: u64) -> Result<ExemplarSet> {
    if k > data.len() {
        return Err(Error::InvalidParam(format!(
            "k = {k} exceeds N = {}",
            data.len()
        )));
    }
    let indices = sample(&mut seeded(seed), data.len(), k).into_vec();
    Ok(ExemplarSet {
        indices,
        k,
        lambda: None,
        seed,
        trace: Vec::new(),
    })
}

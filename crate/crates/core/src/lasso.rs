//! ℓ1-regularized least squares over a dictionary of unit-norm atoms:
//!
//! ```text
//! min_c  ||c||_1 + (lambda / 2) ||x - A c||_2^2
//! ```
//!
//! Solved by cyclic coordinate descent with soft-thresholding. Once the
//! support stops changing the solver tries an exact solve of the KKT system
//! restricted to that support; when it verifies, the returned code is a pure
//! function of the support and signs, independent of the warm start used to
//! reach it. Every return is certified by a duality gap and a subgradient
//! check, both at most `tol`.

use nalgebra::{DMatrix, DVector, DVectorView};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Atoms and targets must have unit norm within this.
pub const UNIT_NORM_TOL: f64 = 1e-10;
/// Coefficients below this magnitude are snapped to zero after convergence.
pub const SNAP: f64 = 1e-12;
/// Coordinate sweeps attempted before switching to the homotopy solver.
pub const CD_SWEEP_BUDGET: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Bound on both the duality gap and the subgradient violation.
    pub tol: f64,
    /// Maximum number of coordinate sweeps.
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-8,
            max_iter: 100_000,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolverOptions {
            tol,
            ..Default::default()
        }
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 1.0 && !lambda.is_nan() {
        Ok(())
    } else {
        Err(Error::InvalidLambda(lambda))
    }
}

fn check_unit(v: DVectorView<'_, f64>, what: &str) -> Result<()> {
    let n = v.norm();
    if (n - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::InvalidData(format!(
            "{what} has norm {n}, expected 1"
        )));
    }
    Ok(())
}

/// A growable set of unit-norm atoms together with their Gram matrix.
#[derive(Debug, Clone)]
pub struct Dictionary {
    atoms: DMatrix<f64>,
    gram: DMatrix<f64>,
}

impl Dictionary {
    pub fn empty(dim: usize) -> Self {
        Dictionary {
            atoms: DMatrix::zeros(dim, 0),
            gram: DMatrix::zeros(0, 0),
        }
    }

    pub fn new(atoms: DMatrix<f64>) -> Result<Self> {
        for (i, col) in atoms.column_iter().enumerate() {
            check_unit(col, &format!("atom {i}"))?;
        }
        let gram = atoms.transpose() * &atoms;
        Ok(Dictionary { atoms, gram })
    }

    pub fn dim(&self) -> usize {
        self.atoms.nrows()
    }

    pub fn len(&self) -> usize {
        self.atoms.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.ncols() == 0
    }

    pub fn atoms(&self) -> &DMatrix<f64> {
        &self.atoms
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Appends one atom; the Gram matrix is extended in `O(D M)`.
    pub fn push(&mut self, atom: DVectorView<'_, f64>) -> Result<()> {
        if atom.len() != self.dim() {
            return Err(Error::LengthMismatch(atom.len(), self.dim()));
        }
        check_unit(atom, "atom")?;
        let m = self.len();
        let cross = self.atoms.transpose() * atom;
        let atoms = std::mem::replace(&mut self.atoms, DMatrix::zeros(0, 0));
        self.atoms = atoms.insert_column(m, 0.0);
        self.atoms.set_column(m, &atom);
        let gram = std::mem::replace(&mut self.gram, DMatrix::zeros(0, 0));
        let mut gram = gram.insert_column(m, 0.0).insert_row(m, 0.0);
        for i in 0..m {
            gram[(i, m)] = cross[i];
            gram[(m, i)] = cross[i];
        }
        gram[(m, m)] = atom.norm_squared();
        self.gram = gram;
        Ok(())
    }
}

/// One instance: represent `target` over `dictionary` with weight `lambda`.
#[derive(Debug, Clone, Copy)]
pub struct LassoProblem<'a> {
    pub dictionary: &'a Dictionary,
    pub target: DVectorView<'a, f64>,
    pub lambda: f64,
}

impl<'a> LassoProblem<'a> {
    pub fn new(
        dictionary: &'a Dictionary,
        target: DVectorView<'a, f64>,
        lambda: f64,
    ) -> Result<Self> {
        check_lambda(lambda)?;
        if target.len() != dictionary.dim() {
            return Err(Error::LengthMismatch(target.len(), dictionary.dim()));
        }
        check_unit(target, "target")?;
        Ok(LassoProblem {
            dictionary,
            target,
            lambda,
        })
    }

    pub fn solve(&self, opts: &SolverOptions) -> Result<SparseCode> {
        solve_from(self, opts, None)
    }

    /// Objective `||c||_1 + lambda/2 ||x - A c||^2` at arbitrary coefficients.
    pub fn objective(&self, coeffs: &[f64]) -> f64 {
        let e = residual(self.dictionary.atoms(), self.target, coeffs);
        l1(coeffs) + 0.5 * self.lambda * e.norm_squared()
    }
}

/// Solution of one LASSO instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseCode {
    pub coeffs: Vec<f64>,
    pub residual: Vec<f64>,
    pub objective: f64,
    /// Duality gap certified at return.
    pub gap: f64,
    pub sweeps: usize,
}

impl SparseCode {
    pub fn l1_norm(&self) -> f64 {
        l1(&self.coeffs)
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn residual_norm(&self) -> f64 {
        self.residual.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.coeffs.len())
            .filter(|&i| self.coeffs[i] != 0.0)
            .collect()
    }
}

fn l1(c: &[f64]) -> f64 {
    c.iter().map(|v| v.abs()).sum()
}

/// `x - A c` with compensated summation; at large lambda the certificate
/// multiplies this residual by `lambda`, so plain rounding is not enough.
fn residual(atoms: &DMatrix<f64>, x: DVectorView<'_, f64>, c: &[f64]) -> DVector<f64> {
    DVector::from_fn(x.len(), |k, _| {
        let mut sum = x[k];
        let mut comp = 0.0;
        for (i, &ci) in c.iter().enumerate() {
            if ci == 0.0 {
                continue;
            }
            let p = -atoms[(k, i)] * ci;
            let p_err = (-atoms[(k, i)]).mul_add(ci, -p);
            let t = sum + p;
            let z = t - sum;
            comp += (sum - (t - z)) + (p - z) + p_err;
            sum = t;
        }
        sum + comp
    })
}

fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// Largest violation of the subgradient optimality conditions at `coeffs`:
/// `|a_i^T e| <= 1/lambda` where `c_i = 0` and `a_i^T e = sign(c_i)/lambda` elsewhere.
pub fn kkt_violation(problem: &LassoProblem<'_>, coeffs: &[f64]) -> f64 {
    let atoms = problem.dictionary.atoms();
    let e = residual(atoms, problem.target, coeffs);
    let g = atoms.transpose() * e;
    kkt_from_correlations(&g, coeffs, problem.lambda)
}

fn kkt_from_correlations(g: &DVector<f64>, coeffs: &[f64], lambda: f64) -> f64 {
    let inv = 1.0 / lambda;
    coeffs
        .iter()
        .zip(g.iter())
        .map(|(&c, &gi)| {
            if c == 0.0 {
                (gi.abs() - inv).max(0.0)
            } else {
                (gi - c.signum() * inv).abs()
            }
        })
        .fold(0.0, f64::max)
}

struct Certificate {
    objective: f64,
    gap: f64,
    kkt: f64,
    residual: DVector<f64>,
}

/// `<a, v>` with compensated summation.
fn dot_comp(a: DVectorView<'_, f64>, v: &DVector<f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for (&ai, &vi) in a.iter().zip(v.iter()) {
        let p = ai * vi;
        let p_err = ai.mul_add(vi, -p);
        let t = sum + p;
        let z = t - sum;
        comp += (sum - (t - z)) + (p - z) + p_err;
        sum = t;
    }
    sum + comp
}

/// Duality gap at the dual point `nu`, rescaled into the feasible set.
///
/// Uses `P - D = sum_i |c_i| (1 - sign(c_i) <a_i, nu>) + ||nu - lambda e||^2 / (2 lambda)`,
/// which avoids subtracting two objective-sized numbers.
fn gap_at(problem: &LassoProblem<'_>, coeffs: &[f64], e: &DVector<f64>, nu: &DVector<f64>) -> f64 {
    let atoms = problem.dictionary.atoms();
    let lambda = problem.lambda;
    let q: Vec<f64> = (0..coeffs.len())
        .map(|i| dot_comp(atoms.column(i), nu))
        .collect();
    let qmax = q.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let s = if qmax > 1.0 { 1.0 / qmax } else { 1.0 };
    let linear: f64 = coeffs
        .iter()
        .zip(&q)
        .map(|(&c, &qi)| c.abs() * (1.0 - c.signum() * s * qi))
        .sum();
    let quad = (nu * s - e * lambda).norm_squared() / (2.0 * lambda);
    (linear + quad).max(0.0)
}

fn certify(problem: &LassoProblem<'_>, coeffs: &[f64]) -> Certificate {
    let atoms = problem.dictionary.atoms();
    let lambda = problem.lambda;
    let e = residual(atoms, problem.target, coeffs);
    let g = DVector::from_fn(coeffs.len(), |i, _| dot_comp(atoms.column(i), &e));
    let primal = l1(coeffs) + 0.5 * lambda * e.norm_squared();

    // Dual of the problem: max <nu, x> - ||nu||^2 / (2 lambda) s.t. ||A^T nu||_inf <= 1.
    let nu = &e * lambda;
    let mut gap = gap_at(problem, coeffs, &e, &nu);
    // Large coefficients amplify any slack in the active constraints, so also
    // try the point corrected to satisfy them exactly.
    let support: Vec<usize> = (0..coeffs.len()).filter(|&i| coeffs[i] != 0.0).collect();
    if gap > 0.0 && !support.is_empty() {
        let k = support.len();
        let gram = problem.dictionary.gram();
        let gs = DMatrix::from_fn(k, k, |r, c| gram[(support[r], support[c])]);
        if let Some(chol) = gs.cholesky() {
            let h = DVector::from_fn(k, |r, _| {
                lambda * g[support[r]] - coeffs[support[r]].signum()
            });
            let w = chol.solve(&h);
            let mut corrected = nu.clone();
            for (r, &i) in support.iter().enumerate() {
                corrected.axpy(-w[r], &atoms.column(i), 1.0);
            }
            gap = gap.min(gap_at(problem, coeffs, &e, &corrected));
        }
    }
    Certificate {
        objective: primal,
        gap,
        kkt: kkt_from_correlations(&g, coeffs, lambda),
        residual: e,
    }
}

/// Exact minimizer on a fixed support with fixed signs, if it is consistent.
fn polish(
    problem: &LassoProblem<'_>,
    gram: &DMatrix<f64>,
    b: &DVector<f64>,
    coeffs: &[f64],
) -> Option<Vec<f64>> {
    let lambda = problem.lambda;
    let support: Vec<usize> = (0..coeffs.len()).filter(|&i| coeffs[i] != 0.0).collect();
    if support.is_empty() {
        return None;
    }
    let k = support.len();
    let g = DMatrix::from_fn(k, k, |r, c| gram[(support[r], support[c])]);
    let chol = g.cholesky()?;
    let signs: Vec<f64> = support.iter().map(|&i| coeffs[i].signum()).collect();
    let rhs = DVector::from_fn(k, |r, _| b[support[r]] - signs[r] / lambda);
    let mut sol = chol.solve(&rhs);
    let mut out = vec![0.0; coeffs.len()];
    // Iterative refinement against the compensated residual.
    for _ in 0..3 {
        for (r, &i) in support.iter().enumerate() {
            out[i] = sol[r];
        }
        let e = residual(problem.dictionary.atoms(), problem.target, &out);
        let h = DVector::from_fn(k, |r, _| {
            problem.dictionary.atoms().column(support[r]).dot(&e) - signs[r] / lambda
        });
        if h.amax() == 0.0 {
            break;
        }
        sol += chol.solve(&h);
    }
    for (r, &i) in support.iter().enumerate() {
        if sol[r] == 0.0 || sol[r].signum() != signs[r] || !sol[r].is_finite() {
            return None;
        }
        out[i] = sol[r];
    }
    Some(out)
}

pub fn solve_lasso(problem: &LassoProblem<'_>, opts: &SolverOptions) -> Result<SparseCode> {
    solve_from(problem, opts, None)
}

/// Solves starting from `warm` (padded with zeros if shorter than the dictionary).
pub fn solve_from(
    problem: &LassoProblem<'_>,
    opts: &SolverOptions,
    warm: Option<&[f64]>,
) -> Result<SparseCode> {
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "tol must be > 0, got {}",
            opts.tol
        )));
    }
    let dict = problem.dictionary;
    let m = dict.len();
    let lambda = problem.lambda;
    if m == 0 {
        let e = problem.target.into_owned();
        return Ok(SparseCode {
            coeffs: Vec::new(),
            objective: 0.5 * lambda * e.norm_squared(),
            residual: e.iter().copied().collect(),
            gap: 0.0,
            sweeps: 0,
        });
    }

    let gram = dict.gram();
    let b = dict.atoms().transpose() * problem.target;
    let thresh = 1.0 / lambda;

    let mut c = vec![0.0; m];
    if let Some(w) = warm {
        for (ci, &wi) in c.iter_mut().zip(w) {
            *ci = wi;
        }
    }
    // Correlations with the residual, r = b - G c.
    let mut r = b.clone();
    for (i, &ci) in c.iter().enumerate() {
        if ci != 0.0 {
            r.axpy(-ci, &gram.column(i), 1.0);
        }
    }

    let cd_budget = opts.max_iter.min(CD_SWEEP_BUDGET);
    let mut last_support: Vec<bool> = c.iter().map(|&v| v != 0.0).collect();
    let mut gap = f64::INFINITY;

    for sweep in 1..=cd_budget {
        let mut changed = false;
        for i in 0..m {
            let gii = gram[(i, i)];
            let old = c[i];
            let new = soft_threshold(r[i] + gii * old, thresh) / gii;
            if new != old {
                r.axpy(-(new - old), &gram.column(i), 1.0);
                c[i] = new;
                changed = true;
            }
        }

        let support: Vec<bool> = c.iter().map(|&v| v != 0.0).collect();
        let stable = support == last_support;
        last_support = support;

        if stable || !changed {
            if let Some(done) = accept(problem, gram, &b, &c, opts.tol) {
                return Ok(finish(problem, done, sweep));
            }
        }
        if sweep % 16 == 0 || sweep == cd_budget {
            gap = certify(problem, &c).gap;
        }
    }

    // Coordinate descent stalls on badly conditioned instances (large lambda,
    // overcomplete dictionaries); trace the exact regularization path instead.
    if let Some(path) = homotopy(gram, &b, lambda, opts.max_iter) {
        if let Some(done) = accept(problem, gram, &b, &path, opts.tol) {
            return Ok(finish(problem, done, cd_budget));
        }
        gap = gap.min(certify(problem, &path).gap);
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        gap,
    })
}

/// Returns a certified solution, preferring the exact support-restricted one.
fn accept(
    problem: &LassoProblem<'_>,
    gram: &DMatrix<f64>,
    b: &DVector<f64>,
    c: &[f64],
    tol: f64,
) -> Option<Vec<f64>> {
    let ok = |cert: &Certificate| cert.gap <= tol && cert.kkt <= tol;
    if let Some(p) = polish(problem, gram, b, c) {
        if ok(&certify(problem, &p)) {
            return Some(p);
        }
    }
    ok(&certify(problem, c)).then(|| c.to_vec())
}

/// LASSO homotopy: follows the piecewise-linear solution path of
/// `min 1/2 ||x - A c||^2 + mu ||c||_1` from `mu = max |A^T x|` down to `1 / lambda`.
fn homotopy(
    gram: &DMatrix<f64>,
    b: &DVector<f64>,
    lambda: f64,
    max_steps: usize,
) -> Option<Vec<f64>> {
    const EPS: f64 = 1e-14;
    let m = b.len();
    let target = 1.0 / lambda;
    let mut c = vec![0.0; m];
    let i0 = b.iamax();
    let mut mu = b[i0].abs();
    if mu <= target {
        return Some(c);
    }
    let mut active = vec![i0];
    let mut signs = vec![b[i0].signum()];
    let mut g = b.clone();

    for _ in 0..max_steps.max(1) {
        let k = active.len();
        let gss = DMatrix::from_fn(k, k, |r, q| gram[(active[r], active[q])]);
        let dir = gss.cholesky()?.solve(&DVector::from_column_slice(&signs));

        enum Event {
            Target,
            Enter(usize, f64),
            Leave(usize),
        }
        let mut step = mu - target;
        let mut event = Event::Target;
        for i in 0..m {
            if active.contains(&i) {
                continue;
            }
            let a: f64 = active
                .iter()
                .zip(dir.iter())
                .map(|(&j, &d)| gram[(i, j)] * d)
                .sum();
            if 1.0 - a > EPS {
                let t = (mu - g[i]) / (1.0 - a);
                if t > EPS && t < step {
                    step = t;
                    event = Event::Enter(i, 1.0);
                }
            }
            if 1.0 + a > EPS {
                let t = (mu + g[i]) / (1.0 + a);
                if t > EPS && t < step {
                    step = t;
                    event = Event::Enter(i, -1.0);
                }
            }
        }
        for (p, &j) in active.iter().enumerate() {
            if dir[p] != 0.0 {
                let t = -c[j] / dir[p];
                if t > EPS && t < step {
                    step = t;
                    event = Event::Leave(p);
                }
            }
        }

        for (p, &j) in active.iter().enumerate() {
            c[j] += step * dir[p];
        }
        mu -= step;
        match event {
            Event::Target => return Some(c),
            Event::Enter(i, s) => {
                active.push(i);
                signs.push(s);
            }
            Event::Leave(p) => {
                c[active[p]] = 0.0;
                active.remove(p);
                signs.remove(p);
                if active.is_empty() {
                    return None;
                }
            }
        }
        g = b - gram * DVector::from_column_slice(&c);
    }
    None
}

fn finish(problem: &LassoProblem<'_>, mut c: Vec<f64>, sweeps: usize) -> SparseCode {
    for v in c.iter_mut() {
        if v.abs() < SNAP {
            *v = 0.0;
        }
    }
    let cert = certify(problem, &c);
    SparseCode {
        coeffs: c,
        residual: cert.residual.iter().copied().collect(),
        objective: cert.objective,
        gap: cert.gap,
        sweeps,
    }
}

/// Solves one problem per column of `targets`, in parallel; output order matches input.
pub fn solve_lasso_batch(
    dictionary: &Dictionary,
    targets: &DMatrix<f64>,
    lambda: f64,
    opts: &SolverOptions,
) -> Result<Vec<SparseCode>> {
    check_lambda(lambda)?;
    (0..targets.ncols())
        .into_par_iter()
        .map(|j| {
            LassoProblem::new(dictionary, targets.column(j), lambda)
                .and_then(|p| p.solve(opts))
                .map_err(|e| e.at_target(j))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand_distr::{Distribution, StandardNormal};

    fn unit_columns(d: usize, m: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = seeded(seed);
        let mut a = DMatrix::from_fn(d, m, |_, _| StandardNormal.sample(&mut rng));
        for mut c in a.column_iter_mut() {
            c.normalize_mut();
        }
        a
    }

    #[test]
    fn empty_dictionary_costs_half_lambda() {
        let d = Dictionary::empty(3);
        let x = DVector::from_vec(vec![0.0, 1.0, 0.0]);
        let p = LassoProblem::new(&d, x.as_view(), 7.0).unwrap();
        let code = p.solve(&SolverOptions::default()).unwrap();
        assert!(code.coeffs.is_empty());
        assert_eq!(code.objective, 3.5);
    }

    #[test]
    fn target_in_dictionary() {
        let a = unit_columns(5, 4, 1);
        let x = a.column(2).into_owned();
        let d = Dictionary::new(a).unwrap();
        let p = LassoProblem::new(&d, x.as_view(), 100.0).unwrap();
        let code = p.solve(&SolverOptions::default()).unwrap();
        assert!((code.objective - 0.995).abs() < 1e-6);
        assert!((code.coeffs[2] - 0.99).abs() < 1e-6);
        for i in [0, 1, 3] {
            assert!(code.coeffs[i].abs() < 1e-6);
        }
    }

    #[test]
    fn below_threshold_gives_zero_code() {
        // All pairwise |<.,.>| = 0.5 (three unit vectors at 60/120 degrees plus target).
        let s = 3f64.sqrt() / 2.0;
        let a = DMatrix::from_column_slice(2, 2, &[1.0, 0.0, -0.5, s]);
        let x = DVector::from_vec(vec![0.5, s]);
        let d = Dictionary::new(a).unwrap();
        let p = LassoProblem::new(&d, x.as_view(), 1.5).unwrap();
        let code = p.solve(&SolverOptions::default()).unwrap();
        assert_eq!(code.coeffs, vec![0.0, 0.0]);
        assert!((code.objective - 0.75).abs() < 1e-12);
    }

    #[test]
    fn orthonormal_pair_large_lambda() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let d = Dictionary::new(DMatrix::identity(2, 2)).unwrap();
        let x = DVector::from_vec(vec![s, s]);
        let p = LassoProblem::new(&d, x.as_view(), 1e6).unwrap();
        let code = p.solve(&SolverOptions::default()).unwrap();
        assert!((code.objective - 2f64.sqrt()).abs() < 1e-3);
        assert!((code.coeffs[0] - s).abs() < 1e-3);
        assert!((code.coeffs[1] - s).abs() < 1e-3);
    }

    #[test]
    fn certificate_and_kkt_hold() {
        for seed in 0..40 {
            let a = unit_columns(6, 10, seed);
            let x = unit_columns(6, 1, 1000 + seed).column(0).into_owned();
            let d = Dictionary::new(a).unwrap();
            for lambda in [2.0, 10.0, 1e3, 1e6] {
                let p = LassoProblem::new(&d, x.as_view(), lambda).unwrap();
                let opts = SolverOptions::default();
                let code = p.solve(&opts).unwrap();
                assert!(code.gap <= opts.tol, "gap {}", code.gap);
                assert!(kkt_violation(&p, &code.coeffs) <= opts.tol);
                assert!((p.objective(&code.coeffs) - code.objective).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn warm_start_reaches_same_code() {
        let a = unit_columns(4, 12, 9);
        let x = unit_columns(4, 1, 10).column(0).into_owned();
        let d = Dictionary::new(a).unwrap();
        let p = LassoProblem::new(&d, x.as_view(), 50.0).unwrap();
        let opts = SolverOptions::default();
        let cold = p.solve(&opts).unwrap();
        let junk: Vec<f64> = (0..12).map(|i| (i as f64 - 5.0) * 0.1).collect();
        let warm = solve_from(&p, &opts, Some(&junk)).unwrap();
        assert_eq!(cold.coeffs, warm.coeffs);
    }

    #[test]
    fn push_extends_gram() {
        let a = unit_columns(5, 3, 4);
        let full = Dictionary::new(a.clone()).unwrap();
        let mut d = Dictionary::empty(5);
        for c in a.column_iter() {
            d.push(c).unwrap();
        }
        assert!((d.gram() - full.gram()).amax() < 1e-15);
        assert_eq!(d.atoms(), full.atoms());
    }

    #[test]
    fn rejects_bad_inputs() {
        let d = Dictionary::new(DMatrix::identity(2, 2)).unwrap();
        let x = DVector::from_vec(vec![1.0, 0.0]);
        assert!(matches!(
            LassoProblem::new(&d, x.as_view(), 1.0),
            Err(Error::InvalidLambda(_))
        ));
        let y = DVector::from_vec(vec![2.0, 0.0]);
        assert!(LassoProblem::new(&d, y.as_view(), 5.0).is_err());
        assert!(Dictionary::new(DMatrix::from_element(2, 1, 1.0)).is_err());
    }

    #[test]
    fn no_convergence_reported() {
        let a = unit_columns(3, 8, 2);
        let x = unit_columns(3, 1, 3).column(0).into_owned();
        let d = Dictionary::new(a).unwrap();
        let p = LassoProblem::new(&d, x.as_view(), 1e6).unwrap();
        let opts = SolverOptions {
            tol: 1e-14,
            max_iter: 1,
        };
        assert!(matches!(
            p.solve(&opts),
            Err(Error::NoConvergence { iterations: 1, .. })
        ));
    }
}

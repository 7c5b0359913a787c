//! Dense two-phase simplex for `min c^T x  s.t.  A x = b, x >= 0`.
//!
//! Bland's rule for both entering and leaving variables, so it cannot cycle.
//! Meant for small oracle problems (a few hundred columns).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const EPS: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: DVector<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// `m` constraint rows followed by one objective row; last column is the rhs.
    t: DMatrix<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn rows(&self) -> usize {
        self.t.nrows() - 1
    }

    fn rhs(&self) -> usize {
        self.t.ncols() - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[(r, c)];
        let mut row = self.t.row(r).into_owned();
        row /= p;
        for i in 0..self.t.nrows() {
            if i == r {
                continue;
            }
            let f = self.t[(i, c)];
            if f != 0.0 {
                for j in 0..row.len() {
                    self.t[(i, j)] -= f * row[j];
                }
                self.t[(i, c)] = 0.0;
            }
        }
        self.t.set_row(r, &row);
        self.basis[r] = c;
    }

    /// Runs simplex on columns `0..ncols`; returns false if unbounded.
    fn optimize(&mut self, ncols: usize, max_pivots: usize) -> Result<bool> {
        let obj = self.rows();
        let rhs = self.rhs();
        for _ in 0..max_pivots {
            let Some(enter) = (0..ncols).find(|&j| self.t[(obj, j)] < -EPS) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..obj {
                let a = self.t[(i, enter)];
                if a > EPS {
                    let ratio = self.t[(i, rhs)] / a;
                    let better = match leave {
                        None => true,
                        Some((l, best)) => {
                            ratio < best - EPS
                                || (ratio <= best + EPS && self.basis[i] < self.basis[l])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, enter),
            }
        }
        Err(Error::Lp(format!("no optimum after {max_pivots} pivots")))
    }
}

pub fn solve(a: &DMatrix<f64>, b: &DVector<f64>, c: &DVector<f64>) -> Result<LpOutcome> {
    let (m, n) = a.shape();
    if b.len() != m || c.len() != n {
        return Err(Error::Lp(format!(
            "shape mismatch: A {m}x{n}, b {}, c {}",
            b.len(),
            c.len()
        )));
    }
    let max_pivots = 50 * (m + n).max(10);

    // Phase 1: artificials n..n+m, rows flipped so b >= 0.
    let mut t = DMatrix::zeros(m + 1, n + m + 1);
    for i in 0..m {
        let s = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[(i, j)] = s * a[(i, j)];
        }
        t[(i, n + i)] = 1.0;
        t[(i, n + m)] = s * b[i];
    }
    for j in 0..=n + m {
        if j < n || j == n + m {
            t[(m, j)] = -(0..m).map(|i| t[(i, j)]).sum::<f64>();
        }
    }
    let mut tab = Tableau {
        t,
        basis: (n..n + m).collect(),
    };
    tab.optimize(n + m, max_pivots)?;
    let scale = 1.0 + b.amax();
    if -tab.t[(m, n + m)] > 1e-9 * scale {
        return Ok(LpOutcome::Infeasible);
    }

    // Drive remaining artificials out of the basis, dropping redundant rows.
    let mut keep = Vec::with_capacity(m);
    for r in 0..m {
        if tab.basis[r] < n {
            keep.push(r);
            continue;
        }
        if let Some(c) = (0..n).find(|&j| tab.t[(r, j)].abs() > 1e-9) {
            tab.pivot(r, c);
            keep.push(r);
        }
    }

    // Phase 2 on the original columns.
    let mut t = DMatrix::zeros(keep.len() + 1, n + 1);
    let mut basis = Vec::with_capacity(keep.len());
    for (k, &r) in keep.iter().enumerate() {
        for j in 0..n {
            t[(k, j)] = tab.t[(r, j)];
        }
        t[(k, n)] = tab.t[(r, n + m)];
        basis.push(tab.basis[r]);
    }
    let obj = keep.len();
    for j in 0..n {
        t[(obj, j)] = c[j];
    }
    for (k, &bj) in basis.iter().enumerate() {
        let cb = c[bj];
        if cb != 0.0 {
            for j in 0..=n {
                t[(obj, j)] -= cb * t[(k, j)];
            }
        }
    }
    let mut tab = Tableau { t, basis };
    if !tab.optimize(n, max_pivots)? {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = DVector::zeros(n);
    for (k, &bj) in tab.basis.iter().enumerate() {
        x[bj] = tab.t[(k, n)].max(0.0);
    }
    let value = c.dot(&x);
    Ok(LpOutcome::Optimal { x, value })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal(o: LpOutcome) -> (DVector<f64>, f64) {
        match o {
            LpOutcome::Optimal { x, value } => (x, value),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 (with slacks).
        let a = DMatrix::from_row_slice(
            3,
            5,
            &[
                1.0, 0.0, 1.0, 0.0, 0.0, //
                0.0, 2.0, 0.0, 1.0, 0.0, //
                3.0, 2.0, 0.0, 0.0, 1.0,
            ],
        );
        let b = DVector::from_vec(vec![4.0, 12.0, 18.0]);
        let c = DVector::from_vec(vec![-3.0, -5.0, 0.0, 0.0, 0.0]);
        let (x, v) = optimal(solve(&a, &b, &c).unwrap());
        assert!((v + 36.0).abs() < 1e-10);
        assert!((x[0] - 2.0).abs() < 1e-10 && (x[1] - 6.0).abs() < 1e-10);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_vec(vec![1.0, 2.0]);
        let c = DVector::from_vec(vec![1.0, 1.0]);
        assert_eq!(solve(&a, &b, &c).unwrap(), LpOutcome::Infeasible);

        let a = DMatrix::from_row_slice(1, 2, &[1.0, -1.0]);
        let b = DVector::from_vec(vec![1.0]);
        let c = DVector::from_vec(vec![-1.0, 0.0]);
        assert_eq!(solve(&a, &b, &c).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows_and_negative_rhs() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 2.0, 2.0, -1.0, 0.0]);
        let b = DVector::from_vec(vec![3.0, 6.0, -1.0]);
        let c = DVector::from_vec(vec![0.0, 1.0]);
        let (x, v) = optimal(solve(&a, &b, &c).unwrap());
        assert!((x[0] - 1.0).abs() < 1e-10 && (x[1] - 2.0).abs() < 1e-10);
        assert!((v - 2.0).abs() < 1e-10);
    }
}

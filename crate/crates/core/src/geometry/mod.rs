//! Brute-force oracles for the noiseless limit of the cost: exact ℓ1
//! minimization, the gauge of the symmetrized exemplar hull, and grid-based
//! inradius and covering radius on S¹ and S².

pub mod simplex;

use nalgebra::{DMatrix, DVector, DVectorView};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lasso::UNIT_NORM_TOL;
use simplex::LpOutcome;

/// Targets farther than this from the dictionary span are infeasible.
pub const SPAN_TOL: f64 = 1e-9;
pub const DEFAULT_RESOLUTION_S1: f64 = 1e-3;
pub const DEFAULT_RESOLUTION_S2: f64 = 1e-2;

/// Orthonormal basis of the column span.
pub fn span_basis(a: &DMatrix<f64>) -> DMatrix<f64> {
    let d = a.nrows();
    if a.ncols() == 0 || a.amax() == 0.0 {
        return DMatrix::zeros(d, 0);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 1e-10 * smax)
        .collect();
    u.select_columns(&keep)
}

fn in_span(q: &DMatrix<f64>, x: &DVector<f64>) -> bool {
    let proj = q * (q.transpose() * x);
    (x - proj).norm() <= SPAN_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L1Min {
    /// `f64::INFINITY` when the target is outside the span.
    pub value: f64,
    pub coeffs: Option<Vec<f64>>,
}

impl L1Min {
    fn infeasible() -> Self {
        L1Min {
            value: f64::INFINITY,
            coeffs: None,
        }
    }
}

/// `min ||c||_1  s.t.  A c = x`, by linear programming on `c = c+ - c-`.
pub fn l1_min_exact(dictionary: &DMatrix<f64>, target: DVectorView<'_, f64>) -> Result<L1Min> {
    let (d, m) = dictionary.shape();
    if target.len() != d {
        return Err(Error::LengthMismatch(target.len(), d));
    }
    let x = target.into_owned();
    let q = span_basis(dictionary);
    if !in_span(&q, &x) {
        return Ok(L1Min::infeasible());
    }
    if q.ncols() == 0 {
        return Ok(L1Min {
            value: 0.0,
            coeffs: Some(vec![0.0; m]),
        });
    }
    // Constraints in span coordinates keep the rows independent.
    let qa = q.transpose() * dictionary;
    let mut a = DMatrix::zeros(q.ncols(), 2 * m);
    a.columns_mut(0, m).copy_from(&qa);
    a.columns_mut(m, m).copy_from(&(-&qa));
    let b = q.transpose() * &x;
    let c = DVector::from_element(2 * m, 1.0);
    match simplex::solve(&a, &b, &c)? {
        LpOutcome::Optimal { x: z, value } => {
            let coeffs = (0..m).map(|i| z[i] - z[m + i]).collect();
            Ok(L1Min {
                value,
                coeffs: Some(coeffs),
            })
        }
        LpOutcome::Infeasible => Ok(L1Min::infeasible()),
        LpOutcome::Unbounded => Err(Error::Lp("l1 minimization reported unbounded".into())),
    }
}

/// Convex hull of `±X0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricHull {
    generators: DMatrix<f64>,
    m: usize,
}

impl SymmetricHull {
    pub fn new(exemplars: &DMatrix<f64>) -> Result<Self> {
        let (d, m) = exemplars.shape();
        if m == 0 {
            return Err(Error::DegenerateHull);
        }
        for (j, c) in exemplars.column_iter().enumerate() {
            if (c.norm() - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::InvalidData(format!(
                    "generator {j} is not unit norm"
                )));
            }
        }
        let mut generators = DMatrix::zeros(d, 2 * m);
        generators.columns_mut(0, m).copy_from(exemplars);
        generators.columns_mut(m, m).copy_from(&(-exemplars));
        Ok(SymmetricHull { generators, m })
    }

    pub fn generators(&self) -> &DMatrix<f64> {
        &self.generators
    }

    pub fn exemplars(&self) -> DMatrix<f64> {
        self.generators.columns(0, self.m).into_owned()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.generators.nrows()
    }

    pub fn spans_space(&self) -> bool {
        span_basis(&self.generators).ncols() == self.dim()
    }
}

/// `inf { t > 0 : x / t in K }`, found by maximizing `s` with `s x` a convex
/// combination of the generators.
pub fn minkowski_functional(hull: &SymmetricHull, x: DVectorView<'_, f64>) -> Result<f64> {
    let d = hull.dim();
    if x.len() != d {
        return Err(Error::LengthMismatch(x.len(), d));
    }
    let x = x.into_owned();
    if x.amax() == 0.0 {
        return Ok(0.0);
    }
    let q = span_basis(&hull.generators);
    if !in_span(&q, &x) {
        return Ok(f64::INFINITY);
    }
    let g = q.transpose() * &hull.generators;
    let qx = q.transpose() * &x;
    let (r, p) = g.shape();
    // Variables: theta (p), s.
    let mut a = DMatrix::zeros(r + 1, p + 1);
    a.view_mut((0, 0), (r, p)).copy_from(&g);
    a.view_mut((0, p), (r, 1)).copy_from(&(-&qx));
    for j in 0..p {
        a[(r, j)] = 1.0;
    }
    let mut b = DVector::zeros(r + 1);
    b[r] = 1.0;
    let mut c = DVector::zeros(p + 1);
    c[p] = -1.0;
    match simplex::solve(&a, &b, &c)? {
        LpOutcome::Optimal { x: z, .. } => {
            let s = z[p];
            Ok(if s > 0.0 { 1.0 / s } else { f64::INFINITY })
        }
        LpOutcome::Infeasible => Ok(f64::INFINITY),
        LpOutcome::Unbounded => Err(Error::Lp("gauge LP reported unbounded".into())),
    }
}

/// Deterministic direction grid on S¹ (`d = 2`) or S² (`d = 3`) with spacing about `resolution`.
pub fn sphere_grid(d: usize, resolution: f64) -> Result<Vec<DVector<f64>>> {
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::InvalidParam(format!("grid resolution {resolution}")));
    }
    use std::f64::consts::PI;
    match d {
        2 => {
            let n = (2.0 * PI / resolution).ceil() as usize;
            Ok((0..n)
                .map(|i| {
                    let t = 2.0 * PI * i as f64 / n as f64;
                    DVector::from_vec(vec![t.cos(), t.sin()])
                })
                .collect())
        }
        3 => {
            let rings = (PI / resolution).ceil() as usize;
            let mut out = Vec::new();
            for i in 0..=rings {
                let phi = PI * i as f64 / rings as f64;
                let n = ((2.0 * PI * phi.sin() / resolution).ceil() as usize).max(1);
                for k in 0..n {
                    let t = 2.0 * PI * k as f64 / n as f64;
                    out.push(DVector::from_vec(vec![
                        phi.sin() * t.cos(),
                        phi.sin() * t.sin(),
                        phi.cos(),
                    ]));
                }
            }
            Ok(out)
        }
        _ => Err(Error::UnsupportedDim(d)),
    }
}

fn check_grid_dim(d: usize) -> Result<()> {
    if d == 2 || d == 3 {
        Ok(())
    } else {
        Err(Error::UnsupportedDim(d))
    }
}

/// Largest angle (radians) from a grid direction to its nearest point. On the
/// circle the best grid direction is refined by golden-section search.
pub fn covering_radius(points: &DMatrix<f64>, resolution: f64) -> Result<f64> {
    check_grid_dim(points.nrows())?;
    if points.ncols() == 0 {
        return Err(Error::InvalidData("no points".into()));
    }
    for (j, c) in points.column_iter().enumerate() {
        if (c.norm() - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::InvalidData(format!("point {j} is not unit norm")));
        }
    }
    let nearest = |w: &DVector<f64>| (points.transpose() * w).max().clamp(-1.0, 1.0).acos();
    let grid = sphere_grid(points.nrows(), resolution)?;
    let angles: Vec<f64> = grid.par_iter().map(nearest).collect();
    let (best_idx, best) =
        angles
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, a)| if a > acc.1 { (i, a) } else { acc },
            );
    if points.nrows() != 2 {
        return Ok(best);
    }
    // The distance to the nearest point is a tent near its maximum, so the grid
    // value is off linearly in the step; refine on the bracketing interval.
    let step = std::f64::consts::TAU / grid.len() as f64;
    let theta0 = grid[best_idx][1].atan2(grid[best_idx][0]);
    let at = |t: f64| nearest(&DVector::from_vec(vec![t.cos(), t.sin()]));
    let (mut lo, mut hi) = (theta0 - step, theta0 + step);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
    let (mut fa, mut fb) = (at(a), at(b));
    while hi - lo > 1e-13 {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = at(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = at(a);
        }
    }
    Ok(best.max(fa).max(fb))
}

/// Points together with their negations.
pub fn symmetrize(points: &DMatrix<f64>) -> DMatrix<f64> {
    let (d, m) = points.shape();
    let mut out = DMatrix::zeros(d, 2 * m);
    out.columns_mut(0, m).copy_from(points);
    out.columns_mut(m, m).copy_from(&(-points));
    out
}

/// Radius of the largest centered ball in the hull, as the grid minimum of `1 / ||u||_K`.
pub fn inradius(hull: &SymmetricHull, resolution: f64) -> Result<f64> {
    check_grid_dim(hull.dim())?;
    if !hull.spans_space() {
        return Err(Error::DegenerateHull);
    }
    let grid = sphere_grid(hull.dim(), resolution)?;
    let gauges = grid
        .par_iter()
        .map(|u| minkowski_functional(hull, u.as_view()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(gauges
        .into_iter()
        .map(|g| 1.0 / g)
        .fold(f64::INFINITY, f64::min))
}

/// Grid maximum over unit vectors of the exact ℓ1 cost.
pub fn sup_l1_cost(exemplars: &DMatrix<f64>, resolution: f64) -> Result<f64> {
    check_grid_dim(exemplars.nrows())?;
    let grid = sphere_grid(exemplars.nrows(), resolution)?;
    let values = grid
        .par_iter()
        .map(|u| l1_min_exact(exemplars, u.as_view()).map(|r| r.value))
        .collect::<Result<Vec<f64>>>()?;
    Ok(values.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

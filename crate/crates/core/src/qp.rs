//! Dense strictly convex quadratic programs with inequality constraints.
//!
//! ```text
//!     minimize     1/2 z' G z + c' z
//!     subject to   n_k' z >= d_k      for every row k
//! ```
//!
//! Solved with the dual active-set method of Goldfarb and Idnani: start from
//! the unconstrained minimizer and add the most violated constraint at a
//! time, dropping active constraints whose multiplier would turn negative.
//! Problems here have at most a few dozen variables, so the projections are
//! recomputed from scratch at each step instead of being updated.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct QuadraticProgram {
    pub g: DMatrix<f64>,
    pub c: DVector<f64>,
    /// Constraint normals, one per row.
    pub rows: DMatrix<f64>,
    pub rhs: DVector<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QpSolution {
    pub z: DVector<f64>,
    /// One nonnegative multiplier per constraint row; zero when inactive.
    pub multipliers: DVector<f64>,
    pub active: Vec<usize>,
    pub steps: usize,
}

impl QuadraticProgram {
    pub fn solve(&self) -> Result<QpSolution> {
        let n = self.c.len();
        let m = self.rhs.len();
        debug_assert_eq!(self.rows.nrows(), m);
        debug_assert_eq!(self.rows.ncols(), n);
        let chol = self
            .g
            .clone()
            .cholesky()
            .ok_or_else(|| Error::ModelInvalid("quadratic form is not positive definite".into()))?;
        let ginv = chol.inverse();
        let condition = crate::linalg::norm1(&self.g) * crate::linalg::norm1(&ginv);
        if !condition.is_finite() || condition > crate::linalg::MAX_CONDITION {
            return Err(Error::ModelInvalid(alloc::format!(
                "quadratic form is ill-conditioned (condition estimate {condition:e})"
            )));
        }

        let normal = |k: usize| -> DVector<f64> { self.rows.row(k).transpose() };
        let scale: Vec<f64> = (0..m).map(|k| normal(k).norm().max(1.0)).collect();

        let mut z = -(&ginv * &self.c);
        let mut active: Vec<usize> = Vec::new();
        let mut u: Vec<f64> = Vec::new();
        let max_steps = 50 * (m + n + 1);
        let mut steps = 0;

        loop {
            // Most violated inactive constraint, measured relative to its normal.
            let zscale = z.amax().max(1.0);
            let mut pick: Option<(usize, f64)> = None;
            for k in 0..m {
                if active.contains(&k) {
                    continue;
                }
                let slack = (normal(k).dot(&z) - self.rhs[k]) / scale[k];
                let tol = 1e-12 * (zscale + self.rhs[k].abs() / scale[k]);
                if slack < -tol && pick.is_none_or(|(_, s)| slack < s) {
                    pick = Some((k, slack));
                }
            }
            let Some((p, _)) = pick else {
                let mut multipliers = DVector::zeros(m);
                for (&k, &uk) in active.iter().zip(&u) {
                    multipliers[k] = uk.max(0.0);
                }
                return Ok(QpSolution { z, multipliers, active, steps });
            };
            let np = normal(p);
            let mut u_plus = u.clone();
            let mut u_p = 0.0;

            loop {
                steps += 1;
                if steps > max_steps {
                    return Err(Error::QpIterations(max_steps));
                }
                let (dir, r) = step_direction(&ginv, &self.rows, &active, &np);

                // Partial step: largest move keeping active multipliers >= 0.
                let mut t1 = f64::INFINITY;
                let mut drop = None;
                for (idx, &rj) in r.iter().enumerate() {
                    if rj > 1e-14 {
                        let ratio = u_plus[idx] / rj;
                        if ratio < t1 {
                            t1 = ratio;
                            drop = Some(idx);
                        }
                    }
                }
                // Full step: move until constraint p becomes tight.
                let curvature = dir.dot(&np);
                let t2 = if dir.amax() <= 1e-13 * np.amax().max(1.0) || curvature <= 1e-14 * np.norm_squared() {
                    f64::INFINITY
                } else {
                    -(np.dot(&z) - self.rhs[p]) / curvature
                };

                if t1.is_infinite() && t2.is_infinite() {
                    return Err(Error::QpInfeasible);
                }
                let t = t1.min(t2);
                if t2.is_finite() {
                    z += &dir * t;
                }
                for (idx, rj) in r.iter().enumerate() {
                    u_plus[idx] -= t * rj;
                }
                u_p += t;

                if t2 <= t1 {
                    active.push(p);
                    u_plus.push(u_p);
                    u = u_plus;
                    break;
                }
                let idx = drop.expect("finite partial step has a blocking constraint");
                active.remove(idx);
                u_plus.remove(idx);
            }
        }
    }
}

/// Primal direction and multiplier change for adding `np` to the active set.
fn step_direction(
    ginv: &DMatrix<f64>,
    rows: &DMatrix<f64>,
    active: &[usize],
    np: &DVector<f64>,
) -> (DVector<f64>, Vec<f64>) {
    let gn = ginv * np;
    if active.is_empty() {
        return (gn, vec![]);
    }
    let q = active.len();
    let n = np.len();
    let basis = DMatrix::from_fn(n, q, |i, j| rows[(active[j], i)]);
    let gb = ginv * &basis;
    let schur = basis.transpose() * &gb;
    let rhs = basis.transpose() * &gn;
    let r = match schur.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => schur.lu().solve(&rhs).unwrap_or_else(|| DVector::zeros(q)),
    };
    let dir = gn - gb * &r;
    (dir, r.iter().copied().collect())
}

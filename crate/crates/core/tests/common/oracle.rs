//! Pricing optimality checks that share no code with the library solver.
//!
//! Everything works in price space on plain `Vec`s: a dense Gaussian
//! elimination for the response matrix and a Lawson-Hanson nonnegative
//! least-squares fit for the multipliers.

#![allow(dead_code)]

pub type Matrix = Vec<Vec<f64>>;

pub fn inverse(m: &Matrix) -> Matrix {
    let n = m.len();
    let mut aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|k| if k == i { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| aug[x][col].abs().total_cmp(&aug[y][col].abs())).unwrap();
        aug.swap(col, pivot);
        let p = aug[col][col];
        assert!(p.abs() > 1e-14, "singular matrix");
        for v in aug[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col {
                let f = aug[r][col];
                if f != 0.0 {
                    for c in 0..2 * n {
                        aug[r][c] -= f * aug[col][c];
                    }
                }
            }
        }
    }
    aug.into_iter().map(|row| row[n..].to_vec()).collect()
}

pub fn mat_vec(m: &Matrix, v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn transpose(m: &Matrix) -> Matrix {
    let (r, c) = (m.len(), m[0].len());
    (0..c).map(|j| (0..r).map(|i| m[i][j]).collect()).collect()
}

/// `A - W` as nested vectors.
pub fn system(a: &[f64], w: &Matrix) -> Matrix {
    (0..a.len()).map(|i| (0..a.len()).map(|l| if i == l { a[i] } else { -w[i][l] }).collect()).collect()
}

/// Lawson-Hanson: `min |G mu - d|` subject to `mu >= 0`, where the columns
/// of `G` are `cols`. Returns the multipliers and the residual norm.
pub fn nnls(cols: &[Vec<f64>], d: &[f64]) -> (Vec<f64>, f64) {
    let k = cols.len();
    let m = d.len();
    let residual = |mu: &[f64]| -> Vec<f64> {
        (0..m).map(|r| d[r] - (0..k).map(|c| cols[c][r] * mu[c]).sum::<f64>()).collect()
    };
    let mut mu = vec![0.0; k];
    let mut passive = vec![false; k];
    for _ in 0..(3 * k + 10) {
        let res = residual(&mu);
        let grad: Vec<f64> = (0..k).map(|c| cols[c].iter().zip(&res).map(|(g, r)| g * r).sum()).collect();
        let Some(enter) = (0..k).filter(|&c| !passive[c] && grad[c] > 1e-13).max_by(|&x, &y| grad[x].total_cmp(&grad[y]))
        else {
            break;
        };
        passive[enter] = true;
        loop {
            let idx: Vec<usize> = (0..k).filter(|&c| passive[c]).collect();
            let z = least_squares(&idx.iter().map(|&c| cols[c].clone()).collect::<Vec<_>>(), d);
            if z.iter().all(|&v| v > 0.0) {
                for (p, &c) in idx.iter().enumerate() {
                    mu[c] = z[p];
                }
                break;
            }
            let mut alpha = 1.0f64;
            for (p, &c) in idx.iter().enumerate() {
                if z[p] <= 0.0 {
                    alpha = alpha.min(mu[c] / (mu[c] - z[p]));
                }
            }
            for (p, &c) in idx.iter().enumerate() {
                mu[c] += alpha * (z[p] - mu[c]);
                if mu[c] <= 1e-15 {
                    mu[c] = 0.0;
                    passive[c] = false;
                }
            }
        }
    }
    let res = residual(&mu);
    (mu, res.iter().map(|r| r * r).sum::<f64>().sqrt())
}

/// Least squares through the normal equations with a tiny ridge, enough
/// for the handful of well-separated columns a KKT fit produces.
fn least_squares(cols: &[Vec<f64>], d: &[f64]) -> Vec<f64> {
    let k = cols.len();
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let gram: Matrix = (0..k).map(|i| (0..k).map(|j| dot(&cols[i], &cols[j]) + if i == j { 1e-14 } else { 0.0 }).collect()).collect();
    let rhs: Vec<f64> = (0..k).map(|i| dot(&cols[i], d)).collect();
    mat_vec(&inverse(&gram), &rhs)
}

/// Price-space description of one pricing problem:
/// maximize `phi' Rm (b - phi)` subject to `phi >= 0`,
/// `Rm (b - phi) >= 0` and `1' Rc (b - phi) <= cap`.
pub struct PriceProblem {
    pub b: Vec<f64>,
    /// Consumption the supplier predicts.
    pub rm: Matrix,
    /// True consumption, used by the capacity row.
    pub rc: Matrix,
    pub cap: f64,
}

#[derive(Debug)]
pub struct KktReport {
    pub stationarity: f64,
    pub primal: f64,
    pub revenue: f64,
}

impl PriceProblem {
    pub fn known(a: &[f64], w: &Matrix, b: &[f64], cap: f64) -> Self {
        let r = inverse(&system(a, w));
        PriceProblem { b: b.to_vec(), rm: r.clone(), rc: r, cap }
    }

    pub fn no_network(a: &[f64], w: &Matrix, b: &[f64], cap: f64) -> Self {
        let n = a.len();
        let rm = (0..n).map(|i| (0..n).map(|l| if i == l { 1.0 / a[i] } else { 0.0 }).collect()).collect();
        PriceProblem { b: b.to_vec(), rm, rc: inverse(&system(a, w)), cap }
    }

    fn slack(&self, phi: &[f64]) -> Vec<f64> {
        self.b.iter().zip(phi).map(|(b, p)| b - p).collect()
    }

    pub fn consumption(&self, phi: &[f64]) -> Vec<f64> {
        mat_vec(&self.rm, &self.slack(phi))
    }

    pub fn true_total(&self, phi: &[f64]) -> f64 {
        mat_vec(&self.rc, &self.slack(phi)).iter().sum()
    }

    pub fn revenue(&self, phi: &[f64]) -> f64 {
        phi.iter().zip(self.consumption(phi)).map(|(p, q)| p * q).sum()
    }

    /// Largest constraint violation at `phi`.
    pub fn infeasibility(&self, phi: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (&p, q) in phi.iter().zip(self.consumption(phi)) {
            worst = worst.max(-p).max(-q);
        }
        if self.cap.is_finite() {
            worst = worst.max(self.true_total(phi) - self.cap);
        }
        worst
    }

    /// KKT residuals at `phi`. Constraints within `active_tol` of binding
    /// may carry a nonnegative multiplier; the stationarity residual is the
    /// best fit over such multipliers.
    pub fn kkt(&self, phi: &[f64], active_tol: f64) -> KktReport {
        let n = phi.len();
        let q = self.consumption(phi);
        let rm_t = transpose(&self.rm);
        let rm_t_phi = mat_vec(&rm_t, phi);
        // Gradient of the objective; stationarity is grad + sum mu_k grad g_k = 0.
        let grad: Vec<f64> = (0..n).map(|i| q[i] - rm_t_phi[i]).collect();
        let mut cols = Vec::new();
        for i in 0..n {
            if phi[i] <= active_tol {
                cols.push((0..n).map(|k| if k == i { 1.0 } else { 0.0 }).collect());
            }
            if q[i] <= active_tol {
                cols.push(self.rm[i].iter().map(|v| -v).collect());
            }
        }
        if self.cap.is_finite() && self.cap - self.true_total(phi) <= active_tol {
            let rc_t_one: Vec<f64> = (0..n).map(|l| (0..n).map(|i| self.rc[i][l]).sum()).collect();
            cols.push(rc_t_one);
        }
        let target: Vec<f64> = grad.iter().map(|g| -g).collect();
        let stationarity = if cols.is_empty() {
            grad.iter().fold(0.0f64, |m, g| m.max(g.abs()))
        } else {
            nnls(&cols, &target).1
        };
        KktReport { stationarity, primal: self.infeasibility(phi), revenue: self.revenue(phi) }
    }

    /// Best feasible revenue over a uniform grid on `[0, max b]^n`.
    pub fn grid_best(&self, steps: usize) -> (f64, Vec<f64>) {
        let n = self.b.len();
        let top = self.b.iter().copied().fold(0.0f64, f64::max);
        let h = top / steps as f64;
        let mut best = (f64::NEG_INFINITY, vec![0.0; n]);
        let mut idx = vec![0usize; n];
        loop {
            let phi: Vec<f64> = idx.iter().map(|&k| k as f64 * h).collect();
            if self.infeasibility(&phi) <= 0.0 {
                let r = self.revenue(&phi);
                if r > best.0 {
                    best = (r, phi);
                }
            }
            let mut d = 0;
            loop {
                if d == n {
                    return best;
                }
                idx[d] += 1;
                if idx[d] <= steps {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
        }
    }
}

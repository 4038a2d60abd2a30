//! Mixed-integer quadratic model of the full leader problem.
//!
//! The bilinear restoration `s(t+1) = (1 - x(t)) s(t) + 1` is linearized with
//! `y(t) = x(t) s(t)` and four big-M rows; the chance constraint enters as
//! one row per threshold scenario; the followers' equilibrium is
//! substituted through `R = (A - W)^-1`. The model is meant for external
//! MIQP solvers; this crate solves the same problem exactly by
//! [`crate::scheduler`].
//!
//! Layout, with 1-based indices in names:
//!
//! | block  | variables              | kind       | bounds   |
//! |--------|------------------------|------------|----------|
//! | prices | `phi_i_t`              | continuous | [0, inf) |
//! | maint. | `x_j_t`                | binary     | [0, 1]   |
//! | state  | `s_j_t`                | continuous | [0, inf) |
//! | aux.   | `y_j_t`                | continuous | [0, inf) |
//!
//! Rows, in order: `init_j` (`s_j_1 = 1`), `dyn_j_t` for `t < T`,
//! `bigm_lo_j_t`, `bigm_hi_j_t`, `bigm_on_j_t`, `rul_j_t_k`, `cap_t`,
//! `nonneg_i_t`. That is `(4 + K) J T + (N + 1) T` rows and
//! `(N + 3 J) T` variables.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::model::{CustomerNetwork, SolutionReport, UnitFleet};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    /// `(variable index, coefficient)`.
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// `maximize constant + sum c_k z_k + sum q_kl z_k z_l`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Objective {
    pub constant: f64,
    pub linear: Vec<(usize, f64)>,
    pub quadratic: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelDims {
    pub n: usize,
    pub j: usize,
    pub t: usize,
    pub k: usize,
}

impl ModelDims {
    pub fn variable_count(&self) -> usize {
        (self.n + 3 * self.j) * self.t
    }

    pub fn constraint_count(&self) -> usize {
        (4 + self.k) * self.j * self.t + (self.n + 1) * self.t
    }

    pub fn phi(&self, i: usize, t: usize) -> usize {
        i * self.t + t
    }

    pub fn x(&self, j: usize, t: usize) -> usize {
        self.n * self.t + j * self.t + t
    }

    pub fn s(&self, j: usize, t: usize) -> usize {
        (self.n + self.j) * self.t + j * self.t + t
    }

    pub fn y(&self, j: usize, t: usize) -> usize {
        (self.n + 2 * self.j) * self.t + j * self.t + t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiqpModel {
    pub dims: ModelDims,
    pub big_m: f64,
    pub variables: Vec<Variable>,
    pub objective: Objective,
    pub constraints: Vec<Constraint>,
}

/// Rows or bounds broken by an assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentCheck {
    pub objective: f64,
    pub violated_rows: Vec<usize>,
    pub violated_bounds: Vec<usize>,
}

impl AssignmentCheck {
    pub fn feasible(&self) -> bool {
        self.violated_rows.is_empty() && self.violated_bounds.is_empty()
    }
}

/// Big-M constant for the given effective thresholds and horizon.
pub fn big_m(effective: &[u32], t_count: usize) -> f64 {
    (effective.iter().copied().max().unwrap_or(0) as usize + t_count + 1) as f64
}

/// Builds the model. `thresholds[j]` holds the `K` scenario thresholds of
/// unit `j` (a single entry when exporting effective thresholds).
pub fn export_miqp(net: &CustomerNetwork, fleet: &UnitFleet, thresholds: &[Vec<f64>]) -> Result<MiqpModel> {
    let (n, j_count, t_count) = (net.n(), fleet.j_count(), net.t_count());
    if thresholds.len() != j_count {
        return Err(Error::DimensionMismatch { what: "threshold scenarios", expected: j_count, found: thresholds.len() });
    }
    let k = thresholds.first().map_or(0, Vec::len);
    if k == 0 || thresholds.iter().any(|row| row.len() != k) {
        return Err(Error::validation("threshold scenarios", None, "every unit needs the same positive number of scenarios"));
    }
    let r = net.response_matrix()?;
    let dims = ModelDims { n, j: j_count, t: t_count, k };
    let effective: Vec<u32> = thresholds.iter().map(|row| crate::reliability::effective_threshold(row)).collect();
    let m = big_m(&effective, t_count);

    let mut variables = Vec::with_capacity(dims.variable_count());
    for i in 0..n {
        for t in 0..t_count {
            variables.push(continuous(format!("phi_{}_{}", i + 1, t + 1)));
        }
    }
    for j in 0..j_count {
        for t in 0..t_count {
            variables.push(Variable { name: format!("x_{}_{}", j + 1, t + 1), kind: VarKind::Binary, lower: 0.0, upper: 1.0 });
        }
    }
    for prefix in ["s", "y"] {
        for j in 0..j_count {
            for t in 0..t_count {
                variables.push(continuous(format!("{prefix}_{}_{}", j + 1, t + 1)));
            }
        }
    }

    let mut objective = Objective::default();
    for t in 0..t_count {
        let b = net.b_at(t)?;
        let rb = &r * &b;
        for i in 0..n {
            objective.linear.push((dims.phi(i, t), rb[i]));
        }
        for i in 0..n {
            for l in 0..n {
                if r[(i, l)] != 0.0 {
                    objective.quadratic.push((dims.phi(i, t), dims.phi(l, t), -r[(i, l)]));
                }
            }
        }
    }
    for j in 0..j_count {
        for t in 0..t_count {
            objective.linear.push((dims.x(j, t), -fleet.cost()[j]));
        }
    }

    let mut constraints = Vec::with_capacity(dims.constraint_count());
    let mut row = |name: String, terms: Vec<(usize, f64)>, sense: Sense, rhs: f64| {
        constraints.push(Constraint { name, terms, sense, rhs });
    };
    for j in 0..j_count {
        row(format!("init_{}", j + 1), vec![(dims.s(j, 0), 1.0)], Sense::Eq, 1.0);
    }
    for j in 0..j_count {
        for t in 0..t_count.saturating_sub(1) {
            row(
                format!("dyn_{}_{}", j + 1, t + 1),
                vec![(dims.s(j, t + 1), 1.0), (dims.s(j, t), -1.0), (dims.y(j, t), 1.0)],
                Sense::Eq,
                1.0,
            );
        }
    }
    let bigm_rows: [(&str, f64, Sense, f64); 3] =
        [("bigm_lo", -m, Sense::Ge, -m), ("bigm_hi", m, Sense::Le, m), ("bigm_on", -m, Sense::Le, 0.0)];
    for (label, x_coef, sense, rhs) in bigm_rows {
        for j in 0..j_count {
            for t in 0..t_count {
                let mut terms = vec![(dims.y(j, t), 1.0)];
                if label != "bigm_on" {
                    terms.push((dims.s(j, t), -1.0));
                }
                terms.push((dims.x(j, t), x_coef));
                row(format!("{label}_{}_{}", j + 1, t + 1), terms, sense, rhs);
            }
        }
    }
    for j in 0..j_count {
        for t in 0..t_count {
            for (kk, &bound) in thresholds[j].iter().enumerate() {
                row(format!("rul_{}_{}_{}", j + 1, t + 1, kk + 1), vec![(dims.s(j, t), 1.0)], Sense::Le, bound);
            }
        }
    }
    let col_sums: Vec<f64> = (0..n).map(|l| r.column(l).sum()).collect();
    let total_capacity: f64 = fleet.q_max().iter().sum();
    for t in 0..t_count {
        let b = net.b_at(t)?;
        let mut terms: Vec<(usize, f64)> = (0..n).map(|l| (dims.phi(l, t), -col_sums[l])).collect();
        terms.extend((0..j_count).map(|j| (dims.x(j, t), fleet.q_max()[j])));
        let demand_at_zero: f64 = (0..n).map(|l| col_sums[l] * b[l]).sum();
        row(format!("cap_{}", t + 1), terms, Sense::Le, total_capacity - demand_at_zero);
    }
    for t in 0..t_count {
        let b = net.b_at(t)?;
        let rb = &r * &b;
        for i in 0..n {
            let terms = (0..n).map(|l| (dims.phi(l, t), -r[(i, l)])).collect();
            row(format!("nonneg_{}_{}", i + 1, t + 1), terms, Sense::Ge, -rb[i]);
        }
    }
    Ok(MiqpModel { dims, big_m: m, variables, objective, constraints })
}

fn continuous(name: String) -> Variable {
    Variable { name, kind: VarKind::Continuous, lower: 0.0, upper: f64::INFINITY }
}

impl MiqpModel {
    /// Objective value and broken rows/bounds at `values`, with absolute
    /// tolerance `tol` (scaled by the row's magnitude).
    pub fn check(&self, values: &[f64], tol: f64) -> Result<AssignmentCheck> {
        if values.len() != self.variables.len() {
            return Err(Error::DimensionMismatch { what: "assignment", expected: self.variables.len(), found: values.len() });
        }
        let mut objective = self.objective.constant;
        objective += self.objective.linear.iter().map(|&(k, c)| c * values[k]).sum::<f64>();
        objective += self.objective.quadratic.iter().map(|&(k, l, c)| c * values[k] * values[l]).sum::<f64>();
        let violated_rows = self
            .constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| {
                let lhs: f64 = c.terms.iter().map(|&(k, a)| a * values[k]).sum();
                let scale = c.terms.iter().map(|&(k, a)| (a * values[k]).abs()).fold(c.rhs.abs(), f64::max).max(1.0);
                let gap = tol * scale;
                match c.sense {
                    Sense::Le => lhs > c.rhs + gap,
                    Sense::Ge => lhs < c.rhs - gap,
                    Sense::Eq => (lhs - c.rhs).abs() > gap,
                }
            })
            .map(|(k, _)| k)
            .collect();
        let violated_bounds = self
            .variables
            .iter()
            .zip(values)
            .enumerate()
            .filter(|(_, (v, &z))| {
                z < v.lower - tol
                    || z > v.upper + tol
                    || (v.kind == VarKind::Binary && z != 0.0 && z != 1.0)
            })
            .map(|(k, _)| k)
            .collect();
        Ok(AssignmentCheck { objective, violated_rows, violated_bounds })
    }

    /// Assignment encoding a solution report: prices, decisions, states and
    /// `y = x s`.
    pub fn assignment(&self, report: &SolutionReport) -> Result<Vec<f64>> {
        let d = self.dims;
        let sched = &report.schedule;
        if sched.j_count() != d.j || sched.t_count() != d.t {
            return Err(Error::DimensionMismatch { what: "schedule", expected: d.j * d.t, found: sched.j_count() * sched.t_count() });
        }
        let phi: &DMatrix<f64> = &report.pricing.phi;
        if phi.nrows() != d.n || phi.ncols() != d.t {
            return Err(Error::DimensionMismatch { what: "prices", expected: d.n * d.t, found: phi.len() });
        }
        let mut values = vec![0.0; self.variables.len()];
        for i in 0..d.n {
            for t in 0..d.t {
                values[d.phi(i, t)] = phi[(i, t)];
            }
        }
        for j in 0..d.j {
            for t in 0..d.t {
                let x = if sched.maintained(j, t) { 1.0 } else { 0.0 };
                let s = sched.state(j, t) as f64;
                values[d.x(j, t)] = x;
                values[d.s(j, t)] = s;
                values[d.y(j, t)] = x * s;
            }
        }
        Ok(values)
    }
}

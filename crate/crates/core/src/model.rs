//! Domain types shared by every layer, with their construction-time checks.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::linalg;
use crate::{Error, Result};

/// Maximum number of manufacturing units; maintenance subsets are bitmasks.
pub const MAX_UNITS: usize = 20;

/// Customers, their quadratic utility parameters and the externality graph.
///
/// `b` is stored per period (N x T) so that a demand profile over the
/// horizon can be represented; a constant `b` is just a matrix with equal
/// columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomerNetwork {
    a: DVector<f64>,
    b: DMatrix<f64>,
    w: DMatrix<f64>,
}

impl CustomerNetwork {
    /// Validates `a >= 0`, a zero-diagonal nonnegative `w`, and
    /// `a_i >= sum_l w_il` for every customer.
    pub fn new(a: DVector<f64>, b: DMatrix<f64>, w: DMatrix<f64>) -> Result<Self> {
        let n = a.len();
        if n == 0 {
            return Err(Error::validation("n", None, "need at least one customer"));
        }
        if b.nrows() != n {
            return Err(Error::DimensionMismatch { what: "b rows", expected: n, found: b.nrows() });
        }
        if b.ncols() == 0 {
            return Err(Error::validation("b", None, "need at least one period"));
        }
        if w.nrows() != n || w.ncols() != n {
            return Err(Error::DimensionMismatch {
                what: "w",
                expected: n,
                found: if w.nrows() != n { w.nrows() } else { w.ncols() },
            });
        }
        for (i, &ai) in a.iter().enumerate() {
            if !ai.is_finite() || ai < 0.0 {
                return Err(Error::validation("a", Some(i), format!("must be finite and >= 0, got {ai}")));
            }
        }
        for i in 0..n {
            for t in 0..b.ncols() {
                if !b[(i, t)].is_finite() {
                    return Err(Error::validation("b", Some(i), "must be finite"));
                }
            }
            if w[(i, i)] != 0.0 {
                return Err(Error::validation("w", Some(i), "w diagonal must be zero"));
            }
            for l in 0..n {
                let v = w[(i, l)];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::validation("w", Some(i), format!("entries must be finite and >= 0, got {v}")));
                }
            }
        }
        for i in 0..n {
            let row_sum: f64 = w.row(i).iter().sum();
            if a[i] < row_sum {
                return Err(Error::AssumptionViolated { customer: i, a: a[i], row_sum });
            }
        }
        Ok(Self { a, b, w })
    }

    /// Network whose `b` is the same in every period.
    pub fn with_constant_b(a: DVector<f64>, b: &[f64], t_count: usize, w: DMatrix<f64>) -> Result<Self> {
        let n = b.len();
        let b = DMatrix::from_fn(n, t_count, |i, _| b[i]);
        Self::new(a, b, w)
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn t_count(&self) -> usize {
        self.b.ncols()
    }

    pub fn a(&self) -> &DVector<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn w(&self) -> &DMatrix<f64> {
        &self.w
    }

    pub fn check_customer(&self, i: usize) -> Result<()> {
        if i >= self.n() {
            return Err(Error::IndexOutOfRange { what: "customer", index: i, len: self.n() });
        }
        Ok(())
    }

    pub fn check_period(&self, t: usize) -> Result<()> {
        if t >= self.t_count() {
            return Err(Error::IndexOutOfRange { what: "period", index: t, len: self.t_count() });
        }
        Ok(())
    }

    /// `B(t)`, the linear utility coefficients of period `t`.
    pub fn b_at(&self, t: usize) -> Result<DVector<f64>> {
        self.check_period(t)?;
        Ok(self.b.column(t).into_owned())
    }

    /// `A - W`.
    pub fn system_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.a) - &self.w
    }

    /// `R = (A - W)^-1`, guarded against ill-conditioning.
    pub fn response_matrix(&self) -> Result<DMatrix<f64>> {
        linalg::guarded_inverse(&self.system_matrix())
    }

    /// Row sums of `W`, i.e. how strongly each customer is influenced.
    pub fn influence(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.w.row(i).iter().sum()).collect()
    }

    /// Same customers with every externality weight removed.
    pub fn without_network(&self) -> Self {
        let n = self.n();
        Self { a: self.a.clone(), b: self.b.clone(), w: DMatrix::zeros(n, n) }
    }
}

/// Manufacturing units: threshold distribution, maintenance cost, capacity.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitFleet {
    mu: Vec<f64>,
    sigma: Vec<f64>,
    cost: Vec<f64>,
    q_max: Vec<f64>,
}

impl UnitFleet {
    pub fn new(mu: Vec<f64>, sigma: Vec<f64>, cost: Vec<f64>, q_max: Vec<f64>) -> Result<Self> {
        let j = mu.len();
        if j == 0 {
            return Err(Error::validation("units", None, "need at least one unit"));
        }
        if j > MAX_UNITS {
            return Err(Error::validation("units", None, format!("at most {MAX_UNITS} units are supported, got {j}")));
        }
        for (what, v) in [("sigma", &sigma), ("cost", &cost), ("q_max", &q_max)] {
            if v.len() != j {
                return Err(Error::DimensionMismatch { what, expected: j, found: v.len() });
            }
        }
        for k in 0..j {
            if !(mu[k].is_finite() && mu[k] > 1.0) {
                return Err(Error::validation("mu", Some(k), format!("must be finite and > 1, got {}", mu[k])));
            }
            if !(sigma[k].is_finite() && sigma[k] >= 0.0) {
                return Err(Error::validation("sigma", Some(k), format!("must be finite and >= 0, got {}", sigma[k])));
            }
            if !(cost[k].is_finite() && cost[k] >= 0.0) {
                return Err(Error::validation("cost", Some(k), format!("must be finite and >= 0, got {}", cost[k])));
            }
            if !(q_max[k].is_finite() && q_max[k] > 0.0) {
                return Err(Error::validation("q_max", Some(k), format!("must be finite and > 0, got {}", q_max[k])));
            }
        }
        Ok(Self { mu, sigma, cost, q_max })
    }

    pub fn j_count(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn cost(&self) -> &[f64] {
        &self.cost
    }

    pub fn q_max(&self) -> &[f64] {
        &self.q_max
    }

    /// Production available when the units in `maintained` (bit j = unit j)
    /// are down. Summed in unit order so equal subsets give bit-equal values.
    pub fn available_capacity(&self, maintained: u32) -> f64 {
        self.q_max
            .iter()
            .enumerate()
            .filter(|(j, _)| maintained & (1 << j) == 0)
            .fold(0.0, |acc, (_, q)| acc + q)
    }

    /// Cost of maintaining the units in `maintained` for one period.
    pub fn maintenance_cost(&self, maintained: u32) -> f64 {
        self.cost
            .iter()
            .enumerate()
            .filter(|(j, _)| maintained & (1 << j) != 0)
            .fold(0.0, |acc, (_, c)| acc + c)
    }

    /// Copy with every maintenance cost multiplied by `factor`.
    pub fn with_scaled_costs(&self, factor: f64) -> Result<Self> {
        let cost = self.cost.iter().map(|c| c * factor).collect();
        Self::new(self.mu.clone(), self.sigma.clone(), cost, self.q_max.clone())
    }
}

/// Planning horizon and chance-constraint settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Horizon {
    pub t_count: usize,
    pub alpha: f64,
    pub k_scenarios: usize,
    pub rng_seed: u64,
}

impl Horizon {
    pub fn new(t_count: usize, alpha: f64, k_scenarios: usize, rng_seed: u64) -> Result<Self> {
        if t_count == 0 {
            return Err(Error::validation("t_count", None, "must be positive"));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::validation("alpha", None, format!("must lie in (0, 1), got {alpha}")));
        }
        if k_scenarios == 0 {
            return Err(Error::validation("k_scenarios", None, "must be positive"));
        }
        Ok(Self { t_count, alpha, k_scenarios, rng_seed })
    }
}

/// Maintenance decisions and the deterioration trace they induce.
///
/// Periods are 0-based here: `state(j, 0)` is the first period and equals 1;
/// `state(j, t + 1) = (1 - x(j, t)) * state(j, t) + 1`. The trace has
/// `T + 1` entries per unit; the last one is the state after the horizon.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MaintenanceSchedule {
    j_count: usize,
    t_count: usize,
    x: Vec<bool>,
    s: Vec<u32>,
}

impl MaintenanceSchedule {
    /// Builds the schedule from a row-major `J x T` decision matrix and
    /// recomputes the deterioration trace.
    pub fn from_decisions(j_count: usize, t_count: usize, x: Vec<bool>) -> Result<Self> {
        if x.len() != j_count * t_count {
            return Err(Error::DimensionMismatch { what: "schedule", expected: j_count * t_count, found: x.len() });
        }
        let s = deterioration_trace(j_count, t_count, &x);
        Ok(Self { j_count, t_count, x, s })
    }

    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self> {
        let j_count = rows.len();
        let t_count = rows.first().map_or(0, Vec::len);
        let mut x = Vec::with_capacity(j_count * t_count);
        for row in rows {
            if row.len() != t_count {
                return Err(Error::DimensionMismatch { what: "schedule row", expected: t_count, found: row.len() });
            }
            x.extend_from_slice(row);
        }
        Self::from_decisions(j_count, t_count, x)
    }

    /// Schedule from per-period bitmasks of maintained units.
    pub fn from_masks(j_count: usize, masks: &[u32]) -> Self {
        let t_count = masks.len();
        let mut x = vec![false; j_count * t_count];
        for (t, m) in masks.iter().enumerate() {
            for j in 0..j_count {
                x[j * t_count + t] = m & (1 << j) != 0;
            }
        }
        let s = deterioration_trace(j_count, t_count, &x);
        Self { j_count, t_count, x, s }
    }

    pub fn idle(j_count: usize, t_count: usize) -> Self {
        Self::from_decisions(j_count, t_count, vec![false; j_count * t_count]).expect("dimensions agree")
    }

    pub fn j_count(&self) -> usize {
        self.j_count
    }

    pub fn t_count(&self) -> usize {
        self.t_count
    }

    pub fn maintained(&self, j: usize, t: usize) -> bool {
        self.x[j * self.t_count + t]
    }

    /// Deterioration state of unit `j` at period `t` (`t` may equal `T`).
    pub fn state(&self, j: usize, t: usize) -> u32 {
        self.s[j * (self.t_count + 1) + t]
    }

    /// Bitmask of units maintained in period `t`.
    pub fn mask(&self, t: usize) -> u32 {
        (0..self.j_count).filter(|&j| self.maintained(j, t)).fold(0, |m, j| m | (1 << j))
    }

    pub fn decisions(&self) -> &[bool] {
        &self.x
    }

    pub fn maintenance_count(&self) -> usize {
        self.x.iter().filter(|&&v| v).count()
    }

    pub fn unit_maintenance_count(&self, j: usize) -> usize {
        (0..self.t_count).filter(|&t| self.maintained(j, t)).count()
    }

    /// Largest state reached by unit `j` inside the horizon.
    pub fn peak_state(&self, j: usize) -> u32 {
        (0..self.t_count).map(|t| self.state(j, t)).max().unwrap_or(1)
    }

    /// Copy with decision `(j, t)` replaced.
    pub fn with_decision(&self, j: usize, t: usize, value: bool) -> Self {
        let mut x = self.x.clone();
        x[j * self.t_count + t] = value;
        Self::from_decisions(self.j_count, self.t_count, x).expect("dimensions agree")
    }
}

fn deterioration_trace(j_count: usize, t_count: usize, x: &[bool]) -> Vec<u32> {
    let mut s = vec![0u32; j_count * (t_count + 1)];
    for j in 0..j_count {
        let row = &mut s[j * (t_count + 1)..(j + 1) * (t_count + 1)];
        row[0] = 1;
        for t in 0..t_count {
            let keep = if x[j * t_count + t] { 0 } else { row[t] };
            row[t + 1] = keep + 1;
        }
    }
    s
}

/// A period where a unit's state exceeds its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub unit: usize,
    pub period: usize,
    pub state: u32,
    pub threshold: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleCheck {
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

/// Checks `s(j, t) <= thresholds[j]` for every unit and every period of the
/// horizon. The trace is recomputed from the decisions, never trusted.
pub fn validate_schedule(
    schedule: &MaintenanceSchedule,
    fleet: &UnitFleet,
    thresholds: &[u32],
) -> Result<ScheduleCheck> {
    let j_count = fleet.j_count();
    if schedule.j_count() != j_count {
        return Err(Error::DimensionMismatch { what: "schedule units", expected: j_count, found: schedule.j_count() });
    }
    if thresholds.len() != j_count {
        return Err(Error::DimensionMismatch { what: "thresholds", expected: j_count, found: thresholds.len() });
    }
    let t_count = schedule.t_count();
    let trace = deterioration_trace(j_count, t_count, schedule.decisions());
    let mut violations = Vec::new();
    for (j, &threshold) in thresholds.iter().enumerate() {
        for t in 0..t_count {
            let state = trace[j * (t_count + 1) + t];
            if state > threshold {
                violations.push(Violation { unit: j, period: t, state, threshold });
            }
        }
    }
    Ok(ScheduleCheck { feasible: violations.is_empty(), violations })
}

/// Prices, equilibrium consumption and revenue over the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct PricingSolution {
    /// Prices, N x T.
    pub phi: DMatrix<f64>,
    /// Consumption, N x T.
    pub q: DMatrix<f64>,
    pub revenue_per_period: Vec<f64>,
    pub total_revenue: f64,
}

/// A maintenance plan with its prices and the supplier's profit.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionReport {
    pub schedule: MaintenanceSchedule,
    pub pricing: PricingSolution,
    pub maintenance_cost: f64,
    /// `total_revenue - maintenance_cost`.
    pub profit: f64,
    /// Threshold violations; empty for every schedule the solvers return.
    pub violations: Vec<Violation>,
}

impl SolutionReport {
    pub fn feasible(&self) -> bool {
        self.violations.is_empty()
    }

    /// Available capacity in each period.
    pub fn capacities(&self, fleet: &UnitFleet) -> Vec<f64> {
        (0..self.schedule.t_count()).map(|t| fleet.available_capacity(self.schedule.mask(t))).collect()
    }
}

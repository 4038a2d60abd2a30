//! The supplier's per-period pricing problem.
//!
//! A network-aware supplier anticipates the equilibrium
//! `q = R (B - phi)` with `R = (A - W)^-1` and solves
//!
//! ```text
//!     maximize    phi' R (B - phi)
//!     subject to  1' R (B - phi) <= capacity,   R (B - phi) >= 0,   phi >= 0
//! ```
//!
//! Substituting `phi = B - (A - W) q` turns this into a concave quadratic in
//! `q` with box and polyhedral constraints, which is what [`crate::qp`]
//! solves. A network-blind supplier predicts `q = A^-1 (B - phi)` and
//! maximizes `phi' A^-1 (B - phi)` instead; its capacity row keeps the true
//! `R`, its nonnegativity row uses its own prediction.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::equilibrium::{self, DEFAULT_MAX_ITER, DEFAULT_TOLERANCE};
use crate::model::{CustomerNetwork, UnitFleet};
use crate::qp::QuadraticProgram;
use crate::{Error, Result};

/// Lagrange multipliers of a pricing solution.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceMultipliers {
    /// For `phi_i >= 0`.
    pub price_floor: DVector<f64>,
    /// For the model's consumption `q_i >= 0`.
    pub consumption_floor: DVector<f64>,
    /// For total consumption `<= capacity`; zero when capacity is unbounded.
    pub capacity: f64,
}

/// Optimal prices for one period and one capacity level.
#[derive(Debug, Clone, PartialEq)]
pub struct PricePoint {
    pub phi: DVector<f64>,
    /// Consumption as predicted by the supplier's model. For the
    /// network-aware supplier this is the true equilibrium.
    pub q: DVector<f64>,
    /// `phi' q` under the supplier's model.
    pub revenue: f64,
    pub multipliers: PriceMultipliers,
}

/// Pricing model prepared once per network: the consumption model and the
/// row that measures true total consumption in model coordinates.
#[derive(Debug, Clone)]
pub struct PricingModel<'a> {
    net: &'a CustomerNetwork,
    network_known: bool,
    /// `phi = B - model * q`.
    model: DMatrix<f64>,
    /// `1' R (B - phi) = kappa' q`.
    kappa: DVector<f64>,
    hessian: DMatrix<f64>,
}

impl<'a> PricingModel<'a> {
    /// Network-aware supplier.
    pub fn known(net: &'a CustomerNetwork) -> Result<Self> {
        let model = net.system_matrix();
        net.response_matrix()?;
        Self::build(net, true, model, DVector::from_element(net.n(), 1.0))
    }

    /// Supplier that ignores `W` when predicting consumption.
    pub fn no_network(net: &'a CustomerNetwork) -> Result<Self> {
        if let Some(i) = net.a().iter().position(|&a| a <= 0.0) {
            return Err(Error::UnboundedResponse { customer: i });
        }
        let r = net.response_matrix()?;
        let model = DMatrix::from_diagonal(net.a());
        let kappa = (&r * &model).transpose() * DVector::from_element(net.n(), 1.0);
        Self::build(net, false, model, kappa)
    }

    fn build(net: &'a CustomerNetwork, network_known: bool, model: DMatrix<f64>, kappa: DVector<f64>) -> Result<Self> {
        let hessian = &model + model.transpose();
        Ok(Self { net, network_known, model, kappa, hessian })
    }

    pub fn network_known(&self) -> bool {
        self.network_known
    }

    /// Optimal prices of period `t` with `capacity` units of production
    /// available; `f64::INFINITY` drops the capacity constraint.
    pub fn solve(&self, t: usize, capacity: f64) -> Result<PricePoint> {
        if capacity.is_nan() || capacity < 0.0 {
            return Err(Error::Domain { what: "capacity", value: capacity });
        }
        let b = self.net.b_at(t)?;
        let n = self.net.n();
        if capacity == 0.0 {
            return self.shut_down(&b);
        }
        let with_cap = capacity.is_finite();
        let m = 2 * n + usize::from(with_cap);
        let mut rows = DMatrix::zeros(m, n);
        let mut rhs = DVector::zeros(m);
        for i in 0..n {
            rows[(i, i)] = 1.0;
            for l in 0..n {
                rows[(n + i, l)] = -self.model[(i, l)];
            }
            rhs[n + i] = -b[i];
        }
        if with_cap {
            for l in 0..n {
                rows[(2 * n, l)] = -self.kappa[l];
            }
            rhs[2 * n] = -capacity;
        }
        let qp = QuadraticProgram { g: self.hessian.clone(), c: -&b, rows, rhs };
        let sol = qp.solve()?;
        let q = sol.z.map(|v| v.max(0.0));
        let phi = (&b - &self.model * &q).map(|v| v.max(0.0));
        let revenue = phi.dot(&q);
        let multipliers = PriceMultipliers {
            consumption_floor: sol.multipliers.rows(0, n).into_owned(),
            price_floor: sol.multipliers.rows(n, n).into_owned(),
            capacity: if with_cap { sol.multipliers[2 * n] } else { 0.0 },
        };
        Ok(PricePoint { phi, q, revenue, multipliers })
    }

    /// Zero capacity: nobody may consume, so every customer is priced at
    /// the choke price `phi = B`.
    fn shut_down(&self, b: &DVector<f64>) -> Result<PricePoint> {
        if b.iter().any(|&v| v < 0.0) {
            return Err(Error::QpInfeasible);
        }
        let n = b.len();
        let capacity = (0..n).map(|i| b[i] / self.kappa[i]).fold(0.0, f64::max);
        let consumption_floor = DVector::from_fn(n, |i, _| capacity * self.kappa[i] - b[i]);
        Ok(PricePoint {
            phi: b.clone(),
            q: DVector::zeros(n),
            revenue: 0.0,
            multipliers: PriceMultipliers { price_floor: DVector::zeros(n), consumption_floor, capacity },
        })
    }
}

/// Network-aware optimal prices; see [`PricingModel::solve`].
pub fn solve_pricing_qp(net: &CustomerNetwork, t: usize, capacity: f64) -> Result<PricePoint> {
    PricingModel::known(net)?.solve(t, capacity)
}

/// Prices of a supplier that predicts consumption as `A^-1 (B - phi)`. The
/// returned `q` and `revenue` are that prediction, not what customers do.
pub fn solve_pricing_qp_no_network(net: &CustomerNetwork, t: usize, capacity: f64) -> Result<PricePoint> {
    PricingModel::no_network(net)?.solve(t, capacity)
}

/// Optimal pricing at every capacity a maintenance subset can leave.
#[derive(Debug, Clone, PartialEq)]
pub struct RevenueTable {
    pub period: usize,
    pub network_known: bool,
    capacities: Vec<f64>,
    entries: Vec<PricePoint>,
}

impl RevenueTable {
    /// Table from explicit `(capacity, point)` pairs, sorted by capacity.
    pub fn from_entries(period: usize, network_known: bool, mut pairs: Vec<(f64, PricePoint)>) -> Self {
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs.dedup_by(|a, b| a.0 == b.0);
        let (capacities, entries) = pairs.into_iter().unzip();
        Self { period, network_known, capacities, entries }
    }

    pub fn capacities(&self) -> &[f64] {
        &self.capacities
    }

    pub fn entries(&self) -> impl Iterator<Item = (f64, &PricePoint)> {
        self.capacities.iter().copied().zip(&self.entries)
    }

    pub fn len(&self) -> usize {
        self.capacities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.capacities.is_empty()
    }

    /// Entry for exactly this capacity value.
    pub fn get(&self, capacity: f64) -> Result<&PricePoint> {
        self.capacities
            .binary_search_by(|c| c.total_cmp(&capacity))
            .map(|k| &self.entries[k])
            .map_err(|_| Error::MissingCapacity { period: self.period, capacity })
    }

    pub fn revenue(&self, capacity: f64) -> Result<f64> {
        self.get(capacity).map(|p| p.revenue)
    }
}

/// Every distinct capacity `sum_{j not maintained} q_max_j`, ascending.
pub fn subset_capacities(fleet: &UnitFleet) -> Vec<f64> {
    let mut caps: Vec<f64> = (0..1u32 << fleet.j_count()).map(|m| fleet.available_capacity(m)).collect();
    caps.sort_by(f64::total_cmp);
    caps.dedup();
    caps
}

/// Network-aware revenue table of period `t`.
pub fn build_revenue_table(net: &CustomerNetwork, fleet: &UnitFleet, t: usize) -> Result<RevenueTable> {
    build_table(&PricingModel::known(net)?, fleet, t)
}

/// Revenue table of the network-blind supplier (predicted revenues).
pub fn build_revenue_table_no_network(net: &CustomerNetwork, fleet: &UnitFleet, t: usize) -> Result<RevenueTable> {
    build_table(&PricingModel::no_network(net)?, fleet, t)
}

/// Tables for every period of the horizon.
pub fn build_revenue_tables(net: &CustomerNetwork, fleet: &UnitFleet, network_known: bool) -> Result<Vec<RevenueTable>> {
    let model = if network_known { PricingModel::known(net)? } else { PricingModel::no_network(net)? };
    (0..net.t_count()).map(|t| build_table(&model, fleet, t)).collect()
}

fn build_table(model: &PricingModel<'_>, fleet: &UnitFleet, t: usize) -> Result<RevenueTable> {
    let mut pairs = Vec::new();
    let mut last: f64 = 0.0;
    for cap in subset_capacities(fleet) {
        let point = model.solve(t, cap)?;
        if point.revenue < last - 1e-9 * last.abs().max(1.0) {
            return Err(Error::ModelInvalid(alloc::format!(
                "revenue decreased from {last} to {} when capacity grew to {cap}",
                point.revenue
            )));
        }
        last = last.max(point.revenue);
        pairs.push((cap, point));
    }
    Ok(RevenueTable::from_entries(t, model.network_known(), pairs))
}

/// Total consumption above the available capacity in one period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityViolation {
    pub period: usize,
    pub consumption: f64,
    pub capacity: f64,
    pub excess: f64,
}

/// What customers actually do when faced with given prices.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizedOutcome {
    /// True equilibrium consumption, N x T.
    pub q: DMatrix<f64>,
    pub revenue_per_period: Vec<f64>,
    pub revenue: f64,
    pub violations: Vec<CapacityViolation>,
}

/// Evaluates prices `phi` (N x T) against the true network. Periods where
/// equilibrium consumption exceeds `capacities[t]` are reported, not
/// rationed.
pub fn realized_profit_of_prices(net: &CustomerNetwork, phi: &DMatrix<f64>, capacities: &[f64]) -> Result<RealizedOutcome> {
    let (n, t_count) = (net.n(), net.t_count());
    if phi.nrows() != n || phi.ncols() != t_count {
        return Err(Error::DimensionMismatch { what: "price matrix", expected: n * t_count, found: phi.len() });
    }
    if capacities.len() != t_count {
        return Err(Error::DimensionMismatch { what: "capacities", expected: t_count, found: capacities.len() });
    }
    if let Some(&v) = phi.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::Domain { what: "price", value: v });
    }
    let r = net.response_matrix()?;
    let mut q = DMatrix::zeros(n, t_count);
    let mut revenue_per_period = Vec::with_capacity(t_count);
    let mut violations = Vec::new();
    for t in 0..t_count {
        let prices = phi.column(t).into_owned();
        let eq = match equilibrium::nash_closed_form_with(net, &r, t, &prices) {
            Ok(eq) => eq,
            Err(Error::InfeasiblePrice { .. }) => {
                equilibrium::nash_iterative(net, t, &prices, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER)?
            }
            Err(e) => return Err(e),
        };
        let total: f64 = eq.q.iter().sum();
        let cap = capacities[t];
        if total > cap + 1e-9 * cap.abs().max(1.0) {
            violations.push(CapacityViolation { period: t, consumption: total, capacity: cap, excess: total - cap });
        }
        revenue_per_period.push(prices.dot(&eq.q));
        q.set_column(t, &eq.q);
    }
    let revenue = revenue_per_period.iter().sum();
    Ok(RealizedOutcome { q, revenue_per_period, revenue, violations })
}

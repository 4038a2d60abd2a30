//! Maintenance scheduling for the supplier.
//!
//! Once the maintenance decisions are fixed, periods decouple: the revenue
//! of period `t` depends only on the capacity left by the maintained
//! subset, and optimal prices for every such capacity are tabulated in a
//! [`RevenueTable`]. What remains is a finite-horizon problem over the
//! joint deterioration states, solved exactly by backward induction.
//!
//! Ties between equally profitable schedules (within `1e-9` relative) are
//! broken the same way by every search in this module: fewer maintenance
//! actions first, then, at the first period where two schedules differ, the
//! one maintaining more units, then the one with the smaller unit bitmask.
//! There is no terminal value on the final states, so optimal schedules
//! avoid maintenance near the end of the horizon.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use nalgebra::DMatrix;

use crate::model::{validate_schedule, MaintenanceSchedule, PricingSolution, SolutionReport, UnitFleet};
use crate::pricing::RevenueTable;
use crate::{Error, Result};

/// Default cap on `states x actions x periods` for [`optimal_schedule_dp`].
pub const DEFAULT_BUDGET: u128 = 1_000_000_000;
/// Default cap on `2^(J T)` for [`brute_force_schedule`].
pub const DEFAULT_BRUTE_FORCE_LIMIT: u128 = 1 << 24;

/// Joint deterioration state: `ages[j]` in `1..=effective[j]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DpState {
    pub ages: Vec<u32>,
}

/// Revenue of every (period, maintained subset) pair plus per-subset costs.
#[derive(Debug, Clone)]
pub struct RevenueLookup {
    j_count: usize,
    revenue: Vec<Vec<f64>>,
    cost: Vec<f64>,
}

impl RevenueLookup {
    pub fn new(fleet: &UnitFleet, tables: &[RevenueTable]) -> Result<Self> {
        if tables.is_empty() {
            return Err(Error::validation("revenue tables", None, "need at least one period"));
        }
        let actions = 1u32 << fleet.j_count();
        let revenue = tables
            .iter()
            .map(|table| (0..actions).map(|m| table.revenue(fleet.available_capacity(m))).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let cost = (0..actions).map(|m| fleet.maintenance_cost(m)).collect();
        Ok(Self { j_count: fleet.j_count(), revenue, cost })
    }

    pub fn t_count(&self) -> usize {
        self.revenue.len()
    }

    pub fn revenue(&self, t: usize, mask: u32) -> f64 {
        self.revenue[t][mask as usize]
    }

    pub fn cost(&self, mask: u32) -> f64 {
        self.cost[mask as usize]
    }

    /// `(revenue, cost, profit)` of a schedule given as per-period masks.
    /// Every path that reports a profit goes through this summation.
    pub fn profit(&self, masks: &[u32]) -> (f64, f64, f64) {
        let revenue = masks.iter().enumerate().fold(0.0, |acc, (t, &m)| acc + self.revenue(t, m));
        let cost = masks.iter().fold(0.0, |acc, &m| acc + self.cost(m));
        (revenue, cost, revenue - cost)
    }

    fn actions(&self) -> u32 {
        1 << self.j_count
    }
}

/// Actions in tie-break preference order: more units first, then smaller
/// bitmask.
fn preference_order(j_count: usize) -> Vec<u32> {
    let mut masks: Vec<u32> = (0..1u32 << j_count).collect();
    masks.sort_by(|a, b| b.count_ones().cmp(&a.count_ones()).then(a.cmp(b)));
    masks
}

fn prefer_mask(a: u32, b: u32) -> Ordering {
    b.count_ones().cmp(&a.count_ones()).then(a.cmp(&b))
}

fn tie_eps(v: f64) -> f64 {
    1e-9 * v.abs().max(1.0)
}

/// `Less` when schedule `a` is preferred over `b`.
fn compare_schedules(a: (f64, &[u32]), b: (f64, &[u32])) -> Ordering {
    let eps = tie_eps(a.0.abs().max(b.0.abs()));
    if a.0 > b.0 + eps {
        return Ordering::Less;
    }
    if b.0 > a.0 + eps {
        return Ordering::Greater;
    }
    let count = |m: &[u32]| m.iter().map(|x| x.count_ones()).sum::<u32>();
    count(a.1).cmp(&count(b.1)).then_with(|| {
        a.1.iter().zip(b.1).map(|(x, y)| prefer_mask(*x, *y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
    })
}

fn check_inputs(fleet: &UnitFleet, effective: &[u32], tables: &[RevenueTable]) -> Result<()> {
    if effective.len() != fleet.j_count() {
        return Err(Error::DimensionMismatch { what: "effective thresholds", expected: fleet.j_count(), found: effective.len() });
    }
    if tables.is_empty() {
        return Err(Error::validation("revenue tables", None, "need at least one period"));
    }
    if effective.contains(&0) {
        return Err(Error::Infeasible);
    }
    Ok(())
}

/// Recomputes the deterioration trace, feasibility, prices, revenue and
/// profit of a given schedule. Infeasible schedules are reported through
/// `violations`, not as an error.
pub fn evaluate_schedule(
    schedule: &MaintenanceSchedule,
    fleet: &UnitFleet,
    effective: &[u32],
    tables: &[RevenueTable],
) -> Result<SolutionReport> {
    if schedule.t_count() != tables.len() {
        return Err(Error::DimensionMismatch { what: "schedule periods", expected: tables.len(), found: schedule.t_count() });
    }
    let check = validate_schedule(schedule, fleet, effective)?;
    let lookup = RevenueLookup::new(fleet, tables)?;
    let masks: Vec<u32> = (0..schedule.t_count()).map(|t| schedule.mask(t)).collect();
    let (total_revenue, maintenance_cost, profit) = lookup.profit(&masks);

    let n = tables[0].entries().next().map_or(0, |(_, p)| p.phi.len());
    let t_count = tables.len();
    let mut phi = DMatrix::zeros(n, t_count);
    let mut q = DMatrix::zeros(n, t_count);
    let mut revenue_per_period = Vec::with_capacity(t_count);
    for (t, &mask) in masks.iter().enumerate() {
        let point = tables[t].get(fleet.available_capacity(mask))?;
        phi.set_column(t, &point.phi);
        q.set_column(t, &point.q);
        revenue_per_period.push(point.revenue);
    }
    Ok(SolutionReport {
        schedule: schedule.clone(),
        pricing: PricingSolution { phi, q, revenue_per_period, total_revenue },
        maintenance_cost,
        profit,
        violations: check.violations,
    })
}

/// Profit-maximizing schedule by backward induction over joint ages, with
/// the default state-space budget.
pub fn optimal_schedule_dp(fleet: &UnitFleet, effective: &[u32], tables: &[RevenueTable]) -> Result<SolutionReport> {
    optimal_schedule_dp_with_budget(fleet, effective, tables, DEFAULT_BUDGET)
}

pub fn optimal_schedule_dp_with_budget(
    fleet: &UnitFleet,
    effective: &[u32],
    tables: &[RevenueTable],
    budget: u128,
) -> Result<SolutionReport> {
    check_inputs(fleet, effective, tables)?;
    let lookup = RevenueLookup::new(fleet, tables)?;
    let masks = dp_masks(&lookup, effective, budget)?;
    let schedule = MaintenanceSchedule::from_masks(fleet.j_count(), &masks);
    evaluate_schedule(&schedule, fleet, effective, tables)
}

/// Number of joint states `prod_j effective_j`.
pub fn state_count(effective: &[u32]) -> u128 {
    effective.iter().map(|&e| e as u128).product()
}

fn dp_masks(lookup: &RevenueLookup, effective: &[u32], budget: u128) -> Result<Vec<u32>> {
    let j_count = effective.len();
    let t_count = lookup.t_count();
    let states = state_count(effective);
    let actions = lookup.actions() as u128;
    if states.saturating_mul(actions).saturating_mul(t_count as u128) > budget {
        return Err(Error::StateSpaceTooLarge { states, actions, periods: t_count as u128, budget });
    }
    let states = states as usize;
    let mut stride = vec![1usize; j_count];
    for j in 1..j_count {
        stride[j] = stride[j - 1] * effective[j - 1] as usize;
    }
    let decode = |mut idx: usize| -> Vec<u32> {
        let mut ages = vec![0u32; j_count];
        for j in (0..j_count).rev() {
            ages[j] = (idx / stride[j]) as u32 + 1;
            idx %= stride[j];
        }
        ages
    };
    // Next state after applying `mask`, or None when a unit would exceed
    // its threshold. The state after the final period is unconstrained.
    let step = |ages: &[u32], mask: u32| -> Option<usize> {
        let mut idx = 0;
        for j in 0..j_count {
            let next = if mask & (1 << j) != 0 { 1 } else { ages[j] + 1 };
            if next > effective[j] {
                return None;
            }
            idx += (next as usize - 1) * stride[j];
        }
        Some(idx)
    };
    let order = preference_order(j_count);

    // value[t][s]: best (profit, maintenance count) from period t onward.
    let mut value = vec![vec![(f64::NEG_INFINITY, u32::MAX); states]; t_count + 1];
    value[t_count].iter_mut().for_each(|v| *v = (0.0, 0));
    for t in (0..t_count).rev() {
        let last = t + 1 == t_count;
        let (head, tail) = value.split_at_mut(t + 1);
        let (layer, next_layer) = (&mut head[t], &tail[0]);
        for (s, slot) in layer.iter_mut().enumerate() {
            let ages = decode(s);
            let mut best = (f64::NEG_INFINITY, u32::MAX);
            for &mask in &order {
                let next = if last {
                    (0.0, 0)
                } else {
                    match step(&ages, mask) {
                        Some(n) => next_layer[n],
                        None => continue,
                    }
                };
                if next.0 == f64::NEG_INFINITY {
                    continue;
                }
                let v = lookup.revenue(t, mask) - lookup.cost(mask) + next.0;
                let c = next.1 + mask.count_ones();
                if v > best.0 + tie_eps(best.0) || ((v - best.0).abs() <= tie_eps(best.0) && c < best.1) {
                    best = (v, c);
                }
            }
            *slot = best;
        }
    }
    if value[0][0].0 == f64::NEG_INFINITY {
        return Err(Error::Infeasible);
    }

    let mut masks = Vec::with_capacity(t_count);
    let mut state = 0usize;
    for t in 0..t_count {
        let last = t + 1 == t_count;
        let ages = decode(state);
        let target = value[t][state];
        let mut chosen = None;
        for &mask in &order {
            let (next_value, next_state) = if last {
                ((0.0, 0), 0)
            } else {
                match step(&ages, mask) {
                    Some(n) => (value[t + 1][n], n),
                    None => continue,
                }
            };
            if next_value.0 == f64::NEG_INFINITY {
                continue;
            }
            let v = lookup.revenue(t, mask) - lookup.cost(mask) + next_value.0;
            let c = next_value.1 + mask.count_ones();
            if (v - target.0).abs() <= tie_eps(target.0) && c == target.1 {
                chosen = Some((mask, next_state));
                break;
            }
        }
        let (mask, next_state) = chosen.expect("optimal value is attained by some action");
        masks.push(mask);
        state = next_state;
    }
    Ok(masks)
}

/// Exhaustive search over all `2^(J T)` decision matrices.
pub fn brute_force_schedule(
    fleet: &UnitFleet,
    effective: &[u32],
    tables: &[RevenueTable],
    limit: u128,
) -> Result<SolutionReport> {
    let j_count = fleet.j_count();
    let t_count = tables.len();
    let bits = (j_count * t_count) as u32;
    if bits >= 64 || (1u128 << bits) > limit {
        return Err(Error::SearchSpaceTooLarge { bits, limit });
    }
    check_inputs(fleet, effective, tables)?;
    let lookup = RevenueLookup::new(fleet, tables)?;
    let unit_mask = (1u64 << j_count) - 1;
    let mut masks = vec![0u32; t_count];
    let mut best: Option<(f64, Vec<u32>)> = None;
    for code in 0..(1u64 << bits) {
        for (t, m) in masks.iter_mut().enumerate() {
            *m = ((code >> (t * j_count)) & unit_mask) as u32;
        }
        if !masks_feasible(&masks, effective) {
            continue;
        }
        let (_, _, profit) = lookup.profit(&masks);
        let better = match &best {
            None => true,
            Some((bp, bm)) => compare_schedules((profit, &masks), (*bp, bm)) == Ordering::Less,
        };
        if better {
            best = Some((profit, masks.clone()));
        }
    }
    let (_, masks) = best.ok_or(Error::Infeasible)?;
    let schedule = MaintenanceSchedule::from_masks(j_count, &masks);
    evaluate_schedule(&schedule, fleet, effective, tables)
}

fn masks_feasible(masks: &[u32], effective: &[u32]) -> bool {
    effective.iter().enumerate().all(|(j, &limit)| {
        let mut s = 1u32;
        for &m in masks {
            if s > limit {
                return false;
            }
            s = if m & (1 << j) != 0 { 1 } else { s + 1 };
        }
        true
    })
}

/// Maintain each unit exactly when its state reaches the effective
/// threshold, independent of prices.
pub fn baseline_schedule(fleet: &UnitFleet, effective: &[u32], tables: &[RevenueTable]) -> Result<SolutionReport> {
    check_inputs(fleet, effective, tables)?;
    let t_count = tables.len();
    let mut x = vec![false; fleet.j_count() * t_count];
    for (j, &limit) in effective.iter().enumerate() {
        let mut s = 1;
        for t in 0..t_count {
            let maintain = s == limit;
            x[j * t_count + t] = maintain;
            s = if maintain { 1 } else { s + 1 };
        }
    }
    let schedule = MaintenanceSchedule::from_decisions(fleet.j_count(), t_count, x)?;
    evaluate_schedule(&schedule, fleet, effective, tables)
}

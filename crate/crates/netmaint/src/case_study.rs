//! The three supplier strategies on one configuration.
//!
//! - `known`: revenue tables priced with the true network, DP schedule.
//! - `unknown`: revenue tables priced as if customers were independent, DP
//!   schedule on those tables; its prices are then evaluated against the
//!   true network (the realized outcome).
//! - `baseline`: maintain exactly at the effective threshold, priced with the
//!   true network.
//!
//! All three share one scenario set, so they face the same effective
//! thresholds.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use netmaint_core::pricing::{build_revenue_tables, realized_profit_of_prices, RealizedOutcome, RevenueTable};
use netmaint_core::reliability::{sample_scenarios, ScenarioSet};
use netmaint_core::scheduler::{baseline_schedule, optimal_schedule_dp};
use netmaint_core::SolutionReport;

use crate::config::Config;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Known,
    Unknown,
    Baseline,
    All,
}

impl Mode {
    pub fn includes(self, other: Mode) -> bool {
        self == Mode::All || self == other
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Known => "known",
            Mode::Unknown => "unknown",
            Mode::Baseline => "baseline",
            Mode::All => "all",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "known" => Ok(Mode::Known),
            "unknown" => Ok(Mode::Unknown),
            "baseline" => Ok(Mode::Baseline),
            "all" => Ok(Mode::All),
            other => Err(format!("unknown mode {other:?} (expected known, unknown, baseline or all)")),
        }
    }
}

/// Everything that determines the bytes of a run's output directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunManifest {
    pub config: PathBuf,
    pub out_dir: PathBuf,
    /// Overrides the config's `rng_seed`.
    pub seed: Option<u64>,
    /// Overrides the config's `k_scenarios`.
    pub scenarios: Option<usize>,
    pub mode: Mode,
}

impl RunManifest {
    pub fn new(config: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        Self { config: config.into(), out_dir: out_dir.into(), seed: None, scenarios: None, mode: Mode::All }
    }

    pub fn version() -> &'static str {
        env!("CARGO_PKG_VERSION")
    }

    /// Config with the manifest's overrides applied.
    pub fn apply(&self, mut config: Config) -> Config {
        if let Some(seed) = self.seed {
            config.horizon.rng_seed = seed;
        }
        if let Some(k) = self.scenarios {
            config.horizon.k_scenarios = k;
        }
        config
    }
}

/// The unknown-network strategy: what the supplier planned and what
/// customers actually did.
#[derive(Debug, Clone, PartialEq)]
pub struct UnknownOutcome {
    /// Schedule, prices and profit as predicted by the no-network model.
    pub plan: SolutionReport,
    pub realized: RealizedOutcome,
    pub realized_profit: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseStudy {
    pub config: Config,
    pub mode: Mode,
    pub scenarios: ScenarioSet,
    pub known_tables: Option<Vec<RevenueTable>>,
    pub known: Option<SolutionReport>,
    pub unknown: Option<UnknownOutcome>,
    pub baseline: Option<SolutionReport>,
}

pub fn solve_case_study(config: &Config, mode: Mode) -> netmaint_core::Result<CaseStudy> {
    let (net, fleet, horizon) = (&config.network, &config.fleet, &config.horizon);
    let scenarios = sample_scenarios(fleet, horizon.k_scenarios, horizon.rng_seed)?;
    let effective = &scenarios.effective;

    let known_tables = if mode.includes(Mode::Known) || mode.includes(Mode::Baseline) {
        Some(build_revenue_tables(net, fleet, true)?)
    } else {
        None
    };
    let known = match (&known_tables, mode.includes(Mode::Known)) {
        (Some(tables), true) => Some(optimal_schedule_dp(fleet, effective, tables)?),
        _ => None,
    };
    let baseline = match (&known_tables, mode.includes(Mode::Baseline)) {
        (Some(tables), true) => Some(baseline_schedule(fleet, effective, tables)?),
        _ => None,
    };
    let unknown = if mode.includes(Mode::Unknown) {
        let tables = build_revenue_tables(net, fleet, false)?;
        let plan = optimal_schedule_dp(fleet, effective, &tables)?;
        let realized = realized_profit_of_prices(net, &plan.pricing.phi, &plan.capacities(fleet))?;
        let realized_profit = realized.revenue - plan.maintenance_cost;
        Some(UnknownOutcome { plan, realized, realized_profit })
    } else {
        None
    };
    Ok(CaseStudy { config: config.clone(), mode, scenarios, known_tables, known, unknown, baseline })
}

/// One line of the mode comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub mode: &'static str,
    pub revenue: f64,
    pub maintenance_cost: f64,
    pub profit: f64,
    /// Known-network profit minus this profit; `None` without a known run.
    pub gap_to_known: Option<f64>,
    /// `gap_to_known / |known profit|`.
    pub relative_gap: Option<f64>,
}

/// Profits of every mode that was run, realized profit for the unknown
/// network strategy, and their gaps to the known-network optimum.
pub fn compare_modes(study: &CaseStudy) -> Vec<ComparisonRow> {
    let known_profit = study.known.as_ref().map(|r| r.profit);
    let row = |mode, revenue: f64, maintenance_cost: f64, profit: f64| {
        let gap = known_profit.map(|k| k - profit);
        ComparisonRow {
            mode,
            revenue,
            maintenance_cost,
            profit,
            gap_to_known: gap,
            relative_gap: gap.zip(known_profit).map(|(g, k)| g / k.abs()),
        }
    };
    let mut rows = Vec::new();
    if let Some(r) = &study.known {
        rows.push(row("known", r.pricing.total_revenue, r.maintenance_cost, r.profit));
    }
    if let Some(u) = &study.unknown {
        rows.push(row("unknown_realized", u.realized.revenue, u.plan.maintenance_cost, u.realized_profit));
    }
    if let Some(r) = &study.baseline {
        rows.push(row("baseline", r.pricing.total_revenue, r.maintenance_cost, r.profit));
    }
    rows
}

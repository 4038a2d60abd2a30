//! CSV reports of a case-study run.
//!
//! Every file is comma separated with a header row. Customers, units and
//! periods are numbered from 1. Reals use the shortest decimal form that
//! reads back to the same `f64`.

use std::fs;
use std::path::{Path, PathBuf};

use netmaint_core::pricing::RevenueTable;
use netmaint_core::reliability::ScenarioSet;
use netmaint_core::{CustomerNetwork, SolutionReport, UnitFleet};

use crate::case_study::{compare_modes, CaseStudy, RunManifest};
use crate::config::ConfigError;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] netmaint_core::Error),
    #[error("cannot write {}: {source}", .path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot write {}: {source}", .path.display())]
    Csv { path: PathBuf, source: csv::Error },
}

impl RunError {
    pub fn category(&self) -> &'static str {
        match self {
            RunError::Config(e) => e.category(),
            RunError::Model(e) => e.category(),
            RunError::Io { .. } | RunError::Csv { .. } => "io",
        }
    }
}

/// Shortest round-trip decimal, with negative zero printed as `0`.
pub fn real(v: f64) -> String {
    if v == 0.0 {
        "0".to_owned()
    } else {
        format!("{v}")
    }
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), RunError> {
    let csv_err = |source| RunError::Csv { path: path.to_owned(), source };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|source| RunError::Io { path: path.to_owned(), source })
}

fn create_dir(path: &Path) -> Result<(), RunError> {
    fs::create_dir_all(path).map_err(|source| RunError::Io { path: path.to_owned(), source })
}

/// `unit, k, sample` for every draw, then one `unit, effective, <threshold>`
/// row per unit.
pub fn write_scenarios(path: &Path, set: &ScenarioSet) -> Result<(), RunError> {
    let draws = set.samples.iter().enumerate().flat_map(|(j, row)| {
        row.iter().enumerate().map(move |(k, &s)| vec![(j + 1).to_string(), (k + 1).to_string(), real(s)])
    });
    let footer = set.effective.iter().enumerate().map(|(j, e)| vec![(j + 1).to_string(), "effective".to_owned(), e.to_string()]);
    write_csv(path, &["unit", "k", "sample"], draws.chain(footer))
}

/// `period, total_demand`: the sum of `b_i(t)` over customers.
pub fn write_demand(path: &Path, net: &CustomerNetwork) -> Result<(), RunError> {
    let b = net.b();
    let rows = (0..net.t_count()).map(|t| vec![(t + 1).to_string(), real(b.column(t).iter().fold(0.0, |s, v| s + v))]);
    write_csv(path, &["period", "total_demand"], rows)
}

/// `period, capacity, revenue` for every subset capacity of every period.
pub fn write_revenue_tables(path: &Path, tables: &[RevenueTable]) -> Result<(), RunError> {
    let rows = tables.iter().flat_map(|table| {
        table.entries().map(move |(cap, point)| vec![(table.period + 1).to_string(), real(cap), real(point.revenue)])
    });
    write_csv(path, &["period", "capacity", "revenue"], rows)
}

fn matrix_rows(m: &nalgebra::DMatrix<f64>) -> impl Iterator<Item = Vec<String>> + '_ {
    (0..m.nrows()).flat_map(move |i| (0..m.ncols()).map(move |t| vec![(i + 1).to_string(), (t + 1).to_string(), real(m[(i, t)])]))
}

/// Per-mode files: prices, consumption, schedule, deterioration, periods.
/// `consumption` is what customers do at the reported prices.
pub fn write_mode(
    dir: &Path,
    report: &SolutionReport,
    consumption: &nalgebra::DMatrix<f64>,
    revenue_per_period: &[f64],
    fleet: &UnitFleet,
    effective: &[u32],
) -> Result<(), RunError> {
    create_dir(dir)?;
    let sched = &report.schedule;
    let (j_count, t_count) = (sched.j_count(), sched.t_count());
    write_csv(&dir.join("prices.csv"), &["customer", "period", "price"], matrix_rows(&report.pricing.phi))?;
    write_csv(&dir.join("consumption.csv"), &["customer", "period", "consumption"], matrix_rows(consumption))?;
    let unit_rows = |f: &dyn Fn(usize, usize) -> Vec<String>| -> Vec<Vec<String>> {
        (0..j_count).flat_map(|j| (0..t_count).map(move |t| (j, t))).map(|(j, t)| f(j, t)).collect()
    };
    write_csv(
        &dir.join("schedule.csv"),
        &["unit", "period", "x", "s"],
        unit_rows(&|j, t| {
            vec![(j + 1).to_string(), (t + 1).to_string(), u8::from(sched.maintained(j, t)).to_string(), sched.state(j, t).to_string()]
        }),
    )?;
    write_csv(
        &dir.join("deterioration.csv"),
        &["unit", "period", "state", "effective_threshold", "mean_threshold"],
        unit_rows(&|j, t| {
            vec![
                (j + 1).to_string(),
                (t + 1).to_string(),
                sched.state(j, t).to_string(),
                effective[j].to_string(),
                real(fleet.mu()[j]),
            ]
        }),
    )?;
    let periods = (0..t_count).map(|t| {
        let mask = sched.mask(t);
        vec![
            (t + 1).to_string(),
            real(fleet.available_capacity(mask)),
            real(consumption.column(t).iter().fold(0.0, |s, v| s + v)),
            real(revenue_per_period[t]),
            real(fleet.maintenance_cost(mask)),
        ]
    });
    write_csv(&dir.join("periods.csv"), &["period", "capacity", "consumption", "revenue", "maintenance_cost"], periods)
}

fn optional(v: Option<f64>) -> String {
    v.map(real).unwrap_or_default()
}

/// Writes every report of `study` into `manifest.out_dir`.
pub fn write_case_study(study: &CaseStudy, manifest: &RunManifest) -> Result<(), RunError> {
    let out = &manifest.out_dir;
    create_dir(out)?;
    let (net, fleet) = (&study.config.network, &study.config.fleet);
    let effective = &study.scenarios.effective;

    let manifest_text = format!(
        "netmaint {}\nconfig = {}\nmode = {}\nrng_seed = {}\nk_scenarios = {}\neffective_thresholds = {}\n",
        RunManifest::version(),
        manifest.config.display(),
        study.mode,
        study.config.horizon.rng_seed,
        study.config.horizon.k_scenarios,
        effective.iter().map(u32::to_string).collect::<Vec<_>>().join(","),
    );
    let manifest_path = out.join("manifest.txt");
    fs::write(&manifest_path, manifest_text).map_err(|source| RunError::Io { path: manifest_path, source })?;

    write_scenarios(&out.join("scenarios.csv"), &study.scenarios)?;
    write_demand(&out.join("demand.csv"), net)?;

    let mut summary = Vec::new();
    let summary_row = |mode: &str, revenue: f64, cost: f64, profit: f64, actions: usize, violations: usize| {
        vec![mode.to_owned(), real(revenue), real(cost), real(profit), actions.to_string(), violations.to_string()]
    };
    if let Some(r) = &study.known {
        write_mode(&out.join("known"), r, &r.pricing.q, &r.pricing.revenue_per_period, fleet, effective)?;
        let actions = r.schedule.maintenance_count();
        summary.push(summary_row("known", r.pricing.total_revenue, r.maintenance_cost, r.profit, actions, 0));
    }
    if let Some(tables) = &study.known_tables {
        write_revenue_tables(&out.join("revenue_tables.csv"), tables)?;
    }
    if let Some(u) = &study.unknown {
        let dir = out.join("unknown");
        write_mode(&dir, &u.plan, &u.realized.q, &u.realized.revenue_per_period, fleet, effective)?;
        write_csv(
            &dir.join("predicted_consumption.csv"),
            &["customer", "period", "consumption"],
            matrix_rows(&u.plan.pricing.q),
        )?;
        let actions = u.plan.schedule.maintenance_count();
        let p = &u.plan;
        summary.push(summary_row("unknown_predicted", p.pricing.total_revenue, p.maintenance_cost, p.profit, actions, 0));
        summary.push(summary_row(
            "unknown_realized",
            u.realized.revenue,
            p.maintenance_cost,
            u.realized_profit,
            actions,
            u.realized.violations.len(),
        ));
    }
    if let Some(r) = &study.baseline {
        write_mode(&out.join("baseline"), r, &r.pricing.q, &r.pricing.revenue_per_period, fleet, effective)?;
        let actions = r.schedule.maintenance_count();
        summary.push(summary_row("baseline", r.pricing.total_revenue, r.maintenance_cost, r.profit, actions, 0));
    }
    write_csv(
        &out.join("profit_summary.csv"),
        &["mode", "revenue", "maintenance_cost", "profit", "maintenance_actions", "capacity_violations"],
        summary,
    )?;
    let comparison = compare_modes(study).into_iter().map(|row| {
        vec![
            row.mode.to_owned(),
            real(row.revenue),
            real(row.maintenance_cost),
            real(row.profit),
            optional(row.gap_to_known),
            optional(row.relative_gap),
        ]
    });
    write_csv(
        &out.join("comparison.csv"),
        &["mode", "revenue", "maintenance_cost", "profit", "gap_to_known", "relative_gap"],
        comparison,
    )
}

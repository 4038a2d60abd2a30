use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use netmaint::config::{load_config, write_config, Config};
use netmaint::{run_case_study, solve_case_study, Mode, RunManifest};
use netmaint_core::pricing::realized_profit_of_prices;
use netmaint_core::scheduler::evaluate_schedule;
use netmaint_core::{MaintenanceSchedule, UnitFleet};

const CASE_STUDY: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/case_study.toml");

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    reader.records().map(|r| r.unwrap().iter().map(str::to_owned).collect()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn schedule_from_csv(path: &Path, j_count: usize, t_count: usize) -> MaintenanceSchedule {
    let mut x = vec![false; j_count * t_count];
    for row in read_csv(path) {
        let (j, t): (usize, usize) = (row[0].parse().unwrap(), row[1].parse().unwrap());
        x[(j - 1) * t_count + (t - 1)] = row[2] == "1";
    }
    MaintenanceSchedule::from_decisions(j_count, t_count, x).unwrap()
}

fn matrix_from_csv(path: &Path, rows: usize, cols: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(rows, cols);
    for row in read_csv(path) {
        let (i, t): (usize, usize) = (row[0].parse().unwrap(), row[1].parse().unwrap());
        m[(i - 1, t - 1)] = num(&row[2]);
    }
    m
}

#[test]
fn csv_rows_match_declared_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let study = run_case_study(&RunManifest::new(CASE_STUDY, dir.path())).unwrap();
    let (n, j, t) = (study.config.network.n(), study.config.fleet.j_count(), study.config.network.t_count());
    for mode in ["known", "unknown", "baseline"] {
        let d = dir.path().join(mode);
        assert_eq!(read_csv(&d.join("prices.csv")).len(), n * t);
        assert_eq!(read_csv(&d.join("consumption.csv")).len(), n * t);
        assert_eq!(read_csv(&d.join("schedule.csv")).len(), j * t);
        assert_eq!(read_csv(&d.join("deterioration.csv")).len(), j * t);
        assert_eq!(read_csv(&d.join("periods.csv")).len(), t);
    }
    let k = study.config.horizon.k_scenarios;
    assert_eq!(read_csv(&dir.path().join("scenarios.csv")).len(), j * k + j);
    assert_eq!(read_csv(&dir.path().join("revenue_tables.csv")).len(), t * (1 << j));
}

#[test]
fn profit_summary_matches_recomputation() {
    let dir = tempfile::tempdir().unwrap();
    let study = run_case_study(&RunManifest::new(CASE_STUDY, dir.path())).unwrap();
    let (net, fleet) = (&study.config.network, &study.config.fleet);
    let (n, j, t) = (net.n(), fleet.j_count(), net.t_count());
    let effective = &study.scenarios.effective;
    let tables = study.known_tables.as_ref().unwrap();
    let summary: Vec<Vec<String>> = read_csv(&dir.path().join("profit_summary.csv"));
    let profit_of = |mode: &str| num(&summary.iter().find(|r| r[0] == mode).unwrap()[3]);

    for mode in ["known", "baseline"] {
        let sched = schedule_from_csv(&dir.path().join(mode).join("schedule.csv"), j, t);
        let report = evaluate_schedule(&sched, fleet, effective, tables).unwrap();
        assert!(report.feasible());
        assert!((report.profit - profit_of(mode)).abs() <= 1e-9, "{mode}");
    }

    let sched = schedule_from_csv(&dir.path().join("unknown/schedule.csv"), j, t);
    let phi = matrix_from_csv(&dir.path().join("unknown/prices.csv"), n, t);
    let caps: Vec<f64> = (0..t).map(|p| fleet.available_capacity(sched.mask(p))).collect();
    let realized = realized_profit_of_prices(net, &phi, &caps).unwrap();
    let cost: f64 = (0..t).map(|p| fleet.maintenance_cost(sched.mask(p))).fold(0.0, |a, c| a + c);
    assert!((realized.revenue - cost - profit_of("unknown_realized")).abs() <= 1e-9);
}

fn write_variant(dir: &Path, name: &str, f: impl FnOnce(Config) -> Config) -> std::path::PathBuf {
    let config = f(load_config(Path::new(CASE_STUDY)).unwrap());
    let path = dir.join(name);
    write_config(&config, &path).unwrap();
    path
}

#[test]
fn without_a_network_knowing_it_is_worthless() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_variant(dir.path(), "no_w.toml", |mut c| {
        c.network = c.network.without_network();
        c
    });
    let study = solve_case_study(&load_config(&path).unwrap(), Mode::All).unwrap();
    let known = study.known.unwrap().profit;
    let unknown = study.unknown.unwrap().realized_profit;
    assert!((known - unknown).abs() <= 1e-9, "{known} vs {unknown}");
}

#[test]
fn free_maintenance_leaves_only_the_revenue_gap() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_variant(dir.path(), "free.toml", |mut c| {
        let f = &c.fleet;
        c.fleet = UnitFleet::new(f.mu().to_vec(), f.sigma().to_vec(), vec![0.0; f.j_count()], f.q_max().to_vec()).unwrap();
        c
    });
    let study = solve_case_study(&load_config(&path).unwrap(), Mode::All).unwrap();
    let rows = netmaint::compare_modes(&study);
    let base = rows.iter().find(|r| r.mode == "baseline").unwrap();
    let known = rows.iter().find(|r| r.mode == "known").unwrap();
    assert_eq!(base.maintenance_cost, 0.0);
    assert_eq!(base.gap_to_known.unwrap(), known.revenue - base.revenue);
    assert!(base.gap_to_known.unwrap() >= 0.0);
}

/// Moving any single maintenance action of the optimal plan to another
/// period never raises profit beyond the DP's relative tie tolerance; equal
/// revenues summed in a different order differ in the last bits.
#[test]
fn single_moves_never_improve_the_case_study_plan() {
    let config = load_config(Path::new(CASE_STUDY)).unwrap();
    let study = solve_case_study(&config, Mode::Known).unwrap();
    let (fleet, effective) = (&config.fleet, &study.scenarios.effective);
    let tables = study.known_tables.as_ref().unwrap();
    let best = study.known.as_ref().unwrap();
    let sched = &best.schedule;
    let mut tried = 0;
    for j in 0..sched.j_count() {
        for t in (0..sched.t_count()).filter(|&t| sched.maintained(j, t)) {
            for t2 in (0..sched.t_count()).filter(|&t2| !sched.maintained(j, t2)) {
                let moved = sched.with_decision(j, t, false).with_decision(j, t2, true);
                let report = evaluate_schedule(&moved, fleet, effective, tables).unwrap();
                if report.feasible() {
                    tried += 1;
                    assert!(report.profit <= best.profit + 1e-9 * best.profit.abs(), "unit {j}: {t} -> {t2} gains {}", report.profit - best.profit);
                }
            }
        }
    }
    assert!(tried > 0);
}

#[test]
fn manifest_overrides_reach_the_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = RunManifest { seed: Some(3), scenarios: Some(4), mode: Mode::Known, ..RunManifest::new(CASE_STUDY, dir.path()) };
    let study = run_case_study(&manifest).unwrap();
    assert_eq!(study.scenarios.k(), 4);
    assert_eq!(study.config.horizon.rng_seed, 3);
    let text = fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
    assert!(text.contains("rng_seed = 3\n") && text.contains("k_scenarios = 4\n") && text.contains("mode = known\n"));
}

mod common;

use common::{network, Rng};
use netmaint_core::model::validate_schedule;
use netmaint_core::pricing::{build_revenue_tables, RevenueTable};
use netmaint_core::scheduler::{
    baseline_schedule, brute_force_schedule, evaluate_schedule, optimal_schedule_dp, DEFAULT_BRUTE_FORCE_LIMIT,
};
use netmaint_core::{Error, MaintenanceSchedule, UnitFleet};

struct Instance {
    fleet: UnitFleet,
    effective: Vec<u32>,
    tables: Vec<RevenueTable>,
}

/// `J <= 2`, `T <= 6`, `N <= 3`, tables priced on a random network.
fn instance(rng: &mut Rng) -> Instance {
    let j = rng.int(1, 2);
    let t_count = rng.int(1, 6);
    let n = rng.int(1, 3);
    let symmetric = rng.chance(0.5);
    let net = network(rng, n, t_count, symmetric, 0.9);
    let fleet = common::fleet(rng, j);
    let effective = (0..j).map(|_| rng.int(1, 5) as u32).collect();
    let network_known = rng.chance(0.7);
    let tables = build_revenue_tables(&net, &fleet, network_known).unwrap();
    Instance { fleet, effective, tables }
}

#[test]
fn dp_matches_brute_force_exactly() {
    let mut rng = Rng::new(31);
    for case in 0..80 {
        let inst = instance(&mut rng);
        let dp = optimal_schedule_dp(&inst.fleet, &inst.effective, &inst.tables).unwrap();
        let bf = brute_force_schedule(&inst.fleet, &inst.effective, &inst.tables, DEFAULT_BRUTE_FORCE_LIMIT).unwrap();
        assert_eq!(dp.profit, bf.profit, "case {case}");
        assert!(dp.feasible() && bf.feasible());
        if dp.schedule != bf.schedule {
            // Only an exact profit tie may separate them.
            assert_eq!(dp.pricing.total_revenue - dp.maintenance_cost, bf.profit);
        }
    }
}

#[test]
fn every_returned_schedule_is_feasible() {
    let mut rng = Rng::new(32);
    for _ in 0..60 {
        let inst = instance(&mut rng);
        for report in [
            optimal_schedule_dp(&inst.fleet, &inst.effective, &inst.tables).unwrap(),
            baseline_schedule(&inst.fleet, &inst.effective, &inst.tables).unwrap(),
        ] {
            let check = validate_schedule(&report.schedule, &inst.fleet, &inst.effective).unwrap();
            assert!(check.feasible, "{:?}", check.violations);
        }
    }
}

#[test]
fn dp_never_loses_to_the_baseline() {
    let mut rng = Rng::new(33);
    for _ in 0..60 {
        let inst = instance(&mut rng);
        let dp = optimal_schedule_dp(&inst.fleet, &inst.effective, &inst.tables).unwrap();
        let base = baseline_schedule(&inst.fleet, &inst.effective, &inst.tables).unwrap();
        assert!(dp.profit >= base.profit);
    }
}

#[test]
fn reevaluating_the_dp_schedule_reproduces_its_profit() {
    let mut rng = Rng::new(34);
    for _ in 0..40 {
        let inst = instance(&mut rng);
        let dp = optimal_schedule_dp(&inst.fleet, &inst.effective, &inst.tables).unwrap();
        let again = evaluate_schedule(&dp.schedule, &inst.fleet, &inst.effective, &inst.tables).unwrap();
        assert!((again.profit - dp.profit).abs() <= 1e-9);
        assert_eq!(again, dp);
    }
}

#[test]
fn zero_threshold_is_infeasible() {
    let mut rng = Rng::new(35);
    let inst = instance(&mut rng);
    let mut effective = inst.effective.clone();
    effective[0] = 0;
    assert!(matches!(optimal_schedule_dp(&inst.fleet, &effective, &inst.tables), Err(Error::Infeasible)));
    assert!(matches!(
        brute_force_schedule(&inst.fleet, &effective, &inst.tables, DEFAULT_BRUTE_FORCE_LIMIT),
        Err(Error::Infeasible)
    ));
}

#[test]
fn threshold_one_forces_maintenance_every_period() {
    let mut rng = Rng::new(36);
    let net = network(&mut rng, 2, 5, true, 0.9);
    let fleet = UnitFleet::new(vec![3.0], vec![0.0], vec![1.0], vec![2.0]).unwrap();
    let tables = build_revenue_tables(&net, &fleet, true).unwrap();
    let dp = optimal_schedule_dp(&fleet, &[1], &tables).unwrap();
    // The last period is free: its successor state is outside the horizon.
    assert_eq!(dp.schedule, MaintenanceSchedule::from_masks(1, &[1, 1, 1, 1, 0]));
    assert_eq!(baseline_schedule(&fleet, &[1], &tables).unwrap().schedule.maintenance_count(), 5);
}

#[test]
fn tenfold_costs_never_raise_maintenance_spending() {
    let mut rng = Rng::new(37);
    for _ in 0..60 {
        let inst = instance(&mut rng);
        let cheap = optimal_schedule_dp(&inst.fleet, &inst.effective, &inst.tables).unwrap();
        let dear_fleet = inst.fleet.with_scaled_costs(10.0).unwrap();
        let dear = optimal_schedule_dp(&dear_fleet, &inst.effective, &inst.tables).unwrap();
        assert!(dear.maintenance_cost <= 10.0 * cheap.maintenance_cost + 1e-9);
    }
}

#[test]
fn tenfold_uniform_costs_never_raise_maintenance_count() {
    let mut rng = Rng::new(38);
    for _ in 0..60 {
        let inst = instance(&mut rng);
        let j = inst.fleet.j_count();
        let c = rng.uniform(0.0, 5.0);
        let fleet = UnitFleet::new(inst.fleet.mu().to_vec(), inst.fleet.sigma().to_vec(), vec![c; j], inst.fleet.q_max().to_vec())
            .unwrap();
        let cheap = optimal_schedule_dp(&fleet, &inst.effective, &inst.tables).unwrap();
        let dear = optimal_schedule_dp(&fleet.with_scaled_costs(10.0).unwrap(), &inst.effective, &inst.tables).unwrap();
        assert!(dear.schedule.maintenance_count() <= cheap.schedule.maintenance_count());
    }
}

/// Revealed preference only bounds spending; the action count is checked
/// over unit costs spread across more than three orders of magnitude.
#[test]
fn tenfold_costs_never_raise_maintenance_count() {
    let mut rng = Rng::new(39);
    for case in 0..3000 {
        let j = rng.int(2, 3);
        let t_count = rng.int(3, 8);
        let net = network(&mut rng, 2, t_count, true, 0.9);
        let fleet = UnitFleet::new(
            vec![5.0; j],
            vec![1.0; j],
            (0..j).map(|_| 10f64.powf(rng.uniform(-2.0, 1.5))).collect(),
            (0..j).map(|_| rng.uniform(0.1, 5.0)).collect(),
        )
        .unwrap();
        let effective: Vec<u32> = (0..j).map(|_| rng.int(1, 4) as u32).collect();
        let tables = build_revenue_tables(&net, &fleet, true).unwrap();
        let cheap = optimal_schedule_dp(&fleet, &effective, &tables).unwrap();
        let dear = optimal_schedule_dp(&fleet.with_scaled_costs(10.0).unwrap(), &effective, &tables).unwrap();
        assert!(
            dear.schedule.maintenance_count() <= cheap.schedule.maintenance_count(),
            "case {case}: {:?} -> {:?}",
            cheap.schedule,
            dear.schedule
        );
    }
}

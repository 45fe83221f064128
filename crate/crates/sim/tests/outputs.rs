mod common;

use common::{example_path, fixed_slots};
use offload_core::{run, Demand, DemandModel, Scenario};
use offload_sim::{
    emit_metrics, fmt_sig6, parse_scenario, sweep, Format, MetricsReport, SweepError,
};

fn example() -> Scenario {
    parse_scenario(&std::fs::read_to_string(example_path()).unwrap()).unwrap()
}

#[test]
fn csv_has_header_and_one_line_per_round() {
    let s = example();
    let text = emit_metrics(&run(&s).unwrap(), Format::Csv);
    assert!(text.ends_with('\n'));
    assert_eq!(text.lines().count(), s.rounds + 1);
    for line in text.lines() {
        assert_eq!(line.split(',').count(), 8);
    }
    let jsonl = emit_metrics(&run(&s).unwrap(), Format::JsonLines);
    assert_eq!(jsonl.lines().count(), s.rounds);
}

#[test]
fn report_summary_matches_rows() {
    let report = MetricsReport::from_trace(&run(&example()).unwrap());
    assert!(report.is_consistent());
    let csv = report.render(Format::Csv);
    let energies: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(6).unwrap())
        .collect();
    for (row, text) in report.rows.iter().zip(energies) {
        assert_eq!(fmt_sig6(row.energy), text);
    }
}

#[test]
fn first_round_runs_locally() {
    let text = emit_metrics(&run(&fixed_slots(5)).unwrap(), Format::Csv);
    let first = text.lines().nth(1).unwrap();
    assert_eq!(first.split(',').nth(1), Some("local"));
    assert_eq!(first.split(',').nth(2), Some("0"));
}

#[test]
fn sweep_of_one_seed_is_that_run() {
    let s = example();
    let report = sweep(&s, &[s.seed]).unwrap();
    let single = MetricsReport::from_trace(&run(&s).unwrap()).summary;
    assert_eq!(report.runs, vec![(s.seed, single)]);
    assert_eq!(report.split_rate.mean, single.split_rate);
    assert_eq!(report.split_rate.std, 0.0);
}

#[test]
fn sweep_is_order_free() {
    let s = example();
    let a = sweep(&s, &[5, 1, 9, 2]).unwrap();
    let b = sweep(&s, &[2, 9, 1, 5]).unwrap();
    assert_eq!(a, b);
    let seeds: Vec<u64> = a.runs.iter().map(|r| r.0).collect();
    assert_eq!(seeds, [1, 2, 5, 9]);
}

#[test]
fn deterministic_demand_has_no_spread_across_seeds() {
    let mut s = fixed_slots(40);
    s.demand = DemandModel::uniform(Demand::Constant { bits: 3000 });
    let r = sweep(&s, &[1, 2, 3, 4, 5]).unwrap();
    assert_eq!(r.split_rate.std, 0.0);
    assert_eq!(r.deadline_miss_rate.std, 0.0);
    assert_eq!(r.mean_energy.std, 0.0);
}

#[test]
fn sweep_rejects_bad_seed_lists() {
    let s = fixed_slots(5);
    assert_eq!(sweep(&s, &[]), Err(SweepError::NoSeeds));
    assert_eq!(sweep(&s, &[3, 1, 3]), Err(SweepError::DuplicateSeed(3)));
}

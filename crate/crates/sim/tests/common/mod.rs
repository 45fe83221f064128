//! Shared fixtures and reference computations for the integration tests.

#![allow(dead_code)]

use offload_core::{
    Demand, DemandModel, DeviceGraph, DeviceKind, EnergyModel, LinkId, LinkKind, NetworkParams,
    PlannerConfig, Scenario, TaskSpec,
};

pub fn example_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/example.json")
}

/// Hub phone with four peers at 1000 bits per slot. Under the default demand
/// three peers need two slots per transfer and one needs six.
pub fn fixed_slots(rounds: usize) -> Scenario {
    let mut g = DeviceGraph::new();
    let hub = g.add_device(DeviceKind::Phone);
    for _ in 0..4 {
        let p = g.add_device(DeviceKind::Phone);
        g.add_link(hub, p, LinkKind::WifiLink, 1.0, 0.5).unwrap();
    }
    let mut demand = DemandModel::uniform(Demand::Constant { bits: 2000 });
    demand
        .per_link
        .insert(LinkId(3), Demand::Constant { bits: 6000 });
    Scenario {
        graph: g,
        params: NetworkParams::new(2000.0, 1.0, false).unwrap(),
        task: TaskSpec::new(100.0, 10.0, 10.0, 20.0, 2000).unwrap(),
        local_tp: 70.0,
        energy: EnergyModel::Identity,
        initiator: hub,
        peer_kinds: vec![DeviceKind::Phone],
        demand,
        planner: PlannerConfig::default(),
        rounds,
        warmup: 3,
        churn: Vec::new(),
        seed: 5,
    }
}

/// Two-pass population moments: (mean, sum of squared deviations, sum of cubed deviations).
pub fn batch_central(xs: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum();
    let m3 = xs.iter().map(|x| (x - mean).powi(3)).sum();
    (mean, m2, m3)
}

pub fn batch_skewness(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (_, m2, m3) = batch_central(xs);
    (m3 / n) / (m2 / n).powf(1.5)
}

/// (E[X^3] - 3 E[X] Var[X] - E[X]^3) / Var[X]^(3/2)
pub fn raw_moment_skewness(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let e1 = xs.iter().sum::<f64>() / n;
    let e2 = xs.iter().map(|x| x * x).sum::<f64>() / n;
    let e3 = xs.iter().map(|x| x * x * x).sum::<f64>() / n;
    let var = e2 - e1 * e1;
    (e3 - 3.0 * e1 * var - e1.powi(3)) / var.powf(1.5)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Relative, floored at one, for dimensionless values that may sit at zero.
pub fn unit_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

pub fn energy_fits(f: &EnergyModel, t0: f64, ta: f64, ts: f64, tp: f64, tc: f64, n: i64) -> bool {
    let e = |t: f64| f.evaluate(t);
    (n + 1) as f64 * e(tp) + e(ta) + e(ts) + 2.0 * (n + 1) as f64 * e(tc) <= e(t0)
}

/// Largest `n` in `0..=limit` satisfying the raw energy inequality.
pub fn max_cohort_brute(
    f: &EnergyModel,
    t0: f64,
    ta: f64,
    ts: f64,
    tp: f64,
    tc: f64,
    limit: i64,
) -> Option<i64> {
    (0..=limit)
        .rev()
        .find(|&n| energy_fits(f, t0, ta, ts, tp, tc, n))
}

/// Population skewness of a two-point law: `a` with probability `p`, else `b`.
pub fn two_point_skewness(a: f64, b: f64, p: f64) -> f64 {
    let q = 1.0 - p;
    let sign = if b > a { 1.0 } else { -1.0 };
    sign * (p - q) / (p * q).sqrt()
}

//! Split-or-run-locally decisions.
//!
//! A computation is cut into `n + 1` parts: the initiator keeps one and ships
//! one to each of `n` peers. Splitting is admitted only when three gates
//! pass:
//!
//! * the slot-count history of the candidate links is positively skewed,
//!   so short transfers are the likely outcome;
//! * `ta + tp + ts + 2 tc <= t0`, scatter and gather each costing `tc`;
//! * the energy budget `f(t0)` admits at least one peer, i.e.
//!   `(n+1) f(tp) + f(ta) + f(ts) + 2(n+1) f(tc) <= f(t0)` holds for `n >= 1`.
//!
//! `tc` is `tau0` times the mean of the per-link slot-count means.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use thiserror::Error;

use crate::energy::EnergyModel;
use crate::link_model::{classify_link, LinkClass, NetworkParams};
use crate::moments::SlotEstimator;
use crate::topology::{DeviceGraph, LinkId, TopologyError, VertexId};

/// Per-link slot-count estimators.
pub type LinkEstimates = BTreeMap<LinkId, SlotEstimator>;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum PlanError {
    #[error("no samples for link {0}")]
    InsufficientSamples(LinkId),
    #[error("no candidate links to estimate communication time from")]
    NoCandidates,
    #[error("energy denominator f(tp) + 2 f(tc) = {0} is not positive")]
    NonPositiveDenominator(f64),
    #[error("task parameter {field} = {value} is invalid")]
    InvalidTask { field: &'static str, value: f64 },
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// A periodic divisible computation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TaskSpec {
    t0: f64,
    ta: f64,
    ts: f64,
    tp: f64,
    payload_bits_per_neighbor: u64,
}

impl TaskSpec {
    /// `t0` is the delivery period, `ta` the analysis (cutting) time, `ts`
    /// the synthesis time and `tp` the processing time of the slowest part.
    pub fn new(
        t0: f64,
        ta: f64,
        ts: f64,
        tp: f64,
        payload_bits_per_neighbor: u64,
    ) -> Result<Self, PlanError> {
        for (field, value) in [("t0", t0), ("ta", ta), ("ts", ts), ("tp", tp)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(PlanError::InvalidTask { field, value });
            }
        }
        if payload_bits_per_neighbor == 0 {
            return Err(PlanError::InvalidTask {
                field: "payload_bits_per_neighbor",
                value: 0.0,
            });
        }
        Ok(Self {
            t0,
            ta,
            ts,
            tp,
            payload_bits_per_neighbor,
        })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }
    pub fn ta(&self) -> f64 {
        self.ta
    }
    pub fn ts(&self) -> f64 {
        self.ts
    }
    pub fn tp(&self) -> f64 {
        self.tp
    }
    pub fn payload_bits_per_neighbor(&self) -> u64 {
        self.payload_bits_per_neighbor
    }

    pub fn with_t0(&self, t0: f64) -> Result<Self, PlanError> {
        Self::new(
            t0,
            self.ta,
            self.ts,
            self.tp,
            self.payload_bits_per_neighbor,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlannerConfig {
    /// The skewness gate passes when `skewness > skewness_z * standard_error`.
    /// Zero makes it the plain strict test `skewness > 0`.
    pub skewness_z: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self { skewness_z: 0.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Split(usize),
    RunLocally,
}

impl Decision {
    pub fn cohort_size(self) -> usize {
        match self {
            Decision::Split(n) => n,
            Decision::RunLocally => 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateKind {
    Skewness,
    Time,
    Energy,
}

/// One admission test and the numbers it was decided on. `value` is `None`
/// when the quantity could not be computed (too few samples, no candidates).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateRecord {
    pub kind: GateKind,
    pub passed: bool,
    pub value: Option<f64>,
    pub threshold: Option<f64>,
}

impl GateRecord {
    fn failed(kind: GateKind) -> Self {
        Self {
            kind,
            passed: false,
            value: None,
            threshold: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rationale {
    /// Always skewness, time, energy, in that order.
    pub gates: [GateRecord; 3],
    /// Candidate links dropped because they carry nothing.
    pub excluded_useless: Vec<LinkId>,
    /// Set by the engine when a split was admitted but overridden because the
    /// estimators are still warming up.
    pub held_for_warmup: bool,
}

impl Rationale {
    pub fn gate(&self, kind: GateKind) -> &GateRecord {
        self.gates
            .iter()
            .find(|g| g.kind == kind)
            .expect("all gate kinds are recorded")
    }

    pub fn all_passed(&self) -> bool {
        self.gates.iter().all(|g| g.passed)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Plan {
    /// Admitted peers, fastest link first. Empty unless the decision is a split.
    pub cohort: Vec<(VertexId, LinkId)>,
    pub tc_estimate: Option<f64>,
    pub skewness: Option<f64>,
    /// All candidate-link observations merged; the skewness gate reads this.
    pub pooled: SlotEstimator,
    pub decision: Decision,
    pub rationale: Rationale,
}

/// `tau0` times the mean over `candidates` of their mean slot counts.
pub fn estimate_tc(
    estimates: &LinkEstimates,
    candidates: &[LinkId],
    tau0: f64,
) -> Result<f64, PlanError> {
    if candidates.is_empty() {
        return Err(PlanError::NoCandidates);
    }
    let mut sum = 0.0;
    for &link in candidates {
        sum += estimates
            .get(&link)
            .and_then(|e| e.mean().ok())
            .ok_or(PlanError::InsufficientSamples(link))?;
    }
    Ok(tau0 * sum / candidates.len() as f64)
}

pub fn time_feasible(task: &TaskSpec, tc: f64) -> bool {
    task.ta + task.tp + task.ts + 2.0 * tc <= task.t0
}

/// Left-hand side of the per-round energy inequality for a cohort of `n` peers.
pub fn round_energy(task: &TaskSpec, f: &EnergyModel, n: i64, tp: f64, tc: f64) -> f64 {
    let parts = (n + 1) as f64;
    parts * f.evaluate(tp)
        + f.evaluate(task.ta)
        + f.evaluate(task.ts)
        + 2.0 * parts * f.evaluate(tc)
}

/// Largest cohort the energy budget admits, `floor((f(t0) - f(ta) - f(ts)) /
/// (f(tp) + 2 f(tc))) - 1`. Values below one mean splitting is infeasible.
///
/// The closed form is nudged by at most a step or two so that, evaluated in
/// `f64`, the raw inequality holds at the returned `n` and fails at `n + 1`.
pub fn max_cohort_size(task: &TaskSpec, f: &EnergyModel, tc: f64) -> Result<i64, PlanError> {
    let denominator = f.evaluate(task.tp) + 2.0 * f.evaluate(tc);
    if denominator.is_nan() || denominator <= 0.0 {
        return Err(PlanError::NonPositiveDenominator(denominator));
    }
    let budget = f.evaluate(task.t0);
    let numerator = budget - f.evaluate(task.ta) - f.evaluate(task.ts);
    let ratio = libm::floor(numerator / denominator);
    // Saturating float-to-int cast keeps absurd budgets finite.
    let mut n = (ratio as i64).saturating_sub(1);
    if n < -1 {
        return Ok(n);
    }
    let fits = |n: i64| round_energy(task, f, n, task.tp, tc) <= budget;
    while n < i64::MAX - 1 && fits(n + 1) {
        n += 1;
    }
    while n >= 0 && !fits(n) {
        n -= 1;
    }
    Ok(n)
}

/// Runs the three admission gates over the links from the initiator to its
/// alive neighbors and picks the cohort.
///
/// Useless links are dropped and listed in the rationale. Of several
/// parallel links to the same peer only the one with the lowest mean slot
/// count is kept. The cohort takes the fastest `min(n_max, peers)` peers,
/// ties broken by vertex id.
pub fn split_decision(
    task: &TaskSpec,
    graph: &DeviceGraph,
    estimates: &LinkEstimates,
    candidates: &[(VertexId, LinkId)],
    f: &EnergyModel,
    params: &NetworkParams,
    config: &PlannerConfig,
) -> Result<Plan, PlanError> {
    let mut excluded_useless = Vec::new();
    let mut ranked: Vec<(f64, VertexId, LinkId)> = Vec::with_capacity(candidates.len());
    for &(vertex, link_id) in candidates {
        if classify_link(graph.link(link_id)?) == LinkClass::Useless {
            excluded_useless.push(link_id);
            continue;
        }
        let mean = estimates
            .get(&link_id)
            .and_then(|e| e.mean().ok())
            .ok_or(PlanError::InsufficientSamples(link_id))?;
        ranked.push((mean, vertex, link_id));
    }
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut seen = Vec::new();
    ranked.retain(|&(_, v, _)| {
        if seen.contains(&v) {
            false
        } else {
            seen.push(v);
            true
        }
    });

    if ranked.is_empty() {
        return Ok(Plan {
            cohort: Vec::new(),
            tc_estimate: None,
            skewness: None,
            pooled: SlotEstimator::new(),
            decision: Decision::RunLocally,
            rationale: Rationale {
                gates: [
                    GateRecord::failed(GateKind::Skewness),
                    GateRecord::failed(GateKind::Time),
                    GateRecord::failed(GateKind::Energy),
                ],
                excluded_useless,
                held_for_warmup: false,
            },
        });
    }

    let links: Vec<LinkId> = ranked.iter().map(|r| r.2).collect();
    let tc = estimate_tc(estimates, &links, params.tau0())?;

    let pooled = links
        .iter()
        .filter_map(|l| estimates.get(l))
        .fold(SlotEstimator::new(), |acc, e| acc.merge(e));
    let skewness = pooled.skewness().ok();
    let skew_threshold = pooled
        .skewness_standard_error()
        .ok()
        .map(|se| config.skewness_z * se);
    let skew_gate = GateRecord {
        kind: GateKind::Skewness,
        passed: matches!((skewness, skew_threshold), (Some(g), Some(t)) if g > t),
        value: skewness,
        threshold: skew_threshold,
    };

    let time_gate = GateRecord {
        kind: GateKind::Time,
        passed: time_feasible(task, tc),
        value: Some(task.ta + task.tp + task.ts + 2.0 * tc),
        threshold: Some(task.t0),
    };

    let n_max = max_cohort_size(task, f, tc)?;
    let energy_gate = GateRecord {
        kind: GateKind::Energy,
        passed: n_max >= 1,
        value: Some(n_max as f64),
        threshold: Some(1.0),
    };

    let rationale = Rationale {
        gates: [skew_gate, time_gate, energy_gate],
        excluded_useless,
        held_for_warmup: false,
    };
    let (decision, cohort) = if rationale.all_passed() {
        let n = (n_max as usize).min(ranked.len());
        let cohort = ranked[..n].iter().map(|&(_, v, l)| (v, l)).collect();
        (Decision::Split(n), cohort)
    } else {
        (Decision::RunLocally, Vec::new())
    };

    Ok(Plan {
        cohort,
        tc_estimate: Some(tc),
        skewness,
        pooled,
        decision,
        rationale,
    })
}

//! Round-by-round cooperative computation.
//!
//! Each round the initiator refreshes its per-link slot-count estimators with
//! one fresh transfer per candidate link, asks the planner whether to split,
//! and then either runs the whole job itself or scatters `n` parts, computes
//! its own part, gathers the results and composes the answer.
//!
//! Admission is decided on mean slot counts, but the round's realized time
//! is governed by the slowest peer. A peer that dies between scatter and
//! gather fails the round; nothing is re-dispatched.
//!
//! All randomness is counter-based: the draw for a given (round, link,
//! purpose) comes from its own ChaCha stream position, so two runs with the
//! same seed are bit-identical and a fault in one round does not shift the
//! random numbers seen by later rounds.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::link_model::{bits_per_slot, classify_link, slots_required, LinkError, TransferRequest};
use crate::moments::SlotEstimator;
use crate::planner::{round_energy, split_decision, Decision, LinkEstimates, Plan, PlanError};
use crate::scenario::{ChurnPhase, Scenario, ScenarioError};
use crate::topology::{DeviceGraph, LinkId, TopologyError, VertexId};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum EngineError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(#[from] ScenarioError),
    #[error("all rounds have been simulated")]
    Exhausted,
    #[error("a round is already in flight")]
    RoundInFlight,
    #[error("no round is in flight")]
    NoRoundInFlight,
    #[error("the initiator cannot churn")]
    InitiatorChurn,
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Link(#[from] LinkError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Scatter,
    Gather,
}

/// Mean, variance and skewness of the pooled estimator the planner used.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimatorSnapshot {
    pub count: u64,
    pub mean: Option<f64>,
    pub variance: Option<f64>,
    pub skewness: Option<f64>,
}

impl From<&SlotEstimator> for EstimatorSnapshot {
    fn from(e: &SlotEstimator) -> Self {
        Self {
            count: e.count(),
            mean: e.mean().ok(),
            variance: e.variance().ok(),
            skewness: e.skewness().ok(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundOutcome {
    pub round: usize,
    pub plan: Plan,
    /// Wall time of the round in time units.
    pub elapsed: f64,
    /// Energy of the whole round, communication included.
    pub energy: f64,
    /// The `2 (n + 1) f(tc)` share of `energy`; zero when running locally.
    pub comm_energy: f64,
    /// Mean realized one-way transfer time over the cohort, split rounds only.
    pub tc_realized: Option<f64>,
    /// True iff no peer failed and `elapsed <= t0`.
    pub deadline_met: bool,
    pub failures: Vec<(VertexId, Phase)>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SimTrace {
    pub outcomes: Vec<RoundOutcome>,
    pub estimator_snapshots: Vec<EstimatorSnapshot>,
}

#[derive(Clone, Copy)]
enum Purpose {
    Train = 0,
    Scatter = 1,
    Gather = 2,
}

// Words reserved per (round, link, purpose). A draw needs at most four.
const WORDS_PER_DRAW: u128 = 16;

#[derive(Clone, Debug)]
struct InFlight {
    plan: Plan,
    /// Per cohort member: outbound and inbound slot counts.
    transfers: Vec<(u64, u64)>,
    failures: Vec<(VertexId, Phase)>,
}

#[derive(Clone, Debug)]
pub struct Engine {
    scenario: Scenario,
    graph: DeviceGraph,
    /// Bits per slot of every link, indexed by link id.
    per_slot: Vec<f64>,
    estimates: LinkEstimates,
    round: usize,
    in_flight: Option<InFlight>,
}

impl Engine {
    pub fn new(scenario: Scenario) -> Result<Self, EngineError> {
        scenario.validate()?;
        let per_slot = scenario
            .graph
            .links()
            .iter()
            .map(|l| bits_per_slot(&scenario.params, l))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            graph: scenario.graph.clone(),
            scenario,
            per_slot,
            estimates: LinkEstimates::new(),
            round: 0,
            in_flight: None,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn graph(&self) -> &DeviceGraph {
        &self.graph
    }

    pub fn estimates(&self) -> &LinkEstimates {
        &self.estimates
    }

    /// Index of the next round to begin.
    pub fn round(&self) -> usize {
        self.round
    }

    pub fn is_exhausted(&self) -> bool {
        self.round >= self.scenario.rounds
    }

    /// The plan of the round currently between scatter and gather.
    pub fn in_flight_plan(&self) -> Option<&Plan> {
        self.in_flight.as_ref().map(|f| &f.plan)
    }

    /// Flips a peer's liveness now. If a round is in flight and the peer is in
    /// its cohort, dying fails that round.
    pub fn inject_churn(&mut self, vertex: VertexId, alive: bool) -> Result<(), EngineError> {
        if vertex == self.scenario.initiator {
            return Err(EngineError::InitiatorChurn);
        }
        self.graph.set_alive(vertex, alive)?;
        if let Some(flight) = self.in_flight.as_mut() {
            let in_cohort = flight.plan.cohort.iter().any(|(v, _)| *v == vertex);
            let already = flight.failures.iter().any(|(v, _)| *v == vertex);
            if !alive && in_cohort && !already {
                flight.failures.push((vertex, Phase::Gather));
            }
        }
        Ok(())
    }

    fn apply_scheduled(&mut self, phase: ChurnPhase) -> Result<(), EngineError> {
        let due: Vec<_> = self
            .scenario
            .churn
            .iter()
            .filter(|e| e.round == self.round && e.phase == phase)
            .copied()
            .collect();
        for event in due {
            self.inject_churn(event.vertex, event.alive)?;
        }
        Ok(())
    }

    fn draw_slots(&self, link: LinkId, purpose: Purpose) -> Result<u64, EngineError> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.scenario.seed);
        rng.set_stream(u64::from(link.0) * 3 + purpose as u64);
        rng.set_word_pos(self.round as u128 * WORDS_PER_DRAW);
        let bits = self.scenario.demand.for_link(link).sample(&mut rng);
        Ok(slots_required(
            self.per_slot[link.index()],
            TransferRequest::new(bits)?,
        )?)
    }

    /// Runs the first half of a round: scheduled pre-round churn, estimator
    /// update, decision and scatter. Leaves the round in flight.
    pub fn begin_round(&mut self) -> Result<(), EngineError> {
        if self.in_flight.is_some() {
            return Err(EngineError::RoundInFlight);
        }
        if self.is_exhausted() {
            return Err(EngineError::Exhausted);
        }
        self.apply_scheduled(ChurnPhase::BeforeRound)?;

        let initiator = self.scenario.initiator;
        let mut candidates = self.graph.neighbors(initiator)?;
        candidates.retain(|(v, _)| {
            self.graph
                .vertex(*v)
                .is_ok_and(|v| self.scenario.peer_kinds.contains(&v.kind()))
        });
        for &(_, link) in &candidates {
            if !classify_link(self.graph.link(link)?).carries_payload() {
                continue;
            }
            let slots = self.draw_slots(link, Purpose::Train)?;
            self.estimates
                .entry(link)
                .or_default()
                .observe(slots as f64);
        }

        let mut plan = split_decision(
            &self.scenario.task,
            &self.graph,
            &self.estimates,
            &candidates,
            &self.scenario.energy,
            &self.scenario.params,
            &self.scenario.planner,
        )?;
        if self.round < self.scenario.warmup && matches!(plan.decision, Decision::Split(_)) {
            plan.decision = Decision::RunLocally;
            plan.cohort.clear();
            plan.rationale.held_for_warmup = true;
        }

        let transfers = plan
            .cohort
            .iter()
            .map(|&(_, link)| {
                Ok((
                    self.draw_slots(link, Purpose::Scatter)?,
                    self.draw_slots(link, Purpose::Gather)?,
                ))
            })
            .collect::<Result<Vec<_>, EngineError>>()?;

        self.in_flight = Some(InFlight {
            plan,
            transfers,
            failures: Vec::new(),
        });
        Ok(())
    }

    /// Gathers, composes and accounts the round in flight.
    pub fn finish_round(&mut self) -> Result<RoundOutcome, EngineError> {
        let flight = self.in_flight.take().ok_or(EngineError::NoRoundInFlight)?;
        let task = &self.scenario.task;
        let f = &self.scenario.energy;
        let tau0 = self.scenario.params.tau0();

        let (elapsed, energy, comm_energy, tc_realized) = match flight.plan.decision {
            Decision::Split(n) => {
                let slowest = flight
                    .transfers
                    .iter()
                    .map(|&(out, back)| (out + back) as f64 * tau0)
                    .fold(0.0, f64::max);
                let total_slots: u64 = flight.transfers.iter().map(|&(o, b)| o + b).sum();
                let tc = total_slots as f64 * tau0 / (2 * n) as f64;
                let elapsed = task.ta() + task.tp() + task.ts() + slowest;
                let energy = round_energy(task, f, n as i64, task.tp(), tc);
                let comm = 2.0 * (n + 1) as f64 * f.evaluate(tc);
                (elapsed, energy, comm, Some(tc))
            }
            Decision::RunLocally => {
                let local = self.scenario.local_tp;
                let elapsed = task.ta() + local + task.ts();
                let energy = f.evaluate(task.ta()) + f.evaluate(local) + f.evaluate(task.ts());
                (elapsed, energy, 0.0, None)
            }
        };

        let outcome = RoundOutcome {
            round: self.round,
            deadline_met: flight.failures.is_empty() && elapsed <= task.t0(),
            plan: flight.plan,
            elapsed,
            energy,
            comm_energy,
            tc_realized,
            failures: flight.failures,
        };
        self.round += 1;
        Ok(outcome)
    }

    /// One full round, applying the scenario's mid-round churn between
    /// scatter and gather.
    pub fn step(&mut self) -> Result<RoundOutcome, EngineError> {
        self.begin_round()?;
        self.apply_scheduled(ChurnPhase::MidRound)?;
        self.finish_round()
    }
}

pub fn run(scenario: &Scenario) -> Result<SimTrace, EngineError> {
    let mut engine = Engine::new(scenario.clone())?;
    let mut trace = SimTrace::default();
    while !engine.is_exhausted() {
        let outcome = engine.step()?;
        trace
            .estimator_snapshots
            .push(EstimatorSnapshot::from(&outcome.plan.pooled));
        trace.outcomes.push(outcome);
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::EnergyModel;
    use crate::link_model::NetworkParams;
    use crate::planner::{PlannerConfig, TaskSpec};
    use crate::scenario::{ChurnEvent, Demand, DemandModel};
    use crate::topology::{DeviceKind, LinkKind};
    use alloc::vec;

    /// Hub phone with three peers at 1000 bits/slot.
    fn base(demand: Demand, rounds: usize) -> Scenario {
        let mut g = DeviceGraph::new();
        let hub = g.add_device(DeviceKind::Phone);
        for _ in 0..3 {
            let p = g.add_device(DeviceKind::Phone);
            g.add_link(hub, p, LinkKind::WifiLink, 1.0, 0.5).unwrap();
        }
        Scenario {
            graph: g,
            params: NetworkParams::new(2000.0, 1.0, false).unwrap(),
            task: TaskSpec::new(100.0, 10.0, 10.0, 20.0, 1000).unwrap(),
            local_tp: 60.0,
            energy: EnergyModel::Identity,
            initiator: hub,
            peer_kinds: vec![DeviceKind::Phone],
            demand: DemandModel::uniform(demand),
            planner: PlannerConfig::default(),
            rounds,
            warmup: 3,
            churn: Vec::new(),
            seed: 11,
        }
    }

    fn skewed() -> Demand {
        // 2 slots usually, 12 sometimes.
        Demand::TwoPoint {
            a: 2000,
            b: 12000,
            p: 0.85,
        }
    }

    #[test]
    fn warmup_holds_back_splits() {
        let trace = run(&base(skewed(), 10)).unwrap();
        for o in &trace.outcomes[..3] {
            assert_eq!(o.plan.decision, Decision::RunLocally);
        }
        assert!(trace.outcomes[3..]
            .iter()
            .any(|o| matches!(o.plan.decision, Decision::Split(_))));
        assert_eq!(trace.outcomes.len(), 10);
        assert_eq!(trace.estimator_snapshots.len(), 10);
    }

    #[test]
    fn useless_links_never_communicate() {
        let mut s = base(skewed(), 20);
        let mut g = DeviceGraph::new();
        let hub = g.add_device(DeviceKind::Phone);
        for _ in 0..3 {
            let p = g.add_device(DeviceKind::Phone);
            g.add_link(hub, p, LinkKind::CellLink, 0.5, 1.0).unwrap();
        }
        s.graph = g;
        let trace = run(&s).unwrap();
        for o in &trace.outcomes {
            assert_eq!(o.plan.decision, Decision::RunLocally);
            assert_eq!(o.comm_energy, 0.0);
            assert_eq!(o.plan.rationale.excluded_useless.len(), 3);
        }
    }

    #[test]
    fn constant_demand_never_splits() {
        let trace = run(&base(Demand::Constant { bits: 3000 }, 6)).unwrap();
        for (o, snap) in trace.outcomes.iter().zip(&trace.estimator_snapshots) {
            assert_eq!(o.plan.decision, Decision::RunLocally);
            assert_eq!(snap.skewness, None);
        }
        assert_eq!(trace.estimator_snapshots[5].variance, Some(0.0));
    }

    #[test]
    fn step_fold_equals_run() {
        let s = base(skewed(), 25);
        let trace = run(&s).unwrap();
        let mut engine = Engine::new(s).unwrap();
        let mut folded = Vec::new();
        while !engine.is_exhausted() {
            folded.push(engine.step().unwrap());
        }
        assert_eq!(folded, trace.outcomes);
        assert_eq!(engine.step(), Err(EngineError::Exhausted));
    }

    #[test]
    fn same_seed_same_trace_other_seed_differs() {
        let s = base(Demand::Uniform { lo: 1000, hi: 9000 }, 40);
        assert_eq!(run(&s).unwrap(), run(&s).unwrap());
        let mut other = s.clone();
        other.seed = 12;
        assert_ne!(run(&s).unwrap(), run(&other).unwrap());
    }

    #[test]
    fn split_round_accounting() {
        let s = base(skewed(), 30);
        let f = s.energy;
        for o in run(&s).unwrap().outcomes {
            if let Decision::Split(n) = o.plan.decision {
                let tc = o.tc_realized.unwrap();
                let expected = (n + 1) as f64 * f.evaluate(20.0)
                    + f.evaluate(10.0)
                    + f.evaluate(10.0)
                    + 2.0 * (n + 1) as f64 * f.evaluate(tc);
                assert_eq!(o.energy, expected);
                assert_eq!(o.deadline_met, o.elapsed <= 100.0);
            } else {
                assert_eq!(o.elapsed, 80.0);
                assert_eq!(o.energy, 80.0);
            }
        }
    }

    #[test]
    fn churn_before_decision_excludes_peer() {
        let mut s = base(skewed(), 12);
        s.task = TaskSpec::new(1000.0, 10.0, 10.0, 20.0, 1000).unwrap();
        let peer = VertexId(2);
        s.churn = vec![ChurnEvent {
            round: 8,
            vertex: peer,
            alive: false,
            phase: ChurnPhase::BeforeRound,
        }];
        let trace = run(&s).unwrap();
        let before = &trace.outcomes[7];
        let after = &trace.outcomes[8];
        assert_eq!(before.plan.decision, Decision::Split(3));
        assert_eq!(after.plan.decision, Decision::Split(2));
        assert!(after.plan.cohort.iter().all(|(v, _)| *v != peer));
        assert!(after.failures.is_empty());
    }

    #[test]
    fn mid_round_churn_via_api() {
        let mut s = base(skewed(), 12);
        s.task = TaskSpec::new(1000.0, 10.0, 10.0, 20.0, 1000).unwrap();
        let mut engine = Engine::new(s.clone()).unwrap();
        let mut reference = Engine::new(s).unwrap();
        for _ in 0..5 {
            engine.step().unwrap();
            reference.step().unwrap();
        }
        // Killing someone outside the graph's cohort changes nothing.
        let mut extra = engine.clone();
        extra.begin_round().unwrap();
        let cohort = extra.in_flight_plan().unwrap().cohort.clone();
        assert_eq!(cohort.len(), 3);
        assert_eq!(extra.begin_round(), Err(EngineError::RoundInFlight));
        let member = cohort[1].0;
        extra.inject_churn(member, false).unwrap();
        let failed = extra.finish_round().unwrap();
        let clean = reference.step().unwrap();
        assert_eq!(failed.failures, vec![(member, Phase::Gather)]);
        assert!(!failed.deadline_met);
        assert!(clean.deadline_met);
        assert_eq!(failed.plan, clean.plan);

        // Revive: the peer is a candidate again next round.
        extra.inject_churn(member, true).unwrap();
        let next = extra.step().unwrap();
        assert_eq!(next, reference.step().unwrap());
        assert_eq!(extra.finish_round(), Err(EngineError::NoRoundInFlight));
        assert_eq!(
            extra.inject_churn(VertexId(0), false),
            Err(EngineError::InitiatorChurn)
        );
        assert_eq!(
            extra.inject_churn(VertexId(99), false),
            Err(EngineError::Topology(TopologyError::UnknownVertex(
                VertexId(99)
            )))
        );
    }

    #[test]
    fn only_allowed_kinds_receive_work() {
        let mut s = base(skewed(), 10);
        s.task = TaskSpec::new(1000.0, 10.0, 10.0, 20.0, 1000).unwrap();
        let ap = s.graph.add_device(DeviceKind::WifiAccessPoint);
        s.graph
            .add_link(s.initiator, ap, LinkKind::WifiLink, 1.0, 0.1)
            .unwrap();
        let trace = run(&s).unwrap();
        assert!(trace
            .outcomes
            .iter()
            .all(|o| o.plan.cohort.iter().all(|(v, _)| *v != ap)));
        assert_eq!(trace.estimator_snapshots[0].count, 3);

        s.peer_kinds.push(DeviceKind::WifiAccessPoint);
        let trace = run(&s).unwrap();
        assert_eq!(trace.estimator_snapshots[0].count, 4);
        assert!(trace.outcomes[9].plan.cohort.iter().any(|(v, _)| *v == ap));
    }

    #[test]
    fn invalid_scenario_rejected() {
        let mut s = base(skewed(), 0);
        assert!(matches!(
            Engine::new(s.clone()),
            Err(EngineError::InvalidScenario(e)) if e.field == "rounds"
        ));
        s.rounds = 3;
        s.churn = vec![ChurnEvent {
            round: 5,
            vertex: VertexId(1),
            alive: false,
            phase: ChurnPhase::MidRound,
        }];
        assert!(matches!(
            Engine::new(s),
            Err(EngineError::InvalidScenario(e)) if e.field == "churn[0].round"
        ));
    }
}

//! Everything one simulation run needs, plus its validation.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use thiserror::Error;

use crate::energy::EnergyModel;
use crate::link_model::NetworkParams;
use crate::planner::{PlannerConfig, TaskSpec};
use crate::topology::{DeviceGraph, DeviceKind, LinkId, VertexId};

pub const DEFAULT_WARMUP: usize = 3;

/// Distribution of the payload, in bits, of one transfer over a link.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Demand {
    Constant {
        bits: u64,
    },
    /// Uniform over the integers `lo..=hi`.
    Uniform {
        lo: u64,
        hi: u64,
    },
    /// `a` with probability `p`, otherwise `b`.
    TwoPoint {
        a: u64,
        b: u64,
        p: f64,
    },
}

impl Demand {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match *self {
            Demand::Constant { bits } => bits,
            Demand::Uniform { lo, hi } => rng.random_range(lo..=hi),
            Demand::TwoPoint { a, b, p } => {
                if rng.random::<f64>() < p {
                    a
                } else {
                    b
                }
            }
        }
    }

    pub fn is_deterministic(&self) -> bool {
        match *self {
            Demand::Constant { .. } => true,
            Demand::Uniform { lo, hi } => lo == hi,
            Demand::TwoPoint { a, b, p } => a == b || p == 0.0 || p == 1.0,
        }
    }

    fn check(&self) -> Result<(), (&'static str, String)> {
        match *self {
            Demand::Constant { bits: 0 } => Err(("bits", "must be at least 1".into())),
            Demand::Uniform { lo: 0, .. } => Err(("lo", "must be at least 1".into())),
            Demand::Uniform { lo, hi } if hi < lo => Err(("hi", format!("must be >= lo ({lo})"))),
            Demand::TwoPoint { a: 0, .. } => Err(("a", "must be at least 1".into())),
            Demand::TwoPoint { b: 0, .. } => Err(("b", "must be at least 1".into())),
            Demand::TwoPoint { p, .. } if !(0.0..=1.0).contains(&p) => {
                Err(("p", "must lie in [0, 1]".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Demand per link, falling back to `default` for links not listed.
#[derive(Clone, Debug, PartialEq)]
pub struct DemandModel {
    pub default: Demand,
    pub per_link: BTreeMap<LinkId, Demand>,
}

impl DemandModel {
    pub fn uniform(default: Demand) -> Self {
        Self {
            default,
            per_link: BTreeMap::new(),
        }
    }

    pub fn for_link(&self, link: LinkId) -> &Demand {
        self.per_link.get(&link).unwrap_or(&self.default)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ChurnPhase {
    /// Applied before the round's estimator update and decision.
    BeforeRound,
    /// Applied after subtasks are scattered and before results are gathered.
    MidRound,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChurnEvent {
    pub round: usize,
    pub vertex: VertexId,
    pub alive: bool,
    pub phase: ChurnPhase,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub graph: DeviceGraph,
    pub params: NetworkParams,
    pub task: TaskSpec,
    /// Time the initiator needs to run the whole computation alone.
    pub local_tp: f64,
    pub energy: EnergyModel,
    /// The device that cuts, scatters, gathers and composes.
    pub initiator: VertexId,
    /// Device kinds that may receive work. Neighbors of other kinds are
    /// ignored by the planner.
    pub peer_kinds: Vec<DeviceKind>,
    pub demand: DemandModel,
    pub planner: PlannerConfig,
    pub rounds: usize,
    pub warmup: usize,
    pub churn: Vec<ChurnEvent>,
    pub seed: u64,
}

/// A scenario field that breaks an invariant. `field` is a dotted path such
/// as `links[3].rho_capacity`.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{field}: {reason}")]
pub struct ScenarioError {
    pub field: String,
    pub reason: String,
}

impl ScenarioError {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

/// First phone in the graph, the conventional initiator.
pub fn first_phone(graph: &DeviceGraph) -> Option<VertexId> {
    graph
        .vertices()
        .iter()
        .find(|v| v.kind() == DeviceKind::Phone)
        .map(|v| v.id())
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.rounds == 0 {
            return Err(ScenarioError::new("rounds", "must be at least 1"));
        }
        if !(self.local_tp > 0.0 && self.local_tp.is_finite()) {
            return Err(ScenarioError::new("task.local_tp", "must be positive"));
        }
        if self.graph.vertex(self.initiator).is_err() {
            return Err(ScenarioError::new(
                "initiator",
                format!("no device {}", self.initiator.0),
            ));
        }
        if self.peer_kinds.is_empty() {
            return Err(ScenarioError::new(
                "peer_kinds",
                "must name at least one kind",
            ));
        }
        if let Err(e) = self.energy.validate() {
            return Err(ScenarioError::new(
                format!("energy.{}", e.field),
                format!("invalid value {}", e.value),
            ));
        }
        if !(self.planner.skewness_z >= 0.0 && self.planner.skewness_z.is_finite()) {
            return Err(ScenarioError::new(
                "planner.skewness_z",
                "must be finite and non-negative",
            ));
        }
        if self.params.c0_is_asymptotic() {
            if let Some(link) = self.graph.links().iter().find(|l| l.rho_capacity() >= 1.0) {
                return Err(ScenarioError::new(
                    format!("links[{}].rho_capacity", link.id().0),
                    "must be below 1 when c0 is asymptotic",
                ));
            }
        }
        if let Err((field, reason)) = self.demand.default.check() {
            return Err(ScenarioError::new(
                format!("demand.default.{field}"),
                reason,
            ));
        }
        for (link, demand) in &self.demand.per_link {
            if self.graph.link(*link).is_err() {
                return Err(ScenarioError::new(
                    format!("demand.links.{}", link.0),
                    "no such link",
                ));
            }
            if let Err((field, reason)) = demand.check() {
                return Err(ScenarioError::new(
                    format!("demand.links.{}.{field}", link.0),
                    reason,
                ));
            }
        }
        for (k, event) in self.churn.iter().enumerate() {
            if self.graph.vertex(event.vertex).is_err() {
                return Err(ScenarioError::new(
                    format!("churn[{k}].vertex"),
                    format!("no device {}", event.vertex.0),
                ));
            }
            if event.vertex == self.initiator {
                return Err(ScenarioError::new(
                    format!("churn[{k}].vertex"),
                    "the initiator cannot churn",
                ));
            }
            if event.round >= self.rounds {
                return Err(ScenarioError::new(
                    format!("churn[{k}].round"),
                    format!("must be below rounds ({})", self.rounds),
                ));
            }
        }
        Ok(())
    }
}

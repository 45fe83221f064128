//! JSON scenario documents.
//!
//! Unknown keys are rejected everywhere. Device and link ids are their
//! positions in the `devices` and `links` arrays.

use std::collections::BTreeMap;

use offload_core::{
    first_phone, ChurnEvent, ChurnPhase, Demand, DemandModel, DeviceGraph, DeviceKind, EnergyModel,
    LinkError, LinkId, LinkKind, NetworkParams, PlanError, PlannerConfig, Scenario, TaskSpec,
    TopologyError, VertexId, DEFAULT_WARMUP,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid value at {path}: {reason}")]
    Validation { path: String, reason: String },
}

impl ParseError {
    fn at(path: impl Into<String>, reason: impl Into<String>) -> Self {
        ParseError::Validation {
            path: path.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub network: NetworkSection,
    pub devices: Vec<DeviceEntry>,
    pub links: Vec<LinkEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initiator: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peer_kinds: Option<Vec<DeviceKindName>>,
    pub task: TaskSection,
    pub energy: EnergySection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demand: Option<DemandSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planner: Option<PlannerSection>,
    pub rounds: usize,
    #[serde(default = "default_warmup")]
    pub warmup: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub churn: Vec<ChurnEntry>,
    #[serde(default)]
    pub seed: u64,
}

fn default_warmup() -> usize {
    DEFAULT_WARMUP
}

fn default_true() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub c0: f64,
    pub tau0: f64,
    #[serde(default, skip_serializing_if = "is_false")]
    pub c0_is_asymptotic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviceKindName {
    Phone,
    BaseStation,
    WifiAp,
}

impl From<DeviceKindName> for DeviceKind {
    fn from(k: DeviceKindName) -> Self {
        match k {
            DeviceKindName::Phone => DeviceKind::Phone,
            DeviceKindName::BaseStation => DeviceKind::BaseStation,
            DeviceKindName::WifiAp => DeviceKind::WifiAccessPoint,
        }
    }
}

impl From<DeviceKind> for DeviceKindName {
    fn from(k: DeviceKind) -> Self {
        match k {
            DeviceKind::Phone => DeviceKindName::Phone,
            DeviceKind::BaseStation => DeviceKindName::BaseStation,
            DeviceKind::WifiAccessPoint => DeviceKindName::WifiAp,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceEntry {
    pub kind: DeviceKindName,
    #[serde(default = "default_true", skip_serializing_if = "is_true")]
    pub alive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkKindName {
    Wifi,
    Cell,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkEntry {
    pub endpoints: [u32; 2],
    pub kind: LinkKindName,
    pub rho_capacity: f64,
    pub rho_delay: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSection {
    pub t0: f64,
    pub ta: f64,
    pub ts: f64,
    pub tp: f64,
    pub payload_bits_per_neighbor: u64,
    pub local_tp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnergySection {
    Identity,
    Linear { coefficient: f64 },
    Affine { coefficient: f64, offset: f64 },
    PowerLaw { coefficient: f64, exponent: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DemandEntry {
    Constant { bits: u64 },
    Uniform { lo: u64, hi: u64 },
    TwoPoint { a: u64, b: u64, p: f64 },
}

/// Per-link transfer sizes. Links not listed use `default`, which itself
/// defaults to a constant `task.payload_bits_per_neighbor`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<DemandEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub links: BTreeMap<u32, DemandEntry>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlannerSection {
    #[serde(default)]
    pub skewness_z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChurnPhaseName {
    #[default]
    BeforeRound,
    MidRound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChurnEntry {
    pub round: usize,
    pub vertex: u32,
    pub alive: bool,
    #[serde(default)]
    pub phase: ChurnPhaseName,
}

impl From<DemandEntry> for Demand {
    fn from(d: DemandEntry) -> Self {
        match d {
            DemandEntry::Constant { bits } => Demand::Constant { bits },
            DemandEntry::Uniform { lo, hi } => Demand::Uniform { lo, hi },
            DemandEntry::TwoPoint { a, b, p } => Demand::TwoPoint { a, b, p },
        }
    }
}

impl From<Demand> for DemandEntry {
    fn from(d: Demand) -> Self {
        match d {
            Demand::Constant { bits } => DemandEntry::Constant { bits },
            Demand::Uniform { lo, hi } => DemandEntry::Uniform { lo, hi },
            Demand::TwoPoint { a, b, p } => DemandEntry::TwoPoint { a, b, p },
        }
    }
}

impl From<EnergySection> for EnergyModel {
    fn from(e: EnergySection) -> Self {
        match e {
            EnergySection::Identity => EnergyModel::Identity,
            EnergySection::Linear { coefficient } => EnergyModel::Linear { coefficient },
            EnergySection::Affine {
                coefficient,
                offset,
            } => EnergyModel::Affine {
                coefficient,
                offset,
            },
            EnergySection::PowerLaw {
                coefficient,
                exponent,
            } => EnergyModel::PowerLaw {
                coefficient,
                exponent,
            },
        }
    }
}

impl From<EnergyModel> for EnergySection {
    fn from(e: EnergyModel) -> Self {
        match e {
            EnergyModel::Identity => EnergySection::Identity,
            EnergyModel::Linear { coefficient } => EnergySection::Linear { coefficient },
            EnergyModel::Affine {
                coefficient,
                offset,
            } => EnergySection::Affine {
                coefficient,
                offset,
            },
            EnergyModel::PowerLaw {
                coefficient,
                exponent,
            } => EnergySection::PowerLaw {
                coefficient,
                exponent,
            },
        }
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, ParseError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let file: ScenarioFile = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if inner.is_syntax() || inner.is_eof() {
            ParseError::Syntax {
                line: inner.line(),
                column: inner.column(),
                message: inner.to_string(),
            }
        } else {
            ParseError::at(path, inner.to_string())
        }
    })?;
    de.end().map_err(|e| ParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    file.into_scenario()
}

impl ScenarioFile {
    pub fn into_scenario(self) -> Result<Scenario, ParseError> {
        let params = NetworkParams::new(
            self.network.c0,
            self.network.tau0,
            self.network.c0_is_asymptotic,
        )
        .map_err(|e| match e {
            LinkError::InvalidNetworkParams { field, .. } => {
                ParseError::at(format!("network.{field}"), e.to_string())
            }
            other => ParseError::at("network", other.to_string()),
        })?;

        let mut graph = DeviceGraph::new();
        for d in &self.devices {
            let v = graph.add_device(d.kind.into());
            graph.set_alive(v, d.alive).expect("vertex was just added");
        }
        for (k, l) in self.links.iter().enumerate() {
            let kind = match l.kind {
                LinkKindName::Wifi => LinkKind::WifiLink,
                LinkKindName::Cell => LinkKind::CellLink,
            };
            let [a, b] = l.endpoints;
            graph
                .add_link(VertexId(a), VertexId(b), kind, l.rho_capacity, l.rho_delay)
                .map_err(|e| match e {
                    TopologyError::ParameterOutOfRange { field, .. } => {
                        ParseError::at(format!("links[{k}].{field}"), e.to_string())
                    }
                    other => ParseError::at(format!("links[{k}].endpoints"), other.to_string()),
                })?;
        }

        let initiator = match self.initiator {
            Some(v) => VertexId(v),
            None => first_phone(&graph)
                .ok_or_else(|| ParseError::at("initiator", "no phone to act as initiator"))?,
        };

        let t = &self.task;
        let task = TaskSpec::new(t.t0, t.ta, t.ts, t.tp, t.payload_bits_per_neighbor).map_err(
            |e| match e {
                PlanError::InvalidTask { field, .. } => {
                    ParseError::at(format!("task.{field}"), e.to_string())
                }
                other => ParseError::at("task", other.to_string()),
            },
        )?;

        let demand_section = self.demand.unwrap_or_default();
        let demand = DemandModel {
            default: demand_section
                .default
                .map(Demand::from)
                .unwrap_or(Demand::Constant {
                    bits: t.payload_bits_per_neighbor,
                }),
            per_link: demand_section
                .links
                .into_iter()
                .map(|(k, d)| (LinkId(k), d.into()))
                .collect(),
        };

        let scenario = Scenario {
            graph,
            params,
            task,
            local_tp: t.local_tp,
            energy: self.energy.into(),
            initiator,
            peer_kinds: self
                .peer_kinds
                .map(|ks| ks.into_iter().map(DeviceKind::from).collect())
                .unwrap_or_else(|| vec![DeviceKind::Phone]),
            demand,
            planner: PlannerConfig {
                skewness_z: self.planner.unwrap_or_default().skewness_z,
            },
            rounds: self.rounds,
            warmup: self.warmup,
            churn: self
                .churn
                .iter()
                .map(|c| ChurnEvent {
                    round: c.round,
                    vertex: VertexId(c.vertex),
                    alive: c.alive,
                    phase: match c.phase {
                        ChurnPhaseName::BeforeRound => ChurnPhase::BeforeRound,
                        ChurnPhaseName::MidRound => ChurnPhase::MidRound,
                    },
                })
                .collect(),
            seed: self.seed,
        };
        scenario
            .validate()
            .map_err(|e| ParseError::at(e.field, e.reason))?;
        Ok(scenario)
    }

    pub fn from_scenario(s: &Scenario) -> Self {
        let graph = &s.graph;
        ScenarioFile {
            network: NetworkSection {
                c0: s.params.c0(),
                tau0: s.params.tau0(),
                c0_is_asymptotic: s.params.c0_is_asymptotic(),
            },
            devices: graph
                .vertices()
                .iter()
                .map(|v| DeviceEntry {
                    kind: v.kind().into(),
                    alive: v.alive,
                })
                .collect(),
            links: graph
                .links()
                .iter()
                .map(|l| LinkEntry {
                    endpoints: [l.endpoints().0 .0, l.endpoints().1 .0],
                    kind: match l.kind() {
                        LinkKind::WifiLink => LinkKindName::Wifi,
                        LinkKind::CellLink => LinkKindName::Cell,
                    },
                    rho_capacity: l.rho_capacity(),
                    rho_delay: l.rho_delay(),
                })
                .collect(),
            initiator: Some(s.initiator.0),
            peer_kinds: Some(s.peer_kinds.iter().map(|&k| k.into()).collect()),
            task: TaskSection {
                t0: s.task.t0(),
                ta: s.task.ta(),
                ts: s.task.ts(),
                tp: s.task.tp(),
                payload_bits_per_neighbor: s.task.payload_bits_per_neighbor(),
                local_tp: s.local_tp,
            },
            energy: s.energy.into(),
            demand: Some(DemandSection {
                default: Some(s.demand.default.into()),
                links: s
                    .demand
                    .per_link
                    .iter()
                    .map(|(k, d)| (k.0, (*d).into()))
                    .collect(),
            }),
            planner: Some(PlannerSection {
                skewness_z: s.planner.skewness_z,
            }),
            rounds: s.rounds,
            warmup: s.warmup,
            churn: s
                .churn
                .iter()
                .map(|c| ChurnEntry {
                    round: c.round,
                    vertex: c.vertex.0,
                    alive: c.alive,
                    phase: match c.phase {
                        ChurnPhase::BeforeRound => ChurnPhaseName::BeforeRound,
                        ChurnPhase::MidRound => ChurnPhaseName::MidRound,
                    },
                })
                .collect(),
            seed: s.seed,
        }
    }
}

pub fn serialize_scenario(s: &Scenario) -> String {
    serde_json::to_string_pretty(&ScenarioFile::from_scenario(s))
        .expect("scenario documents always serialize")
}

//! Planning and simulation core for cooperative task offloading.
//!
//! A phone that must produce a result every `t0` time units can cut its
//! computation into parts and ship some of them to nearby peers over WiFi or
//! cellular links. This crate models the device graph, the slot-based
//! capacity of each link, streaming estimates of per-link slot counts, the
//! admission tests that decide whether splitting pays off in time and
//! energy, and a deterministic round-based engine that plays the whole loop
//! out over a scenario.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod energy;
pub mod engine;
pub mod link_model;
pub mod moments;
pub mod planner;
pub mod scenario;
pub mod topology;

pub use energy::{EnergyModel, EnergyModelError};
pub use engine::{run, Engine, EngineError, EstimatorSnapshot, Phase, RoundOutcome, SimTrace};
pub use link_model::{
    bits_per_slot, classify_link, slots_required, LinkClass, LinkError, NetworkParams,
    TransferRequest,
};
pub use moments::{MomentsError, SlotEstimator};
pub use planner::{
    estimate_tc, max_cohort_size, round_energy, split_decision, time_feasible, Decision, GateKind,
    GateRecord, LinkEstimates, Plan, PlanError, PlannerConfig, Rationale, TaskSpec,
};
pub use scenario::{
    first_phone, ChurnEvent, ChurnPhase, Demand, DemandModel, Scenario, ScenarioError,
    DEFAULT_WARMUP,
};
pub use topology::{
    DeviceGraph, DeviceKind, Link, LinkId, LinkKind, RhoField, TopologyError, Vertex, VertexId,
};

//! Scenario files, metrics output and seed sweeps for the offloading
//! simulator in [`offload_core`].

pub mod metrics;
pub mod scenario_file;
pub mod sweep;

pub use metrics::{emit_metrics, fmt_sig6, Format, MetricsReport, MetricsRow, Summary, CSV_HEADER};
pub use scenario_file::{parse_scenario, serialize_scenario, ParseError, ScenarioFile};
pub use sweep::{sweep, Aggregate, SweepError, SweepReport};

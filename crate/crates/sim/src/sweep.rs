//! Runs one scenario under several seeds and aggregates the summaries.

use std::fmt::Write as _;

use offload_core::{run, EngineError, Scenario, SlotEstimator};
use rayon::prelude::*;
use thiserror::Error;

use crate::metrics::{fmt_sig6, MetricsReport, Summary};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("no seeds given")]
    NoSeeds,
    #[error("seed {0} listed twice")]
    DuplicateSeed(u64),
    #[error("seed {seed}: {source}")]
    Run {
        seed: u64,
        #[source]
        source: EngineError,
    },
}

/// Mean and population standard deviation of one metric across seeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    pub mean: f64,
    pub std: f64,
}

impl Aggregate {
    fn of(values: impl Iterator<Item = f64>) -> Self {
        let est = SlotEstimator::from_samples(values);
        Aggregate {
            mean: est.mean().unwrap_or(0.0),
            std: est.variance().map(f64::sqrt).unwrap_or(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    /// Per-seed summaries in ascending seed order.
    pub runs: Vec<(u64, Summary)>,
    pub split_rate: Aggregate,
    pub deadline_miss_rate: Aggregate,
    pub mean_energy: Aggregate,
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,mean,std\n");
        for (name, agg) in [
            ("split_rate", self.split_rate),
            ("deadline_miss_rate", self.deadline_miss_rate),
            ("mean_energy", self.mean_energy),
        ] {
            writeln!(out, "{name},{},{}", fmt_sig6(agg.mean), fmt_sig6(agg.std)).unwrap();
        }
        out
    }
}

/// Runs `scenario` once per seed, in parallel. The result does not depend
/// on the order of `seeds`.
pub fn sweep(scenario: &Scenario, seeds: &[u64]) -> Result<SweepReport, SweepError> {
    if seeds.is_empty() {
        return Err(SweepError::NoSeeds);
    }
    let mut sorted = seeds.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(SweepError::DuplicateSeed(w[0]));
    }

    let runs = sorted
        .par_iter()
        .map(|&seed| {
            let mut s = scenario.clone();
            s.seed = seed;
            let trace = run(&s).map_err(|source| SweepError::Run { seed, source })?;
            Ok((seed, MetricsReport::from_trace(&trace).summary))
        })
        .collect::<Result<Vec<_>, SweepError>>()?;

    Ok(SweepReport {
        split_rate: Aggregate::of(runs.iter().map(|r| r.1.split_rate)),
        deadline_miss_rate: Aggregate::of(runs.iter().map(|r| r.1.deadline_miss_rate)),
        mean_energy: Aggregate::of(runs.iter().map(|r| r.1.mean_energy)),
        runs,
    })
}

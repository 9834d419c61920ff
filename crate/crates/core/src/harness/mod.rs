//! Scenario configuration and experiment drivers behind the CLI.

mod config;
mod experiments;
mod svg;

use thiserror::Error;

pub use config::ScenarioConfig;
pub use experiments::{
    capacity_csv, compare_on_sessions, comparison_csv, draw_snapshot_loads, dump_topology,
    evaluate_methods, gen_traffic, run_capacity_sweep, run_load_throughput, run_method_comparison,
    snapshot, throughput_csv, CapacityRow, Snapshot, ThroughputRow, CAPACITY_HEADER,
    THROUGHPUT_HEADER,
};
pub use svg::{line_chart, throughput_chart, utilization_chart, Series};

use crate::cpe::CpeError;
use crate::reliability::ReliabilityError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("infeasible scenario: {0}")]
    Infeasible(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Reliability(#[from] ReliabilityError),
    #[error(transparent)]
    Cpe(#[from] CpeError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// Process exit status: 2 for configuration errors, 3 for infeasible
    /// scenarios, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Infeasible(_) | HarnessError::Cpe(CpeError::NoAttachmentCapacity) => 3,
            _ => 1,
        }
    }
}

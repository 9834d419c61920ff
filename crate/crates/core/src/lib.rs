//! Capacity, reliability and throughput analysis for LEO satellite
//! constellations with inter-satellite links.
//!
//! The flow and throughput code is generic over [`Scalar`]; the aliases
//! below fix it to `f64` (and to exact rationals where noted).

pub mod constellation;
pub mod cpe;
pub mod flow;
pub mod harness;
pub mod reliability;
pub mod scalar;
pub mod traffic;

pub use scalar::{Exact, Scalar};

pub type CapacityGraph = flow::CapacityGraph<f64>;
pub type ResidualGraph = flow::ResidualGraph<f64>;
pub type FlowResult = flow::FlowResult<f64>;
pub type TrafficSession = cpe::TrafficSession<f64>;
pub type ThroughputReport = cpe::ThroughputReport<f64>;
pub type GslBudget = cpe::GslBudget<f64>;
pub type DemandMatrix = traffic::DemandMatrix<f64>;

pub type ExactCapacityGraph = flow::CapacityGraph<Exact>;
pub type ExactFlowResult = flow::FlowResult<Exact>;
pub type ExactTrafficSession = cpe::TrafficSession<Exact>;
pub type ExactThroughputReport = cpe::ThroughputReport<Exact>;

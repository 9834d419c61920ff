//! Capacity and residual graphs, Dinic max flow, super terminals and the
//! sequential multi-commodity decomposition.

mod dinic;
mod edgelist;
mod graph;
mod multicommodity;
mod super_terminals;

use thiserror::Error;

use crate::scalar::Scalar;

pub use dinic::{dinic_max_flow, ResidualGraph};
pub use edgelist::{parse_edge_list, write_edge_list};
pub use graph::{Arc, Capacity, CapacityGraph, Link};
pub use multicommodity::{sequential_multicommodity, Commodity, Demand, MultiCommodityResult};
pub use super_terminals::{attach_super_terminals, SuperTerminals};

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("node {0} is not in the graph")]
    UnknownNode(usize),
    #[error("source and sink are the same node ({0})")]
    SourceIsSink(usize),
    #[error("super terminals need at least one source and one sink")]
    NoTerminals,
    #[error("no commodities given")]
    NoCommodities,
    #[error("edge list line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Outcome of a single-commodity max-flow computation.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowResult<S> {
    pub value: S,
    /// Flow on each arc, indexed like the input graph.
    pub arc_flows: Vec<S>,
}

#[derive(Debug, Error, PartialEq)]
pub enum FlowViolation {
    #[error("arc {arc} carries {flow} outside [0, {capacity}]")]
    Capacity {
        arc: usize,
        flow: f64,
        capacity: f64,
    },
    #[error("node {node} has net outflow {imbalance}")]
    Conservation { node: usize, imbalance: f64 },
    #[error("source outflow {source_out} differs from sink inflow {sink_in}")]
    Value { source_out: f64, sink_in: f64 },
}

/// Checks capacity constraints on every arc and conservation at every node
/// other than `source` and `sink`, to the scalar's tolerance.
pub fn check_flow<S: Scalar>(
    g: &CapacityGraph<S>,
    arc_flows: &[S],
    source: usize,
    sink: usize,
) -> Result<(), FlowViolation> {
    let tol = S::tolerance();
    let mut net = vec![S::zero(); g.node_count()];
    for (id, (arc, &f)) in g.arcs().iter().zip(arc_flows).enumerate() {
        let over = match arc.capacity {
            Capacity::Finite(c) => f > c + tol,
            Capacity::Infinite => false,
        };
        if f < S::zero() - tol || over {
            return Err(FlowViolation::Capacity {
                arc: id,
                flow: f.to_f64_lossy(),
                capacity: arc
                    .capacity
                    .finite()
                    .map_or(f64::INFINITY, Scalar::to_f64_lossy),
            });
        }
        net[arc.src] = net[arc.src] + f;
        net[arc.dst] = net[arc.dst] - f;
    }
    for (node, &imbalance) in net.iter().enumerate() {
        if node == source || node == sink {
            continue;
        }
        if imbalance > tol || imbalance < S::zero() - tol {
            return Err(FlowViolation::Conservation {
                node,
                imbalance: imbalance.to_f64_lossy(),
            });
        }
    }
    let source_out = net[source];
    let sink_in = S::zero() - net[sink];
    let diff = source_out - sink_in;
    if diff > tol || diff < S::zero() - tol {
        return Err(FlowViolation::Value {
            source_out: source_out.to_f64_lossy(),
            sink_in: sink_in.to_f64_lossy(),
        });
    }
    Ok(())
}

use super::dinic::ResidualGraph;
use super::graph::{Capacity, CapacityGraph};
use super::FlowError;
use crate::scalar::Scalar;

/// Requested amount for a commodity or traffic session.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Demand<S> {
    /// Takes whatever the network leaves.
    Elastic,
    Fixed(S),
}

impl<S: Scalar> Demand<S> {
    pub fn cap(self) -> Option<S> {
        match self {
            Demand::Elastic => None,
            Demand::Fixed(d) => Some(d),
        }
    }

    /// Summing with an elastic demand stays elastic.
    pub fn combine(self, other: Self) -> Self {
        match (self, other) {
            (Demand::Fixed(a), Demand::Fixed(b)) => Demand::Fixed(a + b),
            _ => Demand::Elastic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Commodity<S> {
    pub source: usize,
    pub sink: usize,
    pub demand: Demand<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiCommodityResult<S> {
    /// Flow achieved by each commodity, in input order.
    pub per_commodity: Vec<S>,
    /// Per-commodity arc flows, indexed like the input graph's arcs.
    pub commodity_arc_flows: Vec<Vec<S>>,
    /// Sum of all commodities' flow on each arc.
    pub arc_flows: Vec<S>,
}

impl<S: Scalar> MultiCommodityResult<S> {
    pub fn total(&self) -> S {
        self.per_commodity.iter().copied().sum()
    }
}

/// Sequential decomposition of a multi-commodity flow problem.
///
/// Commodities are routed one at a time in input order. Each one gets a
/// Dinic max flow on the capacity left over by its predecessors, gated by a
/// bottleneck arc of capacity `demand` in front of its source. Committed
/// flow is never rerouted, so the result is an order-dependent lower bound
/// on the joint optimum.
pub fn sequential_multicommodity<S: Scalar>(
    g: &CapacityGraph<S>,
    commodities: &[Commodity<S>],
) -> Result<MultiCommodityResult<S>, FlowError> {
    if commodities.is_empty() {
        return Err(FlowError::NoCommodities);
    }
    let n = g.node_count();
    let m = g.arcs().len();
    for c in commodities {
        if c.source >= n || c.sink >= n {
            return Err(FlowError::UnknownNode(c.source.max(c.sink)));
        }
        if c.source == c.sink {
            return Err(FlowError::SourceIsSink(c.source));
        }
    }

    let mut committed = vec![S::zero(); m];
    let mut per_commodity = Vec::with_capacity(commodities.len());
    let mut commodity_arc_flows = Vec::with_capacity(commodities.len());
    for c in commodities {
        let mut r = ResidualGraph::from_remaining(g, &committed);
        let gate = r.add_node();
        let cap = match c.demand {
            Demand::Elastic => Capacity::Infinite,
            Demand::Fixed(d) => Capacity::Finite(d),
        };
        r.add_arc(gate, c.source, cap);
        let value = r.max_flow(gate, c.sink);
        let flows = r.arc_flows(m);
        for (acc, &f) in committed.iter_mut().zip(&flows) {
            *acc = *acc + f;
        }
        per_commodity.push(value);
        commodity_arc_flows.push(flows);
    }
    Ok(MultiCommodityResult {
        per_commodity,
        commodity_arc_flows,
        arc_flows: committed,
    })
}

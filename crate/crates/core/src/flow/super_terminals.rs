use std::collections::HashMap;

use super::graph::{Capacity, CapacityGraph};
use super::FlowError;
use crate::scalar::Scalar;

/// A graph extended with a super source and a super sink.
#[derive(Debug, Clone)]
pub struct SuperTerminals<S> {
    pub graph: CapacityGraph<S>,
    pub super_source: usize,
    pub super_sink: usize,
    /// Nodes attached to the super source, in attachment order.
    pub sources: Vec<usize>,
    /// Nodes attached to the super sink, in attachment order.
    pub sinks: Vec<usize>,
    /// Nodes that asked for both roles and lost one to pruning.
    pub pruned: Vec<usize>,
}

/// Attaches a super source feeding every node of `sources` and a super sink
/// fed by every node of `sinks`, all over infinite arcs. Duplicates attach
/// once.
///
/// With `prune_shortcuts`, a node listed in both sets keeps only the role
/// it was given first. Position in the respective list is the order; on
/// equal positions the source role wins.
pub fn attach_super_terminals<S: Scalar>(
    g: &CapacityGraph<S>,
    sources: &[usize],
    sinks: &[usize],
    prune_shortcuts: bool,
) -> Result<SuperTerminals<S>, FlowError> {
    if sources.is_empty() || sinks.is_empty() {
        return Err(FlowError::NoTerminals);
    }
    let n = g.node_count();
    if let Some(&bad) = sources.iter().chain(sinks).find(|&&v| v >= n) {
        return Err(FlowError::UnknownNode(bad));
    }

    let first_pos = |list: &[usize]| {
        let mut pos = HashMap::new();
        for (i, &v) in list.iter().enumerate() {
            pos.entry(v).or_insert(i);
        }
        pos
    };
    let src_pos = first_pos(sources);
    let snk_pos = first_pos(sinks);

    let mut pruned = Vec::new();
    let keep_source = |v: usize| -> bool {
        match (prune_shortcuts, snk_pos.get(&v)) {
            (true, Some(&j)) => src_pos[&v] <= j,
            _ => true,
        }
    };
    let mut source_nodes = Vec::new();
    let mut seen = vec![false; n];
    for &v in sources {
        if !seen[v] {
            seen[v] = true;
            if keep_source(v) {
                source_nodes.push(v);
            } else {
                pruned.push(v);
            }
        }
    }
    let mut sink_nodes = Vec::new();
    let mut seen = vec![false; n];
    for &v in sinks {
        if !seen[v] {
            seen[v] = true;
            let keep = match (prune_shortcuts, src_pos.get(&v)) {
                (true, Some(&i)) => snk_pos[&v] < i,
                _ => true,
            };
            if keep {
                sink_nodes.push(v);
            } else {
                pruned.push(v);
            }
        }
    }

    let mut graph = g.clone();
    let super_source = graph.add_node();
    let super_sink = graph.add_node();
    for &v in &source_nodes {
        graph.add_arc(super_source, v, Capacity::Infinite, 0.0);
    }
    for &v in &sink_nodes {
        graph.add_arc(v, super_sink, Capacity::Infinite, 0.0);
    }
    Ok(SuperTerminals {
        graph,
        super_source,
        super_sink,
        sources: source_nodes,
        sinks: sink_nodes,
        pruned,
    })
}

//! Plain-text arc list: one arc per line, `src dst capacity_gbps [length_km]`.
//! `#` starts a comment; `inf` is accepted as a capacity.

use std::fmt::Write as _;

use super::graph::{Capacity, CapacityGraph};
use super::FlowError;
use crate::scalar::Scalar;

pub fn parse_edge_list<S: Scalar>(text: &str) -> Result<CapacityGraph<S>, FlowError> {
    let mut arcs = Vec::new();
    let mut max_node = None::<usize>;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: &str| FlowError::Parse {
            line: i + 1,
            msg: msg.to_string(),
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(3..=4).contains(&fields.len()) {
            return Err(bad("expected `src dst capacity [length]`"));
        }
        let src: usize = fields[0].parse().map_err(|_| bad("bad src"))?;
        let dst: usize = fields[1].parse().map_err(|_| bad("bad dst"))?;
        let capacity = if fields[2].eq_ignore_ascii_case("inf") {
            Capacity::Infinite
        } else {
            let c: f64 = fields[2].parse().map_err(|_| bad("bad capacity"))?;
            if !(c >= 0.0 && c.is_finite()) {
                return Err(bad("capacity must be finite and non-negative"));
            }
            Capacity::Finite(S::from_f64_lossy(c))
        };
        let length: f64 = match fields.get(3) {
            Some(s) => s.parse().map_err(|_| bad("bad length"))?,
            None => 0.0,
        };
        if length < 0.0 {
            return Err(bad("negative length"));
        }
        max_node = Some(max_node.unwrap_or(0).max(src).max(dst));
        arcs.push((src, dst, capacity, length));
    }
    let mut g = CapacityGraph::new(max_node.map_or(0, |m| m + 1));
    for (src, dst, cap, len) in arcs {
        g.add_arc(src, dst, cap, len);
    }
    Ok(g)
}

/// Writes every arc of `g` in the edge-list format.
pub fn write_edge_list<S: Scalar>(g: &CapacityGraph<S>) -> String {
    let mut out = String::from("# src dst capacity_gbps length_km\n");
    for a in g.arcs() {
        let cap = match a.capacity {
            Capacity::Finite(c) => format!("{}", c.to_f64_lossy()),
            Capacity::Infinite => "inf".to_string(),
        };
        let _ = writeln!(out, "{} {} {} {:.6}", a.src, a.dst, cap, a.length_km);
    }
    out
}

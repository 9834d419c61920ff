//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use leocap::flow::{Capacity, CapacityGraph};
use proptest::prelude::*;

/// Integer arc list `(src, dst, capacity)`.
pub type ArcList = Vec<(usize, usize, u32)>;

pub fn graph_from(n: usize, arcs: &ArcList) -> CapacityGraph<f64> {
    let mut g = CapacityGraph::new(n);
    for &(u, v, c) in arcs {
        g.add_arc(u, v, Capacity::Finite(c as f64), 1.0);
    }
    g
}

/// Minimum s-t cut by enumerating every vertex subset containing `s` and
/// not `t`.
pub fn min_cut(n: usize, arcs: &ArcList, s: usize, t: usize) -> u32 {
    let others: Vec<usize> = (0..n).filter(|&v| v != s && v != t).collect();
    let mut best = u32::MAX;
    for mask in 0u32..(1 << others.len()) {
        let mut side = vec![false; n];
        side[s] = true;
        for (i, &v) in others.iter().enumerate() {
            if mask & (1 << i) != 0 {
                side[v] = true;
            }
        }
        let cut: u32 = arcs
            .iter()
            .filter(|&&(u, v, _)| side[u] && !side[v])
            .map(|a| a.2)
            .sum();
        best = best.min(cut);
    }
    best
}

/// Random directed graph with up to `max_n` vertices and integer
/// capacities in `0..=max_cap`, plus a distinct source and sink.
pub fn small_flow_instance(
    max_n: usize,
    max_arcs: usize,
    max_cap: u32,
) -> impl Strategy<Value = (usize, ArcList, usize, usize)> {
    (2..=max_n).prop_flat_map(move |n| {
        (
            Just(n),
            prop::collection::vec((0..n, 0..n, 0..=max_cap), 0..=max_arcs).prop_map(|a| {
                a.into_iter()
                    .filter(|&(u, v, _)| u != v)
                    .collect::<ArcList>()
            }),
            0..n,
            0..n - 1,
        )
            .prop_map(|(n, arcs, s, t)| {
                let t = if t >= s { t + 1 } else { t };
                (n, arcs, s, t)
            })
    })
}

/// Every integral flow vector on `caps` with value exactly `value` from
/// `s` to `t` (cycles allowed), as the capacities it leaves behind.
pub fn remaining_after_flows(
    n: usize,
    arcs: &[(usize, usize)],
    caps: &[u32],
    s: usize,
    t: usize,
    value: u32,
) -> BTreeSet<Vec<u32>> {
    let mut out = BTreeSet::new();
    let mut f = vec![0u32; arcs.len()];
    loop {
        let mut net = vec![0i64; n];
        for (i, &(u, v)) in arcs.iter().enumerate() {
            net[u] += f[i] as i64;
            net[v] -= f[i] as i64;
        }
        let ok = (0..n).all(|v| v == s || v == t || net[v] == 0) && net[s] == value as i64;
        if ok {
            out.insert(caps.iter().zip(&f).map(|(c, x)| c - x).collect());
        }
        // odometer over 0..=caps[i]
        let mut i = 0;
        loop {
            if i == f.len() {
                return out;
            }
            if f[i] < caps[i] {
                f[i] += 1;
                break;
            }
            f[i] = 0;
            i += 1;
        }
    }
}

/// Every per-commodity outcome that greedy sequential routing can produce:
/// each commodity takes `min(demand, max flow)` on what is left, over every
/// possible routing of that amount.
pub fn sequential_outcomes(
    n: usize,
    arcs: &[(usize, usize)],
    caps: &[u32],
    commodities: &[(usize, usize, Option<u32>)],
) -> BTreeSet<Vec<u32>> {
    let mut results = BTreeSet::new();
    let mut frontier: BTreeSet<(Vec<u32>, Vec<u32>)> =
        BTreeSet::from([(caps.to_vec(), Vec::new())]);
    for &(s, t, d) in commodities {
        let mut next = BTreeSet::new();
        for (rem, got) in &frontier {
            let list: ArcList = arcs
                .iter()
                .zip(rem)
                .map(|(&(u, v), &c)| (u, v, c))
                .collect();
            let mf = min_cut(n, &list, s, t);
            let value = d.map_or(mf, |d| d.min(mf));
            for r in remaining_after_flows(n, arcs, rem, s, t, value) {
                let mut g = got.clone();
                g.push(value);
                next.insert((r, g));
            }
        }
        frontier = next;
    }
    for (_, got) in frontier {
        results.insert(got);
    }
    results
}

/// All simple paths from `s` to `t` over `adj` (node, arc id) lists.
pub fn simple_paths(adj: &[Vec<(usize, f64)>], s: usize, t: usize) -> Vec<(f64, Vec<usize>)> {
    fn dfs(
        adj: &[Vec<(usize, f64)>],
        u: usize,
        t: usize,
        len: f64,
        path: &mut Vec<usize>,
        seen: &mut [bool],
        out: &mut Vec<(f64, Vec<usize>)>,
    ) {
        if u == t {
            out.push((len, path.clone()));
            return;
        }
        for &(v, w) in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                path.push(v);
                dfs(adj, v, t, len + w, path, seen, out);
                path.pop();
                seen[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    let mut seen = vec![false; adj.len()];
    seen[s] = true;
    dfs(adj, s, t, 0.0, &mut vec![s], &mut seen, &mut out);
    out
}

/// `rows x cols` grid graph with the given per-link capacities, row-major
/// node ids, horizontal links first.
pub fn grid_graph(rows: usize, cols: usize, caps: &[u32]) -> CapacityGraph<f64> {
    let mut g = CapacityGraph::new(rows * cols);
    let mut k = 0;
    let mut cap = || {
        let c = caps[k % caps.len()] as f64;
        k += 1;
        c
    };
    for r in 0..rows {
        for c in 0..cols - 1 {
            g.add_link(r * cols + c, r * cols + c + 1, cap(), 1.0);
        }
    }
    for r in 0..rows - 1 {
        for c in 0..cols {
            g.add_link(r * cols + c, (r + 1) * cols + c, cap(), 1.0);
        }
    }
    g
}

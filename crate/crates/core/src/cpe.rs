//! Aggregate throughput of a known set of traffic sessions by constrained
//! path expansion (CPE), plus the super-terminal max-flow baselines it is
//! compared against.
//!
//! CPE never searches for augmenting paths. Each session is expanded with a
//! private head node (fed by the super source) and a private tail node
//! (draining into the super sink), then receives whatever its own path can
//! still carry. Flow therefore only ever follows real traffic paths, which
//! is what keeps path utilization at or below one.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flow::{
    attach_super_terminals, check_flow, dinic_max_flow, Capacity, CapacityGraph, Demand, FlowError,
    FlowViolation,
};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum CpeError {
    #[error("session {session}: path needs at least two satellites")]
    PathTooShort { session: usize },
    #[error("session {session}: satellite {node} appears twice on the path")]
    RepeatedNode { session: usize, node: usize },
    #[error("session {session}: satellite {node} is not in the graph")]
    UnknownNode { session: usize, node: usize },
    #[error("session {session}: no ISL between {from} and {to}")]
    NonAdjacentHop {
        session: usize,
        from: usize,
        to: usize,
    },
    #[error("maximum ground-station count is zero, no session can attach")]
    NoAttachmentCapacity,
    #[error("no traffic sessions")]
    EmptySessions,
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("session file line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A routed load: an ordered satellite path plus its demand.
#[derive(Debug, Clone, PartialEq)]
pub struct TrafficSession<S> {
    pub path: Vec<usize>,
    pub demand: Demand<S>,
}

impl<S: Scalar> TrafficSession<S> {
    pub fn new(path: Vec<usize>, demand: Demand<S>) -> Self {
        Self { path, demand }
    }

    pub fn elastic(path: Vec<usize>) -> Self {
        Self::new(path, Demand::Elastic)
    }

    pub fn source(&self) -> usize {
        self.path[0]
    }

    pub fn sink(&self) -> usize {
        *self.path.last().expect("non-empty path")
    }

    pub fn hops(&self) -> usize {
        self.path.len().saturating_sub(1)
    }

    /// Arc ids of the path in `g`, after checking that the path is simple
    /// and every hop is an existing arc.
    pub fn arcs_in(&self, g: &CapacityGraph<S>, session: usize) -> Result<Vec<usize>, CpeError> {
        if self.path.len() < 2 {
            return Err(CpeError::PathTooShort { session });
        }
        let mut seen = std::collections::HashSet::with_capacity(self.path.len());
        for &node in &self.path {
            if node >= g.node_count() {
                return Err(CpeError::UnknownNode { session, node });
            }
            if !seen.insert(node) {
                return Err(CpeError::RepeatedNode { session, node });
            }
        }
        self.path
            .windows(2)
            .map(|w| {
                g.find_arc(w[0], w[1]).ok_or(CpeError::NonAdjacentHop {
                    session,
                    from: w[0],
                    to: w[1],
                })
            })
            .collect()
    }
}

fn arc_capacity<S: Scalar>(g: &CapacityGraph<S>, arc: usize) -> Option<S> {
    g.arc(arc).capacity.finite()
}

/// Bottleneck capacity of the ISLs along the session's path.
pub fn path_capacity<S: Scalar>(
    session: &TrafficSession<S>,
    g: &CapacityGraph<S>,
) -> Result<S, CpeError> {
    let arcs = session.arcs_in(g, 0)?;
    Ok(bottleneck(g, &arcs))
}

fn bottleneck<S: Scalar>(g: &CapacityGraph<S>, arcs: &[usize]) -> S {
    let mut caps = arcs.iter().filter_map(|&a| arc_capacity(g, a));
    let first = caps.next().unwrap_or_else(S::zero);
    caps.fold(first, S::min_of)
}

/// Ground-link budget: each satellite splits its aggregate GSL capacity
/// evenly across the expansion nodes attached to it, and accepts at most
/// `n_gsl_max` of them.
#[derive(Debug, Clone, PartialEq)]
pub struct GslBudget<S> {
    pub default_capacity: S,
    pub per_satellite: BTreeMap<usize, S>,
    pub n_gsl_max: usize,
}

impl<S: Scalar> GslBudget<S> {
    pub fn uniform(capacity: S, n_gsl_max: usize) -> Self {
        Self {
            default_capacity: capacity,
            per_satellite: BTreeMap::new(),
            n_gsl_max,
        }
    }

    pub fn capacity_of(&self, sat: usize) -> S {
        self.per_satellite
            .get(&sat)
            .copied()
            .unwrap_or(self.default_capacity)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Head,
    Tail,
}

/// A synthetic node that attaches one session's end to the super terminals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpansionNode {
    pub session: usize,
    pub satellite: usize,
    pub role: Role,
}

/// Why a session did or did not receive capacity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SessionOutcome {
    Allocated,
    /// Expanded at both ends but its path had nothing left.
    Saturated,
    HeadRejected,
    TailRejected,
}

/// Expanded traffic graph built by CPE, over the arcs of the physical graph.
#[derive(Debug, Clone)]
pub struct TrafficGraph<S> {
    pub expansions: Vec<ExpansionNode>,
    /// Flow committed on each physical arc.
    pub isl_allocation: Vec<S>,
    /// Expansion nodes attached per satellite.
    pub n_gsl: Vec<usize>,
    /// Satellites already serving as a head attachment point.
    pub v_src: Vec<bool>,
    /// Satellites already serving as a tail attachment point.
    pub v_tgt: Vec<bool>,
    pub gsl_capacity: Vec<S>,
    session_paths: Vec<Vec<usize>>,
    session_heads: Vec<Option<usize>>,
    session_tails: Vec<Option<usize>>,
    allocations: Vec<S>,
}

impl<S: Scalar> TrafficGraph<S> {
    fn new(g: &CapacityGraph<S>, budget: &GslBudget<S>) -> Self {
        let n = g.node_count();
        Self {
            expansions: Vec::new(),
            isl_allocation: vec![S::zero(); g.arcs().len()],
            n_gsl: vec![0; n],
            v_src: vec![false; n],
            v_tgt: vec![false; n],
            gsl_capacity: (0..n).map(|s| budget.capacity_of(s)).collect(),
            session_paths: Vec::new(),
            session_heads: Vec::new(),
            session_tails: Vec::new(),
            allocations: Vec::new(),
        }
    }

    /// Current even share of a satellite's GSL capacity per expansion node.
    pub fn gsl_share(&self, sat: usize) -> Option<S> {
        let k = self.n_gsl[sat];
        if k == 0 {
            return None;
        }
        Some(self.gsl_capacity[sat] / S::from_usize(k).expect("count fits the scalar"))
    }

    pub fn head_of(&self, session: usize) -> Option<usize> {
        self.session_heads[session]
    }

    pub fn tail_of(&self, session: usize) -> Option<usize> {
        self.session_tails[session]
    }

    /// Materializes the expanded graph as a flow network.
    ///
    /// Nodes are the physical nodes, then one node per expansion, then the
    /// super source and super sink. Only ISL arcs of session paths appear.
    /// GSL arcs carry the current even share as capacity; with `relax_gsl`
    /// they are left uncapacitated, because shares shrink as later sessions
    /// attach while earlier allocations are kept.
    pub fn flow_network(&self, g: &CapacityGraph<S>, relax_gsl: bool) -> FlowNetwork<S> {
        let mut net = CapacityGraph::new(g.node_count());
        let mut flows = Vec::new();
        let mut used = vec![false; g.arcs().len()];
        for path in &self.session_paths {
            for w in path.windows(2) {
                if let Some(a) = g.find_arc(w[0], w[1]) {
                    used[a] = true;
                }
            }
        }
        for (a, arc) in g.arcs().iter().enumerate() {
            if used[a] {
                net.add_arc(arc.src, arc.dst, arc.capacity, arc.length_km);
                flows.push(self.isl_allocation[a]);
            }
        }
        let first_expansion = net.node_count();
        for _ in &self.expansions {
            net.add_node();
        }
        let super_source = net.add_node();
        let super_sink = net.add_node();
        for (i, e) in self.expansions.iter().enumerate() {
            let node = first_expansion + i;
            let flow = self.allocations[e.session];
            let gsl = if relax_gsl {
                Capacity::Infinite
            } else {
                Capacity::Finite(self.gsl_share(e.satellite).unwrap_or_else(S::zero))
            };
            match e.role {
                Role::Head => {
                    net.add_arc(super_source, node, Capacity::Infinite, 0.0);
                    net.add_arc(node, e.satellite, gsl, 0.0);
                }
                Role::Tail => {
                    net.add_arc(e.satellite, node, gsl, 0.0);
                    net.add_arc(node, super_sink, Capacity::Infinite, 0.0);
                }
            }
            flows.push(flow);
            flows.push(flow);
        }
        FlowNetwork {
            graph: net,
            flows,
            super_source,
            super_sink,
        }
    }

    /// Capacity and conservation check of the committed allocation.
    pub fn verify(&self, g: &CapacityGraph<S>) -> Result<(), FlowViolation> {
        let net = self.flow_network(g, true);
        check_flow(&net.graph, &net.flows, net.super_source, net.super_sink)
    }
}

/// A graph together with a flow assignment on its arcs.
#[derive(Debug, Clone)]
pub struct FlowNetwork<S> {
    pub graph: CapacityGraph<S>,
    pub flows: Vec<S>,
    pub super_source: usize,
    pub super_sink: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "CPE")]
    Cpe,
    #[serde(rename = "SUPER_DINIC")]
    SuperDinic,
    #[serde(rename = "SUPER_DINIC_SP")]
    SuperDinicSp,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Cpe, Method::SuperDinic, Method::SuperDinicSp];

    pub fn name(self) -> &'static str {
        match self {
            Method::Cpe => "CPE",
            Method::SuperDinic => "SUPER_DINIC",
            Method::SuperDinicSp => "SUPER_DINIC_SP",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "CPE" => Ok(Method::Cpe),
            "SUPER_DINIC" | "DINIC" => Ok(Method::SuperDinic),
            "SUPER_DINIC_SP" | "DINIC_SP" | "SP" => Ok(Method::SuperDinicSp),
            other => Err(format!("unknown method `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputReport<S> {
    pub method: Method,
    /// Aggregate throughput.
    pub aggregate: S,
    /// Per-session allocation; empty for the max-flow baselines, which do
    /// not attribute flow to sessions.
    pub allocations: Vec<S>,
    /// Bottleneck capacity of every session's path.
    pub path_capacities: Vec<S>,
    /// Capacity of the graph the sessions run on (sum over links).
    pub network_capacity: S,
}

impl<S: Scalar> ThroughputReport<S> {
    pub fn session_count(&self) -> usize {
        self.path_capacities.len()
    }

    pub fn mean_path_utilization(&self) -> Result<S, CpeError> {
        mean_path_utilization(self)
    }

    /// `throughput / capacity`; zero on a graph without capacity.
    pub fn network_utilization(&self) -> S {
        if self.network_capacity.is_positive() {
            self.aggregate / self.network_capacity
        } else {
            S::zero()
        }
    }
}

/// Aggregate throughput over `sessions x mean path capacity`.
pub fn mean_path_utilization<S: Scalar>(report: &ThroughputReport<S>) -> Result<S, CpeError> {
    if report.path_capacities.is_empty() {
        return Err(CpeError::EmptySessions);
    }
    // |P| * mean C(p) is just the sum of path capacities
    let total: S = report.path_capacities.iter().copied().sum();
    if total.is_positive() {
        Ok(report.aggregate / total)
    } else {
        Ok(S::zero())
    }
}

/// Incremental CPE: sessions are pushed one at a time, so a load sweep can
/// read the aggregate after every prefix without recomputation.
#[derive(Debug, Clone)]
pub struct CpeEngine<'g, S> {
    graph: &'g CapacityGraph<S>,
    budget: GslBudget<S>,
    traffic: TrafficGraph<S>,
    aggregate: S,
    path_capacities: Vec<S>,
    outcomes: Vec<SessionOutcome>,
}

impl<'g, S: Scalar> CpeEngine<'g, S> {
    pub fn new(graph: &'g CapacityGraph<S>, budget: GslBudget<S>) -> Result<Self, CpeError> {
        if budget.n_gsl_max == 0 {
            return Err(CpeError::NoAttachmentCapacity);
        }
        Ok(Self {
            graph,
            traffic: TrafficGraph::new(graph, &budget),
            budget,
            aggregate: S::zero(),
            path_capacities: Vec::new(),
            outcomes: Vec::new(),
        })
    }

    fn try_attach(&mut self, sat: usize, session: usize, role: Role) -> Option<usize> {
        let t = &mut self.traffic;
        let blocked = match role {
            Role::Head => t.v_tgt[sat],
            Role::Tail => t.v_src[sat],
        };
        if blocked || t.n_gsl[sat] >= self.budget.n_gsl_max {
            return None;
        }
        t.n_gsl[sat] += 1;
        match role {
            Role::Head => t.v_src[sat] = true,
            Role::Tail => t.v_tgt[sat] = true,
        }
        t.expansions.push(ExpansionNode {
            session,
            satellite: sat,
            role,
        });
        Some(t.expansions.len() - 1)
    }

    /// Expands and allocates one session; returns its allocation.
    ///
    /// Invalid sessions are rejected before any state changes.
    pub fn push(&mut self, session: &TrafficSession<S>) -> Result<S, CpeError> {
        let id = self.path_capacities.len();
        let arcs = session.arcs_in(self.graph, id)?;
        let (src, dst) = (session.source(), session.sink());

        let head = self.try_attach(src, id, Role::Head);
        let tail = self.try_attach(dst, id, Role::Tail);

        let mut outcome = match (head, tail) {
            (None, _) => SessionOutcome::HeadRejected,
            (_, None) => SessionOutcome::TailRejected,
            _ => SessionOutcome::Allocated,
        };
        let mut alloc = S::zero();
        if outcome == SessionOutcome::Allocated {
            // one residual bottleneck for the whole path keeps it conservative
            let mut a = arcs
                .iter()
                .map(|&e| {
                    arc_capacity(self.graph, e).unwrap_or_else(S::zero)
                        - self.traffic.isl_allocation[e]
                })
                .fold(None, |acc: Option<S>, r| {
                    Some(acc.map_or(r, |m| m.min_of(r)))
                })
                .unwrap_or_else(S::zero);
            for sat in [src, dst] {
                if let Some(share) = self.traffic.gsl_share(sat) {
                    a = a.min_of(share);
                }
            }
            if let Some(d) = session.demand.cap() {
                a = a.min_of(d);
            }
            if a.is_positive() {
                for &e in &arcs {
                    self.traffic.isl_allocation[e] = self.traffic.isl_allocation[e] + a;
                }
                alloc = a;
            } else {
                outcome = SessionOutcome::Saturated;
            }
        }

        self.traffic.session_paths.push(session.path.clone());
        self.traffic.session_heads.push(head);
        self.traffic.session_tails.push(tail);
        self.traffic.allocations.push(alloc);
        self.path_capacities.push(bottleneck(self.graph, &arcs));
        self.outcomes.push(outcome);
        self.aggregate = self.aggregate + alloc;
        Ok(alloc)
    }

    pub fn aggregate(&self) -> S {
        self.aggregate
    }

    pub fn session_count(&self) -> usize {
        self.path_capacities.len()
    }

    pub fn outcomes(&self) -> &[SessionOutcome] {
        &self.outcomes
    }

    pub fn traffic_graph(&self) -> &TrafficGraph<S> {
        &self.traffic
    }

    pub fn report(&self) -> ThroughputReport<S> {
        ThroughputReport {
            method: Method::Cpe,
            aggregate: self.aggregate,
            allocations: self.traffic.allocations.clone(),
            path_capacities: self.path_capacities.clone(),
            network_capacity: self.graph.total_link_capacity(),
        }
    }
}

/// Runs CPE over `sessions` in input order.
pub fn cpe_throughput<S: Scalar>(
    sessions: &[TrafficSession<S>],
    g: &CapacityGraph<S>,
    budget: &GslBudget<S>,
) -> Result<ThroughputReport<S>, CpeError> {
    let mut engine = CpeEngine::new(g, budget.clone())?;
    for s in sessions {
        engine.push(s)?;
    }
    Ok(engine.report())
}

/// Super-terminal max-flow baseline over the sessions' endpoints. Session
/// `i` contributes its source at position `i` and its sink at position `i`,
/// which fixes the order shortcut pruning resolves conflicts by.
pub fn baseline_throughput<S: Scalar>(
    sessions: &[TrafficSession<S>],
    g: &CapacityGraph<S>,
    method: Method,
) -> Result<ThroughputReport<S>, CpeError> {
    let prune = match method {
        Method::SuperDinic => false,
        Method::SuperDinicSp => true,
        Method::Cpe => panic!("CPE is not a max-flow baseline"),
    };
    if sessions.is_empty() {
        return Err(CpeError::EmptySessions);
    }
    let mut path_capacities = Vec::with_capacity(sessions.len());
    for (i, s) in sessions.iter().enumerate() {
        let arcs = s.arcs_in(g, i)?;
        path_capacities.push(bottleneck(g, &arcs));
    }
    let sources: Vec<usize> = sessions.iter().map(TrafficSession::source).collect();
    let sinks: Vec<usize> = sessions.iter().map(TrafficSession::sink).collect();
    let st = attach_super_terminals(g, &sources, &sinks, prune)?;
    let aggregate = if st.sources.is_empty() || st.sinks.is_empty() {
        S::zero()
    } else {
        dinic_max_flow(&st.graph, st.super_source, st.super_sink)?.value
    };
    Ok(ThroughputReport {
        method,
        aggregate,
        allocations: Vec::new(),
        path_capacities,
        network_capacity: g.total_link_capacity(),
    })
}

/// Dispatches to CPE or a baseline.
pub fn throughput<S: Scalar>(
    sessions: &[TrafficSession<S>],
    g: &CapacityGraph<S>,
    budget: &GslBudget<S>,
    method: Method,
) -> Result<ThroughputReport<S>, CpeError> {
    match method {
        Method::Cpe => cpe_throughput(sessions, g, budget),
        other => baseline_throughput(sessions, g, other),
    }
}

/// Parses session lines `src dst demand|ELASTIC hop1,hop2,...`, where the
/// hop list is the full path from `src` to `dst`. `#` starts a comment.
pub fn parse_sessions<S: Scalar>(text: &str) -> Result<Vec<TrafficSession<S>>, CpeError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: &str| CpeError::Parse {
            line: i + 1,
            msg: msg.to_string(),
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(bad("expected `src dst demand hops`"));
        }
        let src: usize = fields[0].parse().map_err(|_| bad("bad src"))?;
        let dst: usize = fields[1].parse().map_err(|_| bad("bad dst"))?;
        let demand = if fields[2].eq_ignore_ascii_case("ELASTIC") {
            Demand::Elastic
        } else {
            let d: f64 = fields[2].parse().map_err(|_| bad("bad demand"))?;
            if !(d > 0.0 && d.is_finite()) {
                return Err(bad("demand must be positive"));
            }
            Demand::Fixed(S::from_f64_lossy(d))
        };
        let path: Vec<usize> = fields[3]
            .split(',')
            .map(|h| h.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad("bad hop list"))?;
        if path.first() != Some(&src) || path.last() != Some(&dst) {
            return Err(bad("hop list must start at src and end at dst"));
        }
        out.push(TrafficSession { path, demand });
    }
    Ok(out)
}

pub fn write_sessions<S: Scalar>(sessions: &[TrafficSession<S>]) -> String {
    let mut out = String::new();
    for s in sessions {
        let demand = match s.demand {
            Demand::Elastic => "ELASTIC".to_string(),
            Demand::Fixed(d) => format!("{}", d.to_f64_lossy()),
        };
        let hops: Vec<String> = s.path.iter().map(usize::to_string).collect();
        let _ = writeln!(
            out,
            "{} {} {} {}",
            s.source(),
            s.sink(),
            demand,
            hops.join(",")
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    fn line(n: usize, cap: f64) -> CapacityGraph<f64> {
        let mut g = CapacityGraph::new(n);
        for i in 0..n - 1 {
            g.add_link(i, i + 1, cap, 1.0);
        }
        g
    }

    fn budget() -> GslBudget<f64> {
        GslBudget::uniform(100.0, 10)
    }

    #[test]
    fn path_capacity_is_bottleneck() {
        let g = line(5, 10.0);
        let s = TrafficSession::elastic(vec![0, 1, 2, 3]);
        assert_eq!(path_capacity(&s, &g).unwrap(), 10.0);

        let mut g = CapacityGraph::new(5);
        for (i, c) in [10.0, 10.0, 5.0, 10.0].into_iter().enumerate() {
            g.add_link(i, i + 1, c, 1.0);
        }
        let s = TrafficSession::elastic(vec![0, 1, 2, 3, 4]);
        assert_eq!(path_capacity(&s, &g).unwrap(), 5.0);

        let mut g = CapacityGraph::new(2);
        g.add_link(0, 1, 100.0, 1.0);
        assert_eq!(
            path_capacity(&TrafficSession::elastic(vec![0, 1]), &g).unwrap(),
            100.0
        );
    }

    #[test]
    fn path_validation() {
        let g = line(4, 10.0);
        assert!(matches!(
            path_capacity(&TrafficSession::elastic(vec![0, 2]), &g),
            Err(CpeError::NonAdjacentHop { from: 0, to: 2, .. })
        ));
        assert!(matches!(
            path_capacity(&TrafficSession::elastic(vec![0, 1, 0]), &g),
            Err(CpeError::RepeatedNode { node: 0, .. })
        ));
        assert!(matches!(
            path_capacity(&TrafficSession::elastic(vec![0]), &g),
            Err(CpeError::PathTooShort { .. })
        ));
        assert!(matches!(
            path_capacity(&TrafficSession::elastic(vec![0, 9]), &g),
            Err(CpeError::UnknownNode { node: 9, .. })
        ));
    }

    #[test]
    fn single_session_gets_bottleneck() {
        let g = line(4, 10.0);
        let r =
            cpe_throughput(&[TrafficSession::elastic(vec![0, 1, 2, 3])], &g, &budget()).unwrap();
        assert_eq!(r.aggregate, 10.0);
        assert_eq!(r.allocations, vec![10.0]);
        assert_eq!(r.mean_path_utilization().unwrap(), 1.0);
    }

    #[test]
    fn demand_caps_bind_before_bottlenecks() {
        // two disjoint 2-hop sessions: 0-1-2 and 3-4-5
        let mut g = CapacityGraph::new(6);
        for (a, b) in [(0, 1), (1, 2), (3, 4), (4, 5)] {
            g.add_link(a, b, 10.0, 1.0);
        }
        let sessions = [
            TrafficSession::new(vec![0, 1, 2], Demand::Fixed(4.0)),
            TrafficSession::new(vec![3, 4, 5], Demand::Fixed(7.0)),
        ];
        let r = cpe_throughput(&sessions, &g, &budget()).unwrap();
        assert_eq!(r.allocations, vec![4.0, 7.0]);
        assert_eq!(r.aggregate, 11.0);
    }

    #[test]
    fn partial_demand_then_elastic_shares_path() {
        let g = line(3, 10.0);
        let sessions = [
            TrafficSession::new(vec![0, 1, 2], Demand::Fixed(4.0)),
            TrafficSession::elastic(vec![1, 2]),
        ];
        let r = cpe_throughput(&sessions, &g, &budget()).unwrap();
        assert_eq!(r.allocations, vec![4.0, 6.0]);
    }

    #[test]
    fn gsl_share_limits_allocation() {
        // GSL of 12 split across two expansions on satellite 0 -> 6 each
        let mut g = CapacityGraph::new(3);
        g.add_link(0, 1, 10.0, 1.0);
        g.add_link(0, 2, 10.0, 1.0);
        let b = GslBudget::uniform(12.0, 10);
        let sessions = [
            TrafficSession::elastic(vec![0, 1]),
            TrafficSession::elastic(vec![0, 2]),
        ];
        let mut engine = CpeEngine::new(&g, b).unwrap();
        // alone on satellite 0 the first gets min(10, 12/1)
        assert_eq!(engine.push(&sessions[0]).unwrap(), 10.0);
        // the second sees a share of 12/2 = 6; the first keeps its 10
        assert_eq!(engine.push(&sessions[1]).unwrap(), 6.0);
        assert_eq!(engine.traffic_graph().gsl_share(0), Some(6.0));
        assert!(engine.traffic_graph().verify(&g).is_ok());
    }

    #[test]
    fn attachment_limit_and_role_guards() {
        let g = line(4, 10.0);
        let b = GslBudget::uniform(100.0, 1);
        let sessions = [
            TrafficSession::elastic(vec![0, 1]),
            // satellite 0 is full; the tail still expands at 2
            TrafficSession::elastic(vec![0, 1, 2]),
            // 2 already serves as a tail; the tail expands at 3
            TrafficSession::elastic(vec![2, 3]),
            TrafficSession::elastic(vec![3, 2]),
        ];
        let mut engine = CpeEngine::new(&g, b).unwrap();
        for s in &sessions {
            engine.push(s).unwrap();
        }
        assert_eq!(
            engine.outcomes(),
            &[
                SessionOutcome::Allocated,
                SessionOutcome::HeadRejected,
                SessionOutcome::HeadRejected,
                SessionOutcome::HeadRejected,
            ]
        );
        let t = engine.traffic_graph();
        assert!(t.n_gsl.iter().all(|&k| k <= 1));
        assert_eq!(t.tail_of(1).map(|e| t.expansions[e].satellite), Some(2));
        assert_eq!(t.head_of(1), None);
        assert_eq!(engine.aggregate(), 10.0);
    }

    #[test]
    fn zero_attachments_is_an_error() {
        let g = line(2, 10.0);
        assert!(matches!(
            cpe_throughput(
                &[TrafficSession::elastic(vec![0, 1])],
                &g,
                &GslBudget::uniform(100.0, 0)
            ),
            Err(CpeError::NoAttachmentCapacity)
        ));
    }

    #[test]
    fn invalid_session_leaves_engine_untouched() {
        let g = line(3, 10.0);
        let mut engine = CpeEngine::new(&g, budget()).unwrap();
        assert!(engine.push(&TrafficSession::elastic(vec![0, 2])).is_err());
        assert_eq!(engine.session_count(), 0);
        assert!(engine.traffic_graph().expansions.is_empty());
    }

    #[test]
    fn utilization_edge_cases() {
        let empty = ThroughputReport::<f64> {
            method: Method::Cpe,
            aggregate: 0.0,
            allocations: vec![],
            path_capacities: vec![],
            network_capacity: 10.0,
        };
        assert!(matches!(
            mean_path_utilization(&empty),
            Err(CpeError::EmptySessions)
        ));
        let blocked = ThroughputReport {
            path_capacities: vec![10.0, 10.0],
            allocations: vec![0.0, 0.0],
            ..empty
        };
        assert_eq!(mean_path_utilization(&blocked).unwrap(), 0.0);
    }

    #[test]
    fn exact_scalar_run() {
        let mut g = CapacityGraph::<Exact>::new(3);
        g.add_link(0, 1, Exact::new(7, 2), 1.0);
        g.add_link(1, 2, Exact::new(5, 3), 1.0);
        let b = GslBudget::uniform(Exact::from_integer(100), 10);
        let r = cpe_throughput(&[TrafficSession::elastic(vec![0, 1, 2])], &g, &b).unwrap();
        assert_eq!(r.aggregate, Exact::new(5, 3));
        assert_eq!(
            r.network_utilization(),
            Exact::new(5, 3) / Exact::new(31, 6)
        );
    }

    #[test]
    fn baseline_on_disjoint_endpoints_is_multi_terminal_max_flow() {
        // square 0-1-2-3-0; sessions 0->1 and 3->2
        let mut g = CapacityGraph::new(4);
        for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
            g.add_link(a, b, 10.0, 1.0);
        }
        let sessions = [
            TrafficSession::elastic(vec![0, 1]),
            TrafficSession::elastic(vec![3, 2]),
        ];
        let plain = baseline_throughput(&sessions, &g, Method::SuperDinic).unwrap();
        let sp = baseline_throughput(&sessions, &g, Method::SuperDinicSp).unwrap();
        // cut {0,3} | {1,2} has arcs 0->1 and 3->2 = 20
        assert_eq!(plain.aggregate, 20.0);
        assert_eq!(sp.aggregate, 20.0);
        let cpe = cpe_throughput(&sessions, &g, &budget()).unwrap();
        assert_eq!(cpe.aggregate, 20.0);
    }

    #[test]
    fn session_file_round_trip() {
        let text = "# src dst demand hops\n0 2 ELASTIC 0,1,2\n3 1 4.5 3,2,1\n";
        let sessions: Vec<TrafficSession<f64>> = parse_sessions(text).unwrap();
        assert_eq!(sessions[0].demand, Demand::Elastic);
        assert_eq!(sessions[1].demand, Demand::Fixed(4.5));
        assert_eq!(sessions[1].path, vec![3, 2, 1]);
        assert_eq!(
            parse_sessions::<f64>(&write_sessions(&sessions)).unwrap(),
            sessions
        );
        assert!(parse_sessions::<f64>("0 2 ELASTIC 1,2\n").is_err());
        assert!(parse_sessions::<f64>("0 2 -1 0,2\n").is_err());
    }

    #[test]
    fn method_names() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
    }
}

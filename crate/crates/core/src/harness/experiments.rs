use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use super::config::ScenarioConfig;
use super::HarnessError;
use crate::constellation::{
    build_topology, propagate_all, ConstellationSpec, EpochTime, TopologyOptions,
};
use crate::cpe::{
    baseline_throughput, cpe_throughput, GslBudget, Method, ThroughputReport, TrafficSession,
};
use crate::flow::{CapacityGraph, Demand};
use crate::reliability::{
    expected_capacity, links_up_at, sample_link_timelines, time_averaged_capacity,
    IslReliabilityProcess,
};
use crate::traffic::TrafficModel;
use crate::traffic::{
    aggregate_loads, draw_loads, route_demands, DemandMatrix, LoadSource, PopulationGrid,
};

/// Slack on the utilization bound, absorbing float summation order.
const UTILIZATION_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityRow {
    pub constellation: String,
    pub lambda: f64,
    pub sigma_min: f64,
    /// End of the averaging window.
    pub t_min: f64,
    /// Capacity averaged over `[0, t_min]`.
    pub capacity_gbps: f64,
    pub expected_capacity_gbps: f64,
    pub orbital_period_min: f64,
}

pub const CAPACITY_HEADER: &str =
    "constellation,lambda,sigma_min,t_min,capacity_gbps,expected_capacity_gbps,orbital_period_min";

pub fn capacity_csv(rows: &[CapacityRow]) -> String {
    let mut out = format!("{CAPACITY_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.constellation,
            r.lambda,
            r.sigma_min,
            r.t_min,
            r.capacity_gbps,
            r.expected_capacity_gbps,
            r.orbital_period_min
        );
    }
    out
}

fn topology_options(cfg: &ScenarioConfig) -> TopologyOptions<f64> {
    TopologyOptions {
        isl_capacity: cfg.isl_capacity_gbps,
        cross_seam: cfg.cross_seam,
        phasing: cfg.phasing,
    }
}

/// Time-averaged and closed-form capacity for every constellation and
/// `(lambda, sigma)` pair. Link sets do not change with time, so one
/// topology per constellation serves every pair.
pub fn run_capacity_sweep(cfg: &ScenarioConfig) -> Result<Vec<CapacityRow>, HarnessError> {
    cfg.validate()?;
    let specs = cfg.resolve_constellations(&ConstellationSpec::preset_names())?;
    let jobs: Vec<(usize, f64, f64)> = (0..specs.len())
        .flat_map(|c| {
            cfg.lambdas
                .iter()
                .flat_map(move |&l| cfg.sigmas_min.iter().map(move |&s| (c, l, s)))
        })
        .collect();
    let graphs: Vec<CapacityGraph<f64>> = specs
        .iter()
        .map(|s| build_topology(s, EpochTime(0.0), &topology_options(cfg)))
        .collect();
    jobs.par_iter()
        .map(|&(c, lambda, sigma)| {
            let spec = &specs[c];
            let g = &graphs[c];
            let period = spec.orbital_period_min();
            let process = IslReliabilityProcess::new(lambda, sigma, period, cfg.seed);
            let timelines = sample_link_timelines(g, &process, cfg.horizon_min)?;
            Ok(CapacityRow {
                constellation: spec.name.clone(),
                lambda,
                sigma_min: sigma,
                t_min: cfg.horizon_min,
                capacity_gbps: time_averaged_capacity(g, &timelines)?,
                expected_capacity_gbps: expected_capacity(
                    g.links().len(),
                    cfg.isl_capacity_gbps,
                    period,
                    lambda,
                    sigma,
                ),
                orbital_period_min: period,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputRow {
    pub scenario: String,
    pub timestamp_min: f64,
    pub method: Method,
    /// Sessions actually evaluated (routed, after merging duplicate pairs).
    pub n_sessions: usize,
    pub throughput_gbps: f64,
    pub mean_path_utilization: f64,
    pub network_utilization: f64,
    /// Loads drawn for this point.
    pub n_loads: usize,
    /// Capacity of the availability-filtered graph the row ran on.
    pub network_capacity_gbps: f64,
}

pub const THROUGHPUT_HEADER: &str =
    "scenario,timestamp,method,n_sessions,throughput_gbps,mean_path_utilization,network_utilization,n_loads";

pub fn throughput_csv(rows: &[ThroughputRow]) -> String {
    let mut out = format!("{THROUGHPUT_HEADER}\n");
    for r in rows {
        let _ = writeln!(out, "{}", throughput_fields(r));
    }
    out
}

fn throughput_fields(r: &ThroughputRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        r.scenario,
        r.timestamp_min,
        r.method,
        r.n_sessions,
        r.throughput_gbps,
        r.mean_path_utilization,
        r.network_utilization,
        r.n_loads
    )
}

/// Method comparison CSV: the throughput columns plus a flag for rows whose
/// mean path utilization exceeds one.
pub fn comparison_csv(rows: &[ThroughputRow]) -> String {
    let mut out = format!("{THROUGHPUT_HEADER},utilization_above_one\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{}",
            throughput_fields(r),
            r.mean_path_utilization > 1.0 + UTILIZATION_SLACK
        );
    }
    out
}

/// The satellite graph at one timestamp with failed links removed.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub spec: ConstellationSpec,
    pub timestamp_min: f64,
    /// Every ISL, available or not.
    pub full: CapacityGraph<f64>,
    /// Links up at the timestamp only.
    pub available: CapacityGraph<f64>,
}

/// Builds the topology at `t` and drops the links whose sampled timeline is
/// down at `t`, using the throughput failure parameters.
pub fn snapshot(
    cfg: &ScenarioConfig,
    spec: &ConstellationSpec,
    t_min: f64,
) -> Result<Snapshot, HarnessError> {
    let full = build_topology(spec, EpochTime::from_minutes(t_min), &topology_options(cfg));
    let process = IslReliabilityProcess::new(
        cfg.throughput_lambda,
        cfg.throughput_sigma_min,
        spec.orbital_period_min(),
        cfg.seed,
    );
    let timelines = sample_link_timelines(&full, &process, cfg.horizon_min)?;
    let up = links_up_at(&timelines, t_min)?;
    let available = full.retain_links(|i| up[i]);
    Ok(Snapshot {
        spec: spec.clone(),
        timestamp_min: t_min,
        full,
        available,
    })
}

/// Draws the configured number of loads at the snapshot's timestamp.
pub fn draw_snapshot_loads(
    cfg: &ScenarioConfig,
    snap: &Snapshot,
    grid: &PopulationGrid,
    stream: u64,
) -> Result<Vec<(usize, usize)>, HarnessError> {
    let states = propagate_all(
        &snap.spec,
        EpochTime::from_minutes(snap.timestamp_min),
        cfg.phasing,
    );
    let source = match cfg.traffic_model {
        TrafficModel::Population => LoadSource::Population(grid),
        TrafficModel::Random => LoadSource::Random,
    };
    draw_loads(source, &states, cfg.n_loads, cfg.seed.wrapping_add(stream))
        .map_err(|e| HarnessError::Infeasible(format!("{}: {e}", snap.spec.name)))
}

/// Sessions for the first `k` drawn loads, routed by shortest distance on
/// the available graph. Routes only depend on the endpoints, so they are
/// looked up from `routes`.
fn prefix_sessions(
    draws: &[(usize, usize)],
    k: usize,
    demand: Demand<f64>,
    model: TrafficModel,
    seed: u64,
    routes: &HashMap<(usize, usize), Vec<usize>>,
) -> Vec<TrafficSession<f64>> {
    aggregate_loads(model, seed, &draws[..k], demand)
        .entries
        .iter()
        .filter_map(|&(s, d, dem)| {
            routes
                .get(&(s, d))
                .map(|p| TrafficSession::new(p.clone(), dem))
        })
        .collect()
}

fn route_table(
    g: &CapacityGraph<f64>,
    draws: &[(usize, usize)],
    model: TrafficModel,
    seed: u64,
) -> HashMap<(usize, usize), Vec<usize>> {
    let matrix: DemandMatrix<f64> = aggregate_loads(model, seed, draws, Demand::Elastic);
    let routed = route_demands(g, &matrix);
    routed
        .entry_index
        .iter()
        .zip(routed.sessions)
        .map(|(&i, s)| ((matrix.entries[i].0, matrix.entries[i].1), s.path))
        .collect()
}

fn report_row(
    scenario: &str,
    t_min: f64,
    k: usize,
    report: &ThroughputReport<f64>,
    capacity: f64,
) -> ThroughputRow {
    ThroughputRow {
        scenario: scenario.to_string(),
        timestamp_min: t_min,
        method: report.method,
        n_sessions: report.session_count(),
        throughput_gbps: report.aggregate,
        mean_path_utilization: report.mean_path_utilization().unwrap_or(0.0),
        network_utilization: report.network_utilization(),
        n_loads: k,
        network_capacity_gbps: capacity,
    }
}

/// Runs every method on one session set.
pub fn evaluate_methods(
    sessions: &[TrafficSession<f64>],
    g: &CapacityGraph<f64>,
    budget: &GslBudget<f64>,
    methods: &[Method],
) -> Result<Vec<ThroughputReport<f64>>, HarnessError> {
    methods
        .iter()
        .map(|&m| {
            if sessions.is_empty() {
                return Ok(ThroughputReport {
                    method: m,
                    aggregate: 0.0,
                    allocations: Vec::new(),
                    path_capacities: Vec::new(),
                    network_capacity: g.total_link_capacity(),
                });
            }
            let r = match m {
                Method::Cpe => cpe_throughput(sessions, g, budget)?,
                other => baseline_throughput(sessions, g, other)?,
            };
            Ok(r)
        })
        .collect()
}

fn budget(cfg: &ScenarioConfig) -> Result<GslBudget<f64>, HarnessError> {
    if cfg.n_gsl_max == 0 {
        return Err(HarnessError::Infeasible(
            "n_gsl_max is zero, no session can attach to a ground station".into(),
        ));
    }
    Ok(GslBudget::uniform(cfg.gsl_capacity_gbps, cfg.n_gsl_max))
}

/// Load-throughput curves: for each constellation and timestamp, the loads
/// are drawn once and every grid point evaluates a prefix of them, so a
/// larger load count only ever appends sessions.
pub fn run_load_throughput(cfg: &ScenarioConfig) -> Result<Vec<ThroughputRow>, HarnessError> {
    cfg.validate()?;
    let specs = cfg.resolve_constellations(&ConstellationSpec::preset_names())?;
    throughput_rows(cfg, &specs)
}

fn throughput_rows(
    cfg: &ScenarioConfig,
    specs: &[ConstellationSpec],
) -> Result<Vec<ThroughputRow>, HarnessError> {
    let budget = budget(cfg)?;
    let grid = cfg.population_grid()?;
    let times = cfg.throughput_timestamps();
    let jobs: Vec<(usize, usize)> = (0..specs.len())
        .flat_map(|c| (0..times.len()).map(move |t| (c, t)))
        .collect();
    let per_job: Vec<Vec<ThroughputRow>> = jobs
        .par_iter()
        .map(|&(c, ti)| {
            let t_min = times[ti];
            let snap = snapshot(cfg, &specs[c], t_min)?;
            let draws = draw_snapshot_loads(cfg, &snap, &grid, ti as u64)?;
            let routes = route_table(&snap.available, &draws, cfg.traffic_model, cfg.seed);
            let capacity = snap.available.total_link_capacity();
            let mut rows = Vec::new();
            for &k in &cfg.load_grid {
                let sessions = prefix_sessions(
                    &draws,
                    k,
                    cfg.demand(),
                    cfg.traffic_model,
                    cfg.seed,
                    &routes,
                );
                for report in evaluate_methods(&sessions, &snap.available, &budget, &cfg.methods)? {
                    rows.push(report_row(&snap.spec.name, t_min, k, &report, capacity));
                }
            }
            Ok(rows)
        })
        .collect::<Result<_, HarnessError>>()?;
    Ok(per_job.into_iter().flatten().collect())
}

/// Load-throughput curves for all three methods (Starlink unless other
/// constellations are configured). Fails if CPE ever reports a mean path
/// utilization above one.
pub fn run_method_comparison(cfg: &ScenarioConfig) -> Result<Vec<ThroughputRow>, HarnessError> {
    cfg.validate()?;
    if let Some(m) = Method::ALL.iter().find(|m| !cfg.methods.contains(m)) {
        return Err(HarnessError::Config(format!(
            "method comparison needs {m} enabled"
        )));
    }
    let specs = cfg.resolve_constellations(&["starlink"])?;
    let rows = throughput_rows(cfg, &specs)?;
    check_cpe_utilization(&rows)?;
    Ok(rows)
}

/// Method comparison on a given graph and session list.
pub fn compare_on_sessions(
    g: &CapacityGraph<f64>,
    sessions: &[TrafficSession<f64>],
    cfg: &ScenarioConfig,
) -> Result<Vec<ThroughputRow>, HarnessError> {
    let budget = budget(cfg)?;
    let capacity = g.total_link_capacity();
    let rows: Vec<ThroughputRow> = evaluate_methods(sessions, g, &budget, &Method::ALL)?
        .iter()
        .map(|r| report_row("custom", 0.0, sessions.len(), r, capacity))
        .collect();
    check_cpe_utilization(&rows)?;
    Ok(rows)
}

fn check_cpe_utilization(rows: &[ThroughputRow]) -> Result<(), HarnessError> {
    match rows
        .iter()
        .find(|r| r.method == Method::Cpe && r.mean_path_utilization > 1.0 + UTILIZATION_SLACK)
    {
        Some(r) => Err(HarnessError::Invariant(format!(
            "CPE mean path utilization {} above one at {} loads",
            r.mean_path_utilization, r.n_loads
        ))),
        None => Ok(()),
    }
}

/// Demand matrix for the first constellation at `t_min`, plus the routed
/// sessions in session-file format.
pub fn gen_traffic(
    cfg: &ScenarioConfig,
    t_min: f64,
) -> Result<(DemandMatrix<f64>, String), HarnessError> {
    cfg.validate()?;
    let spec = cfg.resolve_constellations(&["starlink"])?.remove(0);
    let snap = snapshot(cfg, &spec, t_min)?;
    let grid = cfg.population_grid()?;
    let draws = draw_snapshot_loads(cfg, &snap, &grid, 0)?;
    let matrix = aggregate_loads(cfg.traffic_model, cfg.seed, &draws, cfg.demand());
    let routed = route_demands(&snap.available, &matrix);
    Ok((matrix, crate::cpe::write_sessions(&routed.sessions)))
}

/// Edge list of the first constellation's availability-filtered topology.
pub fn dump_topology(cfg: &ScenarioConfig, t_min: f64) -> Result<String, HarnessError> {
    cfg.validate()?;
    if !(t_min >= 0.0 && t_min <= cfg.horizon_min) {
        return Err(HarnessError::Config(format!(
            "timestamp {t_min} min outside the horizon"
        )));
    }
    let spec = cfg.resolve_constellations(&["starlink"])?.remove(0);
    let snap = snapshot(cfg, &spec, t_min)?;
    Ok(crate::flow::write_edge_list(&snap.available))
}

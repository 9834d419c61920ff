//! Traffic demand generation and shortest-distance routing.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constellation::{distance_km, ground_point_ecef, OrbitalState};
use crate::cpe::TrafficSession;
use crate::flow::{CapacityGraph, Demand};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum TrafficError {
    #[error("population grid has no positive weight")]
    DegenerateGrid,
    #[error("every load maps onto a single satellite; no distinct pair exists")]
    NoDistinctPair,
    #[error("need at least one load")]
    NoLoads,
    #[error("need at least two satellites")]
    TooFewSatellites,
    #[error("satellite {dst} unreachable from {src}")]
    Unreachable { src: usize, dst: usize },
    #[error("source and destination are both {0}")]
    SameEndpoints(usize),
    #[error("grid line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub lat_deg: f64,
    pub lon_deg: f64,
    pub weight: f64,
}

/// Weighted ground cells; weights are normalized to sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationGrid {
    cells: Vec<GridCell>,
}

impl PopulationGrid {
    pub fn new(mut cells: Vec<GridCell>) -> Result<Self, TrafficError> {
        if cells
            .iter()
            .any(|c| !(c.weight >= 0.0 && c.weight.is_finite()))
        {
            return Err(TrafficError::DegenerateGrid);
        }
        let total: f64 = cells.iter().map(|c| c.weight).sum();
        if total.is_nan() || total <= 0.0 {
            return Err(TrafficError::DegenerateGrid);
        }
        for c in &mut cells {
            c.weight /= total;
        }
        Ok(Self { cells })
    }

    pub fn cells(&self) -> &[GridCell] {
        &self.cells
    }

    /// 15 x 15 degree synthetic grid (288 cells). Weight falls off with
    /// latitude around a northern mid-latitude band, with a deterministic
    /// longitudinal ripple so cells are not interchangeable.
    pub fn synthetic() -> Self {
        let mut cells = Vec::with_capacity(288);
        for i in 0..12 {
            let lat = -82.5 + 15.0 * i as f64;
            for j in 0..24 {
                let lon = -172.5 + 15.0 * j as f64;
                let band = (-((lat - 30.0) / 25.0).powi(2)).exp();
                let ripple = 1.0 + 0.6 * (3.0 * lon.to_radians()).sin() * (lat.to_radians()).cos();
                let weight = lat.to_radians().cos() * (0.05 + band) * ripple;
                cells.push(GridCell {
                    lat_deg: lat,
                    lon_deg: lon,
                    weight: weight.max(0.0),
                });
            }
        }
        Self::new(cells).expect("synthetic grid has positive weight")
    }

    /// Reads `lat_deg,lon_deg,weight` CSV with a header row.
    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self, TrafficError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        let expected = ["lat_deg", "lon_deg", "weight"];
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(TrafficError::Parse {
                line: 1,
                msg: "expected header lat_deg,lon_deg,weight".into(),
            });
        }
        let mut cells = Vec::new();
        for rec in rdr.deserialize() {
            cells.push(rec?);
        }
        Self::new(cells)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self, TrafficError> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }
}

/// Satellite closest (straight-line slant distance) to the ground cell.
/// Ties go to the lowest id.
pub fn map_cell_to_satellite(cell: &GridCell, states: &[OrbitalState]) -> usize {
    let ground = ground_point_ecef(cell.lat_deg, cell.lon_deg);
    let mut best = (f64::INFINITY, 0usize);
    for (id, st) in states.iter().enumerate() {
        let d = distance_km(ground, st.position);
        if d < best.0 {
            best = (d, id);
        }
    }
    best.1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrafficModel {
    Population,
    Random,
}

/// Sparse source/sink demand matrix. Entries keep the order in which each
/// pair was first drawn.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandMatrix<S> {
    pub model: TrafficModel,
    pub seed: u64,
    pub entries: Vec<(usize, usize, Demand<S>)>,
    /// Number of loads drawn (before merging duplicate pairs).
    pub loads: usize,
}

impl<S: Scalar> DemandMatrix<S> {
    /// `src,dst,demand_gbps` CSV; elastic demands are written as `ELASTIC`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("src,dst,demand_gbps\n");
        for &(s, d, dem) in &self.entries {
            let v = match dem {
                Demand::Elastic => "ELASTIC".to_string(),
                Demand::Fixed(x) => format!("{}", x.to_f64_lossy()),
            };
            let _ = writeln!(out, "{s},{d},{v}");
        }
        out
    }
}

/// Merges drawn loads into a matrix; repeated pairs sum their demand.
pub fn aggregate_loads<S: Scalar>(
    model: TrafficModel,
    seed: u64,
    draws: &[(usize, usize)],
    per_load: Demand<S>,
) -> DemandMatrix<S> {
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut entries: Vec<(usize, usize, Demand<S>)> = Vec::new();
    for &(s, d) in draws {
        match index.get(&(s, d)) {
            Some(&i) => entries[i].2 = entries[i].2.combine(per_load),
            None => {
                index.insert((s, d), entries.len());
                entries.push((s, d, per_load));
            }
        }
    }
    DemandMatrix {
        model,
        seed,
        entries,
        loads: draws.len(),
    }
}

/// Where load endpoints come from.
#[derive(Debug, Clone, Copy)]
pub enum LoadSource<'a> {
    /// Cells drawn with probability proportional to weight, then mapped to
    /// the nearest satellite.
    Population(&'a PopulationGrid),
    /// Satellites drawn uniformly.
    Random,
}

/// Draws `n_loads` distinct-endpoint satellite pairs. The source follows the
/// draw weights; a sink landing on the source satellite is redrawn.
pub fn draw_loads(
    source: LoadSource<'_>,
    states: &[OrbitalState],
    n_loads: usize,
    seed: u64,
) -> Result<Vec<(usize, usize)>, TrafficError> {
    if n_loads == 0 {
        return Err(TrafficError::NoLoads);
    }
    let n_sats = states.len();
    if n_sats < 2 {
        return Err(TrafficError::TooFewSatellites);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n_loads);
    match source {
        LoadSource::Random => {
            while out.len() < n_loads {
                let s = rng.random_range(0..n_sats);
                let d = rng.random_range(0..n_sats);
                if s != d {
                    out.push((s, d));
                }
            }
        }
        LoadSource::Population(grid) => {
            let cells = grid.cells();
            let sat_of: Vec<usize> = cells
                .iter()
                .map(|c| map_cell_to_satellite(c, states))
                .collect();
            let mut distinct = cells
                .iter()
                .zip(&sat_of)
                .filter(|(c, _)| c.weight > 0.0)
                .map(|(_, &s)| s);
            let first = distinct.next();
            if distinct.all(|s| Some(s) == first) {
                return Err(TrafficError::NoDistinctPair);
            }
            let pick = WeightedIndex::new(cells.iter().map(|c| c.weight))
                .map_err(|_| TrafficError::DegenerateGrid)?;
            for _ in 0..n_loads {
                let s = sat_of[pick.sample(&mut rng)];
                let d = loop {
                    let d = sat_of[pick.sample(&mut rng)];
                    if d != s {
                        break d;
                    }
                };
                out.push((s, d));
            }
        }
    }
    Ok(out)
}

/// Draws loads and merges duplicate pairs into a demand matrix.
pub fn generate_demands<S: Scalar>(
    source: LoadSource<'_>,
    states: &[OrbitalState],
    n_loads: usize,
    seed: u64,
    per_load: Demand<S>,
) -> Result<DemandMatrix<S>, TrafficError> {
    let draws = draw_loads(source, states, n_loads, seed)?;
    let model = match source {
        LoadSource::Population(_) => TrafficModel::Population,
        LoadSource::Random => TrafficModel::Random,
    };
    Ok(aggregate_loads(model, seed, &draws, per_load))
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapItem {
    dist: f64,
    node: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Relative slack under which two path lengths count as equal.
const LENGTH_TIE: f64 = 1e-9;

/// Shortest geometric distance from every node to one destination. Lets
/// many sources share a single Dijkstra run.
#[derive(Debug, Clone)]
pub struct DistanceField {
    dst: usize,
    dist: Vec<f64>,
}

impl DistanceField {
    /// Dijkstra on reversed arcs from `dst`, over arcs of positive capacity.
    pub fn towards<S: Scalar>(g: &CapacityGraph<S>, dst: usize) -> Self {
        let n = g.node_count();
        let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (id, a) in g.arcs().iter().enumerate() {
            incoming[a.dst].push(id);
        }
        let mut dist = vec![f64::INFINITY; n];
        dist[dst] = 0.0;
        let mut heap = BinaryHeap::from([HeapItem {
            dist: 0.0,
            node: dst,
        }]);
        while let Some(HeapItem { dist: d, node }) = heap.pop() {
            if d > dist[node] {
                continue;
            }
            for &id in &incoming[node] {
                let a = g.arc(id);
                if !a.capacity.finite().is_none_or(Scalar::is_positive) {
                    continue;
                }
                let nd = d + a.length_km;
                if nd < dist[a.src] {
                    dist[a.src] = nd;
                    heap.push(HeapItem {
                        dist: nd,
                        node: a.src,
                    });
                }
            }
        }
        Self { dst, dist }
    }

    pub fn distance(&self, node: usize) -> f64 {
        self.dist[node]
    }

    /// Shortest path from `src`; among equal-length paths the
    /// lexicographically smallest node sequence.
    pub fn path_from<S: Scalar>(
        &self,
        g: &CapacityGraph<S>,
        src: usize,
    ) -> Result<Vec<usize>, TrafficError> {
        if src == self.dst {
            return Err(TrafficError::SameEndpoints(src));
        }
        if !self.dist[src].is_finite() {
            return Err(TrafficError::Unreachable { src, dst: self.dst });
        }
        let mut path = vec![src];
        let mut u = src;
        while u != self.dst {
            let here = self.dist[u];
            let slack = LENGTH_TIE * here.max(1.0);
            // greedy smallest id among arcs that stay on a shortest path
            let next = g
                .out_arcs(u)
                .iter()
                .map(|&id| g.arc(id))
                .filter(|a| a.capacity.finite().is_none_or(Scalar::is_positive))
                .filter(|a| {
                    (a.length_km + self.dist[a.dst] - here).abs() <= slack
                        && self.dist[a.dst] < here
                })
                .map(|a| a.dst)
                .min()
                .ok_or(TrafficError::Unreachable { src, dst: self.dst })?;
            path.push(next);
            u = next;
        }
        Ok(path)
    }
}

/// Minimum-length path between two satellites.
pub fn shortest_distance_path<S: Scalar>(
    g: &CapacityGraph<S>,
    src: usize,
    dst: usize,
) -> Result<Vec<usize>, TrafficError> {
    if src == dst {
        return Err(TrafficError::SameEndpoints(src));
    }
    DistanceField::towards(g, dst).path_from(g, src)
}

/// Routed sessions for a demand matrix plus the number of pairs that had
/// no route.
#[derive(Debug, Clone)]
pub struct RoutedSessions<S> {
    pub sessions: Vec<TrafficSession<S>>,
    /// Index into the matrix entries for every routed session.
    pub entry_index: Vec<usize>,
    pub unreachable: usize,
}

/// Routes every matrix entry by shortest distance, one Dijkstra per
/// distinct destination. Unreachable pairs are skipped and counted.
pub fn route_demands<S: Scalar>(
    g: &CapacityGraph<S>,
    matrix: &DemandMatrix<S>,
) -> RoutedSessions<S> {
    let mut fields: HashMap<usize, DistanceField> = HashMap::new();
    let mut sessions = Vec::with_capacity(matrix.entries.len());
    let mut entry_index = Vec::with_capacity(matrix.entries.len());
    let mut unreachable = 0;
    for (i, &(s, d, demand)) in matrix.entries.iter().enumerate() {
        let field = fields
            .entry(d)
            .or_insert_with(|| DistanceField::towards(g, d));
        match field.path_from(g, s) {
            Ok(path) => {
                sessions.push(TrafficSession::new(path, demand));
                entry_index.push(i);
            }
            Err(_) => unreachable += 1,
        }
    }
    RoutedSessions {
        sessions,
        entry_index,
        unreachable,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::{
        propagate_all, ConstellationSpec, EpochTime, Phasing, EARTH_RADIUS_KM,
    };
    use crate::flow::Capacity;

    fn state_at(p: [f64; 3]) -> OrbitalState {
        OrbitalState {
            position_eci: p,
            position: p,
            orbital_period_min: 100.0,
        }
    }

    #[test]
    fn cell_under_satellite() {
        let spec = ConstellationSpec::preset("kuiper").unwrap();
        let states = propagate_all(&spec, EpochTime(600.0), Phasing::Adjacent);
        let p = states[123].position;
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        let cell = GridCell {
            lat_deg: (p[2] / r).asin().to_degrees(),
            lon_deg: p[1].atan2(p[0]).to_degrees(),
            weight: 1.0,
        };
        assert_eq!(map_cell_to_satellite(&cell, &states), 123);
    }

    #[test]
    fn toy_constellation_mapping() {
        // four satellites at 1000 km over lon 0, 90, 180, 270 and lat 0;
        // the one at lon 10, lat 10 is checked against brute-force distances
        let r = EARTH_RADIUS_KM + 1000.0;
        let states: Vec<OrbitalState> = [0.0f64, 90.0, 180.0, 270.0]
            .iter()
            .map(|lon| {
                let l = lon.to_radians();
                state_at([r * l.cos(), r * l.sin(), 0.0])
            })
            .collect();
        let cell = GridCell {
            lat_deg: 0.0,
            lon_deg: 0.0,
            weight: 1.0,
        };
        assert_eq!(map_cell_to_satellite(&cell, &states), 0);
        let cell = GridCell {
            lat_deg: 10.0,
            lon_deg: 100.0,
            weight: 1.0,
        };
        let ground = ground_point_ecef(10.0, 100.0);
        let brute = (0..4)
            .min_by(|&a, &b| {
                distance_km(ground, states[a].position)
                    .total_cmp(&distance_km(ground, states[b].position))
            })
            .unwrap();
        assert_eq!(brute, 1);
        assert_eq!(map_cell_to_satellite(&cell, &states), brute);
        // equidistant cell (lon 45) goes to the lower id
        let tie = GridCell {
            lat_deg: 0.0,
            lon_deg: 45.0,
            weight: 1.0,
        };
        assert_eq!(map_cell_to_satellite(&tie, &states), 0);
        // mirrored cells land on mirrored satellites
        let south = GridCell {
            lat_deg: -10.0,
            lon_deg: 280.0,
            weight: 1.0,
        };
        let north = GridCell {
            lat_deg: 10.0,
            lon_deg: 100.0,
            weight: 1.0,
        };
        assert_eq!(
            (map_cell_to_satellite(&north, &states) + 2) % 4,
            map_cell_to_satellite(&south, &states)
        );
    }

    fn sats(n: usize) -> Vec<OrbitalState> {
        let spec = ConstellationSpec::new("t", 4, (n / 4) as u32, 0, 60.0, 700.0).unwrap();
        propagate_all(&spec, EpochTime(0.0), Phasing::Adjacent)
    }

    #[test]
    fn single_cell_grid_has_no_pair() {
        let grid = PopulationGrid::new(vec![GridCell {
            lat_deg: 0.0,
            lon_deg: 0.0,
            weight: 3.0,
        }])
        .unwrap();
        let err = draw_loads(LoadSource::Population(&grid), &sats(16), 1, 1).unwrap_err();
        assert!(matches!(err, TrafficError::NoDistinctPair));
    }

    #[test]
    fn degenerate_grid_rejected() {
        let cells = vec![GridCell {
            lat_deg: 0.0,
            lon_deg: 0.0,
            weight: 0.0,
        }];
        assert!(matches!(
            PopulationGrid::new(cells),
            Err(TrafficError::DegenerateGrid)
        ));
        assert!(matches!(
            draw_loads(LoadSource::Random, &sats(16), 0, 1),
            Err(TrafficError::NoLoads)
        ));
    }

    #[test]
    fn random_demands_are_reproducible() {
        let st = sats(40);
        let a =
            generate_demands::<f64>(LoadSource::Random, &st, 200, 9, Demand::Fixed(1.0)).unwrap();
        let b =
            generate_demands::<f64>(LoadSource::Random, &st, 200, 9, Demand::Fixed(1.0)).unwrap();
        assert_eq!(a, b);
        assert!(a.entries.iter().all(|&(s, d, _)| s != d));
        let total: f64 = a.entries.iter().map(|e| e.2.cap().unwrap()).sum();
        assert_eq!(total, 200.0);
        let c =
            generate_demands::<f64>(LoadSource::Random, &st, 200, 10, Demand::Fixed(1.0)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn population_marginal_follows_weights() {
        // two cells on opposite sides of the Earth map to different satellites
        let grid = PopulationGrid::new(vec![
            GridCell {
                lat_deg: 0.0,
                lon_deg: 0.0,
                weight: 0.9,
            },
            GridCell {
                lat_deg: 0.0,
                lon_deg: 180.0,
                weight: 0.1,
            },
        ])
        .unwrap();
        let st = sats(40);
        let heavy = map_cell_to_satellite(&grid.cells()[0], &st);
        let draws = draw_loads(LoadSource::Population(&grid), &st, 10_000, 77).unwrap();
        let from_heavy = draws.iter().filter(|d| d.0 == heavy).count() as f64 / 1e4;
        assert!((from_heavy - 0.9).abs() < 0.02, "{from_heavy}");
        assert!(draws.iter().all(|&(s, d)| s != d));
    }

    #[test]
    fn synthetic_grid_shape() {
        let g = PopulationGrid::synthetic();
        assert_eq!(g.cells().len(), 288);
        let total: f64 = g.cells().iter().map(|c| c.weight).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(g.cells().iter().all(|c| c.weight > 0.0));
    }

    #[test]
    fn grid_csv() {
        let text = "lat_deg,lon_deg,weight\n10,20,3\n-5, 40, 1\n";
        let g = PopulationGrid::from_csv_reader(text.as_bytes()).unwrap();
        assert_eq!(g.cells().len(), 2);
        assert_eq!(g.cells()[0].weight, 0.75);
        assert!(PopulationGrid::from_csv_reader("lat,lon,w\n1,2,3\n".as_bytes()).is_err());
    }

    #[test]
    fn adjacent_is_single_hop() {
        let mut g = CapacityGraph::<f64>::new(3);
        g.add_link(0, 1, 10.0, 5.0);
        g.add_link(1, 2, 10.0, 5.0);
        assert_eq!(shortest_distance_path(&g, 0, 1).unwrap(), vec![0, 1]);
        assert_eq!(shortest_distance_path(&g, 2, 0).unwrap(), vec![2, 1, 0]);
    }

    #[test]
    fn equal_length_diamond_takes_smaller_ids() {
        // 0 -> {2, 1} -> 3 with equal lengths
        let mut g = CapacityGraph::<f64>::new(4);
        g.add_link(0, 2, 10.0, 1.0);
        g.add_link(2, 3, 10.0, 2.0);
        g.add_link(0, 1, 10.0, 2.0);
        g.add_link(1, 3, 10.0, 1.0);
        assert_eq!(shortest_distance_path(&g, 0, 3).unwrap(), vec![0, 1, 3]);
    }

    #[test]
    fn unreachable_and_zero_capacity() {
        let mut g = CapacityGraph::<f64>::new(3);
        g.add_link(0, 1, 10.0, 1.0);
        g.add_arc(1, 2, Capacity::Finite(0.0), 1.0);
        assert!(matches!(
            shortest_distance_path(&g, 0, 2),
            Err(TrafficError::Unreachable { src: 0, dst: 2 })
        ));
        assert!(matches!(
            shortest_distance_path(&g, 1, 1),
            Err(TrafficError::SameEndpoints(1))
        ));
    }

    #[test]
    fn routing_skips_unreachable_pairs() {
        let mut g = CapacityGraph::<f64>::new(4);
        g.add_link(0, 1, 10.0, 1.0);
        g.add_link(2, 3, 10.0, 1.0);
        let m = DemandMatrix {
            model: TrafficModel::Random,
            seed: 0,
            entries: vec![
                (0, 1, Demand::Elastic),
                (0, 3, Demand::Elastic),
                (3, 2, Demand::Elastic),
            ],
            loads: 3,
        };
        let r = route_demands(&g, &m);
        assert_eq!(r.sessions.len(), 2);
        assert_eq!(r.unreachable, 1);
        assert_eq!(r.entry_index, vec![0, 2]);
    }

    #[test]
    fn matrix_csv_and_aggregation() {
        let draws = [(1, 2), (3, 4), (1, 2)];
        let m = aggregate_loads::<f64>(TrafficModel::Random, 1, &draws, Demand::Fixed(2.5));
        assert_eq!(
            m.entries,
            vec![(1, 2, Demand::Fixed(5.0)), (3, 4, Demand::Fixed(2.5))]
        );
        assert_eq!(m.to_csv(), "src,dst,demand_gbps\n1,2,5\n3,4,2.5\n");
        let e = aggregate_loads::<f64>(TrafficModel::Random, 1, &draws, Demand::Elastic);
        assert!(e.to_csv().contains("1,2,ELASTIC"));
    }
}

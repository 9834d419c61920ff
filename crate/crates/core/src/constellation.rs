//! Walker-delta constellations, circular-orbit propagation and +Grid
//! inter-satellite link topologies.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flow::CapacityGraph;
use crate::scalar::Scalar;

/// Mean Earth radius, km (spherical Earth).
pub const EARTH_RADIUS_KM: f64 = 6371.0;
/// Earth gravitational parameter, km^3/s^2.
pub const MU_EARTH: f64 = 398_600.441_8;
/// Sidereal rotation rate, rad/s.
pub const EARTH_ROTATION_RAD_S: f64 = 7.292_115_9e-5;

#[derive(Debug, Error, PartialEq)]
pub enum ConstellationError {
    #[error("constellation needs at least one plane and one satellite per plane")]
    Empty,
    #[error("phase factor {f} outside [0, {max}]")]
    PhaseFactor { f: u32, max: u32 },
    #[error("inclination {0} deg outside (0, 180)")]
    Inclination(f64),
    #[error("altitude {0} km must be positive")]
    Altitude(f64),
    #[error("satellite {0} does not belong to the constellation")]
    UnknownSatellite(usize),
    #[error("unknown constellation preset `{0}`")]
    UnknownPreset(String),
}

/// Walker constellation `N_P/M_P/F` at inclination `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstellationSpec {
    pub name: String,
    pub n_planes: u32,
    pub sats_per_plane: u32,
    pub phase_factor: u32,
    pub inclination_deg: f64,
    pub altitude_km: f64,
}

/// How the inter-plane phase offset is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phasing {
    /// `2 pi F / (M_P (N_P - 1))`.
    #[default]
    Adjacent,
    /// `2 pi F / (N_P M_P)`, the textbook Walker phasing.
    Classical,
}

impl ConstellationSpec {
    pub fn new(
        name: impl Into<String>,
        n_planes: u32,
        sats_per_plane: u32,
        phase_factor: u32,
        inclination_deg: f64,
        altitude_km: f64,
    ) -> Result<Self, ConstellationError> {
        let spec = Self {
            name: name.into(),
            n_planes,
            sats_per_plane,
            phase_factor,
            inclination_deg,
            altitude_km,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ConstellationError> {
        if self.n_planes == 0 || self.sats_per_plane == 0 {
            return Err(ConstellationError::Empty);
        }
        if self.phase_factor > self.n_planes - 1 {
            return Err(ConstellationError::PhaseFactor {
                f: self.phase_factor,
                max: self.n_planes - 1,
            });
        }
        if !(self.inclination_deg > 0.0 && self.inclination_deg < 180.0) {
            return Err(ConstellationError::Inclination(self.inclination_deg));
        }
        if !(self.altitude_km > 0.0 && self.altitude_km.is_finite()) {
            return Err(ConstellationError::Altitude(self.altitude_km));
        }
        Ok(())
    }

    /// Built-in presets. F is not part of the published shell table; all
    /// presets use `F = 1`.
    pub fn preset(name: &str) -> Result<Self, ConstellationError> {
        let (label, np, mp, alt, inc) = match name.to_ascii_lowercase().as_str() {
            "kuiper" => ("kuiper", 17, 34, 630.0, 51.9),
            "oneweb" => ("oneweb", 12, 49, 1200.0, 87.9),
            "telesat" => ("telesat", 40, 33, 1325.0, 50.9),
            "starlink" => ("starlink", 22, 72, 550.0, 53.0),
            _ => return Err(ConstellationError::UnknownPreset(name.to_string())),
        };
        Self::new(label, np, mp, 1, inc, alt)
    }

    pub fn preset_names() -> [&'static str; 4] {
        ["kuiper", "oneweb", "telesat", "starlink"]
    }

    pub fn satellite_count(&self) -> usize {
        self.n_planes as usize * self.sats_per_plane as usize
    }

    pub fn semi_major_axis_km(&self) -> f64 {
        EARTH_RADIUS_KM + self.altitude_km
    }

    /// Circular two-body period in minutes.
    pub fn orbital_period_min(&self) -> f64 {
        let a = self.semi_major_axis_km();
        TAU * (a.powi(3) / MU_EARTH).sqrt() / 60.0
    }

    pub fn satellite(&self, sat_id: usize) -> Result<SatelliteNode, ConstellationError> {
        if sat_id >= self.satellite_count() {
            return Err(ConstellationError::UnknownSatellite(sat_id));
        }
        let m = self.sats_per_plane as usize;
        Ok(SatelliteNode {
            sat_id,
            plane_idx: sat_id / m,
            slot_idx: sat_id % m,
        })
    }

    pub fn satellites(&self) -> impl Iterator<Item = SatelliteNode> + '_ {
        let m = self.sats_per_plane as usize;
        (0..self.satellite_count()).map(move |sat_id| SatelliteNode {
            sat_id,
            plane_idx: sat_id / m,
            slot_idx: sat_id % m,
        })
    }

    pub fn sat_id(&self, plane_idx: usize, slot_idx: usize) -> usize {
        plane_idx * self.sats_per_plane as usize + slot_idx
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SatelliteNode {
    pub sat_id: usize,
    pub plane_idx: usize,
    pub slot_idx: usize,
}

/// Seconds since the scenario epoch.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct EpochTime(pub f64);

impl EpochTime {
    pub fn from_minutes(min: f64) -> Self {
        Self(min * 60.0)
    }

    pub fn seconds(self) -> f64 {
        self.0
    }

    pub fn minutes(self) -> f64 {
        self.0 / 60.0
    }
}

/// Ordered scenario timestamps `0, step, 2 step, ...` strictly before the horizon.
pub fn timestamps(step_min: f64, horizon_min: f64) -> Vec<EpochTime> {
    if step_min <= 0.0 {
        return vec![EpochTime(0.0)];
    }
    let count = (horizon_min / step_min).ceil().max(1.0) as usize;
    (0..count)
        .map(|k| EpochTime::from_minutes(k as f64 * step_min))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitalState {
    /// Inertial (ECI) position, km.
    pub position_eci: [f64; 3],
    /// Earth-fixed (ECEF) position, km.
    pub position: [f64; 3],
    pub orbital_period_min: f64,
}

/// Phase offset between satellites of adjacent planes. Zero for a single plane.
pub fn phase_offset(spec: &ConstellationSpec) -> f64 {
    phase_offset_with(spec, Phasing::Adjacent)
}

pub fn phase_offset_with(spec: &ConstellationSpec, phasing: Phasing) -> f64 {
    phase_offset_for(
        spec.n_planes,
        spec.sats_per_plane,
        spec.phase_factor,
        phasing,
    )
}

fn phase_offset_for(n_planes: u32, sats_per_plane: u32, f: u32, phasing: Phasing) -> f64 {
    let m = sats_per_plane as f64;
    match phasing {
        Phasing::Adjacent if n_planes <= 1 => 0.0,
        Phasing::Adjacent => TAU * f as f64 / (m * (n_planes - 1) as f64),
        Phasing::Classical => TAU * f as f64 / (m * n_planes as f64),
    }
}

/// Angular distance from the phase offset produced by factor `f` to the
/// nearest in-plane slot, i.e. how far the neighbouring plane is staggered.
/// Peaks at half the slot spacing, `pi / M_P`.
pub fn phase_deviation(spec: &ConstellationSpec, f: u32) -> f64 {
    let spacing = TAU / spec.sats_per_plane as f64;
    let df = phase_offset_for(spec.n_planes, spec.sats_per_plane, f, Phasing::Adjacent);
    let r = df.rem_euclid(spacing);
    r.min(spacing - r)
}

fn rotate_z(v: [f64; 3], angle: f64) -> [f64; 3] {
    let (s, c) = angle.sin_cos();
    [c * v[0] - s * v[1], s * v[0] + c * v[1], v[2]]
}

/// Position of `sat` at `t` on its circular orbit.
///
/// Plane `p` has RAAN `2 pi p / N_P`; the argument of latitude is
/// `2 pi slot / M_P + p * phase_offset + 2 pi t / T`. At `t = 0` inertial
/// and Earth-fixed frames coincide.
pub fn propagate(spec: &ConstellationSpec, sat: SatelliteNode, t: EpochTime) -> OrbitalState {
    propagate_with(spec, sat, t, Phasing::Adjacent)
}

pub fn propagate_with(
    spec: &ConstellationSpec,
    sat: SatelliteNode,
    t: EpochTime,
    phasing: Phasing,
) -> OrbitalState {
    let radius = spec.semi_major_axis_km();
    let period_min = spec.orbital_period_min();
    let raan = TAU * sat.plane_idx as f64 / spec.n_planes as f64;
    let arg_lat = TAU * sat.slot_idx as f64 / spec.sats_per_plane as f64
        + sat.plane_idx as f64 * phase_offset_with(spec, phasing)
        + TAU * t.minutes() / period_min;
    let inc = spec.inclination_deg.to_radians();
    let (su, cu) = arg_lat.sin_cos();
    let (so, co) = raan.sin_cos();
    let (si, ci) = inc.sin_cos();
    let eci = [
        radius * (co * cu - so * su * ci),
        radius * (so * cu + co * su * ci),
        radius * su * si,
    ];
    let ecef = rotate_z(eci, -EARTH_ROTATION_RAD_S * t.seconds());
    OrbitalState {
        position_eci: eci,
        position: ecef,
        orbital_period_min: period_min,
    }
}

/// States of every satellite, indexed by `sat_id`.
pub fn propagate_all(
    spec: &ConstellationSpec,
    t: EpochTime,
    phasing: Phasing,
) -> Vec<OrbitalState> {
    spec.satellites()
        .map(|s| propagate_with(spec, s, t, phasing))
        .collect()
}

pub fn distance_km(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Earth-fixed position of a point on the spherical surface.
pub fn ground_point_ecef(lat_deg: f64, lon_deg: f64) -> [f64; 3] {
    let (sl, cl) = lat_deg.to_radians().sin_cos();
    let (so, co) = lon_deg.to_radians().sin_cos();
    [
        EARTH_RADIUS_KM * cl * co,
        EARTH_RADIUS_KM * cl * so,
        EARTH_RADIUS_KM * sl,
    ]
}

/// Central angle between two position vectors, radians.
pub fn central_angle(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let na = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    let nb = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
    (dot / (na * nb)).clamp(-1.0, 1.0).acos()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopologyOptions<S> {
    pub isl_capacity: S,
    /// Link the last plane back to the first.
    pub cross_seam: bool,
    pub phasing: Phasing,
}

impl<S: Scalar> TopologyOptions<S> {
    pub fn with_capacity(isl_capacity: S) -> Self {
        Self {
            isl_capacity,
            cross_seam: true,
            phasing: Phasing::Adjacent,
        }
    }
}

/// +Grid ISL topology at `t`: every satellite links to its two in-plane
/// neighbours and to the same slot in the two adjacent planes. Each link is
/// a pair of directed arcs carrying the chord length at `t`.
pub fn build_topology<S: Scalar>(
    spec: &ConstellationSpec,
    t: EpochTime,
    opts: &TopologyOptions<S>,
) -> CapacityGraph<S> {
    let np = spec.n_planes as usize;
    let mp = spec.sats_per_plane as usize;
    let states = propagate_all(spec, t, opts.phasing);
    let mut g = CapacityGraph::new(spec.satellite_count());
    let link = |g: &mut CapacityGraph<S>, a: usize, b: usize| {
        let len = distance_km(states[a].position, states[b].position);
        g.add_link(a, b, opts.isl_capacity, len);
    };
    for p in 0..np {
        for s in 0..mp {
            let here = spec.sat_id(p, s);
            // in-plane ring; a wrap link only exists for three or more slots
            if s + 1 < mp || mp > 2 {
                let next = spec.sat_id(p, (s + 1) % mp);
                if next != here {
                    link(&mut g, here, next);
                }
            }
            let wraps = p + 1 == np;
            if np > 1 && (!wraps || (np > 2 && opts.cross_seam)) {
                link(&mut g, here, spec.sat_id((p + 1) % np, s));
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn norm(v: [f64; 3]) -> f64 {
        (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
    }

    #[test]
    fn phase_offset_values() {
        let zero = ConstellationSpec::new("z", 7, 9, 0, 50.0, 500.0).unwrap();
        assert_eq!(phase_offset(&zero), 0.0);
        let starlink = ConstellationSpec::new("s", 22, 72, 11, 53.0, 550.0).unwrap();
        assert_abs_diff_eq!(phase_offset(&starlink), 0.045_712, epsilon = 1e-6);
        let oneweb = ConstellationSpec::new("o", 12, 49, 6, 87.9, 1200.0).unwrap();
        assert_abs_diff_eq!(phase_offset(&oneweb), 0.069_942, epsilon = 1e-6);
        let single = ConstellationSpec::new("one", 1, 10, 0, 50.0, 500.0).unwrap();
        assert_eq!(phase_offset(&single), 0.0);
        assert_abs_diff_eq!(
            phase_offset_with(&starlink, Phasing::Classical),
            TAU * 11.0 / (22.0 * 72.0),
            epsilon = 1e-15
        );
    }

    #[test]
    fn phase_deviation_peaks_at_half_planes() {
        for np in 2..30u32 {
            let spec = ConstellationSpec::new("d", np, 20, 0, 60.0, 600.0).unwrap();
            let devs: Vec<f64> = (0..np).map(|f| phase_deviation(&spec, f)).collect();
            let max = devs.iter().cloned().fold(0.0, f64::max);
            assert_abs_diff_eq!(devs[(np / 2) as usize], max, epsilon = 1e-12);
            assert!(devs[0] < 1e-12);
            assert!(devs[(np - 1) as usize] < 1e-12);
            if np % 2 == 1 {
                assert_abs_diff_eq!(max, PI / 20.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn validation() {
        assert_eq!(
            ConstellationSpec::new("x", 4, 4, 4, 50.0, 500.0),
            Err(ConstellationError::PhaseFactor { f: 4, max: 3 })
        );
        assert!(ConstellationSpec::new("x", 0, 4, 0, 50.0, 500.0).is_err());
        assert!(ConstellationSpec::new("x", 4, 4, 0, 180.0, 500.0).is_err());
        assert!(ConstellationSpec::new("x", 4, 4, 0, 50.0, 0.0).is_err());
        assert!(ConstellationSpec::preset("iridium").is_err());
    }

    #[test]
    fn presets_and_periods() {
        let expected = [
            ("kuiper", 17, 34, 97.2),
            ("oneweb", 12, 49, 109.4),
            ("telesat", 40, 33, 112.1),
            ("starlink", 22, 72, 95.6),
        ];
        for (name, np, mp, period) in expected {
            let spec = ConstellationSpec::preset(name).unwrap();
            assert_eq!((spec.n_planes, spec.sats_per_plane), (np, mp));
            assert_abs_diff_eq!(spec.orbital_period_min(), period, epsilon = 0.15);
        }
    }

    #[test]
    fn numbering_is_bijective() {
        let spec = ConstellationSpec::preset("kuiper").unwrap();
        for (i, s) in spec.satellites().enumerate() {
            assert_eq!(s.sat_id, i);
            assert_eq!(s.sat_id, s.plane_idx * 34 + s.slot_idx);
            assert_eq!(spec.satellite(i).unwrap(), s);
        }
        assert!(spec.satellite(spec.satellite_count()).is_err());
    }

    #[test]
    fn epoch_position_on_node_axis() {
        let spec = ConstellationSpec::new("x", 6, 10, 0, 53.0, 550.0).unwrap();
        let st = propagate(&spec, spec.satellite(0).unwrap(), EpochTime(0.0));
        assert_abs_diff_eq!(st.position[0], EARTH_RADIUS_KM + 550.0, epsilon = 1e-9);
        assert_abs_diff_eq!(st.position[1], 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(st.position[2], 0.0, epsilon = 1e-9);
    }

    #[test]
    fn circular_radius_and_periodicity() {
        let spec = ConstellationSpec::preset("starlink").unwrap();
        let period = EpochTime::from_minutes(spec.orbital_period_min());
        for sat in spec.satellites().step_by(97) {
            let a = propagate(&spec, sat, EpochTime(0.0));
            let b = propagate(&spec, sat, period);
            assert_abs_diff_eq!(norm(b.position), spec.semi_major_axis_km(), epsilon = 1e-6);
            for k in 0..3 {
                assert_abs_diff_eq!(a.position_eci[k], b.position_eci[k], epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn uniform_in_plane_spacing() {
        let spec = ConstellationSpec::preset("oneweb").unwrap();
        let t = EpochTime(1234.0);
        let a = propagate(&spec, spec.satellite(spec.sat_id(3, 7)).unwrap(), t);
        let b = propagate(&spec, spec.satellite(spec.sat_id(3, 8)).unwrap(), t);
        assert_abs_diff_eq!(
            central_angle(a.position, b.position),
            TAU / 49.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn starlink_grid_counts() {
        let spec = ConstellationSpec::preset("starlink").unwrap();
        let g = build_topology(&spec, EpochTime(0.0), &TopologyOptions::with_capacity(10.0));
        assert_eq!(g.node_count(), 1584);
        assert_eq!(g.links().len(), 3168);
        for v in 0..g.node_count() {
            assert_eq!(g.degree(v), 4);
        }
        for l in g.links() {
            assert_eq!(g.arc(l.forward).length_km, g.arc(l.reverse).length_km);
            assert!(g.arc(l.forward).length_km > 0.0);
        }
    }

    #[test]
    fn seam_flag_drops_one_ring() {
        let spec = ConstellationSpec::new("x", 5, 6, 1, 60.0, 700.0).unwrap();
        let mut opts = TopologyOptions::with_capacity(1.0);
        opts.cross_seam = false;
        let g = build_topology(&spec, EpochTime(0.0), &opts);
        assert_eq!(g.links().len(), 2 * 30 - 6);
    }

    #[test]
    fn small_and_degenerate_shapes() {
        // two planes of two: one in-plane link per plane plus two cross links
        let spec = ConstellationSpec::new("x", 2, 2, 0, 60.0, 700.0).unwrap();
        let g = build_topology(&spec, EpochTime(0.0), &TopologyOptions::with_capacity(1.0));
        assert_eq!(g.links().len(), 4);
        let single = ConstellationSpec::new("y", 1, 1, 0, 60.0, 700.0).unwrap();
        let g = build_topology(
            &single,
            EpochTime(0.0),
            &TopologyOptions::with_capacity(1.0),
        );
        assert_eq!(g.links().len(), 0);
    }

    #[test]
    fn topology_is_connected_and_deterministic() {
        for (np, mp) in [(2, 3), (3, 3), (5, 7), (12, 49)] {
            let spec = ConstellationSpec::new("c", np, mp, 1, 70.0, 800.0).unwrap();
            let t = EpochTime(3600.0);
            let opts = TopologyOptions::with_capacity(10.0);
            let g = build_topology(&spec, t, &opts);
            assert!(g.reachable_from(0).iter().all(|&r| r));
            assert_eq!(g, build_topology(&spec, t, &opts));
        }
    }
}

use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::HarnessError;
use crate::constellation::{timestamps, ConstellationSpec, EpochTime, Phasing};
use crate::cpe::Method;
use crate::flow::Demand;
use crate::traffic::{PopulationGrid, TrafficModel};

/// Scenario parameters. Every field has a default, so an empty file is a
/// valid configuration.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Preset names. `None` means the command's own default set.
    pub constellations: Option<Vec<String>>,
    /// Extra constellations given inline.
    pub custom: Vec<ConstellationSpec>,
    pub isl_capacity_gbps: f64,
    pub gsl_capacity_gbps: f64,
    pub n_gsl_max: usize,
    pub lambdas: Vec<f64>,
    pub sigmas_min: Vec<f64>,
    pub timestamp_step_min: f64,
    pub horizon_min: f64,
    pub n_loads: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub traffic_model: TrafficModel,
    /// `lat_deg,lon_deg,weight` CSV; the built-in synthetic grid if unset.
    pub population_grid: Option<PathBuf>,
    /// Per-load demand; unset means elastic.
    pub demand_gbps: Option<f64>,
    /// Link failure rate used by the throughput experiments.
    pub throughput_lambda: f64,
    /// Repair time used by the throughput experiments.
    pub throughput_sigma_min: f64,
    /// Load counts at which the throughput curves are sampled.
    pub load_grid: Vec<usize>,
    /// Timestamps (minutes) evaluated by the throughput experiments;
    /// every step over the horizon when unset.
    pub load_timestamps_min: Option<Vec<f64>>,
    pub cross_seam: bool,
    pub phasing: Phasing,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            constellations: None,
            custom: Vec::new(),
            isl_capacity_gbps: 10.0,
            gsl_capacity_gbps: 100.0,
            n_gsl_max: 10,
            lambdas: vec![0.0, 10.0, 20.0, 40.0],
            sigmas_min: vec![0.0, 1.0, 2.0, 5.0, 10.0, 20.0],
            timestamp_step_min: 60.0,
            horizon_min: 1440.0,
            n_loads: 5000,
            seed: 1,
            methods: Method::ALL.to_vec(),
            traffic_model: TrafficModel::Population,
            population_grid: None,
            demand_gbps: None,
            throughput_lambda: 0.0,
            throughput_sigma_min: 1.0,
            load_grid: vec![1, 10, 50, 100, 500, 1000, 2000, 3000, 4000, 5000],
            load_timestamps_min: None,
            cross_seam: true,
            phasing: Phasing::Adjacent,
        }
    }
}

fn non_negative(name: &str, v: f64) -> Result<(), HarnessError> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(HarnessError::Config(format!(
            "{name} must be a finite non-negative number, got {v}"
        )))
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Checks ranges. A zero ground-station cap is accepted here and
    /// reported as an infeasible scenario when a throughput run starts.
    pub fn validate(&self) -> Result<(), HarnessError> {
        non_negative("isl_capacity_gbps", self.isl_capacity_gbps)?;
        non_negative("gsl_capacity_gbps", self.gsl_capacity_gbps)?;
        non_negative("throughput_lambda", self.throughput_lambda)?;
        non_negative("throughput_sigma_min", self.throughput_sigma_min)?;
        for &l in &self.lambdas {
            non_negative("lambdas", l)?;
        }
        for &s in &self.sigmas_min {
            non_negative("sigmas_min", s)?;
        }
        if !(self.horizon_min > 0.0 && self.horizon_min.is_finite()) {
            return Err(HarnessError::Config("horizon_min must be positive".into()));
        }
        if !(self.timestamp_step_min > 0.0 && self.timestamp_step_min.is_finite()) {
            return Err(HarnessError::Config(
                "timestamp_step_min must be positive".into(),
            ));
        }
        if self.lambdas.is_empty() || self.sigmas_min.is_empty() {
            return Err(HarnessError::Config(
                "lambdas and sigmas_min need at least one value".into(),
            ));
        }
        if self.n_loads == 0 {
            return Err(HarnessError::Config("n_loads must be at least 1".into()));
        }
        if self.load_grid.is_empty() || self.load_grid.contains(&0) {
            return Err(HarnessError::Config(
                "load_grid needs positive load counts".into(),
            ));
        }
        if self.load_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HarnessError::Config(
                "load_grid must be strictly increasing".into(),
            ));
        }
        if let Some(&k) = self.load_grid.iter().find(|&&k| k > self.n_loads) {
            return Err(HarnessError::Config(format!(
                "load_grid entry {k} exceeds n_loads {}",
                self.n_loads
            )));
        }
        if self.methods.is_empty() {
            return Err(HarnessError::Config("methods must not be empty".into()));
        }
        if let Some(&t) = self
            .load_timestamps_min
            .iter()
            .flatten()
            .find(|&&t| !(t >= 0.0 && t <= self.horizon_min))
        {
            return Err(HarnessError::Config(format!(
                "timestamp {t} min outside the horizon"
            )));
        }
        if let Some(d) = self.demand_gbps {
            if !(d > 0.0 && d.is_finite()) {
                return Err(HarnessError::Config("demand_gbps must be positive".into()));
            }
        }
        for c in &self.custom {
            c.validate()
                .map_err(|e| HarnessError::Config(format!("{}: {e}", c.name)))?;
        }
        for name in self.constellations.iter().flatten() {
            ConstellationSpec::preset(name).map_err(|e| HarnessError::Config(e.to_string()))?;
        }
        Ok(())
    }

    /// Presets named in the config (or `default` when none are named)
    /// followed by the inline constellations.
    pub fn resolve_constellations(
        &self,
        default: &[&str],
    ) -> Result<Vec<ConstellationSpec>, HarnessError> {
        let names: Vec<String> = match &self.constellations {
            Some(list) => list.clone(),
            None if self.custom.is_empty() => default.iter().map(|s| s.to_string()).collect(),
            None => Vec::new(),
        };
        let mut out = names
            .iter()
            .map(|n| ConstellationSpec::preset(n).map_err(|e| HarnessError::Config(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        out.extend(self.custom.iter().cloned());
        if out.is_empty() {
            return Err(HarnessError::Config("no constellation selected".into()));
        }
        Ok(out)
    }

    /// Timestamps the throughput experiments run at.
    pub fn throughput_timestamps(&self) -> Vec<f64> {
        match &self.load_timestamps_min {
            Some(ts) => ts.clone(),
            None => timestamps(self.timestamp_step_min, self.horizon_min)
                .into_iter()
                .map(EpochTime::minutes)
                .collect(),
        }
    }

    pub fn demand(&self) -> Demand<f64> {
        self.demand_gbps.map_or(Demand::Elastic, Demand::Fixed)
    }

    pub fn population_grid(&self) -> Result<PopulationGrid, HarnessError> {
        match &self.population_grid {
            Some(p) => PopulationGrid::from_csv_path(p)
                .map_err(|e| HarnessError::Config(format!("{}: {e}", p.display()))),
            None => Ok(PopulationGrid::synthetic()),
        }
    }
}

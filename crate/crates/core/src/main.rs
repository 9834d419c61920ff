use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use leocap::constellation::Phasing;
use leocap::cpe::{parse_sessions, Method};
use leocap::flow::parse_edge_list;
use leocap::harness::{self, HarnessError, ScenarioConfig};
use leocap::traffic::TrafficModel;

#[derive(Parser)]
#[command(
    name = "leocap",
    version,
    about = "LEO constellation capacity and throughput experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time-averaged vs closed-form capacity over (lambda, sigma).
    CapacitySweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Throughput and utilization against load count.
    LoadThroughput {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        out: OutArgs,
        /// Write `<PREFIX>_throughput.svg` and `<PREFIX>_utilization.svg`.
        #[arg(long, value_name = "PREFIX")]
        svg: Option<PathBuf>,
    },
    /// CPE against both super-terminal baselines.
    CompareMethods {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        out: OutArgs,
        #[arg(long, value_name = "PREFIX")]
        svg: Option<PathBuf>,
        /// Edge-list graph; requires --sessions.
        #[arg(long, requires = "sessions")]
        graph: Option<PathBuf>,
        /// Session file routed on --graph.
        #[arg(long, requires = "graph")]
        sessions: Option<PathBuf>,
    },
    /// Demand matrix (and optionally routed sessions) at one timestamp.
    GenTraffic {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        out: OutArgs,
        #[arg(long, default_value_t = 0.0)]
        t_min: f64,
        #[arg(long)]
        sessions_out: Option<PathBuf>,
    },
    /// Edge list of the available topology at one timestamp.
    DumpTopology {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        out: OutArgs,
        #[arg(long, default_value_t = 0.0)]
        t_min: f64,
    },
}

#[derive(Args)]
struct OutArgs {
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

/// Flags override values read from --config.
#[derive(Args)]
struct ScenarioArgs {
    /// TOML scenario file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset name; repeat or comma-separate for several.
    #[arg(long = "constellation", value_delimiter = ',')]
    constellations: Vec<String>,
    #[arg(long)]
    isl_capacity_gbps: Option<f64>,
    #[arg(long)]
    gsl_capacity_gbps: Option<f64>,
    #[arg(long)]
    n_gsl_max: Option<usize>,
    #[arg(long = "lambda", value_delimiter = ',')]
    lambdas: Vec<f64>,
    #[arg(long = "sigma-min", value_delimiter = ',')]
    sigmas_min: Vec<f64>,
    #[arg(long)]
    timestamp_step_min: Option<f64>,
    #[arg(long)]
    horizon_min: Option<f64>,
    #[arg(long)]
    n_loads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "method", value_delimiter = ',')]
    methods: Vec<Method>,
    #[arg(long, value_parser = parse_model)]
    traffic_model: Option<TrafficModel>,
    #[arg(long)]
    population_grid: Option<PathBuf>,
    /// Per-load demand in Gbps; elastic when omitted.
    #[arg(long)]
    demand_gbps: Option<f64>,
    #[arg(long)]
    throughput_lambda: Option<f64>,
    #[arg(long)]
    throughput_sigma_min: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    load_grid: Vec<usize>,
    #[arg(long = "timestamp-min", value_delimiter = ',')]
    load_timestamps_min: Vec<f64>,
    /// Drop the links between the last and the first plane.
    #[arg(long)]
    no_cross_seam: bool,
    #[arg(long, value_parser = parse_phasing)]
    phasing: Option<Phasing>,
}

fn parse_model(s: &str) -> Result<TrafficModel, String> {
    match s.to_ascii_lowercase().as_str() {
        "population" => Ok(TrafficModel::Population),
        "random" => Ok(TrafficModel::Random),
        _ => Err(format!("unknown traffic model `{s}`")),
    }
}

fn parse_phasing(s: &str) -> Result<Phasing, String> {
    match s.to_ascii_lowercase().as_str() {
        "adjacent" => Ok(Phasing::Adjacent),
        "classical" => Ok(Phasing::Classical),
        _ => Err(format!("unknown phasing `{s}`")),
    }
}

impl ScenarioArgs {
    fn resolve(self) -> Result<ScenarioConfig, HarnessError> {
        let mut cfg = match &self.config {
            Some(p) => ScenarioConfig::from_path(p)?,
            None => ScenarioConfig::default(),
        };
        if !self.constellations.is_empty() {
            cfg.constellations = Some(self.constellations);
        }
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field { cfg.$field = v; }
            )*};
        }
        set!(
            isl_capacity_gbps,
            gsl_capacity_gbps,
            n_gsl_max,
            timestamp_step_min,
            horizon_min,
            n_loads,
            seed,
            traffic_model,
            throughput_lambda,
            throughput_sigma_min,
            phasing
        );
        macro_rules! set_list {
            ($($field:ident),*) => {$(
                if !self.$field.is_empty() { cfg.$field = self.$field; }
            )*};
        }
        set_list!(lambdas, sigmas_min, methods, load_grid);
        if !self.load_timestamps_min.is_empty() {
            cfg.load_timestamps_min = Some(self.load_timestamps_min);
        }
        if self.population_grid.is_some() {
            cfg.population_grid = self.population_grid;
        }
        if self.demand_gbps.is_some() {
            cfg.demand_gbps = self.demand_gbps;
        }
        if self.no_cross_seam {
            cfg.cross_seam = false;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(out: &OutArgs, text: &str) -> Result<(), HarnessError> {
    match &out.out {
        Some(p) => std::fs::write(p, text)?,
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
            r => r?,
        },
    }
    Ok(())
}

fn write_charts(prefix: &Path, rows: &[harness::ThroughputRow]) -> Result<(), HarnessError> {
    let name = |suffix: &str| {
        let mut s = prefix.as_os_str().to_owned();
        s.push(suffix);
        PathBuf::from(s)
    };
    std::fs::write(name("_throughput.svg"), harness::throughput_chart(rows))?;
    std::fs::write(name("_utilization.svg"), harness::utilization_chart(rows))?;
    Ok(())
}

fn read(path: &Path) -> Result<String, HarnessError> {
    std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::CapacitySweep { scenario, out } => {
            let rows = harness::run_capacity_sweep(&scenario.resolve()?)?;
            emit(&out, &harness::capacity_csv(&rows))
        }
        Command::LoadThroughput { scenario, out, svg } => {
            let rows = harness::run_load_throughput(&scenario.resolve()?)?;
            emit(&out, &harness::throughput_csv(&rows))?;
            svg.map_or(Ok(()), |p| write_charts(&p, &rows))
        }
        Command::CompareMethods {
            scenario,
            out,
            svg,
            graph,
            sessions,
        } => {
            let cfg = scenario.resolve()?;
            let rows = match (graph, sessions) {
                (Some(g), Some(s)) => {
                    let g = parse_edge_list::<f64>(&read(&g)?)
                        .map_err(|e| HarnessError::Config(e.to_string()))?;
                    let s = parse_sessions::<f64>(&read(&s)?)
                        .map_err(|e| HarnessError::Config(e.to_string()))?;
                    harness::compare_on_sessions(&g, &s, &cfg)?
                }
                _ => harness::run_method_comparison(&cfg)?,
            };
            emit(&out, &harness::comparison_csv(&rows))?;
            svg.map_or(Ok(()), |p| write_charts(&p, &rows))
        }
        Command::GenTraffic {
            scenario,
            out,
            t_min,
            sessions_out,
        } => {
            let (matrix, sessions) = harness::gen_traffic(&scenario.resolve()?, t_min)?;
            emit(&out, &matrix.to_csv())?;
            if let Some(p) = sessions_out {
                std::fs::write(p, sessions)?;
            }
            Ok(())
        }
        Command::DumpTopology {
            scenario,
            out,
            t_min,
        } => emit(&out, &harness::dump_topology(&scenario.resolve()?, t_min)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

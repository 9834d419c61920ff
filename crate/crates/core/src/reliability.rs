//! Unreliable ISL model: every link alternates exponential up-times with a
//! fixed repair time, and network capacity counts only the links that are up.

use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use thiserror::Error;

use crate::flow::CapacityGraph;
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum ReliabilityError {
    #[error("horizon must be positive, got {0}")]
    Horizon(f64),
    #[error("invalid process parameters: {0}")]
    Parameters(&'static str),
    #[error("time {t} min outside the horizon [0, {horizon}]")]
    OutOfHorizon { t: f64, horizon: f64 },
    #[error("graph has {links} links but {timelines} timelines")]
    MissingTimeline { links: usize, timelines: usize },
}

/// Renewal on/off process of a single ISL.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IslReliabilityProcess {
    /// Expected failures per orbital period.
    pub lambda_per_period: f64,
    /// Repair time, minutes.
    pub sigma_min: f64,
    pub orbital_period_min: f64,
    pub seed: u64,
    /// Random stream, one per link.
    pub stream: u64,
}

impl IslReliabilityProcess {
    pub fn new(lambda_per_period: f64, sigma_min: f64, orbital_period_min: f64, seed: u64) -> Self {
        Self {
            lambda_per_period,
            sigma_min,
            orbital_period_min,
            seed,
            stream: 0,
        }
    }

    pub fn for_stream(self, stream: u64) -> Self {
        Self { stream, ..self }
    }

    fn validate(&self) -> Result<(), ReliabilityError> {
        if !(self.lambda_per_period >= 0.0 && self.lambda_per_period.is_finite()) {
            return Err(ReliabilityError::Parameters(
                "lambda must be finite and >= 0",
            ));
        }
        if !(self.sigma_min >= 0.0 && self.sigma_min.is_finite()) {
            return Err(ReliabilityError::Parameters(
                "sigma must be finite and >= 0",
            ));
        }
        if self.orbital_period_min.is_nan() || self.orbital_period_min <= 0.0 {
            return Err(ReliabilityError::Parameters(
                "orbital period must be positive",
            ));
        }
        Ok(())
    }

    /// Mean up-time, minutes.
    pub fn mean_up_min(&self) -> f64 {
        self.orbital_period_min / self.lambda_per_period
    }

    /// Long-run fraction of time the link is up.
    pub fn stationary_availability(&self) -> f64 {
        self.orbital_period_min
            / (self.orbital_period_min + self.sigma_min * self.lambda_per_period)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
    pub up: bool,
}

/// Alternating up/down intervals covering `[0, horizon]`, starting up.
/// Intervals are left-closed, so a transition instant belongs to the
/// interval being entered.
#[derive(Debug, Clone, PartialEq)]
pub struct AvailabilityTimeline {
    horizon_min: f64,
    /// Up intervals clipped to the horizon; gaps between them are down.
    up: Vec<(f64, f64)>,
    /// State at the horizon itself.
    ends_up: bool,
}

impl AvailabilityTimeline {
    pub fn always_up(horizon_min: f64) -> Self {
        Self {
            horizon_min,
            up: vec![(0.0, horizon_min)],
            ends_up: true,
        }
    }

    pub fn horizon_min(&self) -> f64 {
        self.horizon_min
    }

    pub fn up_intervals(&self) -> &[(f64, f64)] {
        &self.up
    }

    /// All intervals in time order, up and down.
    pub fn intervals(&self) -> Vec<Interval> {
        let mut out = Vec::with_capacity(2 * self.up.len());
        for (i, &(s, e)) in self.up.iter().enumerate() {
            out.push(Interval {
                start: s,
                end: e,
                up: true,
            });
            let next = self.up.get(i + 1).map_or(self.horizon_min, |n| n.0);
            if next > e {
                out.push(Interval {
                    start: e,
                    end: next,
                    up: false,
                });
            }
        }
        out
    }

    /// `Y(t)`: 1 when the link is up at `t`.
    pub fn availability(&self, t_min: f64) -> Result<u8, ReliabilityError> {
        if !(0.0..=self.horizon_min).contains(&t_min) {
            return Err(ReliabilityError::OutOfHorizon {
                t: t_min,
                horizon: self.horizon_min,
            });
        }
        if t_min == self.horizon_min {
            return Ok(self.ends_up as u8);
        }
        let idx = self.up.partition_point(|&(s, _)| s <= t_min);
        let up = idx > 0 && t_min < self.up[idx - 1].1;
        Ok(up as u8)
    }

    pub fn is_up(&self, t_min: f64) -> Result<bool, ReliabilityError> {
        self.availability(t_min).map(|y| y == 1)
    }

    /// Total up-time within the horizon, minutes.
    pub fn uptime_min(&self) -> f64 {
        self.up.iter().map(|&(s, e)| e - s).sum()
    }

    pub fn availability_fraction(&self) -> f64 {
        self.uptime_min() / self.horizon_min
    }
}

/// Draws a timeline: up-times `X_j ~ Exp(mean T / lambda)` alternating with
/// repairs of exactly `sigma`, until the horizon is covered.
pub fn sample_timeline(
    process: &IslReliabilityProcess,
    horizon_min: f64,
) -> Result<AvailabilityTimeline, ReliabilityError> {
    if !(horizon_min > 0.0 && horizon_min.is_finite()) {
        return Err(ReliabilityError::Horizon(horizon_min));
    }
    process.validate()?;
    if process.lambda_per_period == 0.0 || process.sigma_min == 0.0 {
        return Ok(AvailabilityTimeline::always_up(horizon_min));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(process.seed);
    rng.set_stream(process.stream);
    let up_time = Exp::new(process.lambda_per_period / process.orbital_period_min)
        .map_err(|_| ReliabilityError::Parameters("bad failure rate"))?;

    let mut up = Vec::new();
    let mut t = 0.0;
    let ends_up = loop {
        let end = t + up_time.sample(&mut rng);
        if end > horizon_min {
            up.push((t, horizon_min));
            break true;
        }
        up.push((t, end));
        t = end + process.sigma_min;
        if t > horizon_min {
            break false;
        }
    };
    Ok(AvailabilityTimeline {
        horizon_min,
        up,
        ends_up,
    })
}

/// One independent timeline per undirected link of `g`, using the link index
/// as the random stream.
pub fn sample_link_timelines<S: Scalar>(
    g: &CapacityGraph<S>,
    process: &IslReliabilityProcess,
    horizon_min: f64,
) -> Result<Vec<AvailabilityTimeline>, ReliabilityError> {
    (0..g.links().len())
        .map(|i| sample_timeline(&process.for_stream(i as u64), horizon_min))
        .collect()
}

fn check_timelines<S: Scalar>(
    g: &CapacityGraph<S>,
    timelines: &[AvailabilityTimeline],
) -> Result<(), ReliabilityError> {
    if g.links().len() != timelines.len() {
        return Err(ReliabilityError::MissingTimeline {
            links: g.links().len(),
            timelines: timelines.len(),
        });
    }
    Ok(())
}

fn link_capacity<S: Scalar>(g: &CapacityGraph<S>, link: usize) -> S {
    g.arc(g.links()[link].forward)
        .capacity
        .finite()
        .unwrap_or_else(S::zero)
}

/// Instantaneous capacity: sum of the capacities of links up at `t`, each
/// undirected link counted once.
pub fn network_capacity_at<S: Scalar>(
    g: &CapacityGraph<S>,
    timelines: &[AvailabilityTimeline],
    t_min: f64,
) -> Result<S, ReliabilityError> {
    check_timelines(g, timelines)?;
    let mut total = S::zero();
    for (i, tl) in timelines.iter().enumerate() {
        if tl.is_up(t_min)? {
            total = total + link_capacity(g, i);
        }
    }
    Ok(total)
}

/// Capacity averaged over the whole horizon, integrating each timeline exactly.
pub fn time_averaged_capacity<S: Scalar>(
    g: &CapacityGraph<S>,
    timelines: &[AvailabilityTimeline],
) -> Result<f64, ReliabilityError> {
    check_timelines(g, timelines)?;
    Ok(timelines
        .iter()
        .enumerate()
        .map(|(i, tl)| link_capacity(g, i).to_f64_lossy() * tl.availability_fraction())
        .sum())
}

/// Indices of links up at `t`.
pub fn links_up_at(
    timelines: &[AvailabilityTimeline],
    t_min: f64,
) -> Result<Vec<bool>, ReliabilityError> {
    timelines.iter().map(|tl| tl.is_up(t_min)).collect()
}

/// Expected network capacity `|E| C_e T / (T + sigma lambda)`.
pub fn expected_capacity<F: Float>(n_edges: usize, c_e: F, period: F, lambda: F, sigma: F) -> F {
    let n = F::from(n_edges).unwrap_or_else(F::nan);
    n * c_e * period / (period + sigma * lambda)
}

/// Fraction of the reliable capacity lost in expectation.
pub fn capacity_drop<F: Float>(period: F, lambda: F, sigma: F) -> F {
    sigma * lambda / (period + sigma * lambda)
}

/// Repair time at which the expected capacity drop equals `drop`.
/// `None` for `lambda = 0` or a drop outside `[0, 1)`.
pub fn sigma_for_drop<F: Float>(period: F, lambda: F, drop: F) -> Option<F> {
    if lambda <= F::zero() || drop < F::zero() || drop >= F::one() {
        return None;
    }
    Some(drop * period / ((F::one() - drop) * lambda))
}

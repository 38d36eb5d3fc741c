//! Reproducible Monte Carlo harness: trace ground-truth paths once, perturb
//! them independently per run, locate, and aggregate the error statistics.
//!
//! Runs execute in parallel; each run draws from its own counter-derived
//! stream (see [`crate::noise::noise_stream`]), so results are bit-identical
//! for a given seed regardless of thread count or schedule.

use std::fmt;

use rayon::prelude::*;

use crate::geometry::Point;
use crate::localization::{locate, MapAtParams};
use crate::map::FloorMap;
use crate::noise::{add_noise, noise_stream, NoiseParams};
use crate::tracer::{trace_paths, TraceError, TraceParams};

/// Error statistics over the successful runs of a Monte Carlo batch.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorStats {
    /// Mean error magnitude, meters.
    pub mean_m: f64,
    /// Sample standard deviation of the error magnitude, meters
    /// (0 when fewer than two samples).
    pub std_m: f64,
    /// Root mean square error, meters; `rms²` is the empirical second
    /// moment.
    pub rms_m: f64,
    /// Number of successful runs.
    pub samples: usize,
    /// Runs where localization produced no candidates. Excluded from the
    /// moments and reported separately rather than given an infinite error.
    pub outages: usize,
    /// Per-run error magnitudes in run order, when recorded.
    pub per_sample_errors: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimulationError {
    /// `runs` must be at least 1.
    ZeroRuns,
    /// The forward trace produced no paths: the user is unreachable.
    UnreachableUe,
    /// Every run was an outage; there are no statistics to report.
    NoSuccessfulRuns,
    Trace(TraceError),
}

impl fmt::Display for SimulationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimulationError::ZeroRuns => write!(f, "runs must be >= 1"),
            SimulationError::UnreachableUe => {
                write!(f, "unreachable ue: the forward trace found no paths")
            }
            SimulationError::NoSuccessfulRuns => write!(f, "every run was an outage"),
            SimulationError::Trace(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for SimulationError {}

impl From<TraceError> for SimulationError {
    fn from(e: TraceError) -> Self {
        SimulationError::Trace(e)
    }
}

/// Traces ground-truth MPCs for `(bs, ue_truth)`, then for each run
/// perturbs every MPC independently on its `(seed, run, mpc)` stream,
/// locates, and records the error magnitude against the ground truth.
/// Fully reproducible given the seed in `noise`.
#[allow(clippy::too_many_arguments)]
pub fn monte_carlo_locate(
    map: &FloorMap,
    bs: Point,
    ue_truth: Point,
    trace: &TraceParams,
    map_at: &MapAtParams,
    noise: &NoiseParams,
    runs: usize,
    record_samples: bool,
) -> Result<ErrorStats, SimulationError> {
    if runs == 0 {
        return Err(SimulationError::ZeroRuns);
    }
    let mpcs = trace_paths(map, bs, ue_truth, trace)?;
    if mpcs.is_empty() {
        return Err(SimulationError::UnreachableUe);
    }

    let outcomes: Vec<Option<f64>> = (0..runs)
        .into_par_iter()
        .map(|run| {
            let noisy: Vec<_> = mpcs
                .iter()
                .enumerate()
                .map(|(i, mpc)| {
                    let mut rng = noise_stream(noise.seed, run as u64, i as u64);
                    add_noise(mpc, noise, &mut rng)
                })
                .collect();
            locate(map, bs, &noisy, map_at)
                .ok()
                .map(|est| est.point.distance_to(ue_truth))
        })
        .collect();

    let errors: Vec<f64> = outcomes.iter().flatten().copied().collect();
    let outages = runs - errors.len();
    if errors.is_empty() {
        return Err(SimulationError::NoSuccessfulRuns);
    }
    let n = errors.len() as f64;
    let mean = errors.iter().sum::<f64>() / n;
    let second = errors.iter().map(|e| e * e).sum::<f64>() / n;
    let std = if errors.len() < 2 {
        0.0
    } else {
        (errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Ok(ErrorStats {
        mean_m: mean,
        std_m: std,
        rms_m: second.sqrt(),
        samples: errors.len(),
        outages,
        per_sample_errors: record_samples.then_some(errors),
    })
}

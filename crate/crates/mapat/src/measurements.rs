//! NR measurement-report arithmetic and spatial-lobe extraction.
//!
//! The timing quantities a network can report are quantized in units of the
//! NR basic time unit `Ts = 1/(15000·2048) s ≈ 32.55 ns`: the timing
//! advance fixes the absolute delay of the first arrival, additional-path
//! elements carry the relative delays of later arrivals, and the downlink /
//! uplink TDOA observables have fixed resolutions in `Ts`. This module
//! implements those conversions plus the extraction of spatial lobes (the
//! contiguous above-threshold runs of a power-angle profile) with the
//! power-weighted circular mean as each lobe's angle.

use std::fmt;

use crate::geometry::normalize_azimuth;
use crate::SPEED_OF_LIGHT;

/// NR basic time unit, seconds: `1/(15000 · 2048)`, about 32.55 ns.
pub const TS_SECONDS: f64 = 1.0 / (15_000.0 * 2_048.0);

/// Largest RSTD reportable at all, in units of [`TS_SECONDS`].
pub const RSTD_MAX_TS: f64 = 15_391.0;

/// RSTD boundary between the fine and coarse resolution regimes, in units
/// of [`TS_SECONDS`]. Inclusive: the boundary itself is still fine.
pub const RSTD_FINE_LIMIT_TS: f64 = 4_096.0;

/// Default spatial-lobe threshold below the profile maximum, dB.
pub const DEFAULT_LOBE_THRESHOLD_DB: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub enum MeasurementError {
    /// The subcarrier-spacing exponent must be in `0..=5`.
    InvalidScsExponent(u32),
    /// RSTD outside the reportable range.
    RstdOutOfRange(f64),
    /// The timing advance must be positive.
    NonPositiveTa,
    /// Relative delays must be non-negative.
    NegativeRelativeDelay { index: usize },
    /// The first relative delay must be zero (it defines the reference).
    FirstDelayNonzero,
    /// A power-angle profile needs at least one sample.
    EmptyProfile,
    /// Profile azimuths must be strictly increasing.
    NonIncreasingAzimuth { index: usize },
    /// Profile azimuths must span less than a full turn.
    SpanTooWide,
    /// Profile azimuths must be uniformly spaced.
    NonUniformSpacing { index: usize },
    /// CSV ingestion failure with the offending line number.
    CsvParse { line: usize, message: String },
}

impl fmt::Display for MeasurementError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasurementError::InvalidScsExponent(mu) => {
                write!(f, "scs exponent {mu} out of range 0..=5")
            }
            MeasurementError::RstdOutOfRange(v) => {
                write!(f, "rstd {v} s is outside the reportable range")
            }
            MeasurementError::NonPositiveTa => write!(f, "timing advance must be positive"),
            MeasurementError::NegativeRelativeDelay { index } => {
                write!(f, "relative delay at index {index} is negative")
            }
            MeasurementError::FirstDelayNonzero => {
                write!(f, "first relative delay must be zero")
            }
            MeasurementError::EmptyProfile => write!(f, "profile has no samples"),
            MeasurementError::NonIncreasingAzimuth { index } => {
                write!(f, "profile azimuth at index {index} is not increasing")
            }
            MeasurementError::SpanTooWide => write!(f, "profile spans a full turn or more"),
            MeasurementError::NonUniformSpacing { index } => {
                write!(f, "profile spacing changes at index {index}")
            }
            MeasurementError::CsvParse { line, message } => {
                write!(f, "profile csv error at line {line}: {message}")
            }
        }
    }
}

impl std::error::Error for MeasurementError {}

/// Minimum reportable one-way distance from the timing advance,
/// `78.12 / 2^μ` meters, for subcarrier spacing `2^μ · 15 kHz`.
///
/// ```
/// use mapat::measurements::ta_min_distance;
/// assert!((ta_min_distance(2).unwrap() - 19.53).abs() < 1e-9);
/// assert!((ta_min_distance(5).unwrap() - 2.44125).abs() < 1e-9);
/// ```
pub fn ta_min_distance(mu: u32) -> Result<f64, MeasurementError> {
    if mu > 5 {
        return Err(MeasurementError::InvalidScsExponent(mu));
    }
    Ok(78.12 / (1u64 << mu) as f64)
}

/// Downlink TDOA distance resolution for a given RSTD value: `c · 0.5·Ts`
/// up to and including `4096·Ts`, then `c · Ts` up to `15391·Ts`.
pub fn rstd_resolution(rstd_seconds: f64) -> Result<f64, MeasurementError> {
    if !rstd_seconds.is_finite() || rstd_seconds < 0.0 {
        return Err(MeasurementError::RstdOutOfRange(rstd_seconds));
    }
    let ts = rstd_seconds / TS_SECONDS;
    if ts <= RSTD_FINE_LIMIT_TS {
        Ok(SPEED_OF_LIGHT * 0.5 * TS_SECONDS)
    } else if ts <= RSTD_MAX_TS {
        Ok(SPEED_OF_LIGHT * TS_SECONDS)
    } else {
        Err(MeasurementError::RstdOutOfRange(rstd_seconds))
    }
}

/// Uplink TDOA distance resolution, `c · 2·Ts`, about 19.5 m.
pub fn utdoa_resolution() -> f64 {
    SPEED_OF_LIGHT * 2.0 * TS_SECONDS
}

/// Converts relative multipath delays into absolute ones: the first-path
/// time of flight is half the round-trip timing advance, and each relative
/// delay is added to it. The first relative delay must be zero.
pub fn absolute_delays(
    ta_rtt_seconds: f64,
    relative_delays: &[f64],
) -> Result<Vec<f64>, MeasurementError> {
    if !ta_rtt_seconds.is_finite() || ta_rtt_seconds <= 0.0 {
        return Err(MeasurementError::NonPositiveTa);
    }
    for (index, &d) in relative_delays.iter().enumerate() {
        if d < 0.0 {
            return Err(MeasurementError::NegativeRelativeDelay { index });
        }
    }
    if let Some(&first) = relative_delays.first() {
        if first != 0.0 {
            return Err(MeasurementError::FirstDelayNonzero);
        }
    }
    let base = ta_rtt_seconds / 2.0;
    Ok(relative_delays.iter().map(|d| base + d).collect())
}

/// Quantizes a delay to the nearest multiple of `resolution_m / c`;
/// exact half-quantum ties round up.
pub fn quantize_delay(delay_seconds: f64, resolution_m: f64) -> f64 {
    debug_assert!(delay_seconds >= 0.0 && resolution_m > 0.0);
    let quantum = resolution_m / SPEED_OF_LIGHT;
    (delay_seconds / quantum + 0.5).floor() * quantum
}

/// One sample of a swept power-angle profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    /// Azimuth, radians.
    pub azimuth: f64,
    /// Received power, dB scale.
    pub power_db: f64,
}

/// A uniformly spaced, strictly increasing sweep of received power over
/// azimuth, spanning less than a full turn. Treated as circular when
/// grouping lobes, so a lobe may wrap through 0°/360°.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAngleProfile {
    samples: Vec<ProfileSample>,
    angular_step: f64,
}

impl PowerAngleProfile {
    /// Validates ordering, span, and uniform spacing (within 1e-9 rad).
    pub fn new(samples: Vec<ProfileSample>) -> Result<Self, MeasurementError> {
        if samples.is_empty() {
            return Err(MeasurementError::EmptyProfile);
        }
        for (i, pair) in samples.windows(2).enumerate() {
            if pair[1].azimuth <= pair[0].azimuth {
                return Err(MeasurementError::NonIncreasingAzimuth { index: i + 1 });
            }
        }
        let span = samples.last().unwrap().azimuth - samples[0].azimuth;
        if span >= std::f64::consts::TAU {
            return Err(MeasurementError::SpanTooWide);
        }
        let angular_step = if samples.len() >= 2 {
            let step = samples[1].azimuth - samples[0].azimuth;
            for (i, pair) in samples.windows(2).enumerate() {
                if ((pair[1].azimuth - pair[0].azimuth) - step).abs() > 1e-9 {
                    return Err(MeasurementError::NonUniformSpacing { index: i + 1 });
                }
            }
            step
        } else {
            0.0
        };
        Ok(Self {
            samples,
            angular_step,
        })
    }

    /// Parses the CSV interface: header `azimuth_deg,power_db`, one sample
    /// per row, strictly increasing azimuth in degrees.
    pub fn from_csv(text: &str) -> Result<Self, MeasurementError> {
        let mut samples = Vec::new();
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(MeasurementError::CsvParse {
            line: 1,
            message: "empty file".into(),
        })?;
        if header.trim() != "azimuth_deg,power_db" {
            return Err(MeasurementError::CsvParse {
                line: 1,
                message: format!("expected header 'azimuth_deg,power_db', got '{header}'"),
            });
        }
        for (idx, row) in lines {
            let line = idx + 1;
            let row = row.trim();
            if row.is_empty() {
                continue;
            }
            let mut fields = row.split(',');
            let azimuth_deg: f64 = parse_field(fields.next(), line, "azimuth_deg")?;
            let power_db: f64 = parse_field(fields.next(), line, "power_db")?;
            if fields.next().is_some() {
                return Err(MeasurementError::CsvParse {
                    line,
                    message: "too many fields".into(),
                });
            }
            samples.push(ProfileSample {
                azimuth: azimuth_deg.to_radians(),
                power_db,
            });
        }
        Self::new(samples)
    }

    pub fn samples(&self) -> &[ProfileSample] {
        &self.samples
    }

    pub fn angular_step(&self) -> f64 {
        self.angular_step
    }
}

fn parse_field(field: Option<&str>, line: usize, name: &str) -> Result<f64, MeasurementError> {
    let text = field.ok_or_else(|| MeasurementError::CsvParse {
        line,
        message: format!("missing field '{name}'"),
    })?;
    text.trim().parse().map_err(|_| MeasurementError::CsvParse {
        line,
        message: format!("field '{name}' is not a number: '{text}'"),
    })
}

/// A contiguous above-threshold run of profile samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Lobe {
    /// Power-weighted circular mean angle, radians in `[0, 2π)`:
    /// `arg(Σ P_i · e^{jθ_i})` with the weights in linear power units.
    pub mean_angle: f64,
    /// Total lobe power, `10·log10(Σ P_i)` dB.
    pub total_power_db: f64,
    /// Profile sample indices, contiguous modulo the profile length.
    pub member_indices: Vec<usize>,
}

/// Extracts spatial lobes: samples within `threshold_db` of the profile
/// maximum, grouped into maximal contiguous runs with the profile treated
/// as circular. Lobes are ordered by descending total power.
pub fn extract_lobes(profile: &PowerAngleProfile, threshold_db: f64) -> Vec<Lobe> {
    let samples = profile.samples();
    let n = samples.len();
    let max_db = samples
        .iter()
        .map(|s| s.power_db)
        .fold(f64::NEG_INFINITY, f64::max);
    let marked: Vec<bool> = samples
        .iter()
        .map(|s| s.power_db >= max_db - threshold_db)
        .collect();

    let mut runs: Vec<Vec<usize>> = Vec::new();
    if marked.iter().all(|&m| m) {
        runs.push((0..n).collect());
    } else {
        for start in 0..n {
            let before = (start + n - 1) % n;
            if marked[start] && !marked[before] {
                let mut run = Vec::new();
                let mut i = start;
                while marked[i] {
                    run.push(i);
                    i = (i + 1) % n;
                }
                runs.push(run);
            }
        }
    }

    let mut lobes: Vec<Lobe> = runs
        .into_iter()
        .map(|member_indices| {
            let mut re = 0.0;
            let mut im = 0.0;
            let mut linear_sum = 0.0;
            for &i in &member_indices {
                let p = 10f64.powf(samples[i].power_db / 10.0);
                re += p * samples[i].azimuth.cos();
                im += p * samples[i].azimuth.sin();
                linear_sum += p;
            }
            Lobe {
                mean_angle: normalize_azimuth(im.atan2(re)),
                total_power_db: 10.0 * linear_sum.log10(),
                member_indices,
            }
        })
        .collect();
    lobes.sort_by(|a, b| b.total_power_db.total_cmp(&a.total_power_db));
    lobes
}

//! Distance/link-type summary tables for batch localization runs.

use std::fmt::Write as _;

/// Per-user outcome of a Monte Carlo batch.
#[derive(Debug, Clone, PartialEq)]
pub struct UeOutcome {
    pub label: String,
    /// Straight-line base-station distance, meters.
    pub distance_m: f64,
    /// Line-of-sight link, per the visibility predicate.
    pub los: bool,
    /// Mean error over successful runs, meters.
    pub mean_error_m: f64,
    /// Sample standard deviation of the error, meters.
    pub std_error_m: f64,
    /// Fraction of runs that produced no fix.
    pub outage_rate: f64,
    pub runs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceBin {
    Under10,
    From10To35,
    All,
}

impl DistanceBin {
    fn label(self) -> &'static str {
        match self {
            DistanceBin::Under10 => "< 10 m",
            DistanceBin::From10To35 => "10 - 35 m",
            DistanceBin::All => "(all)",
        }
    }

    fn contains(self, distance_m: f64) -> bool {
        match self {
            DistanceBin::Under10 => distance_m < 10.0,
            DistanceBin::From10To35 => (10.0..=35.0).contains(&distance_m),
            DistanceBin::All => true,
        }
    }
}

/// One aggregate row: a distance bin and link type over the user locations
/// that fall in it.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub bin: DistanceBin,
    pub los: bool,
    pub locations: usize,
    /// Mean and spread of the BS-UE distances in the bin, meters.
    pub mean_distance_m: f64,
    pub std_distance_m: Option<f64>,
    /// Mean and spread of the per-location mean errors, centimeters.
    pub mean_error_cm: f64,
    pub std_error_cm: Option<f64>,
}

fn sample_std(values: &[f64], mean: f64) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let n = values.len() as f64;
    Some(
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt(),
    )
}

/// Aggregates per-user outcomes into distance-binned LOS/NLOS rows.
/// Bins with no locations are omitted.
pub fn summarize(outcomes: &[UeOutcome]) -> Vec<SummaryRow> {
    let mut rows = Vec::new();
    for bin in [DistanceBin::Under10, DistanceBin::From10To35, DistanceBin::All] {
        for los in [true, false] {
            let selected: Vec<&UeOutcome> = outcomes
                .iter()
                .filter(|o| o.los == los && bin.contains(o.distance_m))
                .collect();
            if selected.is_empty() {
                continue;
            }
            let n = selected.len() as f64;
            let distances: Vec<f64> = selected.iter().map(|o| o.distance_m).collect();
            let errors_cm: Vec<f64> = selected.iter().map(|o| o.mean_error_m * 100.0).collect();
            let mean_distance = distances.iter().sum::<f64>() / n;
            let mean_error = errors_cm.iter().sum::<f64>() / n;
            rows.push(SummaryRow {
                bin,
                los,
                locations: selected.len(),
                mean_distance_m: mean_distance,
                std_distance_m: sample_std(&distances, mean_distance),
                mean_error_cm: mean_error,
                std_error_cm: sample_std(&errors_cm, mean_error),
            });
        }
    }
    rows
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.2}"))
}

/// Fixed-width text rendering of the summary rows.
pub fn format_summary(rows: &[SummaryRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<10} {:>9} {:>8} {:>8}  {:<5} {:>8} {:>8}",
        "distance", "locations", "mu_d(m)", "sd_d(m)", "link", "mu_e(cm)", "sd_e(cm)"
    );
    for row in rows {
        let _ = writeln!(
            out,
            "{:<10} {:>9} {:>8.2} {:>8} {:<5} {:>9.2} {:>8}",
            row.bin.label(),
            row.locations,
            row.mean_distance_m,
            opt(row.std_distance_m),
            if row.los { "LOS" } else { "NLOS" },
            row.mean_error_cm,
            opt(row.std_error_cm),
        );
    }
    out
}

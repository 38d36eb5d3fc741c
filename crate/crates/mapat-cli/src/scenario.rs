//! Scenario files: a map reference, the base-station pose, labelled user
//! ground truths, and the trace/localization/noise parameters for a batch.
//!
//! JSON schema (all units at this boundary are meters, nanoseconds,
//! degrees, and GHz; sections and most fields are optional):
//!
//! ```json
//! {
//!   "map": "office_map.json",
//!   "bs": [17.5, 20.0],
//!   "ues": [ { "label": "corridor-near", "position": [17.5, 26.0] } ],
//!   "trace": {
//!     "max_reflections": 3, "max_transmissions": 1,
//!     "frequency_ghz": 28.0, "reflection_loss_db": 7.0,
//!     "transmission_loss_db": 10.0, "max_paths": 4
//!   },
//!   "map_at": {
//!     "max_interactions": 4, "cluster_radius_m": 1.0, "min_leg_m": 0.001
//!   },
//!   "noise": { "sigma_t_ns": 0.25, "sigma_theta_deg": 0.5, "seed": 2024 },
//!   "runs": 1000
//! }
//! ```
//!
//! The map path is resolved relative to the scenario file's directory.

use std::path::Path;

use serde::Deserialize;

use mapat::geometry::Point;
use mapat::localization::MapAtParams;
use mapat::map::FloorMap;
use mapat::noise::NoiseParams;
use mapat::tracer::TraceParams;

use crate::CliError;

pub struct Scenario {
    pub map: FloorMap,
    pub bs: Point,
    pub ues: Vec<(String, Point)>,
    pub trace: TraceParams,
    pub map_at: MapAtParams,
    pub noise: NoiseParams,
    pub runs: usize,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let file: ScenarioFile = serde_json::from_str(&text).map_err(|e| {
            CliError::Usage(format!(
                "{}:{}:{}: {e}",
                path.display(),
                e.line(),
                e.column()
            ))
        })?;
        if file.ues.is_empty() {
            return Err(CliError::Usage("scenario has no ues".into()));
        }
        if file.runs == 0 {
            return Err(CliError::Usage("runs must be >= 1".into()));
        }
        let map_path = path
            .parent()
            .unwrap_or_else(|| Path::new("."))
            .join(&file.map);
        let map_text = std::fs::read_to_string(&map_path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", map_path.display())))?;
        let map = FloorMap::from_json_str(&map_text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", map_path.display())))?;
        Ok(Self {
            map,
            bs: Point::new(file.bs[0], file.bs[1]),
            ues: file
                .ues
                .into_iter()
                .map(|u| (u.label, Point::new(u.position[0], u.position[1])))
                .collect(),
            trace: file.trace.into(),
            map_at: file.map_at.into(),
            noise: file.noise.into(),
            runs: file.runs,
        })
    }

    pub fn ue(&self, label: &str) -> Option<Point> {
        self.ues
            .iter()
            .find(|(l, _)| l == label)
            .map(|&(_, p)| p)
    }
}

fn default_runs() -> usize {
    1000
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    map: String,
    bs: [f64; 2],
    ues: Vec<UeEntry>,
    #[serde(default)]
    trace: TraceSection,
    #[serde(default)]
    map_at: MapAtSection,
    #[serde(default)]
    noise: NoiseSection,
    #[serde(default = "default_runs")]
    runs: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UeEntry {
    label: String,
    position: [f64; 2],
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct TraceSection {
    max_reflections: usize,
    max_transmissions: usize,
    frequency_ghz: f64,
    reflection_loss_db: f64,
    transmission_loss_db: f64,
    max_paths: Option<usize>,
}

impl Default for TraceSection {
    fn default() -> Self {
        let p = TraceParams::default();
        Self {
            max_reflections: p.max_reflections,
            max_transmissions: p.max_transmissions,
            frequency_ghz: p.frequency_hz / 1e9,
            reflection_loss_db: p.reflection_loss_db,
            transmission_loss_db: p.transmission_loss_db,
            max_paths: p.max_paths,
        }
    }
}

impl From<TraceSection> for TraceParams {
    fn from(s: TraceSection) -> Self {
        Self {
            max_reflections: s.max_reflections,
            max_transmissions: s.max_transmissions,
            frequency_hz: s.frequency_ghz * 1e9,
            reflection_loss_db: s.reflection_loss_db,
            transmission_loss_db: s.transmission_loss_db,
            max_paths: s.max_paths,
        }
    }
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct MapAtSection {
    max_interactions: usize,
    cluster_radius_m: f64,
    min_leg_m: f64,
}

impl Default for MapAtSection {
    fn default() -> Self {
        let p = MapAtParams::default();
        Self {
            max_interactions: p.max_interactions,
            cluster_radius_m: p.cluster_radius_m,
            min_leg_m: p.min_leg_m,
        }
    }
}

impl From<MapAtSection> for MapAtParams {
    fn from(s: MapAtSection) -> Self {
        Self {
            max_interactions: s.max_interactions,
            cluster_radius_m: s.cluster_radius_m,
            min_leg_m: s.min_leg_m,
        }
    }
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct NoiseSection {
    sigma_t_ns: f64,
    sigma_theta_deg: f64,
    seed: u64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        let p = NoiseParams::default();
        Self {
            sigma_t_ns: p.sigma_t * 1e9,
            sigma_theta_deg: p.sigma_theta.to_degrees(),
            seed: p.seed,
        }
    }
}

impl From<NoiseSection> for NoiseParams {
    fn from(s: NoiseSection) -> Self {
        Self {
            sigma_t: s.sigma_t_ns * 1e-9,
            sigma_theta: s.sigma_theta_deg.to_radians(),
            seed: s.seed,
        }
    }
}

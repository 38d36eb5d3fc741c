//! Floor-plan container, validation, and the JSON map file format.
//!
//! A map file is a UTF-8 JSON document:
//!
//! ```json
//! {
//!   "margin_m": 1.0,
//!   "walls": [
//!     { "a": [0.0, 0.0], "b": [10.0, 0.0], "transmissive": false }
//!   ]
//! }
//! ```
//!
//! Coordinates are meters. `transmissive` defaults to `false` and
//! `margin_m` to 1.0. Walls are independent segments; no room topology is
//! assumed. The map's bounds are the tight bounding box of all wall
//! endpoints grown by the margin, so positions slightly outside the
//! outermost wall (a base station recessed in a doorway, say) still count
//! as inside.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::{first_hit, Hit, Point, Ray, Wall, GEOM_EPS};

/// Default bounds margin around the wall bounding box, in meters.
pub const DEFAULT_MARGIN_M: f64 = 1.0;

/// Closed axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min: Point,
    pub max: Point,
}

impl Bounds {
    /// True iff `p` lies inside or on the edge of the rectangle.
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }
}

/// An immutable, validated floor plan.
#[derive(Debug, Clone, PartialEq)]
pub struct FloorMap {
    walls: Vec<Wall>,
    bounds: Bounds,
    margin_m: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MapError {
    /// The file is not well-formed JSON (or violates the schema).
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    /// A map must contain at least one wall.
    NoWalls,
    /// A wall fails validation; `index` is its position in the file.
    InvalidWall { index: usize, message: String },
    /// The bounds margin must be finite and non-negative.
    InvalidMargin(f64),
}

impl fmt::Display for MapError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapError::Parse {
                line,
                column,
                message,
            } => write!(f, "map parse error at line {line}, column {column}: {message}"),
            MapError::NoWalls => write!(f, "map has no walls"),
            MapError::InvalidWall { index, message } => {
                write!(f, "invalid wall at index {index}: {message}")
            }
            MapError::InvalidMargin(m) => write!(f, "invalid bounds margin: {m}"),
        }
    }
}

impl std::error::Error for MapError {}

impl FloorMap {
    /// Validates the walls and computes bounds as the tight bounding box
    /// expanded by `margin_m` on every side.
    pub fn new(walls: Vec<Wall>, margin_m: f64) -> Result<Self, MapError> {
        if walls.is_empty() {
            return Err(MapError::NoWalls);
        }
        if !margin_m.is_finite() || margin_m < 0.0 {
            return Err(MapError::InvalidMargin(margin_m));
        }
        for (index, w) in walls.iter().enumerate() {
            if !w.a.is_finite() || !w.b.is_finite() {
                return Err(MapError::InvalidWall {
                    index,
                    message: "non-finite coordinate".into(),
                });
            }
            if w.length() <= GEOM_EPS {
                return Err(MapError::InvalidWall {
                    index,
                    message: "zero-length wall".into(),
                });
            }
        }
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for w in &walls {
            for p in [w.a, w.b] {
                min.x = min.x.min(p.x);
                min.y = min.y.min(p.y);
                max.x = max.x.max(p.x);
                max.y = max.y.max(p.y);
            }
        }
        let bounds = Bounds {
            min: Point::new(min.x - margin_m, min.y - margin_m),
            max: Point::new(max.x + margin_m, max.y + margin_m),
        };
        Ok(Self {
            walls,
            bounds,
            margin_m,
        })
    }

    /// Loads a map from JSON text, with line/column diagnostics on parse
    /// errors and the offending wall index on validation errors.
    pub fn from_json_str(text: &str) -> Result<Self, MapError> {
        let file: MapFile = serde_json::from_str(text).map_err(|e| MapError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let walls = file
            .walls
            .into_iter()
            .map(|w| Wall {
                a: Point::new(w.a[0], w.a[1]),
                b: Point::new(w.b[0], w.b[1]),
                transmissive: w.transmissive,
            })
            .collect();
        Self::new(walls, file.margin_m)
    }

    /// Serializes the map back to the JSON file format. Loading the result
    /// yields an equal map.
    pub fn to_json_string(&self) -> String {
        let file = MapFile {
            margin_m: self.margin_m,
            walls: self
                .walls
                .iter()
                .map(|w| WallEntry {
                    a: [w.a.x, w.a.y],
                    b: [w.b.x, w.b.y],
                    transmissive: w.transmissive,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("map serialization cannot fail")
    }

    pub fn walls(&self) -> &[Wall] {
        &self.walls
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn margin_m(&self) -> f64 {
        self.margin_m
    }

    /// True iff `p` lies inside the map bounds (closed rectangle).
    pub fn in_bounds(&self, p: Point) -> bool {
        self.bounds.contains(p)
    }

    /// Nearest wall struck by `ray`, ignoring the wall at `exclude`.
    pub fn first_hit(&self, ray: &Ray, exclude: Option<usize>) -> Option<Hit> {
        first_hit(ray, &self.walls, exclude)
    }
}

fn default_margin() -> f64 {
    DEFAULT_MARGIN_M
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapFile {
    #[serde(default = "default_margin")]
    margin_m: f64,
    walls: Vec<WallEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WallEntry {
    a: [f64; 2],
    b: [f64; 2],
    #[serde(default, skip_serializing_if = "is_false")]
    transmissive: bool,
}

//! Map-assisted millimeter-wave position location from per-path angle of
//! arrival (AoA) and time of flight (ToF).
//!
//! A base station that can measure the arrival azimuth and absolute delay of
//! each resolvable multipath component (MPC) can locate a user with a vector
//! floor plan alone, in line-of-sight and non-line-of-sight alike: every MPC
//! is propagated backwards through the map, branching into a reflection and a
//! transmission hypothesis at each wall it meets, and the surviving branch
//! endpoints ("candidate locations") are clustered. Candidates from different
//! MPCs pile up at the true user position, so the centroid of the cluster
//! supported by the most MPCs is the position fix.
//!
//! The crate provides:
//!
//! * [`geometry`]: exact 2-D primitives shared by everything else;
//! * [`map`]: the floor-plan container and its JSON file format;
//! * [`tracer`]: a forward image-method ray tracer used as ground truth;
//! * [`localization`]: candidate generation, clustering, and the position
//!   estimate itself;
//! * [`noise`] / [`montecarlo`]: Gaussian measurement noise, the closed-form
//!   accuracy model, and a reproducible Monte Carlo harness;
//! * [`measurements`]: 3GPP NR reporting arithmetic (timing-advance and
//!   TDOA resolutions, relative-to-absolute delay conversion) and spatial-lobe
//!   extraction from power-angle profiles;
//! * [`report`]: distance/link-type summary tables for batch runs.
//!
//! # Example
//!
//! Trace a two-path scenario and locate the user from the traced MPCs:
//!
//! ```
//! use mapat::geometry::{Point, Wall};
//! use mapat::map::FloorMap;
//! use mapat::tracer::{trace_paths, TraceParams};
//! use mapat::localization::{locate, MapAtParams};
//!
//! // One long opaque wall below the link.
//! let map = FloorMap::new(
//!     vec![Wall::new(Point::new(-10.0, 0.0), Point::new(10.0, 0.0))],
//!     5.0,
//! )?;
//! let bs = Point::new(0.0, 1.0);
//! let ue = Point::new(4.0, 1.0);
//!
//! let mpcs = trace_paths(&map, bs, ue, &TraceParams::default())?;
//! assert_eq!(mpcs.len(), 2); // direct path + one wall reflection
//!
//! let estimate = locate(&map, bs, &mpcs, &MapAtParams::default())?;
//! assert!(estimate.point.distance_to(ue) < 1e-6);
//! assert_eq!(estimate.support, 2); // both MPCs vote for the true position
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod geometry;
pub mod localization;
pub mod map;
pub mod measurements;
pub mod montecarlo;
pub mod noise;
pub mod report;
pub mod tracer;

/// Speed of light in meters per second.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub use geometry::{Point, Ray, Wall};
pub use localization::{locate, MapAtParams, PositionEstimate};
pub use map::FloorMap;
pub use montecarlo::{monte_carlo_locate, ErrorStats};
pub use noise::NoiseParams;
pub use tracer::{trace_paths, Mpc, TraceParams};

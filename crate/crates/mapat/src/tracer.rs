//! Forward image-method ray tracer: the ground-truth oracle.
//!
//! Given base-station and user positions, [`trace_paths`] enumerates every
//! geometrically valid multipath component, the direct path plus specular
//! reflection paths with straight-through transmissions, and reports, per
//! path, the exact departure azimuth at the base station, the time of
//! flight, the interaction sequence, and a simple received-power figure.
//!
//! Reflection paths are constructed with the image method: the user is
//! mirrored across each wall of an ordered wall sequence, back to front, and
//! the path is unfolded into a straight line, which makes angles and lengths
//! exact rather than discretized. Transmissions pass straight through
//! (no refraction).
//!
//! The power model is deliberately crude and clearly synthetic: free-space
//! path loss at the configured carrier frequency plus a fixed per-reflection
//! and per-transmission loss. It exists so that power-weighted processing
//! downstream has realistic weights, not to predict link budgets.

use std::fmt;

use crate::geometry::{
    mirror_point, normalize_azimuth, segment_wall_crossing, GeometryError, Point, GEOM_EPS,
    PARAM_TOL,
};
use crate::map::FloorMap;
use crate::SPEED_OF_LIGHT;

/// What happened at one wall along a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InteractionKind {
    Reflection,
    Transmission,
}

impl fmt::Display for InteractionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InteractionKind::Reflection => write!(f, "reflection"),
            InteractionKind::Transmission => write!(f, "transmission"),
        }
    }
}

/// One wall interaction along a path, in path order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interaction {
    pub wall_index: usize,
    pub kind: InteractionKind,
}

/// One multipath component as seen at the base station.
#[derive(Debug, Clone, PartialEq)]
pub struct Mpc {
    /// Arrival azimuth at the base station, radians in `[0, 2π)`. By
    /// channel reciprocity this equals the departure azimuth of the
    /// downlink path, which is how the tracer computes it.
    pub aoa_at_bs: f64,
    /// Absolute one-way time of flight, seconds.
    pub tof: f64,
    /// Synthetic received power, dBm relative to a 0 dBm transmit level.
    pub power_dbm: Option<f64>,
    /// Ordered wall interactions between base station and user.
    pub interactions: Vec<Interaction>,
}

impl Mpc {
    /// A bare line-of-sight component with the given angle and delay.
    pub fn los(aoa_at_bs: f64, tof: f64) -> Self {
        Self {
            aoa_at_bs: normalize_azimuth(aoa_at_bs),
            tof,
            power_dbm: None,
            interactions: Vec::new(),
        }
    }

    pub fn n_interactions(&self) -> usize {
        self.interactions.len()
    }

    /// Distance travelled by this component, `c · tof`, meters.
    pub fn path_length_m(&self) -> f64 {
        self.tof * SPEED_OF_LIGHT
    }
}

/// Tracer configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceParams {
    /// Maximum reflections per path.
    pub max_reflections: usize,
    /// Maximum transmissions per path.
    pub max_transmissions: usize,
    /// Carrier frequency, Hz.
    pub frequency_hz: f64,
    /// Loss per reflection, dB.
    pub reflection_loss_db: f64,
    /// Loss per transmission, dB.
    pub transmission_loss_db: f64,
    /// Optional cap on the number of emitted paths; the strongest arrivals
    /// (earliest time of flight) are kept. `None` emits everything.
    pub max_paths: Option<usize>,
}

impl Default for TraceParams {
    fn default() -> Self {
        Self {
            max_reflections: 3,
            max_transmissions: 1,
            frequency_hz: 28e9,
            reflection_loss_db: 7.0,
            transmission_loss_db: 10.0,
            max_paths: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TraceError {
    /// `bs` or `ue` lies outside the map bounds.
    OutOfBounds { label: &'static str, point: Point },
    /// The endpoints coincide.
    CoincidentEndpoints,
    Geometry(GeometryError),
}

impl fmt::Display for TraceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceError::OutOfBounds { label, point } => {
                write!(f, "{label} at {point} is outside the map bounds")
            }
            TraceError::CoincidentEndpoints => write!(f, "bs and ue coincide"),
            TraceError::Geometry(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for TraceError {}

impl From<GeometryError> for TraceError {
    fn from(e: GeometryError) -> Self {
        TraceError::Geometry(e)
    }
}

/// Line-of-sight predicate: `visible` is true iff every wall crossed by the
/// open segment `p`–`q` is transmissive; the count is the number of crossed
/// walls either way.
pub fn los_visible(map: &FloorMap, p: Point, q: Point) -> (bool, usize) {
    let crossings = segment_crossings(map, p, q);
    let visible = crossings
        .iter()
        .all(|&(_, i)| map.walls()[i].transmissive);
    (visible, crossings.len())
}

// All walls crossed by the open segment p–q, sorted by distance from p.
fn segment_crossings(map: &FloorMap, p: Point, q: Point) -> Vec<(f64, usize)> {
    let mut crossings: Vec<(f64, usize)> = map
        .walls()
        .iter()
        .enumerate()
        .filter_map(|(i, w)| segment_wall_crossing(p, q, w).map(|d| (d, i)))
        .collect();
    crossings.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    crossings
}

/// Free-space path loss in dB at distance `d` meters and frequency `f` Hz.
fn fspl_db(d: f64, f: f64) -> f64 {
    20.0 * (4.0 * std::f64::consts::PI * d * f / SPEED_OF_LIGHT).log10()
}

/// Enumerates every geometrically valid path between `bs` and `ue` within
/// the reflection and transmission budgets, sorted by ascending time of
/// flight. Each distinct interaction sequence appears once.
pub fn trace_paths(
    map: &FloorMap,
    bs: Point,
    ue: Point,
    params: &TraceParams,
) -> Result<Vec<Mpc>, TraceError> {
    if !map.in_bounds(bs) {
        return Err(TraceError::OutOfBounds { label: "bs", point: bs });
    }
    if !map.in_bounds(ue) {
        return Err(TraceError::OutOfBounds { label: "ue", point: ue });
    }
    if bs.distance_to(ue) <= GEOM_EPS {
        return Err(TraceError::CoincidentEndpoints);
    }

    let mut paths = Vec::new();

    // Direct path, possibly through transmissive walls.
    let crossings = segment_crossings(map, bs, ue);
    if crossings.len() <= params.max_transmissions
        && crossings.iter().all(|&(_, i)| map.walls()[i].transmissive)
    {
        let length = bs.distance_to(ue);
        let interactions: Vec<Interaction> = crossings
            .iter()
            .map(|&(_, wall_index)| Interaction {
                wall_index,
                kind: InteractionKind::Transmission,
            })
            .collect();
        paths.push(build_mpc(bs.azimuth_to(ue), length, interactions, params));
    }

    // Reflection paths over ordered wall sequences.
    let mut seq = Vec::with_capacity(params.max_reflections);
    enumerate_sequences(map, bs, ue, params, &mut seq, &mut paths)?;

    paths.sort_by(|a, b| {
        a.tof
            .total_cmp(&b.tof)
            .then_with(|| a.interactions.cmp(&b.interactions))
    });
    if let Some(cap) = params.max_paths {
        paths.truncate(cap);
    }
    Ok(paths)
}

fn enumerate_sequences(
    map: &FloorMap,
    bs: Point,
    ue: Point,
    params: &TraceParams,
    seq: &mut Vec<usize>,
    out: &mut Vec<Mpc>,
) -> Result<(), TraceError> {
    if seq.len() >= params.max_reflections {
        return Ok(());
    }
    for wall_index in 0..map.walls().len() {
        // A ray leaving a wall cannot hit the same wall line again next.
        if seq.last() == Some(&wall_index) {
            continue;
        }
        seq.push(wall_index);
        if let Some(mpc) = try_sequence(map, bs, ue, seq, params)? {
            out.push(mpc);
        }
        enumerate_sequences(map, bs, ue, params, seq, out)?;
        seq.pop();
    }
    Ok(())
}

// Attempts the image-method path reflecting, in order, at each wall of
// `seq`. Returns the finished Mpc if the unfolded specular path exists and
// no opaque wall blocks it.
fn try_sequence(
    map: &FloorMap,
    bs: Point,
    ue: Point,
    seq: &[usize],
    params: &TraceParams,
) -> Result<Option<Mpc>, TraceError> {
    let walls = map.walls();
    let k = seq.len();

    // images[j]: ue mirrored across walls seq[k-1], ..., seq[j].
    let mut images = vec![Point::new(0.0, 0.0); k];
    let mut v = ue;
    for j in (0..k).rev() {
        v = mirror_point(v, &walls[seq[j]])?;
        images[j] = v;
    }

    // Forward walk: each segment towards the next image must cross the
    // corresponding wall segment (closed endpoints).
    let mut reflection_points = Vec::with_capacity(k);
    let mut cur = bs;
    for j in 0..k {
        let w = &walls[seq[j]];
        let target = images[j];
        let seg_len = cur.distance_to(target);
        if seg_len <= GEOM_EPS {
            return Ok(None);
        }
        let dx = (target.x - cur.x) / seg_len;
        let dy = (target.y - cur.y) / seg_len;
        let ex = w.b.x - w.a.x;
        let ey = w.b.y - w.a.y;
        let denom = dx * ey - dy * ex;
        if denom.abs() <= PARAM_TOL * w.length() {
            return Ok(None);
        }
        let ax = w.a.x - cur.x;
        let ay = w.a.y - cur.y;
        let t = (ax * ey - ay * ex) / denom;
        let u = (ax * dy - ay * dx) / denom;
        if t <= GEOM_EPS || t >= seg_len - GEOM_EPS {
            return Ok(None);
        }
        if !(-PARAM_TOL..=1.0 + PARAM_TOL).contains(&u) {
            return Ok(None);
        }
        let point = Point::new(cur.x + t * dx, cur.y + t * dy);
        reflection_points.push(point);
        cur = point;
    }
    if cur.distance_to(ue) <= GEOM_EPS {
        return Ok(None);
    }

    // Blockage scan along the physical legs; transmissive crossings are
    // recorded as transmissions, opaque ones kill the path.
    let mut legs = Vec::with_capacity(k + 1);
    let mut from = bs;
    for &p in &reflection_points {
        legs.push((from, p));
        from = p;
    }
    legs.push((from, ue));

    let mut events: Vec<(f64, Interaction)> = Vec::new();
    let mut total_len = 0.0;
    let mut transmissions = 0;
    for (leg_index, &(p, q)) in legs.iter().enumerate() {
        for (i, w) in walls.iter().enumerate() {
            if let Some(d) = segment_wall_crossing(p, q, w) {
                if !w.transmissive {
                    return Ok(None);
                }
                transmissions += 1;
                if transmissions > params.max_transmissions {
                    return Ok(None);
                }
                events.push((
                    total_len + d,
                    Interaction {
                        wall_index: i,
                        kind: InteractionKind::Transmission,
                    },
                ));
            }
        }
        total_len += p.distance_to(q);
        if leg_index < k {
            events.push((
                total_len,
                Interaction {
                    wall_index: seq[leg_index],
                    kind: InteractionKind::Reflection,
                },
            ));
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));

    debug_assert!(
        (bs.distance_to(images[0]) - total_len).abs() < 1e-9,
        "unfolded length must equal the physical path length"
    );

    let aoa = bs.azimuth_to(reflection_points[0]);
    let interactions = events.into_iter().map(|(_, i)| i).collect();
    Ok(Some(build_mpc(aoa, total_len, interactions, params)))
}

fn build_mpc(aoa: f64, length: f64, interactions: Vec<Interaction>, params: &TraceParams) -> Mpc {
    let loss: f64 = interactions
        .iter()
        .map(|i| match i.kind {
            InteractionKind::Reflection => params.reflection_loss_db,
            InteractionKind::Transmission => params.transmission_loss_db,
        })
        .sum();
    Mpc {
        aoa_at_bs: normalize_azimuth(aoa),
        tof: length / SPEED_OF_LIGHT,
        power_dbm: Some(-fspl_db(length, params.frequency_hz) - loss),
        interactions,
    }
}

//! Exact 2-D primitives: points, walls, directed rays, mirroring,
//! ray-segment intersection, and sidedness.
//!
//! Conventions used throughout the crate:
//!
//! * coordinates are meters in a fixed world frame;
//! * azimuths are radians, counter-clockwise from the +x axis, normalized to
//!   `[0, 2π)`; degrees appear only at I/O boundaries;
//! * wall segments are closed: a hit exactly on an endpoint is a hit, so
//!   walls meeting at a corner do not leak rays through the joint.

use std::f64::consts::TAU;
use std::fmt;

/// Coincidence tolerance for points and segment endpoints, in meters.
pub const GEOM_EPS: f64 = 1e-9;

/// Tolerance on the dimensionless parameter of a segment intersection.
pub const PARAM_TOL: f64 = 1e-12;

/// Normalizes an angle in radians to `[0, 2π)`.
pub fn normalize_azimuth(theta: f64) -> f64 {
    let mut t = theta % TAU;
    if t < 0.0 {
        t += TAU;
    }
    if t >= TAU {
        t = 0.0;
    }
    t
}

/// A position in the floor plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance_to(&self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }

    /// Azimuth of the direction from `self` towards `other`, in `[0, 2π)`.
    pub fn azimuth_to(&self, other: Point) -> f64 {
        normalize_azimuth((other.y - self.y).atan2(other.x - self.x))
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A wall segment. Transmissive walls let rays pass (glass, drywall);
/// opaque walls block them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wall {
    pub a: Point,
    pub b: Point,
    pub transmissive: bool,
}

impl Wall {
    /// An opaque wall from `a` to `b`.
    pub const fn new(a: Point, b: Point) -> Self {
        Self {
            a,
            b,
            transmissive: false,
        }
    }

    /// A transmissive wall from `a` to `b`.
    pub const fn transmissive(a: Point, b: Point) -> Self {
        Self {
            a,
            b,
            transmissive: true,
        }
    }

    pub fn length(&self) -> f64 {
        self.a.distance_to(self.b)
    }

    /// Endpoints finite and length above [`GEOM_EPS`].
    pub fn is_valid(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.length() > GEOM_EPS
    }

    fn validate(&self) -> Result<(), GeometryError> {
        if !self.a.is_finite() || !self.b.is_finite() {
            return Err(GeometryError::NonFiniteWall);
        }
        if self.length() <= GEOM_EPS {
            return Err(GeometryError::DegenerateWall);
        }
        Ok(())
    }
}

/// A directed half-line: origin plus an azimuth in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: Point,
    pub azimuth: f64,
}

impl Ray {
    /// Builds a ray, normalizing the azimuth to `[0, 2π)`.
    pub fn new(origin: Point, azimuth: f64) -> Self {
        Self {
            origin,
            azimuth: normalize_azimuth(azimuth),
        }
    }

    /// Unit direction vector.
    pub fn direction(&self) -> (f64, f64) {
        (self.azimuth.cos(), self.azimuth.sin())
    }

    /// Point reached after travelling `distance` meters along the ray.
    pub fn point_at(&self, distance: f64) -> Point {
        let (dx, dy) = self.direction();
        Point::new(self.origin.x + distance * dx, self.origin.y + distance * dy)
    }
}

/// A ray-wall intersection.
#[derive(Debug, Clone, Copy)]
pub struct Hit {
    /// The wall that was struck.
    pub wall: Wall,
    /// Index of that wall in the map it came from.
    pub wall_index: usize,
    /// Intersection point, on the wall segment.
    pub point: Point,
    /// Distance from the ray origin, strictly positive.
    pub distance: f64,
    /// Which half-plane the ray origin occupies relative to the wall line
    /// (`+1`/`-1`, or `0` when the origin sits on the line).
    pub side: i8,
}

/// Errors from the geometric kernel. A degenerate wall signals an invalid
/// map upstream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryError {
    DegenerateWall,
    NonFiniteWall,
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::DegenerateWall => write!(f, "degenerate wall (length below epsilon)"),
            GeometryError::NonFiniteWall => write!(f, "wall has a non-finite coordinate"),
        }
    }
}

impl std::error::Error for GeometryError {}

/// Sign of the cross product `(b - a) × (p - a)`: which side of the wall
/// line `p` lies on. Returns `0` when `p` is collinear within
/// `GEOM_EPS · |b - a|`.
///
/// ```
/// use mapat::geometry::{side_of, Point, Wall};
/// let w = Wall::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0));
/// assert_eq!(side_of(&w, Point::new(0.5, 1.0)), 1);
/// assert_eq!(side_of(&w, Point::new(0.5, -1.0)), -1);
/// assert_eq!(side_of(&w, Point::new(2.0, 0.0)), 0);
/// ```
pub fn side_of(w: &Wall, p: Point) -> i8 {
    let ex = w.b.x - w.a.x;
    let ey = w.b.y - w.a.y;
    let cross = ex * (p.y - w.a.y) - ey * (p.x - w.a.x);
    let scale = (ex * ex + ey * ey).sqrt();
    if cross.abs() < GEOM_EPS * scale {
        0
    } else if cross > 0.0 {
        1
    } else {
        -1
    }
}

/// Mirror image of `p` across the infinite line through the wall's
/// endpoints. Applying it twice returns the original point.
pub fn mirror_point(p: Point, w: &Wall) -> Result<Point, GeometryError> {
    w.validate()?;
    let ex = w.b.x - w.a.x;
    let ey = w.b.y - w.a.y;
    let len2 = ex * ex + ey * ey;
    let t = ((p.x - w.a.x) * ex + (p.y - w.a.y) * ey) / len2;
    let foot_x = w.a.x + t * ex;
    let foot_y = w.a.y + t * ey;
    Ok(Point::new(2.0 * foot_x - p.x, 2.0 * foot_y - p.y))
}

/// Specular continuation of a ray at a hit: the new origin is the hit point
/// and the direction keeps its component along the wall while the component
/// along the wall normal is negated, so incidence equals reflection.
pub fn reflect_ray(r: &Ray, h: &Hit) -> Ray {
    let (dx, dy) = r.direction();
    let ex = h.wall.b.x - h.wall.a.x;
    let ey = h.wall.b.y - h.wall.a.y;
    let len = (ex * ex + ey * ey).sqrt();
    let tx = ex / len;
    let ty = ey / len;
    let along = dx * tx + dy * ty;
    let rx = 2.0 * along * tx - dx;
    let ry = 2.0 * along * ty - dy;
    Ray::new(h.point, ry.atan2(rx))
}

// Solves origin + t·dir = a + u·(b - a). Returns (t, u) unless near-parallel.
fn ray_wall_solve(origin: Point, dx: f64, dy: f64, w: &Wall) -> Option<(f64, f64)> {
    let ex = w.b.x - w.a.x;
    let ey = w.b.y - w.a.y;
    let denom = dx * ey - dy * ex;
    let e_len = (ex * ex + ey * ey).sqrt();
    if denom.abs() <= PARAM_TOL * e_len {
        return None;
    }
    let ax = w.a.x - origin.x;
    let ay = w.a.y - origin.y;
    let t = (ax * ey - ay * ex) / denom;
    let u = (ax * dy - ay * dx) / denom;
    Some((t, u))
}

/// Intersection of a ray with one wall, if any, at distance strictly greater
/// than `min_distance`. The wall segment is closed: `u ∈ [0, 1]` within
/// [`PARAM_TOL`].
pub fn intersect_ray_wall(
    r: &Ray,
    w: &Wall,
    wall_index: usize,
    min_distance: f64,
) -> Option<Hit> {
    let (dx, dy) = r.direction();
    let (t, u) = ray_wall_solve(r.origin, dx, dy, w)?;
    if t <= min_distance || !(-PARAM_TOL..=1.0 + PARAM_TOL).contains(&u) {
        return None;
    }
    Some(Hit {
        wall: *w,
        wall_index,
        point: r.point_at(t),
        distance: t,
        side: side_of(w, r.origin),
    })
}

/// Nearest wall struck by the ray, ignoring `exclude` (the wall just
/// interacted with) and anything closer than [`GEOM_EPS`].
pub fn first_hit(r: &Ray, walls: &[Wall], exclude: Option<usize>) -> Option<Hit> {
    first_hit_beyond(r, walls, exclude, GEOM_EPS)
}

/// [`first_hit`] with an explicit minimum hit distance, used by the
/// back-propagation walk to suppress degenerate re-hits at corners.
pub fn first_hit_beyond(
    r: &Ray,
    walls: &[Wall],
    exclude: Option<usize>,
    min_distance: f64,
) -> Option<Hit> {
    walls
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != exclude)
        .filter_map(|(i, w)| intersect_ray_wall(r, w, i, min_distance))
        .min_by(|a, b| a.distance.total_cmp(&b.distance))
}

/// Crossing of the open segment `p`–`q` with a wall: the distance from `p`,
/// excluding crossings within [`GEOM_EPS`] of either segment endpoint. The
/// wall itself is closed, so grazing a wall endpoint mid-segment counts.
pub fn segment_wall_crossing(p: Point, q: Point, w: &Wall) -> Option<f64> {
    let len = p.distance_to(q);
    if len <= 2.0 * GEOM_EPS {
        return None;
    }
    let dx = (q.x - p.x) / len;
    let dy = (q.y - p.y) / len;
    let (t, u) = ray_wall_solve(p, dx, dy, w)?;
    if t <= GEOM_EPS || t >= len - GEOM_EPS || !(-PARAM_TOL..=1.0 + PARAM_TOL).contains(&u) {
        return None;
    }
    Some(t)
}

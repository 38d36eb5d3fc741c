//! Map-assisted position location: back-propagate each measured multipath
//! component through the floor plan, branch into reflection and transmission
//! hypotheses at every wall, cluster the surviving branch endpoints, and
//! report the centroid of the cluster supported by the most MPCs.
//!
//! A single line-of-sight MPC pins the user exactly. A single NLOS MPC is
//! ambiguous: its branches end at the true position and at one or more
//! mirror-image ghosts, and the receiver cannot tell which is which. With
//! two or more MPCs the true position accumulates one candidate per MPC
//! while ghosts scatter, so majority wins. Majorities are counted per
//! distinct MPC, not per candidate, so one MPC whose branches land close
//! together cannot vote twice.

use std::fmt;

use crate::geometry::{first_hit_beyond, reflect_ray, GeometryError, Point, Ray};
use crate::map::FloorMap;
use crate::tracer::{Interaction, InteractionKind, Mpc};
use crate::SPEED_OF_LIGHT;

/// Back-propagation and clustering configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct MapAtParams {
    /// Interaction budget per branch (reflections plus transmissions).
    pub max_interactions: usize,
    /// Single-linkage grouping radius for candidate locations, meters.
    pub cluster_radius_m: f64,
    /// Minimum leg length between consecutive wall interactions, meters;
    /// suppresses degenerate re-hits at corners.
    pub min_leg_m: f64,
}

impl Default for MapAtParams {
    fn default() -> Self {
        Self {
            max_interactions: 3,
            cluster_radius_m: 0.5,
            min_leg_m: 1e-3,
        }
    }
}

/// One hypothesized user position, produced by back-propagating one MPC
/// under one reflection/transmission hypothesis sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateLocation {
    pub point: Point,
    /// Index of the originating MPC in the caller's list.
    pub mpc_index: usize,
    /// Hypothesized wall interactions, in back-propagation order.
    pub interactions: Vec<Interaction>,
    /// Distance actually traversed, `c · tof` of the originating MPC.
    pub residual_path_m: f64,
}

/// A group of mutually close candidate locations.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub members: Vec<CandidateLocation>,
    /// Arithmetic mean of the member points.
    pub centroid: Point,
    /// Number of distinct originating MPCs among the members.
    pub distinct_mpc_count: usize,
}

impl Cluster {
    /// Mean member-to-centroid distance; the tie-break figure of merit.
    pub fn mean_spread_m(&self) -> f64 {
        let sum: f64 = self
            .members
            .iter()
            .map(|m| m.point.distance_to(self.centroid))
            .sum();
        sum / self.members.len() as f64
    }

    fn min_mpc_index(&self) -> usize {
        self.members
            .iter()
            .map(|m| m.mpc_index)
            .min()
            .expect("clusters are non-empty")
    }
}

/// The position fix and its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionEstimate {
    /// Centroid of the winning cluster.
    pub point: Point,
    /// Distinct MPCs supporting the winning cluster.
    pub support: usize,
    /// Total candidate locations across all clusters.
    pub n_candidates_total: usize,
    /// True when the top two clusters had equal support; the winner was
    /// then chosen by smaller spread, then by earliest-arriving MPC.
    pub tie: bool,
    /// All clusters, winner first, for diagnostics.
    pub clusters: Vec<Cluster>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LocateError {
    /// An MPC has a non-positive time of flight.
    NonPositiveTof,
    /// The base station lies outside the map bounds.
    OutOfBounds(Point),
    /// Every hypothesis branch left the map or overran its interaction
    /// budget: the user cannot be located from the given MPCs.
    NoCandidates,
    Geometry(GeometryError),
}

impl fmt::Display for LocateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocateError::NonPositiveTof => write!(f, "mpc has non-positive time of flight"),
            LocateError::OutOfBounds(p) => write!(f, "bs at {p} is outside the map bounds"),
            LocateError::NoCandidates => write!(f, "no candidate locations"),
            LocateError::Geometry(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for LocateError {}

impl From<GeometryError> for LocateError {
    fn from(e: GeometryError) -> Self {
        LocateError::Geometry(e)
    }
}

/// Back-propagates one MPC from the base station: launches a ray along the
/// arrival azimuth with distance budget `c · tof`, branches into reflection
/// and transmission at every wall met with budget and interactions to
/// spare, and collects a candidate wherever a branch exhausts its budget
/// inside the map bounds. At most `2^max_interactions` candidates result.
pub fn generate_candidates(
    map: &FloorMap,
    bs: Point,
    mpc: &Mpc,
    mpc_index: usize,
    params: &MapAtParams,
) -> Result<Vec<CandidateLocation>, LocateError> {
    if !mpc.tof.is_finite() || mpc.tof <= 0.0 {
        return Err(LocateError::NonPositiveTof);
    }
    if !map.in_bounds(bs) {
        return Err(LocateError::OutOfBounds(bs));
    }
    let budget = mpc.tof * SPEED_OF_LIGHT;
    let mut out = Vec::new();
    let mut hypothesis = Vec::new();
    walk(
        map,
        Ray::new(bs, mpc.aoa_at_bs),
        budget,
        None,
        &mut hypothesis,
        &mut Emit {
            map,
            mpc_index,
            budget,
            params,
            out: &mut out,
        },
    );
    Ok(out)
}

struct Emit<'a> {
    map: &'a FloorMap,
    mpc_index: usize,
    budget: f64,
    params: &'a MapAtParams,
    out: &'a mut Vec<CandidateLocation>,
}

fn walk(
    map: &FloorMap,
    ray: Ray,
    remaining: f64,
    exclude: Option<usize>,
    hypothesis: &mut Vec<Interaction>,
    emit: &mut Emit<'_>,
) {
    let hit = first_hit_beyond(&ray, map.walls(), exclude, emit.params.min_leg_m);
    match hit {
        Some(h) if h.distance < remaining => {
            if hypothesis.len() >= emit.params.max_interactions {
                // Budget left but no interactions: the branch dies.
                return;
            }
            let left = remaining - h.distance;
            hypothesis.push(Interaction {
                wall_index: h.wall_index,
                kind: InteractionKind::Reflection,
            });
            walk(map, reflect_ray(&ray, &h), left, Some(h.wall_index), hypothesis, emit);
            hypothesis.pop();
            hypothesis.push(Interaction {
                wall_index: h.wall_index,
                kind: InteractionKind::Transmission,
            });
            walk(
                map,
                Ray::new(h.point, ray.azimuth),
                left,
                Some(h.wall_index),
                hypothesis,
                emit,
            );
            hypothesis.pop();
        }
        _ => {
            // Budget exhausts before the next wall.
            let endpoint = ray.point_at(remaining);
            if emit.map.in_bounds(endpoint) {
                emit.out.push(CandidateLocation {
                    point: endpoint,
                    mpc_index: emit.mpc_index,
                    interactions: hypothesis.clone(),
                    residual_path_m: emit.budget,
                });
            }
        }
    }
}

/// Single-linkage grouping: candidates within `cluster_radius_m` of each
/// other are connected, clusters are the connected components. Output is
/// ordered by descending distinct-MPC support, then ascending centroid.
pub fn cluster_candidates(
    candidates: Vec<CandidateLocation>,
    params: &MapAtParams,
) -> Vec<Cluster> {
    cluster_candidates_counted(candidates, params).0
}

/// [`cluster_candidates`] plus the number of pairwise distance evaluations
/// performed, which is at most `n·(n-1)/2`.
pub fn cluster_candidates_counted(
    candidates: Vec<CandidateLocation>,
    params: &MapAtParams,
) -> (Vec<Cluster>, usize) {
    let n = candidates.len();
    if n == 0 {
        return (Vec::new(), 0);
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    let mut evaluations = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            evaluations += 1;
            if candidates[i].point.distance_to(candidates[j].point) <= params.cluster_radius_m {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[rj] = ri;
                }
            }
        }
    }

    let mut groups: Vec<Vec<CandidateLocation>> = Vec::new();
    let mut group_of_root: Vec<Option<usize>> = vec![None; n];
    for (i, cand) in candidates.into_iter().enumerate() {
        let root = find(&mut parent, i);
        match group_of_root[root] {
            Some(g) => groups[g].push(cand),
            None => {
                group_of_root[root] = Some(groups.len());
                groups.push(vec![cand]);
            }
        }
    }

    let mut clusters: Vec<Cluster> = groups
        .into_iter()
        .map(|members| {
            let inv = 1.0 / members.len() as f64;
            let centroid = Point::new(
                members.iter().map(|m| m.point.x).sum::<f64>() * inv,
                members.iter().map(|m| m.point.y).sum::<f64>() * inv,
            );
            let mut indices: Vec<usize> = members.iter().map(|m| m.mpc_index).collect();
            indices.sort_unstable();
            indices.dedup();
            Cluster {
                members,
                centroid,
                distinct_mpc_count: indices.len(),
            }
        })
        .collect();
    clusters.sort_by(|a, b| {
        b.distinct_mpc_count
            .cmp(&a.distinct_mpc_count)
            .then_with(|| a.centroid.x.total_cmp(&b.centroid.x))
            .then_with(|| a.centroid.y.total_cmp(&b.centroid.y))
    });
    (clusters, evaluations)
}

/// Picks the winning cluster (maximum distinct-MPC support, ties broken by
/// smaller mean spread and then by earliest-arriving, smallest, MPC index)
/// and returns its centroid as the fix.
pub fn estimate_position(clusters: Vec<Cluster>) -> Result<PositionEstimate, LocateError> {
    if clusters.is_empty() {
        return Err(LocateError::NoCandidates);
    }
    let n_candidates_total = clusters.iter().map(|c| c.members.len()).sum();
    let mut order: Vec<usize> = (0..clusters.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (&clusters[i], &clusters[j]);
        b.distinct_mpc_count
            .cmp(&a.distinct_mpc_count)
            .then_with(|| a.mean_spread_m().total_cmp(&b.mean_spread_m()))
            .then_with(|| a.min_mpc_index().cmp(&b.min_mpc_index()))
            .then(i.cmp(&j))
    });
    let winner = &clusters[order[0]];
    let tie = order.len() > 1
        && clusters[order[1]].distinct_mpc_count == winner.distinct_mpc_count;
    let estimate = PositionEstimate {
        point: winner.centroid,
        support: winner.distinct_mpc_count,
        n_candidates_total,
        tie,
        clusters: {
            let mut sorted = Vec::with_capacity(order.len());
            let mut by_index: Vec<Option<Cluster>> = clusters.into_iter().map(Some).collect();
            for i in order {
                sorted.push(by_index[i].take().expect("each index taken once"));
            }
            sorted
        },
    };
    Ok(estimate)
}

/// End-to-end fix: candidates for every MPC, single-linkage clustering,
/// majority-cluster centroid. Candidate generation is order-independent;
/// permuting `mpcs` never changes the estimate point.
pub fn locate(
    map: &FloorMap,
    bs: Point,
    mpcs: &[Mpc],
    params: &MapAtParams,
) -> Result<PositionEstimate, LocateError> {
    let mut all = Vec::new();
    for (i, mpc) in mpcs.iter().enumerate() {
        all.extend(generate_candidates(map, bs, mpc, i, params)?);
    }
    if all.is_empty() {
        return Err(LocateError::NoCandidates);
    }
    estimate_position(cluster_candidates(all, params))
}

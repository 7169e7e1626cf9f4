//! Altitude-dependent tiling of the hexagonal target area.
//!
//! At altitude `H` the UAV footprint is a circle of radius `r = H tan(θ/2)`.
//! The covered disc of radius `R_cov` is split into `M` concentric annuli of
//! width `2r`; annulus `m` carries `w_m` footprint circles whose centers sit
//! on the ring of radius `R_cov - (2m - 1) r`. When the annuli leave a hole
//! at the origin one more footprint is placed there.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Guard for `floor` of quotients that land a few ulps below an integer.
const FLOOR_EPS: f64 = 1e-9;

fn guarded_floor(x: f64) -> usize {
    (x + FLOOR_EPS * x.abs().max(1.0)).floor() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Hexagonal target area. `cov_radius` is the circumradius; one vertex
/// lies on the positive x axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetArea {
    cov_radius: f64,
}

impl TargetArea {
    pub fn new(cov_radius: f64) -> Result<Self> {
        if !(cov_radius > 0.0 && cov_radius.is_finite()) {
            return Err(Error::Domain(format!(
                "coverage radius must be positive, got {cov_radius}"
            )));
        }
        Ok(TargetArea { cov_radius })
    }

    pub fn cov_radius(&self) -> f64 {
        self.cov_radius
    }

    pub fn contains(&self, p: Point) -> bool {
        let r = self.cov_radius;
        let s3 = 3f64.sqrt();
        let (ax, ay) = (p.x.abs(), p.y.abs());
        ay <= 0.5 * s3 * r && s3 * ax + ay <= s3 * r
    }
}

/// A backscatter node on the ground.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub subregion: Option<usize>,
    pub zeta: Option<f64>,
}

impl Node {
    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

/// One annulus of the tiling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingGeometry {
    /// 1-based disc index `m`.
    pub index: usize,
    pub radius: f64,
    pub beta_rad: f64,
    pub w: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TilingPlan {
    pub altitude: f64,
    pub subregion_radius: f64,
    pub disc_count: usize,
    pub rings: Vec<RingGeometry>,
    pub has_center_subregion: bool,
    pub total_subregions: usize,
    /// Visit order; this is the trajectory.
    pub centers: Vec<Point>,
}

impl TilingPlan {
    pub fn ring_counts(&self) -> Vec<usize> {
        self.rings.iter().map(|r| r.w).collect()
    }

    /// `Σ w_m` without the optional center sub-region.
    pub fn ring_sum(&self) -> usize {
        self.rings.iter().map(|r| r.w).sum()
    }
}

/// `H tan(θ/2)`.
pub fn sub_region_radius(altitude: f64, theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::Domain(format!(
            "illumination angle must lie in (0, π), got {theta}"
        )));
    }
    if !(altitude > 0.0) {
        return Err(Error::Domain(format!(
            "altitude must be positive, got {altitude}"
        )));
    }
    Ok(altitude * (theta / 2.0).tan())
}

pub fn disc_count(r: f64, cov_radius: f64) -> Result<usize> {
    if !(r > 0.0) || r > cov_radius {
        return Err(Error::Domain(format!(
            "sub-region radius {r} must lie in (0, {cov_radius}]"
        )));
    }
    if r <= cov_radius / 2.0 {
        Ok(guarded_floor(cov_radius / (2.0 * r)))
    } else {
        Ok(1)
    }
}

/// Geometry of disc `m` (1-based): the angular step between neighbouring
/// footprints and how many of them fit on the ring.
pub fn ring_geometry(m: usize, r: f64, cov_radius: f64) -> Result<RingGeometry> {
    if m == 0 {
        return Err(Error::Domain("disc index starts at 1".into()));
    }
    let ring_radius = cov_radius - (2 * m - 1) as f64 * r;
    if !(ring_radius > 0.0) || r > ring_radius {
        return Err(Error::DegenerateRing {
            ring: m,
            radius: r,
            ring_radius,
        });
    }
    let beta = 2.0 * (r / ring_radius).asin();
    Ok(RingGeometry {
        index: m,
        radius: ring_radius,
        beta_rad: beta,
        w: guarded_floor(TAU / beta),
    })
}

/// Tiling at one altitude. Centers are ordered outermost ring first,
/// counterclockwise from angle 0, with the center sub-region last.
pub fn build_tiling(
    altitude: f64,
    theta: f64,
    area: &TargetArea,
    w_max: usize,
) -> Result<TilingPlan> {
    let r = sub_region_radius(altitude, theta)?;
    let cov = area.cov_radius();

    // Footprint wider than half the area: one hover at the origin.
    if r > cov / 2.0 {
        return finish(altitude, r, 1, Vec::new(), true, w_max);
    }

    let disc_count = disc_count(r, cov)?;
    let rings = (1..=disc_count)
        .map(|m| ring_geometry(m, r, cov))
        .collect::<Result<Vec<_>>>()?;
    let hole = cov - 2.0 * disc_count as f64 * r;
    let center = disc_count >= 2 && hole > FLOOR_EPS * cov;
    finish(altitude, r, disc_count, rings, center, w_max)
}

fn finish(
    altitude: f64,
    r: f64,
    disc_count: usize,
    rings: Vec<RingGeometry>,
    has_center_subregion: bool,
    w_max: usize,
) -> Result<TilingPlan> {
    let mut centers = Vec::new();
    for ring in &rings {
        let step = TAU / ring.w as f64;
        centers.extend((0..ring.w).map(|k| {
            let phi = k as f64 * step;
            Point::new(ring.radius * phi.cos(), ring.radius * phi.sin())
        }));
    }
    if has_center_subregion {
        centers.push(Point::ORIGIN);
    }
    let total = centers.len();
    if total == 0 || total > w_max {
        return Err(Error::Infeasible {
            altitude,
            subregions: total,
            w_max,
        });
    }
    Ok(TilingPlan {
        altitude,
        subregion_radius: r,
        disc_count,
        rings,
        has_center_subregion,
        total_subregions: total,
        centers,
    })
}

/// `n` nodes i.i.d. uniform over the hexagon, by rejection from the
/// circumscribed disc.
pub fn place_nodes(n: usize, area: &TargetArea, seed: u64) -> Vec<Node> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = area.cov_radius();
    let mut nodes = Vec::with_capacity(n);
    while nodes.len() < n {
        let rho = r * rng.random::<f64>().sqrt();
        let phi = TAU * rng.random::<f64>();
        let p = Point::new(rho * phi.cos(), rho * phi.sin());
        if area.contains(p) {
            nodes.push(Node {
                id: nodes.len(),
                x: p.x,
                y: p.y,
                subregion: None,
                zeta: None,
            });
        }
    }
    nodes
}

/// Assign every node to its nearest sub-region center (lowest index on
/// ties). Returns the per-sub-region counts `N_l`.
pub fn assign_nodes(nodes: &mut [Node], plan: &TilingPlan) -> Vec<usize> {
    let mut counts = vec![0; plan.total_subregions];
    for node in nodes.iter_mut() {
        let p = node.position();
        let (best, _) = plan
            .centers
            .iter()
            .enumerate()
            .map(|(l, c)| (l, p.dist(c)))
            .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
        node.subregion = Some(best);
        counts[best] += 1;
    }
    counts
}

/// Split `n` as evenly as possible over `w` sub-regions; the first
/// sub-regions in visit order (outer rings) take the remainder.
pub fn balanced_counts(n: usize, w: usize) -> Vec<usize> {
    let (q, rem) = (n / w, n % w);
    (0..w).map(|l| q + usize::from(l < rem)).collect()
}

/// Capacitated nearest-center assignment: pairs are taken in order of
/// increasing distance and a node joins a sub-region while it has room.
/// `quota` must sum to `nodes.len()`.
pub fn assign_nodes_balanced(nodes: &mut [Node], plan: &TilingPlan, quota: &[usize]) -> Vec<usize> {
    assert_eq!(quota.len(), plan.total_subregions);
    assert_eq!(quota.iter().sum::<usize>(), nodes.len());
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(nodes.len() * quota.len());
    for (i, node) in nodes.iter().enumerate() {
        let p = node.position();
        for (l, c) in plan.centers.iter().enumerate() {
            pairs.push((p.dist(c), i, l));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut room = quota.to_vec();
    let mut counts = vec![0; quota.len()];
    for node in nodes.iter_mut() {
        node.subregion = None;
    }
    for (_, i, l) in pairs {
        if nodes[i].subregion.is_none() && room[l] > 0 {
            nodes[i].subregion = Some(l);
            room[l] -= 1;
            counts[l] += 1;
        }
    }
    counts
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub x: f64,
    pub y: f64,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlightSchedule {
    pub waypoints: Vec<Waypoint>,
    pub subslot_duration: f64,
    pub total_flight_time: f64,
}

pub fn flight_schedule(plan: &TilingPlan, subslot: f64) -> Result<FlightSchedule> {
    if !(subslot > 0.0) {
        return Err(Error::Domain(format!(
            "sub-slot duration must be positive, got {subslot}"
        )));
    }
    let waypoints = plan
        .centers
        .iter()
        .map(|c| Waypoint {
            x: c.x,
            y: c.y,
            h: plan.altitude,
        })
        .collect::<Vec<_>>();
    Ok(FlightSchedule {
        total_flight_time: waypoints.len() as f64 * subslot,
        waypoints,
        subslot_duration: subslot,
    })
}

/// 3-D node-to-UAV distance.
pub fn distance(node: Point, wp: &Waypoint) -> f64 {
    let (dx, dy) = (node.x - wp.x, node.y - wp.y);
    (wp.h * wp.h + dx * dx + dy * dy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE_ALTITUDES: [f64; 10] = [
        86.71, 80.71, 72.21, 64.21, 58.21, 52.71, 48.21, 44.21, 43.71, 43.21,
    ];

    fn deg(d: f64) -> f64 {
        d.to_radians()
    }

    fn area() -> TargetArea {
        TargetArea::new(100.0).unwrap()
    }

    #[test]
    fn radius_examples() {
        assert!((sub_region_radius(86.71, deg(60.0)).unwrap() - 50.06).abs() < 5e-3);
        assert!((sub_region_radius(100.0, deg(90.0)).unwrap() - 100.0).abs() < 1e-12);
        assert!((sub_region_radius(43.21, deg(60.0)).unwrap() - 24.95).abs() < 5e-3);
        assert!(sub_region_radius(10.0, PI).is_err());
        assert!(sub_region_radius(10.0, 0.0).is_err());
    }

    #[test]
    fn disc_count_examples() {
        assert_eq!(disc_count(50.06, 100.0).unwrap(), 1);
        assert_eq!(disc_count(24.95, 100.0).unwrap(), 2);
        assert_eq!(disc_count(50.0, 100.0).unwrap(), 1);
        assert!(disc_count(100.5, 100.0).is_err());
    }

    #[test]
    fn ring_examples() {
        let g = ring_geometry(1, 46.60, 100.0).unwrap();
        assert_eq!(g.w, 2);
        assert!((g.beta_rad.to_degrees() - 121.7).abs() < 0.2);
        assert_eq!(ring_geometry(1, 33.61, 100.0).unwrap().w, 5);
        let g2 = ring_geometry(2, 24.95, 100.0).unwrap();
        assert!((g2.radius - 25.15).abs() < 1e-9);
        assert_eq!(g2.w, 2);
        assert!(matches!(
            ring_geometry(1, 60.0, 100.0),
            Err(Error::DegenerateRing { .. })
        ));
    }

    #[test]
    fn table_altitudes_give_expected_counts() {
        let want = [1, 2, 3, 4, 5, 6, 7, 8, 9, 12];
        for (h, w) in TABLE_ALTITUDES.iter().zip(want) {
            let plan = build_tiling(*h, deg(60.0), &area(), 12).unwrap();
            assert_eq!(plan.total_subregions, w, "H = {h}");
        }
        let last = build_tiling(43.21, deg(60.0), &area(), 12).unwrap();
        assert_eq!(last.ring_counts(), vec![9, 2]);
        assert_eq!(last.ring_sum(), 11);
        assert!(last.has_center_subregion);
        assert_eq!(*last.centers.last().unwrap(), Point::ORIGIN);
    }

    #[test]
    fn w_max_is_enforced() {
        assert!(matches!(
            build_tiling(43.21, deg(60.0), &area(), 11),
            Err(Error::Infeasible { subregions: 12, .. })
        ));
    }

    #[test]
    fn single_hover_at_top_altitude() {
        let plan = build_tiling(86.71, deg(60.0), &area(), 12).unwrap();
        assert_eq!(plan.centers, vec![Point::ORIGIN]);
        assert!(plan.rings.is_empty());
    }

    #[test]
    fn centers_sit_on_their_rings() {
        let plan = build_tiling(43.21, deg(60.0), &area(), 12).unwrap();
        let mut k = 0;
        for ring in &plan.rings {
            for c in &plan.centers[k..k + ring.w] {
                assert!((c.norm() - ring.radius).abs() <= 1e-9 * ring.radius);
                assert!(c.norm() <= 100.0 - plan.subregion_radius + 1e-9);
            }
            k += ring.w;
        }
    }

    #[test]
    fn placement_is_deterministic_and_inside() {
        let a = place_nodes(40, &area(), 7);
        let b = place_nodes(40, &area(), 7);
        assert_eq!(a, b);
        assert!(a.iter().all(|n| area().contains(n.position())));
        assert_eq!(place_nodes(1, &area(), 3).len(), 1);
    }

    #[test]
    fn placement_is_centered() {
        let nodes = place_nodes(100_000, &area(), 11);
        let n = nodes.len() as f64;
        let mx = nodes.iter().map(|n| n.x).sum::<f64>() / n;
        let my = nodes.iter().map(|n| n.y).sum::<f64>() / n;
        assert!(mx.abs() < 1.0 && my.abs() < 1.0, "mean = ({mx}, {my})");
    }

    #[test]
    fn single_subregion_takes_everyone() {
        let plan = build_tiling(86.71, deg(60.0), &area(), 12).unwrap();
        let mut nodes = place_nodes(25, &area(), 1);
        assert_eq!(assign_nodes(&mut nodes, &plan), vec![25]);
    }

    #[test]
    fn node_on_center_is_assigned_there() {
        let plan = build_tiling(52.71, deg(60.0), &area(), 12).unwrap();
        let c = plan.centers[3];
        let mut nodes = vec![Node { id: 0, x: c.x, y: c.y, subregion: None, zeta: None }];
        assign_nodes(&mut nodes, &plan);
        assert_eq!(nodes[0].subregion, Some(3));
    }

    #[test]
    fn mean_count_over_seeds() {
        // H = 44.21 gives W = 8, so N = 40 averages 5 per sub-region.
        let plan = build_tiling(44.21, deg(60.0), &area(), 12).unwrap();
        assert_eq!(plan.total_subregions, 8);
        let seeds = 400;
        let mut total = [0usize; 8];
        for s in 0..seeds {
            let mut nodes = place_nodes(40, &area(), s);
            for (t, c) in total.iter_mut().zip(assign_nodes(&mut nodes, &plan)) {
                *t += c;
            }
        }
        let mean = total.iter().sum::<usize>() as f64 / (8 * seeds) as f64;
        assert!((mean - 5.0).abs() < 1e-12);
    }

    #[test]
    fn balanced_assignment_meets_quota() {
        let plan = build_tiling(58.21, deg(60.0), &area(), 12).unwrap();
        let quota = balanced_counts(40, plan.total_subregions);
        assert_eq!(quota, vec![8; 5]);
        let mut nodes = place_nodes(40, &area(), 5);
        assert_eq!(assign_nodes_balanced(&mut nodes, &plan, &quota), quota);
        assert!(nodes.iter().all(|n| n.subregion.is_some()));
        assert_eq!(balanced_counts(40, 12), vec![4, 4, 4, 4, 3, 3, 3, 3, 3, 3, 3, 3]);
    }

    #[test]
    fn schedule_examples() {
        let top = build_tiling(86.71, deg(60.0), &area(), 12).unwrap();
        let s = flight_schedule(&top, 5.0).unwrap();
        assert_eq!(s.total_flight_time, 5.0);
        assert_eq!(s.waypoints, vec![Waypoint { x: 0.0, y: 0.0, h: 86.71 }]);
        let six = build_tiling(52.71, deg(60.0), &area(), 12).unwrap();
        assert_eq!(flight_schedule(&six, 1.0).unwrap().total_flight_time, 6.0);
        let twelve = build_tiling(43.21, deg(60.0), &area(), 12).unwrap();
        let s = flight_schedule(&twelve, 2.0).unwrap();
        assert_eq!((s.total_flight_time, s.waypoints.len()), (24.0, 12));
        assert!(flight_schedule(&twelve, 0.0).is_err());
    }

    #[test]
    fn distance_examples() {
        let wp = Waypoint { x: 0.0, y: 0.0, h: 50.0 };
        assert_eq!(distance(Point::ORIGIN, &wp), 50.0);
        let wp = Waypoint { x: 0.0, y: 0.0, h: 12.0 };
        assert_eq!(distance(Point::new(3.0, 4.0), &wp), 13.0);
    }
}

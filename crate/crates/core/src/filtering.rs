//! Nested families of convex bodies with empty intersection, their limit
//! fields, and the common point at infinity found by the gradient flow.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::circum::circumcenter;
use crate::error::{capability, usage, Error, Result};
use crate::field::{absolute_gradient_with, ProbeSettings, ScalarField};
use crate::flow::{run_flow_with, velocity_of_escape_with, EscapeReport, FlowSettings};
use crate::math::{self, sqrt, SplitMix, PI};
use crate::space::{BoundaryDirection, Chart, ConvexBody, EdgeInterval, HalfSpace, MetricTree, Point, Space};
use crate::tolerance::ToleranceProfile;

/// A decreasing chain `X_1 ⊇ X_2 ⊇ ...` with a basepoint `o`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestedFamily {
    pub space: Space,
    pub bodies: Vec<ConvexBody>,
    pub basepoint: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestingReport {
    pub samples: usize,
    /// Largest `d(x, project(X_i, x))` over samples `x` of `X_{i+1}`.
    pub max_violation: f64,
    pub nested: bool,
}

impl NestedFamily {
    pub fn new(space: Space, bodies: Vec<ConvexBody>, basepoint: Point) -> Result<Self> {
        space.validate()?;
        if bodies.is_empty() {
            return Err(usage("a family needs at least one body"));
        }
        for b in &bodies {
            b.validate(&space)?;
        }
        space.check_point(&basepoint, 1e-9)?;
        Ok(Self { space, bodies, basepoint })
    }

    /// `{x_1 >= t}` for each offset `t`.
    pub fn parallel_half_spaces(dim: usize, offsets: &[f64]) -> Result<Self> {
        let e1 = unit(dim, 0);
        let bodies = offsets.iter().map(|&t| ConvexBody::HalfSpace(HalfSpace::at_least(&e1, t))).collect();
        Self::new(Space::euclidean(dim), bodies, Point::Coords(vec![0.0; dim]))
    }

    /// `{<x, n_j> >= t for every normal n_j}`: translates of one polyhedral
    /// cone.
    pub fn translated_cone(normals: &[Vec<f64>], offsets: &[f64]) -> Result<Self> {
        let dim = normals.first().map(|n| n.len()).ok_or_else(|| usage("no normals"))?;
        let bodies = offsets
            .iter()
            .map(|&t| ConvexBody::polyhedron(normals.iter().map(|n| HalfSpace::at_least(n, t)).collect()))
            .collect();
        Self::new(Space::euclidean(dim), bodies, Point::Coords(vec![0.0; dim]))
    }

    /// `X_i = ∩_{j <= i} {<x, n_j> >= t_j}`, nested by construction.
    pub fn accumulating(normals: &[Vec<f64>], offsets: &[f64]) -> Result<Self> {
        if normals.len() != offsets.len() || normals.is_empty() {
            return Err(usage("one offset per normal is required"));
        }
        let dim = normals[0].len();
        let faces: Vec<HalfSpace> = normals.iter().zip(offsets).map(|(n, &t)| HalfSpace::at_least(n, t)).collect();
        let bodies = (1..=faces.len()).map(|i| ConvexBody::polyhedron(faces[..i].to_vec())).collect();
        Self::new(Space::euclidean(dim), bodies, Point::Coords(vec![0.0; dim]))
    }

    /// Sub-rays `[t, inf)` of one unbounded edge of a tree.
    pub fn tree_subrays(tree: MetricTree, ray: usize, offsets: &[f64], basepoint: Point) -> Result<Self> {
        let bodies = offsets
            .iter()
            .map(|&t| ConvexBody::Subtree { intervals: vec![EdgeInterval { edge: ray, start: t, end: None }] })
            .collect();
        Self::new(Space::tree(tree), bodies, basepoint)
    }

    /// Samples points of each `X_{i+1}` (projections of random points) and
    /// checks that `X_i` contains them.
    pub fn check_nested(&self, samples: usize, seed: u64) -> Result<NestingReport> {
        let probes = probe_points(&self.space, &self.basepoint, samples.max(1), 10.0, seed)?;
        let tol = ToleranceProfile::default();
        let mut worst = 0.0f64;
        let mut count = 0;
        for w in self.bodies.windows(2) {
            for x in &probes {
                // push samples out towards the inner body so they are not all projections of nearby points
                let y = w[1].project_with(&self.space, x, &tol)?;
                let back = w[0].project_with(&self.space, &y, &tol)?;
                let gap = self.space.distance_unchecked(&y, &back);
                worst = worst.max(gap / (1.0 + norm_of(&self.space, &y)));
                count += 1;
            }
        }
        Ok(NestingReport { samples: count, max_violation: worst, nested: worst <= 1e-8 })
    }
}

fn norm_of(space: &Space, p: &Point) -> f64 {
    match (space, p) {
        (Space::Euclidean { .. } | Space::TruncatedHilbertBox { .. }, Point::Coords(c)) => math::norm(c),
        _ => 0.0,
    }
}

fn unit(dim: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; dim];
    e[i] = 1.0;
    e
}

/// Deterministic probe points within `radius` of `center`.
pub fn probe_points(space: &Space, center: &Point, count: usize, radius: f64, seed: u64) -> Result<Vec<Point>> {
    let mut rng = SplitMix::new(seed);
    let mut out = Vec::with_capacity(count);
    match (space, center) {
        (Space::MetricTree { tree }, Point::Tree(c)) => {
            let mut k = 0;
            while out.len() < count {
                k += 1;
                let r = radius * rng.next_f64().max(1e-3);
                let sphere = tree.sphere_points(c, r, 1e-12);
                if sphere.is_empty() {
                    continue;
                }
                let pick = (rng.next_u64() % sphere.len() as u64) as usize;
                out.push(Point::Tree(sphere[pick]));
                if k > 100 * count {
                    break;
                }
            }
        }
        _ => {
            let chart = Chart::at(space, center)?;
            let dim = chart.dim();
            while out.len() < count {
                let g: Vec<f64> = (0..dim).map(|_| rng.next_gaussian()).collect();
                let Some(u) = math::normalized(&g) else { continue };
                let r = radius * libm::pow(rng.next_f64(), 1.0 / dim as f64);
                let p = chart.exp(&math::scale(&u, r))?;
                if space.check_point(&p, 1e-12).is_ok() {
                    out.push(p);
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LimitSettings {
    pub tolerance: f64,
    pub probe_count: usize,
    pub probe_radius: f64,
    /// Emptiness is accepted once `d(o, X_last)` exceeds this.
    pub emptiness_threshold: f64,
    pub seed: u64,
}

impl Default for LimitSettings {
    fn default() -> Self {
        Self { tolerance: 1e-6, probe_count: 128, probe_radius: 10.0, emptiness_threshold: 1e6, seed: 7 }
    }
}

/// `f_k = d_{X_k} - d_{X_k}(o)` at the first index where the chain has
/// stabilized on the probe set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitField {
    pub family: NestedFamily,
    /// Zero-based index of the body used.
    pub truncation: usize,
    pub field: ScalarField,
    /// Shifted distance to the last body: agrees with `field` on the probe
    /// ball and stays accurate much farther out, so the flow runs on it.
    pub far_field: ScalarField,
    /// `sup |f_k - f_{k-1}|` over the probes at the truncation.
    pub stability: f64,
    pub changes: Vec<f64>,
    pub basepoint_distances: Vec<f64>,
}

pub fn build_limit_field(family: &NestedFamily, settings: &LimitSettings) -> Result<LimitField> {
    let tol = ToleranceProfile::default();
    let space = &family.space;
    let o = &family.basepoint;
    let dists: Vec<f64> = family.bodies.iter().map(|b| b.distance_with(space, o, &tol)).collect::<Result<_>>()?;
    let last = *dists.last().unwrap();
    if !(last > settings.emptiness_threshold) {
        return Err(Error::BoundedIntersection { distance: last });
    }
    let probes = probe_points(space, o, settings.probe_count, settings.probe_radius, settings.seed)?;
    let field_at = |k: usize| ScalarField::distance_to(family.bodies[k].clone()).shifted(-dists[k]);
    let values = |k: usize| -> Result<Vec<f64>> {
        let f = field_at(k);
        probes.iter().map(|p| f.value(space, p, &tol)).collect()
    };
    let mut prev = values(0)?;
    let mut changes = Vec::new();
    for k in 1..family.bodies.len() {
        let cur = values(k)?;
        let change = prev.iter().zip(&cur).map(|(a, b)| libm::fabs(a - b)).fold(0.0, f64::max);
        changes.push(change);
        if change <= settings.tolerance {
            return Ok(LimitField {
                family: family.clone(),
                truncation: k,
                field: field_at(k),
                far_field: field_at(family.bodies.len() - 1),
                stability: change,
                changes,
                basepoint_distances: dists,
            });
        }
        prev = cur;
    }
    Err(Error::Numerical(format!(
        "limit field did not stabilize to {:e} on the probe set (last change {:e})",
        settings.tolerance,
        changes.last().copied().unwrap_or(f64::INFINITY)
    )))
}

/// `(1 - sqrt(n/(n+1))) / 2`.
pub fn gradient_floor(n: usize) -> f64 {
    let n = n as f64;
    0.5 * (1.0 - sqrt(n / (n + 1.0)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientFloorReport {
    pub n: usize,
    pub floor: f64,
    pub min_gradient: f64,
    pub argmin: usize,
    pub samples: usize,
    pub holds: bool,
}

/// Smallest absolute gradient of the limit field over `samples`.
pub fn gradient_floor_check(limit: &LimitField, n: usize, samples: &[Point]) -> Result<GradientFloorReport> {
    if samples.is_empty() {
        return Err(usage("no sample points"));
    }
    let tol = ToleranceProfile::default();
    let space = &limit.family.space;
    let floor = gradient_floor(n);
    let mut min = (f64::INFINITY, 0);
    for (i, p) in samples.iter().enumerate() {
        let g = absolute_gradient_with(space, &limit.field, p, &ProbeSettings::default(), &tol)?;
        if g.value < min.0 {
            min = (g.value, i);
        }
    }
    Ok(GradientFloorReport {
        n,
        floor,
        min_gradient: min.0,
        argmin: min.1,
        samples: samples.len(),
        holds: min.0 >= floor - 1e-3,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadReport {
    pub t: f64,
    pub bodies_used: usize,
    pub max_pair_distance: f64,
    pub bound: f64,
    pub holds: bool,
    /// `(f(p) - f(z)) / d(p, z)` for the circumcenter `z` of the points
    /// `y_i`, with `f` the far field; `None` if `z = p`.
    pub circumcenter_descent: Option<f64>,
}

/// For bodies farther than `t` from `p`, the points `y_i` at distance `t`
/// along the geodesics from `p` to its projections are pairwise within
/// `t sqrt(2)`.
pub fn projection_spread_check(limit: &LimitField, p: &Point, t: f64) -> Result<SpreadReport> {
    if !(t > 0.0) {
        return Err(usage("t must be positive"));
    }
    let tol = ToleranceProfile::default();
    let space = &limit.family.space;
    let mut ys = Vec::new();
    for body in &limit.family.bodies {
        let x = body.project_with(space, p, &tol)?;
        let d = space.distance_unchecked(p, &x);
        if d > t {
            ys.push(space.geodesic_unchecked(p, &x, t / d)?);
        }
    }
    let mut worst = 0.0f64;
    for i in 0..ys.len() {
        for j in i + 1..ys.len() {
            worst = worst.max(space.distance_unchecked(&ys[i], &ys[j]));
        }
    }
    let bound = t * math::SQRT_2;
    let descent = if ys.is_empty() {
        None
    } else {
        let z = circumcenter(space, &ys)?.center;
        let dz = space.distance_unchecked(p, &z);
        if dz > 0.0 {
            Some((limit.far_field.value(space, p, &tol)? - limit.far_field.value(space, &z, &tol)?) / dz)
        } else {
            None
        }
    };
    Ok(SpreadReport {
        t,
        bodies_used: ys.len(),
        max_pair_distance: worst,
        bound,
        holds: worst <= bound + 1e-9,
        circumcenter_descent: descent,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyVerdict {
    pub index: usize,
    pub contains: bool,
    /// Angle to the recession cone (0 or pi on trees).
    pub angle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfinityCertificate {
    pub direction: BoundaryDirection,
    pub truncation: usize,
    pub escape: EscapeReport,
    pub second_start: Point,
    pub second_direction: Option<BoundaryDirection>,
    /// Angle between the directions from the two starts.
    pub start_gap: f64,
    pub bodies: Vec<BodyVerdict>,
    /// Every body contains the direction within 1e-3 radians.
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InfinitySettings {
    pub limit: LimitSettings,
    pub step: f64,
    pub horizon: f64,
    /// Offset of the second start from the basepoint.
    pub second_start_distance: f64,
    pub angular_tolerance: f64,
}

impl Default for InfinitySettings {
    fn default() -> Self {
        Self {
            limit: LimitSettings::default(),
            step: 1.0,
            horizon: 1024.0,
            second_start_distance: 5.0,
            angular_tolerance: 1e-3,
        }
    }
}

/// Runs the flow of the limit field from the basepoint and from a second
/// start, and certifies that the limit direction lies in the boundary at
/// infinity of every body.
pub fn intersection_at_infinity(family: &NestedFamily, settings: &InfinitySettings) -> Result<InfinityCertificate> {
    let space = &family.space;
    if !matches!(space, Space::Euclidean { .. } | Space::MetricTree { .. }) {
        return Err(capability("boundary certificates need a Euclidean space or a tree"));
    }
    let tol = ToleranceProfile::default();
    let limit = build_limit_field(family, &settings.limit)?;
    let flow = FlowSettings::new(settings.step, settings.horizon).stride(16);
    let run = |start: &Point| -> Result<EscapeReport> {
        let traj = run_flow_with(space, &limit.far_field, start, &flow, &tol)?;
        velocity_of_escape_with(space, &traj, limit.far_field.lipschitz(), &tol)
    };
    let escape = run(&family.basepoint)?;
    let direction = escape.direction.clone().ok_or_else(|| {
        Error::Numerical(format!(
            "flow did not settle on a direction (residuals {:?}, velocity {})",
            escape.direction_residuals, escape.velocity
        ))
    })?;
    let second_start = second_start(space, &family.basepoint, settings.second_start_distance)?;
    let second = run(&second_start)?;
    let start_gap = match (&direction, &second.direction) {
        (BoundaryDirection::Vector(a), Some(BoundaryDirection::Vector(b))) => math::angle_between(a, b),
        (BoundaryDirection::Ray { ray: a }, Some(BoundaryDirection::Ray { ray: b })) => {
            if a == b {
                0.0
            } else {
                PI
            }
        }
        _ => PI,
    };
    let mut bodies = Vec::with_capacity(family.bodies.len());
    for (index, b) in family.bodies.iter().enumerate() {
        let angle = b.recession_angle(space, &direction)?;
        bodies.push(BodyVerdict { index, contains: b.recession_contains(space, &direction)?, angle });
    }
    let certified = bodies.iter().all(|v| v.angle <= settings.angular_tolerance);
    Ok(InfinityCertificate {
        direction,
        truncation: limit.truncation,
        escape,
        second_start,
        second_direction: second.direction,
        start_gap,
        bodies,
        certified,
    })
}

fn second_start(space: &Space, o: &Point, dist: f64) -> Result<Point> {
    match (space, o) {
        (Space::MetricTree { tree }, Point::Tree(c)) => {
            let pts = tree.sphere_points(c, dist, 1e-12);
            pts.last().copied().map(Point::Tree).ok_or_else(|| usage("no second start available"))
        }
        _ => {
            let chart = Chart::at(space, o)?;
            let mut v = vec![0.0; chart.dim()];
            // off-axis so symmetric families do not hide a dependence on the start
            v[chart.dim() - 1] = dist * 0.6;
            v[0] += dist * 0.8;
            chart.exp(&v)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneRadiusReport {
    pub angles: Vec<f64>,
    /// Candidates outside some recession cone, not tested.
    pub skipped: usize,
    pub max_angle: f64,
    pub holds: bool,
}

/// Every candidate in all recession cones lies within `pi/2` of `xi`.
pub fn monotone_radius_check(
    family: &NestedFamily,
    xi: &[f64],
    candidates: &[Vec<f64>],
) -> Result<MonotoneRadiusReport> {
    if !matches!(family.space, Space::Euclidean { .. }) {
        return Err(capability("angles at infinity are only available in Euclidean space"));
    }
    let mut angles = Vec::new();
    let mut skipped = 0;
    for c in candidates {
        let Some(u) = math::normalized(c) else {
            skipped += 1;
            continue;
        };
        let dir = BoundaryDirection::Vector(u.clone());
        let mut inside = true;
        for b in &family.bodies {
            if !b.recession_contains(&family.space, &dir)? {
                inside = false;
                break;
            }
        }
        if inside {
            angles.push(math::angle_between(xi, &u));
        } else {
            skipped += 1;
        }
    }
    let max_angle = angles.iter().cloned().fold(0.0, f64::max);
    Ok(MonotoneRadiusReport { angles, skipped, max_angle, holds: max_angle <= PI / 2.0 + 1e-3 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HilbertFamily {
    pub family: NestedFamily,
    /// `d(o, X_n)` for `n = 1..=m`.
    pub distances: Vec<f64>,
    /// Least-squares slope of `d(o, X_n)^2` against `n`.
    pub squared_slope: f64,
}

/// `X_n = {a : a_i >= 1 for i <= n}` inside the truncated box of
/// dimension `d`, for `n = 1..=m`.
pub fn hilbert_box_family(d: usize, m: usize) -> Result<HilbertFamily> {
    if m > d {
        return Err(usage("family length exceeds the box dimension"));
    }
    if m == 0 {
        return Err(usage("family length must be positive"));
    }
    let space = Space::hilbert_box(d);
    let bodies: Vec<ConvexBody> = (1..=m)
        .map(|n| ConvexBody::polyhedron((0..n).map(|i| HalfSpace::at_least(&unit(d, i), 1.0)).collect()))
        .collect();
    let family = NestedFamily::new(space, bodies, Point::Coords(vec![0.0; d]))?;
    let tol = ToleranceProfile::default();
    let distances: Vec<f64> =
        family.bodies.iter().map(|b| b.distance_with(&family.space, &family.basepoint, &tol)).collect::<Result<_>>()?;
    let ns: Vec<f64> = (1..=m).map(|n| n as f64).collect();
    let ys: Vec<f64> = distances.iter().map(|d| d * d).collect();
    let mean_n = ns.iter().sum::<f64>() / m as f64;
    let mean_y = ys.iter().sum::<f64>() / m as f64;
    let sxx: f64 = ns.iter().map(|n| (n - mean_n) * (n - mean_n)).sum();
    let sxy: f64 = ns.iter().zip(&ys).map(|(n, y)| (n - mean_n) * (y - mean_y)).sum();
    let squared_slope = if sxx > 0.0 { sxy / sxx } else { ys[0] };
    Ok(HilbertFamily { family, distances, squared_slope })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::TreePoint;

    fn powers(k: u32) -> Vec<f64> {
        (0..=k).map(|i| libm::pow(2.0, i as f64)).collect()
    }

    #[test]
    fn parallel_family_limit_is_busemann() {
        let fam = NestedFamily::parallel_half_spaces(2, &powers(24)).unwrap();
        assert!(fam.check_nested(32, 1).unwrap().nested);
        let lim = build_limit_field(&fam, &LimitSettings::default()).unwrap();
        let x: Point = vec![3.0, -7.0].into();
        assert!((lim.field.evaluate(&fam.space, &x).unwrap() + 3.0).abs() < 1e-9);
        let cert = intersection_at_infinity(&fam, &InfinitySettings::default()).unwrap();
        assert!(cert.certified);
        match cert.direction {
            BoundaryDirection::Vector(u) => assert!(math::dist(&u, &[1.0, 0.0]) < 1e-9),
            _ => panic!(),
        }
    }

    #[test]
    fn bounded_family_is_rejected() {
        let s = Space::euclidean(2);
        let bodies = (1..10).map(|k| ConvexBody::ball(vec![1.0, 1.0], 1.0 / k as f64)).collect();
        let fam = NestedFamily::new(s, bodies, vec![0.0, 0.0].into()).unwrap();
        assert!(matches!(build_limit_field(&fam, &LimitSettings::default()), Err(Error::BoundedIntersection { .. })));
    }

    #[test]
    fn tree_subrays_point_at_their_ray() {
        let fam =
            NestedFamily::tree_subrays(MetricTree::star(3), 1, &powers(24), TreePoint::new(0, 0.0).into()).unwrap();
        let cert = intersection_at_infinity(&fam, &InfinitySettings::default()).unwrap();
        assert_eq!(cert.direction, BoundaryDirection::Ray { ray: 1 });
        assert!(cert.certified && cert.start_gap == 0.0);
    }

    #[test]
    fn hilbert_distances_are_square_roots() {
        let h = hilbert_box_family(9, 4).unwrap();
        assert_eq!(h.distances, vec![1.0, 2f64.sqrt(), 3f64.sqrt(), 2.0]);
        assert!((h.squared_slope - 1.0).abs() < 1e-12);
        assert!(hilbert_box_family(3, 4).is_err());
    }

    #[test]
    fn floors() {
        assert!((gradient_floor(1) - 0.146447).abs() < 1e-6);
        assert!((gradient_floor(2) - 0.091752).abs() < 1e-6);
    }

    #[test]
    fn wedge_escapes_along_the_diagonal() {
        let fam = NestedFamily::translated_cone(&[vec![1.0, 0.0], vec![0.0, 1.0]], &powers(30)).unwrap();
        let cert = intersection_at_infinity(&fam, &InfinitySettings::default()).unwrap();
        let BoundaryDirection::Vector(u) = &cert.direction else { panic!() };
        let h = core::f64::consts::FRAC_1_SQRT_2;
        assert!(math::dist(u, &[h, h]) < 1e-6);
        assert!(cert.certified && cert.start_gap < 2e-3);

        let lim = build_limit_field(&fam, &LimitSettings::default()).unwrap();
        let samples = probe_points(&fam.space, &fam.basepoint, 12, 10.0, 3).unwrap();
        let g = gradient_floor_check(&lim, 2, &samples).unwrap();
        assert!(g.holds, "{g:?}");
        let spread = projection_spread_check(&lim, &vec![1.0, -2.0].into(), 0.5).unwrap();
        assert!(spread.holds && spread.bodies_used == 31);
        assert!(spread.circumcenter_descent.unwrap() >= gradient_floor(2));

        let cands: Vec<Vec<f64>> = (0..64)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / 64.0;
                vec![libm::cos(a), libm::sin(a)]
            })
            .collect();
        let m = monotone_radius_check(&fam, u, &cands).unwrap();
        assert!(m.holds && m.skipped > 0 && !m.angles.is_empty());
    }

    #[test]
    fn rotating_faces_keep_a_common_direction() {
        let k = 32;
        let normals: Vec<Vec<f64>> = (0..k)
            .map(|j| {
                let th = 0.4 * (1.0 - libm::pow(0.5, j as f64));
                vec![libm::cos(th), libm::sin(th)]
            })
            .collect();
        let offsets: Vec<f64> = (0..k).map(|j| libm::pow(2.0, j as f64 + 4.0)).collect();
        let fam = NestedFamily::accumulating(&normals, &offsets).unwrap();
        assert!(fam.check_nested(16, 2).unwrap().nested);
        let cert = intersection_at_infinity(&fam, &InfinitySettings::default()).unwrap();
        assert!(cert.certified, "{:?}", cert.bodies);
    }
}

//! Closed convex bodies and nearest-point projection.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::tree::{MetricTree, TreePoint};
use super::{BoundaryDirection, Point, Space};
use crate::error::{capability, usage, Error, Result};
use crate::math::{self, atan2, fabs, PI};
use crate::tolerance::ToleranceProfile;

/// `{x : <normal, x> <= offset}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl HalfSpace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Self {
        Self { normal, offset }
    }

    /// `{x : <normal, x> >= offset}` written in the canonical orientation.
    pub fn at_least(normal: &[f64], offset: f64) -> Self {
        Self { normal: math::scale(normal, -1.0), offset: -offset }
    }

    fn excess(&self, x: &[f64]) -> f64 {
        math::dot(&self.normal, x) - self.offset
    }

    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let s = self.excess(x);
        if s <= 0.0 {
            return x.to_vec();
        }
        let nn = math::dot(&self.normal, &self.normal);
        math::axpy(x, -s / nn, &self.normal)
    }
}

/// A sub-interval `[start, end]` of a tree edge; `end = None` runs to the
/// far end of the edge (to infinity on rays).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeInterval {
    pub edge: usize,
    pub start: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<f64>,
}

impl EdgeInterval {
    fn end_on(&self, tree: &MetricTree) -> f64 {
        self.end.unwrap_or_else(|| tree.edges()[self.edge].length)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum ConvexBody {
    HalfSpace(HalfSpace),
    Ball { center: Point, radius: f64 },
    Polyhedron { faces: Vec<HalfSpace> },
    Subtree { intervals: Vec<EdgeInterval> },
    SphericalCap { center: Point, radius: f64 },
    IntersectionList { members: Vec<ConvexBody> },
}

/// Dykstra's cyclic projection onto the intersection of closed convex sets
/// of a flat space, each given by its projection map.
///
/// Stops when no sub-iterate moves by more than `tolerance` (relative to the
/// iterate's magnitude) over a full cycle. Reports [`Error::Infeasible`] when
/// the final point still violates a set.
pub fn dykstra(
    start: &[f64],
    projections: &[&dyn Fn(&[f64]) -> Result<Vec<f64>>],
    tolerance: f64,
    max_cycles: usize,
) -> Result<Vec<f64>> {
    let m = projections.len();
    let mut x = start.to_vec();
    let mut increments = vec![vec![0.0; x.len()]; m];
    let mut last: Vec<Vec<f64>> = vec![x.clone(); m];
    for cycle in 0..max_cycles {
        let mut moved = 0.0f64;
        for i in 0..m {
            let y = math::add(&x, &increments[i]);
            let p = projections[i](&y)?;
            increments[i] = math::sub(&y, &p);
            moved = moved.max(math::dist(&p, &last[i]));
            last[i] = p.clone();
            x = p;
        }
        if cycle > 0 && moved <= tolerance * (1.0 + math::norm(&x)) {
            break;
        }
    }
    let mut violation = 0.0f64;
    for proj in projections {
        violation = violation.max(math::dist(&x, &proj(&x)?));
    }
    if violation > 1e-6 * (1.0 + math::norm(&x)) {
        return Err(Error::Infeasible { violation });
    }
    Ok(x)
}

/// Exact projection onto a polyhedron by enumerating candidate active sets
/// (linearly independent, at most `dim` faces) and checking KKT conditions.
fn polyhedron_project(faces: &[HalfSpace], x: &[f64]) -> Option<Vec<f64>> {
    let dim = x.len();
    let m = faces.len();
    let feasible = |y: &[f64]| {
        faces.iter().all(|f| f.excess(y) <= 1e-12 * (1.0 + fabs(f.offset) + math::norm(&f.normal) * math::norm(y)))
    };
    if feasible(x) {
        return Some(x.to_vec());
    }
    let mut subset: Vec<usize> = Vec::new();
    for size in 1..=dim.min(m) {
        if let Some(y) = enumerate(faces, x, size, 0, &mut subset, &feasible) {
            return Some(y);
        }
    }
    None
}

fn enumerate(
    faces: &[HalfSpace],
    x: &[f64],
    size: usize,
    from: usize,
    subset: &mut Vec<usize>,
    feasible: &dyn Fn(&[f64]) -> bool,
) -> Option<Vec<f64>> {
    if subset.len() == size {
        let k = size;
        let mut gram = vec![0.0; k * k];
        let mut rhs = vec![0.0; k];
        for (r, &i) in subset.iter().enumerate() {
            for (c, &j) in subset.iter().enumerate() {
                gram[r * k + c] = math::dot(&faces[i].normal, &faces[j].normal);
            }
            rhs[r] = faces[i].excess(x);
        }
        let mu = math::solve(gram, rhs, k)?;
        if mu.iter().any(|&v| v < -1e-12) {
            return None;
        }
        let mut y = x.to_vec();
        for (&i, &w) in subset.iter().zip(&mu) {
            y = math::axpy(&y, -w, &faces[i].normal);
        }
        return if feasible(&y) { Some(y) } else { None };
    }
    for i in from..faces.len() {
        subset.push(i);
        let found = enumerate(faces, x, size, i + 1, subset, feasible);
        subset.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

fn box_clamp(x: &[f64]) -> Vec<f64> {
    x.iter()
        .enumerate()
        .map(|(i, a)| {
            let b = (i + 1) as f64;
            a.clamp(-b, b)
        })
        .collect()
}

fn in_box(x: &[f64]) -> bool {
    x.iter().enumerate().all(|(i, a)| fabs(*a) <= (i + 1) as f64)
}

impl ConvexBody {
    pub fn half_space(normal: Vec<f64>, offset: f64) -> Self {
        ConvexBody::HalfSpace(HalfSpace::new(normal, offset))
    }

    pub fn ball(center: impl Into<Point>, radius: f64) -> Self {
        ConvexBody::Ball { center: center.into(), radius }
    }

    pub fn polyhedron(faces: Vec<HalfSpace>) -> Self {
        ConvexBody::Polyhedron { faces }
    }

    pub fn validate(&self, space: &Space) -> Result<()> {
        match self {
            ConvexBody::HalfSpace(h) => check_half_space(space, h),
            ConvexBody::Polyhedron { faces } => {
                if faces.is_empty() {
                    return Err(usage("polyhedron needs at least one face"));
                }
                faces.iter().try_for_each(|h| check_half_space(space, h))
            }
            ConvexBody::Ball { center, radius } => {
                space.check_point(center, 1e-9)?;
                if !(*radius >= 0.0 && radius.is_finite()) {
                    return Err(usage("ball radius must be finite and nonnegative"));
                }
                if matches!(space, Space::Sphere { .. }) && *radius >= PI / 2.0 {
                    return Err(Error::NonConvexRegime { radius: *radius });
                }
                Ok(())
            }
            ConvexBody::SphericalCap { center, radius } => {
                if !matches!(space, Space::Sphere { .. }) {
                    return Err(capability("spherical caps live on spheres"));
                }
                space.check_point(center, 1e-9)?;
                if !(*radius >= 0.0 && *radius < PI / 2.0) {
                    return Err(Error::NonConvexRegime { radius: *radius });
                }
                Ok(())
            }
            ConvexBody::Subtree { intervals } => {
                let Space::MetricTree { tree } = space else {
                    return Err(capability("subtrees live in metric trees"));
                };
                check_subtree(tree, intervals)
            }
            ConvexBody::IntersectionList { members } => {
                if members.is_empty() {
                    return Err(usage("intersection list is empty"));
                }
                members.iter().try_for_each(|b| b.validate(space))
            }
        }
    }

    /// Nearest-point projection with default tolerances.
    pub fn project(&self, space: &Space, x: &Point) -> Result<Point> {
        self.project_with(space, x, &ToleranceProfile::default())
    }

    pub fn project_with(&self, space: &Space, x: &Point, tol: &ToleranceProfile) -> Result<Point> {
        space.check_point(x, 1e-9)?;
        match space {
            Space::Euclidean { .. } => Ok(Point::Coords(self.flat_project(coords(x)?, tol)?)),
            Space::TruncatedHilbertBox { .. } => {
                let c = coords(x)?;
                let y = self.flat_project(c, tol)?;
                if in_box(&y) {
                    return Ok(Point::Coords(y));
                }
                let body = |v: &[f64]| self.flat_project(v, tol);
                let clamp = |v: &[f64]| Ok(box_clamp(v));
                let y = dykstra(c, &[&body, &clamp], tol.dykstra_tolerance, tol.dykstra_max_cycles)?;
                Ok(Point::Coords(box_clamp(&y)))
            }
            Space::MetricTree { tree } => match self {
                ConvexBody::Ball { center, radius } => ball_project(space, center, *radius, x),
                ConvexBody::Subtree { intervals } => {
                    Ok(Point::Tree(subtree_project(tree, intervals, x.tree().ok_or(Error::SpaceMismatch)?)?))
                }
                ConvexBody::IntersectionList { members } => {
                    let mut acc: Option<Vec<EdgeInterval>> = None;
                    for m in members {
                        let ConvexBody::Subtree { intervals } = m else {
                            return Err(capability("tree intersections are supported for subtrees only"));
                        };
                        acc = Some(match acc {
                            None => intervals.clone(),
                            Some(prev) => intersect_subtrees(tree, &prev, intervals),
                        });
                    }
                    let ivs = acc.unwrap_or_default();
                    if ivs.is_empty() {
                        return Err(Error::Infeasible { violation: f64::INFINITY });
                    }
                    Ok(Point::Tree(subtree_project(tree, &ivs, x.tree().ok_or(Error::SpaceMismatch)?)?))
                }
                _ => Err(capability("body shape is not defined on metric trees")),
            },
            Space::Sphere { .. } => match self {
                ConvexBody::Ball { center, radius } | ConvexBody::SphericalCap { center, radius } => {
                    if *radius >= PI / 2.0 {
                        return Err(Error::NonConvexRegime { radius: *radius });
                    }
                    ball_project(space, center, *radius, x)
                }
                _ => Err(capability("only caps are supported on spheres")),
            },
            Space::Hyperbolic { .. } | Space::Product { .. } => match self {
                ConvexBody::Ball { center, radius } => ball_project(space, center, *radius, x),
                _ => Err(capability("only balls are supported in this space")),
            },
        }
    }

    /// Projection for flat coordinates, ignoring any ambient box.
    fn flat_project(&self, x: &[f64], tol: &ToleranceProfile) -> Result<Vec<f64>> {
        match self {
            ConvexBody::HalfSpace(h) => Ok(h.project(x)),
            ConvexBody::Ball { center, radius } => {
                let c = coords(center)?;
                let d = math::dist(x, c);
                if d <= *radius {
                    Ok(x.to_vec())
                } else {
                    Ok(math::lerp(c, x, radius / d))
                }
            }
            ConvexBody::Polyhedron { faces } => {
                if faces.len() == 1 {
                    return Ok(faces[0].project(x));
                }
                if faces.len() <= 12 {
                    if let Some(y) = polyhedron_project(faces, x) {
                        return Ok(y);
                    }
                }
                let projs: Vec<Box<dyn Fn(&[f64]) -> Result<Vec<f64>> + '_>> = faces
                    .iter()
                    .map(|h| Box::new(move |v: &[f64]| Ok(h.project(v))) as Box<dyn Fn(&[f64]) -> Result<Vec<f64>>>)
                    .collect();
                let refs: Vec<&dyn Fn(&[f64]) -> Result<Vec<f64>>> = projs.iter().map(|b| b.as_ref()).collect();
                dykstra(x, &refs, tol.dykstra_tolerance, tol.dykstra_max_cycles)
            }
            ConvexBody::IntersectionList { members } => {
                if members.len() == 1 {
                    return members[0].flat_project(x, tol);
                }
                let projs: Vec<Box<dyn Fn(&[f64]) -> Result<Vec<f64>> + '_>> = members
                    .iter()
                    .map(|b| {
                        Box::new(move |v: &[f64]| b.flat_project(v, tol)) as Box<dyn Fn(&[f64]) -> Result<Vec<f64>>>
                    })
                    .collect();
                let refs: Vec<&dyn Fn(&[f64]) -> Result<Vec<f64>>> = projs.iter().map(|b| b.as_ref()).collect();
                dykstra(x, &refs, tol.dykstra_tolerance, tol.dykstra_max_cycles)
            }
            _ => Err(capability("body shape is not defined in flat spaces")),
        }
    }

    /// Distance from `x` to the body.
    pub fn distance(&self, space: &Space, x: &Point) -> Result<f64> {
        let p = self.project(space, x)?;
        Ok(space.distance_unchecked(x, &p))
    }

    pub fn distance_with(&self, space: &Space, x: &Point, tol: &ToleranceProfile) -> Result<f64> {
        let p = self.project_with(space, x, tol)?;
        Ok(space.distance_unchecked(x, &p))
    }

    pub fn contains(&self, space: &Space, x: &Point, tol: f64) -> Result<bool> {
        Ok(self.distance(space, x)? <= tol)
    }

    /// Whether the ideal point `direction` lies in the boundary at infinity of
    /// the body: a recession direction in flat space, a contained ray in a tree.
    pub fn recession_contains(&self, space: &Space, direction: &BoundaryDirection) -> Result<bool> {
        direction.validate(space)?;
        match space {
            Space::TruncatedHilbertBox { .. } => Ok(false),
            Space::Euclidean { .. } => {
                let u = direction.vector().ok_or(Error::SpaceMismatch)?;
                self.flat_recession(u)
            }
            Space::MetricTree { tree } => {
                let ray = direction.ray().ok_or(Error::SpaceMismatch)?;
                self.tree_recession(tree, ray)
            }
            _ => Err(capability("recession cones are defined for flat spaces and trees")),
        }
    }

    fn flat_recession(&self, u: &[f64]) -> Result<bool> {
        match self {
            ConvexBody::HalfSpace(h) => Ok(math::dot(u, &h.normal) / math::norm(&h.normal) <= 1e-12),
            ConvexBody::Polyhedron { faces } => {
                Ok(faces.iter().all(|h| math::dot(u, &h.normal) / math::norm(&h.normal) <= 1e-12))
            }
            ConvexBody::Ball { .. } => Ok(false),
            ConvexBody::IntersectionList { members } => {
                for m in members {
                    if !m.flat_recession(u)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => Err(capability("body shape is not defined in flat spaces")),
        }
    }

    fn tree_recession(&self, tree: &MetricTree, ray: usize) -> Result<bool> {
        match self {
            ConvexBody::Subtree { intervals } => {
                Ok(tree.edges()[ray].is_ray() && intervals.iter().any(|iv| iv.edge == ray && iv.end.is_none()))
            }
            ConvexBody::Ball { .. } => Ok(false),
            ConvexBody::IntersectionList { members } => {
                for m in members {
                    if !m.tree_recession(tree, ray)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => Err(capability("body shape is not defined on metric trees")),
        }
    }

    /// Angle between `direction` and the recession cone of the body, capped
    /// at pi/2 (0 iff the direction is a recession direction). Trees report
    /// 0 or pi.
    pub fn recession_angle(&self, space: &Space, direction: &BoundaryDirection) -> Result<f64> {
        direction.validate(space)?;
        match space {
            Space::Euclidean { .. } => {
                let u = direction.vector().ok_or(Error::SpaceMismatch)?;
                let mut normals = Vec::new();
                if !self.cone_normals(&mut normals)? {
                    return Ok(PI / 2.0);
                }
                let projs: Vec<Box<dyn Fn(&[f64]) -> Result<Vec<f64>> + '_>> = normals
                    .iter()
                    .map(|n| {
                        let h = HalfSpace::new(n.clone(), 0.0);
                        Box::new(move |v: &[f64]| Ok(h.project(v))) as Box<dyn Fn(&[f64]) -> Result<Vec<f64>>>
                    })
                    .collect();
                let refs: Vec<&dyn Fn(&[f64]) -> Result<Vec<f64>>> = projs.iter().map(|b| b.as_ref()).collect();
                let p = if refs.is_empty() { u.to_vec() } else { dykstra(u, &refs, 1e-14, 100_000)? };
                Ok(atan2(math::dist(u, &p), math::norm(&p)))
            }
            Space::MetricTree { .. } => Ok(if self.recession_contains(space, direction)? { 0.0 } else { PI }),
            _ => Err(capability("recession cones are defined for flat spaces and trees")),
        }
    }

    /// Collects the normals of the recession cone; `false` if the cone is {0}.
    fn cone_normals(&self, out: &mut Vec<Vec<f64>>) -> Result<bool> {
        match self {
            ConvexBody::HalfSpace(h) => {
                out.push(h.normal.clone());
                Ok(true)
            }
            ConvexBody::Polyhedron { faces } => {
                out.extend(faces.iter().map(|h| h.normal.clone()));
                Ok(true)
            }
            ConvexBody::Ball { .. } => Ok(false),
            ConvexBody::IntersectionList { members } => {
                for m in members {
                    if !m.cone_normals(out)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => Err(capability("body shape is not defined in flat spaces")),
        }
    }
}

fn coords(p: &Point) -> Result<&[f64]> {
    p.coords().ok_or(Error::SpaceMismatch)
}

fn check_half_space(space: &Space, h: &HalfSpace) -> Result<()> {
    if !space.is_flat() {
        return Err(capability("half-spaces live in flat spaces"));
    }
    if h.normal.len() != space.dimension() {
        return Err(usage("half-space normal has the wrong dimension"));
    }
    if !(math::norm(&h.normal) > 0.0) || !h.offset.is_finite() {
        return Err(usage("half-space needs a nonzero normal and finite offset"));
    }
    Ok(())
}

fn ball_project(space: &Space, center: &Point, radius: f64, x: &Point) -> Result<Point> {
    let d = space.distance(center, x)?;
    if d <= radius {
        return Ok(x.clone());
    }
    space.geodesic_unchecked(center, x, radius / d)
}

fn check_subtree(tree: &MetricTree, intervals: &[EdgeInterval]) -> Result<()> {
    if intervals.is_empty() {
        return Err(usage("subtree needs at least one interval"));
    }
    for iv in intervals {
        let e = tree.edge(iv.edge)?;
        let end = iv.end.unwrap_or(e.length);
        if !(iv.start >= 0.0 && iv.start <= end && end <= e.length) {
            return Err(usage(format!("interval on edge {} is out of range", iv.edge)));
        }
    }
    // connectivity: union-find over touching intervals
    let n = intervals.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if intervals_touch(tree, &intervals[i], &intervals[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let root = find(&mut parent, 0);
    if (1..n).any(|i| find(&mut parent, i) != root) {
        return Err(usage("subtree intervals are not connected"));
    }
    Ok(())
}

fn interval_vertices(tree: &MetricTree, iv: &EdgeInterval) -> [Option<usize>; 2] {
    let e = tree.edges()[iv.edge];
    let end = iv.end_on(tree);
    [if iv.start == 0.0 { Some(e.from) } else { None }, if !e.is_ray() && end == e.length { e.to } else { None }]
}

fn intervals_touch(tree: &MetricTree, a: &EdgeInterval, b: &EdgeInterval) -> bool {
    if a.edge == b.edge {
        return a.start <= b.end_on(tree) && b.start <= a.end_on(tree);
    }
    let va = interval_vertices(tree, a);
    let vb = interval_vertices(tree, b);
    va.iter().flatten().any(|v| vb.iter().flatten().any(|w| v == w))
}

fn subtree_project(tree: &MetricTree, intervals: &[EdgeInterval], x: &TreePoint) -> Result<TreePoint> {
    let mut best: Option<(f64, TreePoint)> = None;
    for iv in intervals {
        let end = iv.end_on(tree);
        let mut consider = |p: TreePoint| {
            let d = tree.distance(x, &p);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, p));
            }
        };
        if iv.edge == x.edge {
            consider(TreePoint::new(iv.edge, x.offset.clamp(iv.start, end)));
        } else {
            consider(TreePoint::new(iv.edge, iv.start));
            if end.is_finite() {
                consider(TreePoint::new(iv.edge, end));
            }
        }
    }
    best.map(|(_, p)| p).ok_or(Error::Infeasible { violation: f64::INFINITY })
}

fn intersect_subtrees(tree: &MetricTree, a: &[EdgeInterval], b: &[EdgeInterval]) -> Vec<EdgeInterval> {
    let mut out = Vec::new();
    for p in a {
        for q in b {
            if p.edge == q.edge {
                let lo = p.start.max(q.start);
                let hi = p.end_on(tree).min(q.end_on(tree));
                if lo <= hi {
                    let end = if hi.is_infinite() { None } else { Some(hi) };
                    out.push(EdgeInterval { edge: p.edge, start: lo, end });
                }
            } else {
                let vp = interval_vertices(tree, p);
                let vq = interval_vertices(tree, q);
                for v in vp.iter().flatten() {
                    if vq.iter().flatten().any(|w| w == v) {
                        let e = tree.edges()[p.edge];
                        let off = if e.from == *v { 0.0 } else { e.length };
                        out.push(EdgeInterval { edge: p.edge, start: off, end: Some(off) });
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn unit_square() -> ConvexBody {
        ConvexBody::polyhedron(vec![
            HalfSpace::new(vec![1.0, 0.0], 1.0),
            HalfSpace::new(vec![-1.0, 0.0], 0.0),
            HalfSpace::new(vec![0.0, 1.0], 1.0),
            HalfSpace::new(vec![0.0, -1.0], 0.0),
        ])
    }

    #[test]
    fn half_space_projection() {
        let s = Space::euclidean(2);
        let h = ConvexBody::half_space(vec![1.0, 0.0], 0.0);
        assert_eq!(h.project(&s, &vec![2.0, 5.0].into()).unwrap(), vec![0.0, 5.0].into());
        assert_eq!(h.project(&s, &vec![-2.0, 5.0].into()).unwrap(), vec![-2.0, 5.0].into());
    }

    #[test]
    fn square_corner_projection() {
        let s = Space::euclidean(2);
        let p = unit_square().project(&s, &vec![3.0, 3.0].into()).unwrap();
        assert!(s.distance(&p, &vec![1.0, 1.0].into()).unwrap() < 1e-12);
    }

    #[test]
    fn intersection_by_dykstra_matches_polyhedron() {
        let s = Space::euclidean(2);
        let faces = match unit_square() {
            ConvexBody::Polyhedron { faces } => faces,
            _ => unreachable!(),
        };
        let list = ConvexBody::IntersectionList { members: faces.into_iter().map(ConvexBody::HalfSpace).collect() };
        let x: Point = vec![3.0, 0.4].into();
        let p = list.project(&s, &x).unwrap();
        assert!(s.distance(&p, &vec![1.0, 0.4].into()).unwrap() < 1e-10);
    }

    #[test]
    fn empty_intersection_is_infeasible() {
        let s = Space::euclidean(1);
        let list = ConvexBody::IntersectionList {
            members: vec![ConvexBody::half_space(vec![1.0], 0.0), ConvexBody::half_space(vec![-1.0], -1.0)],
        };
        assert!(matches!(list.project(&s, &vec![0.5].into()), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn recession_queries() {
        let s = Space::euclidean(2);
        let h = ConvexBody::half_space(vec![1.0, 0.0], 0.0);
        assert!(h.recession_contains(&s, &BoundaryDirection::Vector(vec![-1.0, 0.0])).unwrap());
        assert!(!h.recession_contains(&s, &BoundaryDirection::Vector(vec![1.0, 0.0])).unwrap());
        let quadrant =
            ConvexBody::polyhedron(vec![HalfSpace::at_least(&[1.0, 0.0], 1.0), HalfSpace::at_least(&[0.0, 1.0], 1.0)]);
        let r = 0.5f64.sqrt();
        assert!(quadrant.recession_contains(&s, &BoundaryDirection::Vector(vec![r, r])).unwrap());
        let a = quadrant.recession_angle(&s, &BoundaryDirection::Vector(vec![r, -r])).unwrap();
        assert!((a - PI / 4.0).abs() < 1e-12);
        let sph = Space::sphere(2);
        assert!(matches!(
            h.recession_contains(&sph, &BoundaryDirection::Vector(vec![1.0, 0.0, 0.0])),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn subtree_projection_is_exact() {
        let tree = MetricTree::star(3);
        let s = Space::tree(tree.clone());
        let body = ConvexBody::Subtree { intervals: vec![EdgeInterval { edge: 0, start: 2.0, end: None }] };
        body.validate(&s).unwrap();
        let p = body.project(&s, &TreePoint::new(1, 1.5).into()).unwrap();
        assert_eq!(p, TreePoint::new(0, 2.0).into());
        let q = body.project(&s, &TreePoint::new(0, 5.0).into()).unwrap();
        assert_eq!(q, TreePoint::new(0, 5.0).into());
        let disconnected = ConvexBody::Subtree {
            intervals: vec![
                EdgeInterval { edge: 0, start: 1.0, end: None },
                EdgeInterval { edge: 1, start: 1.0, end: None },
            ],
        };
        assert!(disconnected.validate(&s).is_err());
    }

    #[test]
    fn box_projection_stays_in_box() {
        let s = Space::hilbert_box(3);
        let h = ConvexBody::half_space(vec![-1.0, 0.0, 0.0], -5.0); // x1 >= 5, box says |x1| <= 1
        let r = h.project(&s, &vec![0.0, 0.0, 0.0].into());
        assert!(matches!(r, Err(Error::Infeasible { .. })));
        let h = ConvexBody::half_space(vec![0.0, -1.0, 0.0], -1.5);
        let p = h.project(&s, &vec![0.0, 0.0, 0.0].into()).unwrap();
        assert_eq!(p, vec![0.0, 1.5, 0.0].into());
    }
}

//! Points at infinity, described by the geodesic rays that reach them.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::{minkowski, renormalize_hyperboloid, Point, Space};
use crate::error::{capability, usage, Error, Result};
use crate::math::{self, cosh, fabs, sinh};

/// An ideal boundary point.
///
/// * `Vector(u)`: a unit direction. In Euclidean space this is the class of
///   rays `x + s u`; in hyperbolic space `u` is spatial and names the ideal
///   point `(1, u)` on the light cone.
/// * `Ray { ray }`: the end of an unbounded edge of a metric tree.
/// * `Product(entries)`: per-factor directions with weights whose squares
///   sum to one (a factor with weight 0 is held fixed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundaryDirection {
    Vector(Vec<f64>),
    Ray { ray: usize },
    Product(Vec<(f64, BoundaryDirection)>),
}

impl BoundaryDirection {
    pub fn vector(&self) -> Option<&[f64]> {
        match self {
            BoundaryDirection::Vector(v) => Some(v),
            _ => None,
        }
    }

    pub fn ray(&self) -> Option<usize> {
        match self {
            BoundaryDirection::Ray { ray } => Some(*ray),
            _ => None,
        }
    }

    pub fn validate(&self, space: &Space) -> Result<()> {
        match (space, self) {
            (
                Space::Euclidean { dimension }
                | Space::TruncatedHilbertBox { dimension }
                | Space::Hyperbolic { dimension },
                BoundaryDirection::Vector(u),
            ) => {
                if u.len() != *dimension {
                    return Err(usage("boundary direction has the wrong dimension"));
                }
                if fabs(math::norm(u) - 1.0) > 1e-9 {
                    return Err(usage("boundary direction must be a unit vector"));
                }
                Ok(())
            }
            (Space::MetricTree { tree }, BoundaryDirection::Ray { ray }) => {
                if !tree.edge(*ray)?.is_ray() {
                    return Err(usage("boundary direction must name an unbounded edge"));
                }
                Ok(())
            }
            (Space::Product { factors }, BoundaryDirection::Product(entries)) => {
                if entries.len() != factors.len() {
                    return Err(Error::SpaceMismatch);
                }
                let mut total = 0.0;
                for (s, (w, d)) in factors.iter().zip(entries) {
                    if *w < 0.0 {
                        return Err(usage("product direction weights must be nonnegative"));
                    }
                    if *w > 0.0 {
                        d.validate(s)?;
                    }
                    total += w * w;
                }
                if fabs(total - 1.0) > 1e-9 {
                    return Err(usage("product direction weights must have unit l2 norm"));
                }
                Ok(())
            }
            (Space::Sphere { .. }, _) => Err(capability("a sphere has no boundary at infinity")),
            _ => Err(Error::SpaceMismatch),
        }
    }

    /// Point at distance `s` along the geodesic ray from `base` to this ideal
    /// point.
    pub fn ray_point(&self, space: &Space, base: &Point, s: f64) -> Result<Point> {
        match (space, self, base) {
            (
                Space::Euclidean { .. } | Space::TruncatedHilbertBox { .. },
                BoundaryDirection::Vector(u),
                Point::Coords(b),
            ) => {
                let p = Point::Coords(math::axpy(b, s, u));
                space.check_point(&p, 1e-12)?;
                Ok(p)
            }
            (Space::Hyperbolic { .. }, BoundaryDirection::Vector(u), Point::Coords(b)) => {
                let xi = ideal_vector(u);
                let c = minkowski(&xi, b);
                let w: Vec<f64> = xi.iter().zip(b).map(|(x, y)| (x + c * y) / fabs(c)).collect();
                let mut p: Vec<f64> = b.iter().zip(&w).map(|(y, v)| cosh(s) * y + sinh(s) * v).collect();
                renormalize_hyperboloid(&mut p);
                Ok(Point::Coords(p))
            }
            (Space::MetricTree { tree }, BoundaryDirection::Ray { ray }, Point::Tree(b)) => {
                let e = tree.edge(*ray)?;
                if b.edge == *ray {
                    return Ok(super::TreePoint::new(*ray, b.offset + s).into());
                }
                let root = e.from;
                let d0 = tree.distance_to_vertex(b, root);
                if s <= d0 {
                    Ok(tree.point_at_distance(b, &tree.vertex_point(root), s).into())
                } else {
                    Ok(super::TreePoint::new(*ray, s - d0).into())
                }
            }
            (Space::Product { factors }, BoundaryDirection::Product(entries), Point::Product(parts)) => {
                let mut out = Vec::with_capacity(parts.len());
                for ((f, (w, d)), p) in factors.iter().zip(entries).zip(parts) {
                    out.push(if *w == 0.0 { p.clone() } else { d.ray_point(f, p, s * w)? });
                }
                Ok(Point::Product(out))
            }
            (Space::Sphere { .. }, _, _) => Err(capability("a sphere has no boundary at infinity")),
            _ => Err(Error::SpaceMismatch),
        }
    }
}

/// The light-cone vector `(1, u)` representing a hyperbolic ideal point.
pub(crate) fn ideal_vector(u: &[f64]) -> Vec<f64> {
    let mut xi = Vec::with_capacity(u.len() + 1);
    xi.push(1.0);
    xi.extend_from_slice(u);
    xi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{MetricTree, TreePoint};
    use alloc::vec;

    #[test]
    fn hyperbolic_ray_is_unit_speed() {
        let s = Space::hyperbolic(2);
        let b = Point::hyperboloid(&[0.3, -0.2]);
        let dir = BoundaryDirection::Vector(vec![0.6, 0.8]);
        let p1 = dir.ray_point(&s, &b, 1.5).unwrap();
        let p2 = dir.ray_point(&s, &b, 4.0).unwrap();
        assert!((s.distance(&b, &p1).unwrap() - 1.5).abs() < 1e-10);
        assert!((s.distance(&p1, &p2).unwrap() - 2.5).abs() < 1e-9);
    }

    #[test]
    fn tree_ray_passes_through_root() {
        let s = Space::tree(MetricTree::star(3));
        let dir = BoundaryDirection::Ray { ray: 2 };
        let b: Point = TreePoint::new(0, 1.0).into();
        assert_eq!(dir.ray_point(&s, &b, 3.0).unwrap(), TreePoint::new(2, 2.0).into());
    }
}

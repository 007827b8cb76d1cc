//! Geodesic model spaces: distances, geodesic interpolation and the CAT(0)
//! comparison test.

mod body;
mod boundary;
mod chart;
pub mod tree;

use alloc::format;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::math::{self, asinh, atan2, fabs, sin, sinh, sqrt};

pub use body::{dykstra, ConvexBody, EdgeInterval, HalfSpace};
pub(crate) use boundary::ideal_vector;
pub use boundary::BoundaryDirection;
pub use chart::Chart;
pub use tree::{Edge, MetricTree, TreePoint};

/// The model spaces supported by the toolkit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Space {
    Euclidean {
        dimension: usize,
    },
    /// Unit sphere in `R^{d+1}` with the angular metric.
    Sphere {
        dimension: usize,
    },
    /// Hyperboloid model: points `x` in `R^{d+1}` with `<x,x>_M = -1`, `x_0 > 0`.
    Hyperbolic {
        dimension: usize,
    },
    MetricTree {
        tree: MetricTree,
    },
    /// l2 product of the factors.
    Product {
        factors: Vec<Space>,
    },
    /// `{a in R^d : |a_i| <= i}` (1-based) with the Euclidean metric.
    TruncatedHilbertBox {
        dimension: usize,
    },
}

/// A point of a [`Space`]. Coordinates are Euclidean coordinates, a unit
/// vector (sphere) or a hyperboloid vector with the time coordinate first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Coords(Vec<f64>),
    Tree(TreePoint),
    Product(Vec<Point>),
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point::Coords(v)
    }
}

impl From<TreePoint> for Point {
    fn from(p: TreePoint) -> Self {
        Point::Tree(p)
    }
}

impl Point {
    pub fn coords(&self) -> Option<&[f64]> {
        match self {
            Point::Coords(c) => Some(c),
            _ => None,
        }
    }

    pub fn tree(&self) -> Option<&TreePoint> {
        match self {
            Point::Tree(p) => Some(p),
            _ => None,
        }
    }

    /// Lifts spatial coordinates onto the upper hyperboloid sheet.
    pub fn hyperboloid(spatial: &[f64]) -> Self {
        let mut v = Vec::with_capacity(spatial.len() + 1);
        v.push(sqrt(1.0 + math::dot(spatial, spatial)));
        v.extend_from_slice(spatial);
        Point::Coords(v)
    }

    /// Normalizes a nonzero vector onto the unit sphere.
    pub fn sphere(v: &[f64]) -> Result<Self> {
        math::normalized(v).map(Point::Coords).ok_or_else(|| Error::InvalidPoint("zero vector has no direction".into()))
    }
}

pub(crate) fn minkowski(a: &[f64], b: &[f64]) -> f64 {
    -a[0] * b[0] + math::dot(&a[1..], &b[1..])
}

/// Recomputes the time coordinate so the point sits exactly on the sheet.
pub(crate) fn renormalize_hyperboloid(v: &mut [f64]) {
    v[0] = sqrt(1.0 + math::dot(&v[1..], &v[1..]));
}

impl Space {
    pub fn euclidean(dimension: usize) -> Self {
        Space::Euclidean { dimension }
    }

    pub fn sphere(dimension: usize) -> Self {
        Space::Sphere { dimension }
    }

    pub fn hyperbolic(dimension: usize) -> Self {
        Space::Hyperbolic { dimension }
    }

    pub fn tree(tree: MetricTree) -> Self {
        Space::MetricTree { tree }
    }

    pub fn product(factors: Vec<Space>) -> Self {
        Space::Product { factors }
    }

    pub fn hilbert_box(dimension: usize) -> Self {
        Space::TruncatedHilbertBox { dimension }
    }

    /// Topological dimension of the model (1 for trees).
    pub fn dimension(&self) -> usize {
        match self {
            Space::Euclidean { dimension }
            | Space::Sphere { dimension }
            | Space::Hyperbolic { dimension }
            | Space::TruncatedHilbertBox { dimension } => *dimension,
            Space::MetricTree { .. } => 1,
            Space::Product { factors } => factors.iter().map(Space::dimension).sum(),
        }
    }

    /// Euclidean space or the truncated Hilbert box: flat coordinates where
    /// half-spaces, recession cones and Dykstra projection make sense.
    pub fn is_flat(&self) -> bool {
        matches!(self, Space::Euclidean { .. } | Space::TruncatedHilbertBox { .. })
    }

    /// Whether the space is CAT(0). Only the sphere is not.
    pub fn is_cat0(&self) -> bool {
        match self {
            Space::Sphere { .. } => false,
            Space::Product { factors } => factors.iter().all(Space::is_cat0),
            _ => true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Space::Euclidean { dimension }
            | Space::Sphere { dimension }
            | Space::Hyperbolic { dimension }
            | Space::TruncatedHilbertBox { dimension } => {
                if *dimension == 0 {
                    return Err(Error::InvalidSpace("dimension must be at least 1".into()));
                }
                Ok(())
            }
            Space::MetricTree { .. } => Ok(()),
            Space::Product { factors } => {
                if factors.is_empty() {
                    return Err(Error::InvalidSpace("product needs at least one factor".into()));
                }
                factors.iter().try_for_each(Space::validate)
            }
        }
    }

    /// Checks that `p` satisfies the membership constraint of this space.
    pub fn check_point(&self, p: &Point, tol: f64) -> Result<()> {
        match (self, p) {
            (Space::Euclidean { dimension }, Point::Coords(c)) => {
                expect_len(c, *dimension)?;
                finite(c)
            }
            (Space::TruncatedHilbertBox { dimension }, Point::Coords(c)) => {
                expect_len(c, *dimension)?;
                finite(c)?;
                for (i, a) in c.iter().enumerate() {
                    let bound = (i + 1) as f64;
                    if fabs(*a) > bound + tol {
                        return Err(Error::InvalidPoint(format!(
                            "coordinate {} = {a} exceeds the box bound {bound}",
                            i + 1
                        )));
                    }
                }
                Ok(())
            }
            (Space::Sphere { dimension }, Point::Coords(c)) => {
                expect_len(c, dimension + 1)?;
                finite(c)?;
                let n = math::norm(c);
                if fabs(n - 1.0) > tol.max(1e-12) {
                    return Err(Error::InvalidPoint(format!("sphere point has norm {n}")));
                }
                Ok(())
            }
            (Space::Hyperbolic { dimension }, Point::Coords(c)) => {
                expect_len(c, dimension + 1)?;
                finite(c)?;
                let q = minkowski(c, c);
                if c[0] <= 0.0 || fabs(q + 1.0) > tol.max(1e-12) * c[0] * c[0] {
                    return Err(Error::InvalidPoint(format!(
                        "hyperboloid constraint violated: <x,x> = {q}, x0 = {}",
                        c[0]
                    )));
                }
                Ok(())
            }
            (Space::MetricTree { tree }, Point::Tree(tp)) => tree.check_point(tp, tol),
            (Space::Product { factors }, Point::Product(parts)) => {
                if parts.len() != factors.len() {
                    return Err(Error::SpaceMismatch);
                }
                factors.iter().zip(parts).try_for_each(|(s, q)| s.check_point(q, tol))
            }
            _ => Err(Error::SpaceMismatch),
        }
    }

    fn check_pair(&self, x: &Point, y: &Point) -> Result<()> {
        let tol = 1e-9;
        self.check_point(x, tol)?;
        self.check_point(y, tol)
    }

    /// The metric of the space.
    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.check_pair(x, y)?;
        Ok(self.distance_unchecked(x, y))
    }

    pub(crate) fn distance_unchecked(&self, x: &Point, y: &Point) -> f64 {
        match (self, x, y) {
            (Space::Euclidean { .. } | Space::TruncatedHilbertBox { .. }, Point::Coords(a), Point::Coords(b)) => {
                math::dist(a, b)
            }
            (Space::Sphere { .. }, Point::Coords(a), Point::Coords(b)) => sphere_angle(a, b),
            (Space::Hyperbolic { .. }, Point::Coords(a), Point::Coords(b)) => hyperbolic_distance(a, b),
            (Space::MetricTree { tree }, Point::Tree(a), Point::Tree(b)) => tree.distance(a, b),
            (Space::Product { factors }, Point::Product(a), Point::Product(b)) => sqrt(
                factors
                    .iter()
                    .zip(a.iter().zip(b))
                    .map(|(s, (p, q))| {
                        let d = s.distance_unchecked(p, q);
                        d * d
                    })
                    .sum(),
            ),
            _ => f64::NAN,
        }
    }

    /// The point at fraction `t` along the geodesic from `x` to `y`.
    pub fn geodesic_point(&self, x: &Point, y: &Point, t: f64) -> Result<Point> {
        self.check_pair(x, y)?;
        if !(0.0..=1.0).contains(&t) {
            return Err(usage(format!("geodesic fraction {t} outside [0, 1]")));
        }
        self.geodesic_unchecked(x, y, t)
    }

    pub(crate) fn geodesic_unchecked(&self, x: &Point, y: &Point, t: f64) -> Result<Point> {
        if t == 0.0 {
            return Ok(x.clone());
        }
        if t == 1.0 {
            return Ok(y.clone());
        }
        match (self, x, y) {
            (Space::Euclidean { .. } | Space::TruncatedHilbertBox { .. }, Point::Coords(a), Point::Coords(b)) => {
                Ok(Point::Coords(math::lerp(a, b, t)))
            }
            (Space::Sphere { .. }, Point::Coords(a), Point::Coords(b)) => {
                let plus = math::norm(&math::add(a, b));
                if plus < 1e-12 {
                    return Err(Error::NonUniqueGeodesic);
                }
                let theta = sphere_angle(a, b);
                let v = if theta < 1e-12 {
                    math::lerp(a, b, t)
                } else {
                    let s = sin(theta);
                    let wa = sin((1.0 - t) * theta) / s;
                    let wb = sin(t * theta) / s;
                    a.iter().zip(b).map(|(p, q)| wa * p + wb * q).collect()
                };
                Point::sphere(&v)
            }
            (Space::Hyperbolic { .. }, Point::Coords(a), Point::Coords(b)) => {
                let d = hyperbolic_distance(a, b);
                let mut v: Vec<f64> = if d < 1e-12 {
                    math::lerp(a, b, t)
                } else {
                    let s = sinh(d);
                    let wa = sinh((1.0 - t) * d) / s;
                    let wb = sinh(t * d) / s;
                    a.iter().zip(b).map(|(p, q)| wa * p + wb * q).collect()
                };
                renormalize_hyperboloid(&mut v);
                Ok(Point::Coords(v))
            }
            (Space::MetricTree { tree }, Point::Tree(a), Point::Tree(b)) => {
                let d = tree.distance(a, b);
                Ok(Point::Tree(tree.point_at_distance(a, b, t * d)))
            }
            (Space::Product { factors }, Point::Product(a), Point::Product(b)) => Ok(Point::Product(
                factors
                    .iter()
                    .zip(a.iter().zip(b))
                    .map(|(s, (p, q))| s.geodesic_unchecked(p, q, t))
                    .collect::<Result<Vec<_>>>()?,
            )),
            _ => Err(Error::SpaceMismatch),
        }
    }

    /// Point at distance `s` from `x` towards `y` (clamped to the segment).
    pub fn move_towards(&self, x: &Point, y: &Point, s: f64) -> Result<Point> {
        let d = self.distance(x, y)?;
        if d <= 0.0 {
            return Ok(x.clone());
        }
        self.geodesic_unchecked(x, y, (s / d).clamp(0.0, 1.0))
    }

    pub fn midpoint(&self, x: &Point, y: &Point) -> Result<Point> {
        self.geodesic_point(x, y, 0.5)
    }

    /// Signed CAT(0) comparison defect for the point at fraction `t` on
    /// `[x, y]` against `z`: the comparison-triangle distance minus the
    /// actual distance. Nonnegative in CAT(0) spaces.
    pub fn comparison_check(&self, x: &Point, y: &Point, z: &Point, t: f64) -> Result<f64> {
        self.check_point(z, 1e-9)?;
        let m = self.geodesic_point(x, y, t)?;
        let a = self.distance_unchecked(x, y);
        let b = self.distance_unchecked(x, z);
        let c = self.distance_unchecked(y, z);
        // Stewart's theorem in the Euclidean comparison triangle.
        let bar2 = (1.0 - t) * b * b + t * c * c - t * (1.0 - t) * a * a;
        Ok(sqrt(bar2.max(0.0)) - self.distance_unchecked(&m, z))
    }

    /// Diameter of a finite set (exact pairwise maximum).
    pub fn diameter(&self, points: &[Point]) -> Result<f64> {
        let mut best = 0.0f64;
        for (i, p) in points.iter().enumerate() {
            for q in &points[i + 1..] {
                best = best.max(self.distance(p, q)?);
            }
        }
        Ok(best)
    }
}

fn expect_len(c: &[f64], n: usize) -> Result<()> {
    if c.len() != n {
        return Err(Error::InvalidPoint(format!("expected {n} coordinates, got {}", c.len())));
    }
    Ok(())
}

fn finite(c: &[f64]) -> Result<()> {
    if c.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidPoint("non-finite coordinate".into()))
    }
}

pub(crate) fn sphere_angle(a: &[f64], b: &[f64]) -> f64 {
    let d = math::norm(&math::sub(a, b));
    let s = math::norm(&math::add(a, b));
    2.0 * atan2(d, s)
}

/// Chordal form for nearby points, `acosh(-<a,b>)` once the points are far
/// apart and the chordal form would cancel catastrophically.
pub(crate) fn hyperbolic_distance(a: &[f64], b: &[f64]) -> f64 {
    let c = -minkowski(a, b);
    if c > 2.0 {
        return crate::math::acosh(c);
    }
    let diff = math::sub(a, b);
    let q = minkowski(&diff, &diff).max(0.0);
    2.0 * asinh(sqrt(q) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn euclidean_distance_is_pythagorean() {
        let s = Space::euclidean(2);
        let d = s.distance(&vec![0.0, 0.0].into(), &vec![3.0, 4.0].into()).unwrap();
        assert_eq!(d, 5.0);
    }

    #[test]
    fn sphere_pole_to_equator() {
        let s = Space::sphere(2);
        let d = s.distance(&vec![0.0, 0.0, 1.0].into(), &vec![1.0, 0.0, 0.0].into()).unwrap();
        assert!((d - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn tree_distance_through_center() {
        let s = Space::tree(MetricTree::star(3));
        let d = s.distance(&TreePoint::new(0, 1.0).into(), &TreePoint::new(1, 2.0).into()).unwrap();
        assert_eq!(d, 3.0);
    }

    #[test]
    fn mismatched_points_are_rejected() {
        let s = Space::euclidean(2);
        let err = s.distance(&vec![0.0, 0.0].into(), &TreePoint::new(0, 1.0).into());
        assert_eq!(err, Err(Error::SpaceMismatch));
        assert!(s.distance(&vec![0.0].into(), &vec![0.0, 1.0].into()).is_err());
    }

    #[test]
    fn geodesic_endpoints_and_quarter() {
        let s = Space::euclidean(1);
        let x: Point = vec![0.0].into();
        let y: Point = vec![4.0].into();
        assert_eq!(s.geodesic_point(&x, &y, 0.25).unwrap(), vec![1.0].into());
        assert_eq!(s.geodesic_point(&x, &y, 0.0).unwrap(), x);
        assert_eq!(s.geodesic_point(&x, &y, 1.0).unwrap(), y);
    }

    #[test]
    fn tree_midpoint_is_branch_vertex() {
        let s = Space::tree(MetricTree::star(3));
        let m = s.geodesic_point(&TreePoint::new(0, 2.0).into(), &TreePoint::new(1, 2.0).into(), 0.5).unwrap();
        let o: Point = TreePoint::new(2, 0.0).into();
        assert!(s.distance(&m, &o).unwrap() < 1e-15);
    }

    #[test]
    fn antipodal_sphere_geodesic_is_refused() {
        let s = Space::sphere(2);
        let r = s.geodesic_point(&vec![1.0, 0.0, 0.0].into(), &vec![-1.0, 0.0, 0.0].into(), 0.5);
        assert_eq!(r, Err(Error::NonUniqueGeodesic));
    }

    #[test]
    fn hyperbolic_geodesic_is_proportional() {
        let s = Space::hyperbolic(2);
        let x = Point::hyperboloid(&[0.3, -1.2]);
        let y = Point::hyperboloid(&[2.0, 0.7]);
        let d = s.distance(&x, &y).unwrap();
        for t in [0.1, 0.5, 0.9] {
            let m = s.geodesic_point(&x, &y, t).unwrap();
            assert!((s.distance(&x, &m).unwrap() - t * d).abs() < 1e-10);
            assert!((s.distance(&m, &y).unwrap() - (1.0 - t) * d).abs() < 1e-10);
        }
    }

    #[test]
    fn comparison_signs() {
        let e = Space::euclidean(3);
        let defect = e
            .comparison_check(
                &vec![0.0, 1.0, 2.0].into(),
                &vec![3.0, -1.0, 0.5].into(),
                &vec![-2.0, 0.0, 1.0].into(),
                0.3,
            )
            .unwrap();
        assert!(defect.abs() < 1e-10);

        // Tripod with unit legs: comparison distance sqrt(3) against 1.
        let t = Space::tree(MetricTree::star(3));
        let defect = t
            .comparison_check(
                &TreePoint::new(0, 1.0).into(),
                &TreePoint::new(1, 1.0).into(),
                &TreePoint::new(2, 1.0).into(),
                0.5,
            )
            .unwrap();
        assert!((defect - (3f64.sqrt() - 1.0)).abs() < 1e-14);

        // Octant triangle on the sphere: the midpoint is farther than in the
        // flat comparison triangle.
        let s = Space::sphere(2);
        let defect = s
            .comparison_check(
                &vec![1.0, 0.0, 0.0].into(),
                &vec![0.0, 1.0, 0.0].into(),
                &vec![0.0, 0.0, 1.0].into(),
                0.5,
            )
            .unwrap();
        // bar distance: sides pi/2, median sqrt(pi^2/4 - pi^2/16)
        let expected = (PI * PI / 4.0 - PI * PI / 16.0).sqrt() - FRAC_PI_2;
        assert!((defect - expected).abs() < 1e-12);
        assert!(defect < 0.0);
    }
}

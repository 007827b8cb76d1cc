//! Circumcenters, the Jung inequality and the curvature-variant constants.

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::math::{self, acos, asin, asinh, sinh, sqrt, PI};
use crate::space::{hyperbolic_distance, Chart, Point, Space};

/// Smallest enclosing ball of a finite point set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircumResult {
    pub center: Point,
    pub radius: f64,
    /// Indices of the points at distance `radius` (within 1e-7).
    pub support: Vec<usize>,
    pub iterations: usize,
    /// Last change of the radius (0 for exact solves).
    pub residual: f64,
}

const SUPPORT_TOL: f64 = 1e-7;

/// Minimum enclosing ball of points of `R^d`: returns center, radius and the
/// dual weights. Frank-Wolfe with away steps on the dual
/// `max sum t_i |q_i|^2 - |sum t_i q_i|^2`, polished by solving the
/// equal-distance system on the support.
pub fn min_enclosing_ball(points: &[Vec<f64>]) -> (Vec<f64>, f64, Vec<f64>) {
    let m = points.len();
    assert!(m > 0, "empty point set");
    let dim = points[0].len();
    let mut theta = vec![0.0; m];
    // start from the farthest point of the first one
    let far = (0..m)
        .max_by(|&a, &b| {
            math::dist(&points[0], &points[a]).total_cmp(&math::dist(&points[0], &points[b])).then(b.cmp(&a))
        })
        .unwrap();
    theta[0] = 0.5;
    theta[far] += 0.5;
    let mut c: Vec<f64> = math::lerp(&points[0], &points[far], 0.5);
    let scale = (0..m).map(|i| math::dist(&points[i], &c)).fold(0.0, f64::max).max(1e-300);
    for _ in 0..200_000 {
        let r2: Vec<f64> = points
            .iter()
            .map(|q| {
                let d = math::dist(q, &c);
                d * d
            })
            .collect();
        let big_r2: f64 = (0..m).map(|i| theta[i] * r2[i]).sum();
        let t = (0..m).max_by(|&a, &b| r2[a].total_cmp(&r2[b]).then(b.cmp(&a))).unwrap();
        let a = (0..m).filter(|&i| theta[i] > 0.0).min_by(|&x, &y| r2[x].total_cmp(&r2[y])).unwrap();
        let gap_fw = r2[t] - big_r2;
        let gap_aw = big_r2 - r2[a];
        if gap_fw.max(gap_aw) <= 1e-15 * scale * scale {
            break;
        }
        if gap_fw >= gap_aw {
            let dc = math::sub(&points[t], &c);
            let dd = math::dot(&dc, &dc);
            let gamma = if dd == 0.0 { 0.0 } else { (gap_fw / (2.0 * dd)).min(1.0) };
            theta.iter_mut().for_each(|w| *w *= 1.0 - gamma);
            theta[t] += gamma;
            c = math::axpy(&c, gamma, &dc);
        } else {
            let dc = math::sub(&c, &points[a]);
            let dd = math::dot(&dc, &dc);
            let cap = theta[a] / (1.0 - theta[a]).max(1e-300);
            let gamma = if dd == 0.0 { cap } else { (gap_aw / (2.0 * dd)).min(cap) };
            theta.iter_mut().for_each(|w| *w *= 1.0 + gamma);
            theta[a] -= gamma;
            if theta[a] < 1e-16 || gamma == cap {
                theta[a] = 0.0;
            }
            c = math::axpy(&c, gamma, &dc);
        }
    }
    let radius = |c: &[f64]| points.iter().map(|q| math::dist(q, c)).fold(0.0, f64::max);
    let mut best_r = radius(&c);
    // polish: |q_i|^2 - 2 sum_j t_j <q_i, q_j> = lambda on the support
    let support: Vec<usize> = (0..m).filter(|&i| theta[i] > 1e-10).collect();
    let s = support.len();
    if s >= 2 && s <= dim + 1 {
        let k = s + 1;
        let mut a = vec![0.0; k * k];
        let mut b = vec![0.0; k];
        for (r, &i) in support.iter().enumerate() {
            for (col, &j) in support.iter().enumerate() {
                a[r * k + col] = -2.0 * math::dot(&points[i], &points[j]);
            }
            a[r * k + s] = -1.0;
            a[s * k + r] = 1.0;
            b[r] = -math::dot(&points[i], &points[i]);
        }
        b[s] = 1.0;
        if let Some(sol) = math::solve(a, b, k) {
            if sol[..s].iter().all(|&t| t >= -1e-12) {
                let mut cc = vec![0.0; dim];
                for (&i, &t) in support.iter().zip(&sol) {
                    cc = math::axpy(&cc, t, &points[i]);
                }
                let r = radius(&cc);
                if r <= best_r {
                    best_r = r;
                    c = cc;
                    theta = vec![0.0; m];
                    for (&i, &t) in support.iter().zip(&sol) {
                        theta[i] = t.max(0.0);
                    }
                }
            }
        }
    }
    (c, best_r, theta)
}

/// Circumcenter (minimax center) of a nonempty point set.
pub fn circumcenter(space: &Space, points: &[Point]) -> Result<CircumResult> {
    if points.is_empty() {
        return Err(usage("circumcenter of an empty set"));
    }
    circumcenter_from(space, points, &points[0])
}

/// As [`circumcenter`], with an explicit start for the iterative solvers.
pub fn circumcenter_from(space: &Space, points: &[Point], start: &Point) -> Result<CircumResult> {
    if points.is_empty() {
        return Err(usage("circumcenter of an empty set"));
    }
    for p in points {
        space.check_point(p, 1e-9)?;
    }
    space.check_point(start, 1e-9)?;
    let (center, iterations, residual) = match space {
        Space::MetricTree { tree } => {
            let (i, j, d) = diametral_pair(space, points);
            let (a, b) = (points[i].tree().unwrap(), points[j].tree().unwrap());
            (Point::Tree(tree.point_at_distance(a, b, d / 2.0)), 1, 0.0)
        }
        Space::Euclidean { .. } | Space::TruncatedHilbertBox { .. } => {
            let coords: Vec<Vec<f64>> = points.iter().map(|p| p.coords().unwrap().to_vec()).collect();
            let (c, _, _) = min_enclosing_ball(&coords);
            (Point::Coords(c), 1, 0.0)
        }
        _ => riemannian_center(space, points, start)?,
    };
    let dists: Vec<f64> = points.iter().map(|p| space.distance_unchecked(&center, p)).collect();
    let radius = dists.iter().cloned().fold(0.0, f64::max);
    if matches!(space, Space::Sphere { .. }) && radius >= PI / 2.0 {
        return Err(Error::NonConvexRegime { radius });
    }
    let support = (0..points.len()).filter(|&i| dists[i] >= radius - SUPPORT_TOL).collect();
    Ok(CircumResult { center, radius, support, iterations, residual })
}

fn farthest(space: &Space, x: &Point, points: &[Point]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, p) in points.iter().enumerate() {
        let d = space.distance_unchecked(x, p);
        if d > best.1 {
            best = (i, d);
        }
    }
    best
}

/// Farthest-point subgradient descent as a warm start, then a tangent-chart
/// enclosing-ball iteration `x <- exp_x(MEB(log_x p_i))`.
fn riemannian_center(space: &Space, points: &[Point], start: &Point) -> Result<(Point, usize, f64)> {
    let mut x = start.clone();
    let mut iterations = 0;
    for k in 1..=200 {
        let (i, d) = farthest(space, &x, points);
        if d == 0.0 {
            break;
        }
        x = space.geodesic_unchecked(&x, &points[i], 1.0 / (k as f64 + 1.0))?;
        iterations += 1;
    }
    let mut g = farthest(space, &x, points).1;
    let mut residual = f64::INFINITY;
    for _ in 0..200 {
        iterations += 1;
        let chart = Chart::at(space, &x)?;
        let logs: Vec<Vec<f64>> = points.iter().map(|p| chart.log(p)).collect::<Result<_>>()?;
        let (c, _, _) = min_enclosing_ball(&logs);
        let norm_c = math::norm(&c);
        if norm_c <= 1e-15 * (1.0 + g) {
            residual = 0.0;
            break;
        }
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..40 {
            let y = chart.exp(&math::scale(&c, t))?;
            let gy = farthest(space, &y, points).1;
            if gy <= g {
                residual = g - gy;
                x = y;
                g = gy;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved || norm_c <= 1e-13 * (1.0 + g) {
            break;
        }
    }
    Ok((x, iterations, residual))
}

fn diametral_pair(space: &Space, points: &[Point]) -> (usize, usize, f64) {
    let mut best = (0, 0, 0.0);
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = space.distance_unchecked(&points[i], &points[j]);
            if d > best.2 {
                best = (i, j, d);
            }
        }
    }
    best
}

/// `sqrt(n / (2(n+1)))`, the Jung constant of dimension `n` (0 for `n = 0`).
pub fn jung_bound(n: usize) -> f64 {
    let n = n as f64;
    sqrt(n / (2.0 * (n + 1.0)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JungReport {
    pub n: usize,
    pub diameter: f64,
    pub radius: f64,
    pub ratio: f64,
    pub bound: f64,
    pub slack: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale_bucket: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bucket_size: Option<usize>,
}

impl JungReport {
    pub fn holds(&self, tolerance: f64) -> bool {
        self.slack >= -tolerance
    }
}

/// Compares `rad / diam` of `points` with the dimension-`n` Jung constant.
pub fn jung_check(space: &Space, points: &[Point], n: usize) -> Result<JungReport> {
    if points.len() < 2 {
        return Err(usage("the Jung check needs at least two points"));
    }
    let diameter = space.diameter(points)?;
    if diameter == 0.0 {
        return Err(usage("the Jung check needs two distinct points"));
    }
    let c = circumcenter(space, points)?;
    let ratio = c.radius / diameter;
    let bound = jung_bound(n);
    Ok(JungReport {
        n,
        diameter,
        radius: c.radius,
        ratio,
        bound,
        slack: bound - ratio,
        scale_bucket: None,
        bucket_size: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HellyReport {
    pub n: usize,
    pub r: f64,
    pub subsets_checked: usize,
    pub worst_subset_radius: f64,
    pub worst_subset: Vec<usize>,
    pub full_radius: f64,
    /// Every subset of size at most `n + 1` has radius at most `r`.
    pub premise: bool,
    /// `premise` implies `full_radius <= r + 1e-6`.
    pub holds: bool,
}

/// Exhaustive check of the finite Helly-type reduction: small subsets with
/// radius at most `r` force the whole set into radius `r`.
pub fn helly_subset_check(space: &Space, points: &[Point], n: usize, r: f64) -> Result<HellyReport> {
    if points.len() > 12 {
        return Err(usage("exhaustive subset check is limited to 12 points"));
    }
    if points.is_empty() {
        return Err(usage("no points"));
    }
    let k = (n + 1).min(points.len());
    let mut worst = (0.0f64, Vec::new());
    let mut count = 0;
    let mut subset = Vec::with_capacity(k);
    for size in 1..=k {
        each_subset(points.len(), size, 0, &mut subset, &mut |idx| {
            let pts: Vec<Point> = idx.iter().map(|&i| points[i].clone()).collect();
            let c = circumcenter(space, &pts)?;
            count += 1;
            if c.radius > worst.0 || worst.1.is_empty() {
                worst = (c.radius, idx.to_vec());
            }
            Ok(())
        })?;
    }
    let full = circumcenter(space, points)?.radius;
    let premise = worst.0 <= r;
    Ok(HellyReport {
        n,
        r,
        subsets_checked: count,
        worst_subset_radius: worst.0,
        worst_subset: worst.1,
        full_radius: full,
        premise,
        holds: !premise || full <= r + 1e-6,
    })
}

fn each_subset(
    m: usize,
    size: usize,
    from: usize,
    subset: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if subset.len() == size {
        return visit(subset);
    }
    for i in from..m {
        subset.push(i);
        each_subset(m, size, i + 1, subset, visit)?;
        subset.pop();
    }
    Ok(())
}

/// Lower bound on the geometric dimension certified by the Jung ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimensionBound {
    Finite(usize),
    /// The ratio reaches `1/sqrt(2)`: no finite Jung constant applies.
    ExceedsAllFiniteBounds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub ratio: f64,
    pub bound: DimensionBound,
}

/// Smallest `n >= 1` with `rad/diam <= jung_bound(n) + 1e-9`.
pub fn dimension_lower_bound(space: &Space, points: &[Point]) -> Result<DimensionReport> {
    let rep = jung_check(space, points, 1)?;
    let ratio = rep.ratio;
    if ratio > 1.0 / math::SQRT_2 - 1e-9 {
        return Ok(DimensionReport { ratio, bound: DimensionBound::ExceedsAllFiniteBounds });
    }
    let mut n = 1;
    while ratio > jung_bound(n) + 1e-9 {
        n += 1;
    }
    Ok(DimensionReport { ratio, bound: DimensionBound::Finite(n) })
}

/// Jung checks restricted to large scales: for each scale `s = D 2^k` up to
/// the diameter, a greedy `s/2`-separated subset is checked against
/// `delta + jung_bound(n)` whenever its diameter exceeds `D`.
pub fn telescopic_jung_scan(
    space: &Space,
    points: &[Point],
    n: usize,
    delta: f64,
    min_diameter: f64,
) -> Result<Vec<JungReport>> {
    if !(delta > 0.0 && min_diameter > 0.0) {
        return Err(usage("delta and the minimum diameter must be positive"));
    }
    let diam = space.diameter(points)?;
    let mut out = Vec::new();
    let mut s = min_diameter;
    while s <= diam {
        let mut net: Vec<usize> = Vec::new();
        for i in 0..points.len() {
            if net.iter().all(|&j| space.distance_unchecked(&points[i], &points[j]) >= s / 2.0) {
                net.push(i);
            }
        }
        let pts: Vec<Point> = net.iter().map(|&i| points[i].clone()).collect();
        if pts.len() >= 2 && space.diameter(&pts)? > min_diameter {
            let mut rep = jung_check(space, &pts, n)?;
            rep.bound += delta;
            rep.slack += delta;
            rep.scale_bucket = Some(s);
            rep.bucket_size = Some(pts.len());
            out.push(rep);
        }
        s *= 2.0;
    }
    Ok(out)
}

/// `arccos(-1/(n+1))`, evaluated as `pi - arccos(1/(n+1))` which rounds
/// better near the ends of the range.
pub fn k_n(n: usize) -> f64 {
    PI - acos(1.0 / (n as f64 + 1.0))
}

/// Diameter of the regular spherical `n`-simplex with circumradius `r`.
pub fn s_n(n: usize, r: f64) -> Result<f64> {
    if n == 0 {
        return Err(usage("n must be positive"));
    }
    if !(r > 0.0) {
        return Err(usage("circumradius must be positive"));
    }
    if r >= PI / 2.0 {
        return Err(Error::NonConvexRegime { radius: r });
    }
    let n = n as f64;
    Ok(2.0 * asin(math::sin(r) * sqrt(2.0 * (n + 1.0) / n) / 2.0))
}

/// Circumradius of the regular hyperbolic `n`-simplex of diameter `d`.
///
/// The simplex is placed symmetrically about the apex `(1, 0, ..., 0)` of
/// the hyperboloid and its circumradius is found by bisection on the
/// realized edge length.
pub fn r_n(n: usize, d: f64) -> Result<f64> {
    if n == 0 {
        return Err(usage("n must be positive"));
    }
    if !(d > 0.0 && d.is_finite()) {
        return Err(usage("diameter must be positive"));
    }
    let dirs = math::regular_simplex(n);
    let edge = |rho: f64| {
        let place = |u: &[f64]| {
            let mut v = Vec::with_capacity(n + 1);
            v.push(0.0);
            v.extend(u.iter().map(|c| sinh(rho) * c));
            crate::space::renormalize_hyperboloid(&mut v);
            v
        };
        hyperbolic_distance(&place(&dirs[0]), &place(&dirs[1]))
    };
    let (mut lo, mut hi) = (0.0, d);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if edge(mid) < d {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-17 * d {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureConstants {
    pub n: usize,
    pub k_n: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_n: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_n: Option<(f64, f64)>,
}

/// `k_n`, plus `s_n(r)` and `r_n(D)` when the parameters are given.
pub fn curvature_constants(
    n: usize,
    sphere_radius: Option<f64>,
    hyperbolic_diameter: Option<f64>,
) -> Result<CurvatureConstants> {
    if n == 0 {
        return Err(usage("n must be positive"));
    }
    Ok(CurvatureConstants {
        n,
        k_n: k_n(n),
        s_n: sphere_radius.map(|r| s_n(n, r).map(|v| (r, v))).transpose()?,
        r_n: hyperbolic_diameter.map(|d| r_n(n, d).map(|v| (d, v))).transpose()?,
    })
}

#[allow(dead_code)]
fn closed_form_r_n(n: usize, d: f64) -> f64 {
    let n = n as f64;
    asinh(2.0 * sinh(d / 2.0) / sqrt(2.0 * (n + 1.0) / n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{MetricTree, TreePoint};

    #[test]
    fn small_examples() {
        let s = Space::euclidean(2);
        let c = circumcenter(&s, &[vec![0.0, 0.0].into(), vec![1.0, 0.0].into()]).unwrap();
        assert_eq!(c.radius, 0.5);
        assert!(s.distance(&c.center, &vec![0.5, 0.0].into()).unwrap() < 1e-15);
        let h = 3f64.sqrt() / 2.0;
        let tri: Vec<Point> = vec![vec![0.0, 0.0].into(), vec![1.0, 0.0].into(), vec![0.5, h].into()];
        let c = circumcenter(&s, &tri).unwrap();
        assert!((c.radius - 1.0 / 3f64.sqrt()).abs() < 1e-14);
        assert_eq!(c.support, vec![0, 1, 2]);
        let t = Space::tree(MetricTree::star(3));
        let pts: Vec<Point> = (0..3).map(|e| TreePoint::new(e, 1.0).into()).collect();
        let c = circumcenter(&t, &pts).unwrap();
        assert_eq!(c.radius, 1.0);
        assert!(t.distance(&c.center, &TreePoint::new(0, 0.0).into()).unwrap() < 1e-15);
    }

    #[test]
    fn jung_constants() {
        assert_eq!(jung_bound(0), 0.0);
        assert_eq!(jung_bound(1), 0.5);
        assert!((jung_bound(2) - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        for n in 1..50 {
            assert!(jung_bound(n + 1) > jung_bound(n) && jung_bound(n) < 1.0 / 2f64.sqrt());
        }
        assert_eq!(k_n(1), 2.0 * PI / 3.0);
    }

    #[test]
    fn hyperbolic_simplex_radius_matches_closed_form() {
        for n in 1..5 {
            for d in [1e-3, 0.5, 3.0, 12.0] {
                let a = r_n(n, d).unwrap();
                let b = closed_form_r_n(n, d);
                assert!((a - b).abs() <= 1e-12 * (1.0 + b), "n={n} d={d}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn spherical_circumcenter() {
        let s = Space::sphere(2);
        let pts: Vec<Point> =
            [[1.0, 0.2, 0.1], [0.9, -0.3, 0.2], [1.0, 0.0, -0.4]].iter().map(|v| Point::sphere(v).unwrap()).collect();
        let c = circumcenter(&s, &pts).unwrap();
        assert!(c.support.len() >= 2);
        for p in &pts {
            assert!(s.distance(&c.center, p).unwrap() <= c.radius + 1e-12);
        }
        // a regular tetrahedron is in no open hemisphere
        let wide: Vec<Point> = math::regular_simplex(3).iter().map(|v| Point::sphere(v).unwrap()).collect();
        assert!(matches!(circumcenter(&s, &wide), Err(Error::NonConvexRegime { .. })));
    }

    #[test]
    fn dimension_bounds() {
        let s = Space::euclidean(2);
        // the diagonal is the diameter, so rad/diam = 1/2
        let square: Vec<Point> =
            [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]].iter().map(|v| v.to_vec().into()).collect();
        let rep = dimension_lower_bound(&s, &square).unwrap();
        assert!((rep.ratio - 0.5).abs() < 1e-15);
        assert_eq!(rep.bound, DimensionBound::Finite(1));
        // equilateral spherical triangle of circumradius 1.5: ratio above 1/sqrt(2)
        let sph = Space::sphere(2);
        let r = 1.5f64;
        let tri: Vec<Point> = (0..3)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / 3.0;
                Point::sphere(&[r.sin() * th.cos(), r.sin() * th.sin(), r.cos()]).unwrap()
            })
            .collect();
        let rep = dimension_lower_bound(&sph, &tri).unwrap();
        assert!(rep.ratio > 1.0 / 2f64.sqrt());
        assert_eq!(rep.bound, DimensionBound::ExceedsAllFiniteBounds);
        let e3 = Space::euclidean(3);
        let simplex: Vec<Point> = math::regular_simplex(3).into_iter().map(Point::from).collect();
        assert_eq!(dimension_lower_bound(&e3, &simplex).unwrap().bound, DimensionBound::Finite(3));
        let two: Vec<Point> = vec![vec![0.0, 0.0].into(), vec![1.0, 0.0].into()];
        assert_eq!(dimension_lower_bound(&s, &two).unwrap().bound, DimensionBound::Finite(1));
    }
}

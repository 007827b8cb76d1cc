//! Normal coordinates at a point: orthonormal tangent frames with the
//! exponential and logarithm maps of the coordinate model spaces.

use alloc::vec;
use alloc::vec::Vec;

use super::{hyperbolic_distance, minkowski, renormalize_hyperboloid, sphere_angle, Point, Space};
use crate::error::{capability, Error, Result};
use crate::math::{self, cos, cosh, sin, sinh, sqrt};

#[derive(Debug, Clone)]
enum Frame {
    Flat { dim: usize },
    Sphere { basis: Vec<Vec<f64>> },
    Hyperbolic { basis: Vec<Vec<f64>> },
    Product(Vec<(Frame, usize)>),
}

/// Orthonormal coordinates on the tangent space at `base`.
///
/// Available for Euclidean, box, sphere, hyperbolic and products of those;
/// trees have no tangent space and yield a capability error.
#[derive(Debug, Clone)]
pub struct Chart {
    base: Point,
    frame: Frame,
}

impl Chart {
    pub fn at(space: &Space, base: &Point) -> Result<Self> {
        space.check_point(base, 1e-9)?;
        Ok(Self { base: base.clone(), frame: frame(space, base)? })
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn dim(&self) -> usize {
        frame_dim(&self.frame)
    }

    /// Normal coordinates of `p`.
    pub fn log(&self, p: &Point) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.dim());
        log_into(&self.frame, &self.base, p, &mut out)?;
        Ok(out)
    }

    /// The point with normal coordinates `v`.
    pub fn exp(&self, v: &[f64]) -> Result<Point> {
        if v.len() != self.dim() {
            return Err(Error::Usage("tangent vector has the wrong dimension".into()));
        }
        exp_of(&self.frame, &self.base, v)
    }
}

fn frame_dim(f: &Frame) -> usize {
    match f {
        Frame::Flat { dim } => *dim,
        Frame::Sphere { basis } | Frame::Hyperbolic { basis } => basis.len(),
        Frame::Product(parts) => parts.iter().map(|(_, d)| d).sum(),
    }
}

fn frame(space: &Space, base: &Point) -> Result<Frame> {
    match (space, base) {
        (Space::Euclidean { dimension } | Space::TruncatedHilbertBox { dimension }, _) => {
            Ok(Frame::Flat { dim: *dimension })
        }
        (Space::Sphere { .. }, Point::Coords(x)) => {
            let ip = |a: &[f64], b: &[f64]| math::dot(a, b);
            Ok(Frame::Sphere { basis: gram_schmidt(x, ip, |v, x| math::axpy(v, -math::dot(v, x), x)) })
        }
        (Space::Hyperbolic { .. }, Point::Coords(x)) => {
            Ok(Frame::Hyperbolic { basis: gram_schmidt(x, minkowski, |v, x| math::axpy(v, minkowski(v, x), x)) })
        }
        (Space::Product { factors }, Point::Product(parts)) => Ok(Frame::Product(
            factors
                .iter()
                .zip(parts)
                .map(|(s, p)| {
                    let f = frame(s, p)?;
                    let d = frame_dim(&f);
                    Ok((f, d))
                })
                .collect::<Result<Vec<_>>>()?,
        )),
        (Space::MetricTree { .. }, _) => Err(capability("metric trees have no tangent chart")),
        _ => Err(Error::SpaceMismatch),
    }
}

/// Orthonormal basis of the tangent space at `x` (dimension `len - 1`),
/// built from the projected standard basis.
fn gram_schmidt(
    x: &[f64],
    ip: impl Fn(&[f64], &[f64]) -> f64,
    project: impl Fn(&[f64], &[f64]) -> Vec<f64>,
) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    // Prefer standard vectors least aligned with x.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| math::fabs(x[i]).partial_cmp(&math::fabs(x[j])).unwrap());
    for i in order {
        if basis.len() == n - 1 {
            break;
        }
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        let mut w = project(&e, x);
        for _ in 0..2 {
            for b in &basis {
                let c = ip(&w, b);
                w = math::axpy(&w, -c, b);
            }
        }
        let nn = ip(&w, &w);
        if nn > 1e-20 {
            basis.push(math::scale(&w, 1.0 / sqrt(nn)));
        }
    }
    basis
}

fn log_into(f: &Frame, base: &Point, p: &Point, out: &mut Vec<f64>) -> Result<()> {
    match (f, base, p) {
        (Frame::Flat { .. }, Point::Coords(x), Point::Coords(q)) => {
            out.extend(q.iter().zip(x).map(|(a, b)| a - b));
        }
        (Frame::Sphere { basis }, Point::Coords(x), Point::Coords(q)) => {
            let theta = sphere_angle(x, q);
            let u = math::axpy(q, -math::dot(q, x), x);
            let un = math::norm(&u);
            let k = if un > 0.0 { theta / un } else { 0.0 };
            out.extend(basis.iter().map(|b| k * math::dot(&u, b)));
        }
        (Frame::Hyperbolic { basis }, Point::Coords(x), Point::Coords(q)) => {
            let d = hyperbolic_distance(x, q);
            let u = math::axpy(q, minkowski(q, x), x);
            let un = sqrt(minkowski(&u, &u).max(0.0));
            let k = if un > 0.0 { d / un } else { 0.0 };
            out.extend(basis.iter().map(|b| k * minkowski(&u, b)));
        }
        (Frame::Product(parts), Point::Product(bs), Point::Product(ps)) => {
            for ((f, _), (b, q)) in parts.iter().zip(bs.iter().zip(ps)) {
                log_into(f, b, q, out)?;
            }
        }
        _ => return Err(Error::SpaceMismatch),
    }
    Ok(())
}

fn exp_of(f: &Frame, base: &Point, v: &[f64]) -> Result<Point> {
    match (f, base) {
        (Frame::Flat { .. }, Point::Coords(x)) => Ok(Point::Coords(math::add(x, v))),
        (Frame::Sphere { basis }, Point::Coords(x)) => {
            let w = combine(basis, v, x.len());
            let th = math::norm(&w);
            if th == 0.0 {
                return Ok(base.clone());
            }
            let y: Vec<f64> = x.iter().zip(&w).map(|(a, b)| cos(th) * a + sin(th) * b / th).collect();
            Point::sphere(&y)
        }
        (Frame::Hyperbolic { basis }, Point::Coords(x)) => {
            let w = combine(basis, v, x.len());
            let th = sqrt(minkowski(&w, &w).max(0.0));
            if th == 0.0 {
                return Ok(base.clone());
            }
            let mut y: Vec<f64> = x.iter().zip(&w).map(|(a, b)| cosh(th) * a + sinh(th) * b / th).collect();
            renormalize_hyperboloid(&mut y);
            Ok(Point::Coords(y))
        }
        (Frame::Product(parts), Point::Product(bs)) => {
            let mut at = 0;
            let mut out = Vec::with_capacity(parts.len());
            for ((f, d), b) in parts.iter().zip(bs) {
                out.push(exp_of(f, b, &v[at..at + d])?);
                at += d;
            }
            Ok(Point::Product(out))
        }
        _ => Err(Error::SpaceMismatch),
    }
}

fn combine(basis: &[Vec<f64>], v: &[f64], n: usize) -> Vec<f64> {
    let mut w = vec![0.0; n];
    for (c, b) in v.iter().zip(basis) {
        for (wi, bi) in w.iter_mut().zip(b) {
            *wi += c * bi;
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip(space: &Space, base: &Point, p: &Point) {
        let chart = Chart::at(space, base).unwrap();
        let v = chart.log(p).unwrap();
        assert!((math::norm(&v) - space.distance(base, p).unwrap()).abs() < 1e-10);
        let back = chart.exp(&v).unwrap();
        assert!(space.distance(&back, p).unwrap() < 1e-10);
    }

    #[test]
    fn log_exp_roundtrip() {
        roundtrip(
            &Space::sphere(2),
            &Point::sphere(&[1.0, 2.0, 2.0]).unwrap(),
            &Point::sphere(&[-1.0, 0.5, 2.0]).unwrap(),
        );
        roundtrip(
            &Space::hyperbolic(3),
            &Point::hyperboloid(&[0.5, -1.0, 2.0]),
            &Point::hyperboloid(&[-1.0, 0.0, 0.3]),
        );
        let prod = Space::product(alloc::vec![Space::euclidean(2), Space::hyperbolic(2)]);
        roundtrip(
            &prod,
            &Point::Product(alloc::vec![alloc::vec![1.0, 2.0].into(), Point::hyperboloid(&[0.1, 0.2])]),
            &Point::Product(alloc::vec![alloc::vec![-1.0, 0.0].into(), Point::hyperboloid(&[1.1, -0.7])]),
        );
    }
}

//! Convergence of normalized distance and Busemann functions uniformly on
//! bounded sets.

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::ScalarField;
use crate::space::{BoundaryDirection, MetricTree, Point, Space, TreePoint};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HilbertBasisDemo {
    pub dimension: usize,
    pub indices: Vec<usize>,
    /// `sup |d(x, n e_n) - n|` over the probes, per index.
    pub sup_values: Vec<f64>,
    /// `2 n sup / max |x|^2`, tending to 1.
    pub rates: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarTreeDemo {
    pub rays: usize,
    /// `sup |b_j - d_o|` over probes off ray `j`, per ray.
    pub off_ray_gap: Vec<f64>,
    /// `sup |b_j + d_o|` over probes on ray `j`, per ray.
    pub on_ray_gap: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct C0Demos {
    pub hilbert: HilbertBasisDemo,
    pub tree: StarTreeDemo,
}

/// Probes supported on the first four coordinates.
fn euclidean_probes(d: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; d]];
    for i in 0..4.min(d) {
        for s in [1.0, -2.0] {
            let mut x = vec![0.0; d];
            x[i] = s;
            out.push(x);
        }
    }
    let mut x = vec![0.0; d];
    x[..4.min(d)].iter_mut().for_each(|c| *c = 1.0);
    out.push(x);
    out
}

pub fn hilbert_basis_demo(d: usize) -> Result<HilbertBasisDemo> {
    let space = Space::euclidean(d);
    let probes = euclidean_probes(d);
    let r2 = probes.iter().map(|p| crate::math::dot(p, p)).fold(0.0, f64::max);
    let origin = Point::Coords(vec![0.0; d]);
    let mut indices = Vec::new();
    let mut sup_values = Vec::new();
    let mut rates = Vec::new();
    let mut n = 8;
    while n <= d {
        let mut anchor = vec![0.0; d];
        anchor[n - 1] = n as f64;
        let f = ScalarField::normalized_distance(anchor, origin.clone());
        let mut sup = 0.0f64;
        for p in &probes {
            sup = sup.max(libm::fabs(f.evaluate(&space, &Point::Coords(p.clone()))?));
        }
        indices.push(n);
        sup_values.push(sup);
        rates.push(2.0 * n as f64 * sup / r2);
        n *= 2;
    }
    Ok(HilbertBasisDemo { dimension: d, indices, sup_values, rates })
}

pub fn star_tree_demo(rays: usize) -> Result<StarTreeDemo> {
    let space = Space::tree(MetricTree::star(rays));
    let o: Point = TreePoint::new(0, 0.0).into();
    let probes: Vec<TreePoint> = (0..rays).flat_map(|e| [0.5, 1.0, 3.0, 10.0].map(|s| TreePoint::new(e, s))).collect();
    let mut off = Vec::with_capacity(rays);
    let mut on = Vec::with_capacity(rays);
    for j in 0..rays {
        let b = ScalarField::busemann(BoundaryDirection::Ray { ray: j }, o.clone());
        let (mut g_off, mut g_on) = (0.0f64, 0.0f64);
        for p in &probes {
            let x: Point = (*p).into();
            let bv = b.evaluate(&space, &x)?;
            let d = space.distance(&o, &x)?;
            if p.edge == j {
                g_on = g_on.max(libm::fabs(bv + d));
            } else {
                g_off = g_off.max(libm::fabs(bv - d));
            }
        }
        off.push(g_off);
        on.push(g_on);
    }
    Ok(StarTreeDemo { rays, off_ray_gap: off, on_ray_gap: on })
}

pub fn c0_convergence_demos() -> Result<C0Demos> {
    Ok(C0Demos { hilbert: hilbert_basis_demo(512)?, tree: star_tree_demo(6)? })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demos() {
        let d = c0_convergence_demos().unwrap();
        assert!(d.hilbert.sup_values.windows(2).all(|w| w[1] < w[0]));
        assert!((d.hilbert.rates.last().unwrap() - 1.0).abs() < 1e-2);
        assert!(d.tree.off_ray_gap.iter().all(|&g| g == 0.0));
        assert!(d.tree.on_ray_gap.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn unit_probe_formula() {
        let s = Space::euclidean(40);
        for n in [2usize, 10, 40] {
            let mut a = vec![0.0; 40];
            a[n - 1] = n as f64;
            let f = ScalarField::normalized_distance(a, vec![0.0; 40]);
            let mut e1 = vec![0.0; 40];
            e1[0] = 1.0;
            let want = libm::sqrt((n * n + 1) as f64) - n as f64;
            assert!((f.evaluate(&s, &e1.into()).unwrap() - want).abs() < 1e-12);
        }
        let f = ScalarField::normalized_distance(vec![1.0, 0.0], vec![0.0, 0.0]);
        assert_eq!(f.evaluate(&Space::euclidean(2), &vec![0.0, 0.0].into()).unwrap(), 0.0);
    }
}

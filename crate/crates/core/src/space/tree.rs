//! Metric trees with finite edges and infinite rays.
//!
//! A point is an `(edge, offset)` pair, the offset measured from the edge's
//! `from` vertex. Geodesics are found by routing through the endpoint pair
//! that minimizes the length, which is exact in a tree.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::fabs;

/// Serialized form of an edge: a finite edge joins `from` and `to`; an edge
/// without `to` is an infinite ray leaving `from`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub from: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeSpec {
    pub vertices: usize,
    pub edges: Vec<EdgeSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: Option<usize>,
    /// `f64::INFINITY` for rays.
    pub length: f64,
}

impl Edge {
    pub fn is_ray(&self) -> bool {
        self.to.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreePoint {
    pub edge: usize,
    pub offset: f64,
}

impl TreePoint {
    pub fn new(edge: usize, offset: f64) -> Self {
        Self { edge, offset }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TreeSpec", into = "TreeSpec")]
pub struct MetricTree {
    vertices: usize,
    edges: Vec<Edge>,
    /// `(edge, vertex is the edge's from-end)` per vertex.
    incident: Vec<Vec<(usize, bool)>>,
    /// Row-major vertex distance matrix.
    vdist: Vec<f64>,
    /// `parent[u * n + v]`: edge through which BFS rooted at `u` reached `v`.
    parent: Vec<Option<usize>>,
}

impl TryFrom<TreeSpec> for MetricTree {
    type Error = Error;

    fn try_from(spec: TreeSpec) -> Result<Self> {
        let edges = spec
            .edges
            .iter()
            .map(|e| match e.to {
                Some(to) => Ok(Edge {
                    from: e.from,
                    to: Some(to),
                    length: e
                        .length
                        .ok_or_else(|| Error::InvalidSpace(format!("finite edge {}-{} needs a length", e.from, to)))?,
                }),
                None => Ok(Edge { from: e.from, to: None, length: f64::INFINITY }),
            })
            .collect::<Result<Vec<_>>>()?;
        MetricTree::new(spec.vertices, edges)
    }
}

impl From<MetricTree> for TreeSpec {
    fn from(t: MetricTree) -> Self {
        TreeSpec {
            vertices: t.vertices,
            edges: t
                .edges
                .iter()
                .map(|e| EdgeSpec { from: e.from, to: e.to, length: if e.is_ray() { None } else { Some(e.length) } })
                .collect(),
        }
    }
}

impl MetricTree {
    pub fn new(vertices: usize, edges: Vec<Edge>) -> Result<Self> {
        if vertices == 0 {
            return Err(Error::InvalidSpace("tree needs at least one vertex".into()));
        }
        let mut incident = vec![Vec::new(); vertices];
        let mut finite = 0usize;
        for (id, e) in edges.iter().enumerate() {
            if e.from >= vertices {
                return Err(Error::InvalidSpace(format!("edge {id} starts at unknown vertex")));
            }
            incident[e.from].push((id, true));
            if let Some(to) = e.to {
                if to >= vertices || to == e.from {
                    return Err(Error::InvalidSpace(format!("edge {id} has a bad endpoint")));
                }
                if !(e.length > 0.0 && e.length.is_finite()) {
                    return Err(Error::InvalidSpace(format!("edge {id} needs a positive finite length")));
                }
                incident[to].push((id, false));
                finite += 1;
            } else if e.length != f64::INFINITY {
                return Err(Error::InvalidSpace(format!("ray {id} must have infinite length")));
            }
        }
        if finite != vertices - 1 {
            return Err(Error::InvalidSpace(format!(
                "a tree on {vertices} vertices has {} finite edges, got {finite}",
                vertices - 1
            )));
        }
        let n = vertices;
        let mut vdist = vec![f64::INFINITY; n * n];
        let mut parent = vec![None; n * n];
        for root in 0..n {
            vdist[root * n + root] = 0.0;
            let mut stack = vec![root];
            while let Some(u) = stack.pop() {
                for &(eid, _) in &incident[u] {
                    let e = &edges[eid];
                    let Some(to) = e.to else { continue };
                    let w = if e.from == u { to } else { e.from };
                    if vdist[root * n + w].is_infinite() {
                        vdist[root * n + w] = vdist[root * n + u] + e.length;
                        parent[root * n + w] = Some(eid);
                        stack.push(w);
                    }
                }
            }
            if vdist[root * n..(root + 1) * n].iter().any(|d| d.is_infinite()) {
                return Err(Error::InvalidSpace("tree is not connected".into()));
            }
        }
        Ok(Self { vertices, edges, incident, vdist, parent })
    }

    /// A single vertex with `rays` infinite rays (the Euclidean cone over a
    /// finite set).
    pub fn star(rays: usize) -> Self {
        let edges = (0..rays).map(|_| Edge { from: 0, to: None, length: f64::INFINITY }).collect();
        Self::new(1, edges).expect("a star is a tree")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> Result<&Edge> {
        self.edges.get(id).ok_or_else(|| Error::InvalidPoint(format!("unknown edge {id}")))
    }

    pub fn vertex_distance(&self, u: usize, v: usize) -> f64 {
        self.vdist[u * self.vertices + v]
    }

    /// The point representing vertex `v`.
    pub fn vertex_point(&self, v: usize) -> TreePoint {
        let (eid, at_from) = self.incident[v][0];
        let offset = if at_from { 0.0 } else { self.edges[eid].length };
        TreePoint::new(eid, offset)
    }

    pub fn check_point(&self, p: &TreePoint, tol: f64) -> Result<()> {
        let e = self.edge(p.edge)?;
        if !(p.offset >= -tol && p.offset <= e.length + tol) || p.offset.is_nan() {
            return Err(Error::InvalidPoint(format!(
                "offset {} outside edge {} of length {}",
                p.offset, p.edge, e.length
            )));
        }
        Ok(())
    }

    /// Endpoints reachable from `p` along its edge, with the distance to each.
    fn ends(&self, p: &TreePoint) -> ([(usize, f64); 2], usize) {
        let e = &self.edges[p.edge];
        let first = (e.from, p.offset);
        match e.to {
            Some(to) => ([first, (to, e.length - p.offset)], 2),
            None => ([first, first], 1),
        }
    }

    fn best_route(&self, p: &TreePoint, q: &TreePoint) -> (usize, f64, usize, f64, f64) {
        let (pe, pn) = self.ends(p);
        let (qe, qn) = self.ends(q);
        let mut best = (0, 0.0, 0, 0.0, f64::INFINITY);
        for &(u, du) in &pe[..pn] {
            for &(v, dv) in &qe[..qn] {
                let total = du + self.vertex_distance(u, v) + dv;
                if total < best.4 {
                    best = (u, du, v, dv, total);
                }
            }
        }
        best
    }

    pub fn distance(&self, p: &TreePoint, q: &TreePoint) -> f64 {
        if p.edge == q.edge {
            return fabs(p.offset - q.offset);
        }
        self.best_route(p, q).4
    }

    /// Distance from `p` to vertex `v`.
    pub fn distance_to_vertex(&self, p: &TreePoint, v: usize) -> f64 {
        let (ends, n) = self.ends(p);
        ends[..n].iter().map(|&(u, du)| du + self.vertex_distance(u, v)).fold(f64::INFINITY, f64::min)
    }

    /// Edges on the vertex path from `u` to `v`, each with the vertex it is
    /// entered from.
    fn vertex_path(&self, u: usize, v: usize) -> Vec<(usize, usize)> {
        let n = self.vertices;
        let mut path = Vec::new();
        let mut w = v;
        while w != u {
            let eid = self.parent[u * n + w].expect("connected tree");
            let e = &self.edges[eid];
            let prev = if e.to == Some(w) { e.from } else { e.to.expect("finite edge") };
            path.push((eid, prev));
            w = prev;
        }
        path.reverse();
        path
    }

    /// Point at distance `s` from vertex `entry` along edge `eid`.
    fn along(&self, eid: usize, entry: usize, s: f64) -> TreePoint {
        let e = &self.edges[eid];
        if e.from == entry {
            TreePoint::new(eid, s)
        } else {
            TreePoint::new(eid, e.length - s)
        }
    }

    /// Point at distance `s` from `p` on the geodesic towards `q`.
    pub fn point_at_distance(&self, p: &TreePoint, q: &TreePoint, s: f64) -> TreePoint {
        if p.edge == q.edge {
            let dir = if q.offset >= p.offset { 1.0 } else { -1.0 };
            return TreePoint::new(p.edge, p.offset + dir * s);
        }
        let (u, du, v, dv, total) = self.best_route(p, q);
        let s = s.clamp(0.0, total);
        if s <= du {
            let e = &self.edges[p.edge];
            let off = if e.from == u { p.offset - s } else { p.offset + s };
            return TreePoint::new(p.edge, off);
        }
        let mut rest = s - du;
        for (eid, entry) in self.vertex_path(u, v) {
            let len = self.edges[eid].length;
            if rest <= len {
                return self.along(eid, entry, rest);
            }
            rest -= len;
        }
        let back = (dv - rest).max(0.0);
        let e = &self.edges[q.edge];
        let off = if e.from == v { q.offset - back } else { q.offset + back };
        TreePoint::new(q.edge, off.clamp(0.0, e.length))
    }

    /// All points at distance exactly `h > 0` from `p`.
    pub fn sphere_points(&self, p: &TreePoint, h: f64, tol: f64) -> Vec<TreePoint> {
        let e = &self.edges[p.edge];
        let mut out = Vec::new();
        // (edge, entry vertex or None for starting inside, start offset, direction, remaining)
        let at_from = p.offset <= tol;
        let at_to = !e.is_ray() && e.length - p.offset <= tol;
        if at_from || at_to {
            let v = if at_from { e.from } else { e.to.unwrap() };
            self.walk_from_vertex(v, None, h, &mut out);
        } else {
            // towards `from`
            if p.offset >= h {
                out.push(TreePoint::new(p.edge, p.offset - h));
            } else {
                self.walk_from_vertex(e.from, Some(p.edge), h - p.offset, &mut out);
            }
            let room = e.length - p.offset;
            if room >= h {
                out.push(TreePoint::new(p.edge, p.offset + h));
            } else {
                self.walk_from_vertex(e.to.unwrap(), Some(p.edge), h - room, &mut out);
            }
        }
        out
    }

    fn walk_from_vertex(&self, v: usize, came: Option<usize>, h: f64, out: &mut Vec<TreePoint>) {
        if h <= 0.0 {
            out.push(self.vertex_point(v));
            return;
        }
        for &(eid, at_from) in &self.incident[v] {
            if Some(eid) == came {
                continue;
            }
            let e = &self.edges[eid];
            if h <= e.length {
                out.push(self.along(eid, v, h));
            } else {
                let w = if at_from { e.to.unwrap() } else { e.from };
                self.walk_from_vertex(w, Some(eid), h - e.length, out);
            }
        }
    }

    /// Number of edge-directions leaving `p` (the tree's "tangent cone").
    pub fn branching(&self, p: &TreePoint, tol: f64) -> usize {
        let e = &self.edges[p.edge];
        if p.offset <= tol {
            self.incident[e.from].len()
        } else if !e.is_ray() && e.length - p.offset <= tol {
            self.incident[e.to.unwrap()].len()
        } else {
            2
        }
    }
}

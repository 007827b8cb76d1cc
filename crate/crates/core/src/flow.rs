//! Discrete gradient flow by the proximal (resolvent) scheme.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::field::{golden_max, slope, ScalarField};
use crate::math::{self, cosh, fabs, sinh};
use crate::space::{BoundaryDirection, Chart, Point, Space};
use crate::tolerance::ToleranceProfile;

/// A recorded run of the flow. `grad_norms[k]` is `|grad(-f)|` at
/// `points[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowTrajectory {
    pub start: Point,
    pub step: f64,
    pub step_rule: String,
    pub times: Vec<f64>,
    pub points: Vec<Point>,
    pub values: Vec<f64>,
    pub grad_norms: Vec<f64>,
    /// All gradient norms came from closed forms.
    pub exact_gradients: bool,
    /// `max_k |(f_{k+1} - f_k)/step + g_{k+1}^2| / step` over every step.
    pub energy_constant: f64,
    /// `max_k |d(p_k, p_{k+1})/step - g_{k+1}|`.
    pub max_speed_gap: f64,
    /// Largest increase of `f` over one step (should be <= 0).
    pub max_value_increase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSettings {
    pub step: f64,
    pub horizon: f64,
    /// Keep every `record_stride`-th point (the last point is always kept).
    pub record_stride: usize,
}

impl FlowSettings {
    pub fn new(step: f64, horizon: f64) -> Self {
        Self { step, horizon, record_stride: 1 }
    }

    pub fn stride(mut self, stride: usize) -> Self {
        self.record_stride = stride.max(1);
        self
    }
}

/// One proximal step `argmin_y f(y) + d(x, y)^2 / (2 step)`.
pub fn flow_step(space: &Space, f: &ScalarField, x: &Point, step: f64) -> Result<Point> {
    flow_step_with(space, f, x, step, &ToleranceProfile::default())
}

pub fn flow_step_with(space: &Space, f: &ScalarField, x: &Point, step: f64, tol: &ToleranceProfile) -> Result<Point> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(usage("step size must be positive"));
    }
    space.check_point(x, 1e-9)?;
    prox(space, f, x, step, tol)
}

fn as_affine(f: &ScalarField) -> Option<(&[f64], f64)> {
    match f {
        ScalarField::Affine { normal, constant } => Some((normal, *constant)),
        ScalarField::InfShiftOf { members } if members.len() == 1 => {
            as_affine(&members[0].0).map(|(a, b)| (a, b + members[0].1))
        }
        _ => None,
    }
}

fn box_clamp(x: &mut [f64]) {
    for (i, a) in x.iter_mut().enumerate() {
        let b = (i + 1) as f64;
        *a = a.clamp(-b, b);
    }
}

fn prox(space: &Space, f: &ScalarField, x: &Point, step: f64, tol: &ToleranceProfile) -> Result<Point> {
    let boxed = matches!(space, Space::TruncatedHilbertBox { .. });
    if let (Some((a, _)), Point::Coords(c)) = (as_affine(f), x) {
        let mut y = math::axpy(c, -step, a);
        if boxed {
            box_clamp(&mut y);
        }
        return Ok(Point::Coords(y));
    }
    match f {
        ScalarField::DistanceTo { body } => {
            let q = body.project_with(space, x, tol)?;
            return toward(space, x, &q, step);
        }
        ScalarField::NormalizedDistance { anchor, .. } => return toward(space, x, anchor, step),
        ScalarField::Busemann { direction, .. } => {
            if let (true, Some(u), Point::Coords(c)) = (boxed, direction.vector(), x) {
                let mut y = math::axpy(c, step, u);
                box_clamp(&mut y);
                return Ok(Point::Coords(y));
            }
            return direction.ray_point(space, x, step);
        }
        ScalarField::InfShiftOf { members } if members.len() == 1 => return prox(space, &members[0].0, x, step, tol),
        _ => {}
    }
    if let (Space::Euclidean { .. }, Point::Coords(c)) = (space, x) {
        if let ScalarField::MaxOf { members } = f {
            let pieces: Option<Vec<(&[f64], f64)>> = members.iter().map(as_affine).collect();
            if let Some(pieces) = pieces {
                return Ok(Point::Coords(prox_max_affine(&pieces, c, step)));
            }
        }
        if let Some(y) = prox_smooth(space, f, c, step, tol)? {
            return Ok(Point::Coords(y));
        }
    }
    prox_generic(space, f, x, step, tol)
}

/// Moves `step` toward `target`, stopping at the target.
fn toward(space: &Space, x: &Point, target: &Point, step: f64) -> Result<Point> {
    let d = space.distance_unchecked(x, target);
    if d <= step {
        Ok(target.clone())
    } else {
        space.geodesic_unchecked(x, target, step / d)
    }
}

/// Exact proximal point of `max_i <a_i, y> + b_i` via its dual on the
/// simplex: enumerate small active sets among near-active pieces, with a
/// Frank-Wolfe fallback.
fn prox_max_affine(pieces: &[(&[f64], f64)], x: &[f64], step: f64) -> Vec<f64> {
    let dim = x.len();
    let vals: Vec<f64> = pieces.iter().map(|(a, b)| math::dot(a, x) + b).collect();
    let top = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let big = pieces.iter().map(|(a, _)| math::norm(a)).fold(0.0, f64::max);
    let cut = top - 2.0 * step * big * big - 1e-12 * (1.0 + fabs(top));
    let cand: Vec<usize> = (0..pieces.len()).filter(|&i| vals[i] >= cut).collect();
    let feasible =
        |y: &[f64], mu: f64| pieces.iter().all(|(a, b)| math::dot(a, y) + b <= mu + 1e-11 * (1.0 + fabs(mu)));
    if cand.len() <= 12 {
        let mut subset = Vec::new();
        for size in 1..=cand.len().min(dim + 1) {
            if let Some(y) = active_sets(pieces, &vals, &cand, x, step, size, 0, &mut subset, &feasible) {
                return y;
            }
        }
    }
    // Frank-Wolfe with away steps on D(t) = sum t_i vals_i - step/2 |sum t_i a_i|^2.
    let m = pieces.len();
    let start = (0..m).max_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    let mut theta = vec![0.0; m];
    theta[start] = 1.0;
    let mut v = pieces[start].0.to_vec();
    for _ in 0..100_000 {
        let y = math::axpy(x, -step, &v);
        let g: Vec<f64> = pieces.iter().map(|(a, b)| math::dot(a, &y) + b).collect();
        let t = (0..m).max_by(|&a, &b| g[a].total_cmp(&g[b])).unwrap();
        let aw = (0..m).filter(|&i| theta[i] > 0.0).min_by(|&a, &b| g[a].total_cmp(&g[b])).unwrap();
        let mean: f64 = (0..m).map(|i| theta[i] * g[i]).sum();
        let (gap_fw, gap_aw) = (g[t] - mean, mean - g[aw]);
        if gap_fw.max(gap_aw) <= 1e-15 * (1.0 + fabs(mean)) {
            return y;
        }
        let fw = gap_fw >= gap_aw;
        let (dv, gap, cap) = if fw {
            (math::sub(pieces[t].0, &v), gap_fw, 1.0)
        } else {
            (math::sub(&v, pieces[aw].0), gap_aw, theta[aw] / (1.0 - theta[aw]).max(1e-300))
        };
        let dd = math::dot(&dv, &dv);
        let gamma = if dd == 0.0 { cap } else { (gap / (step * dd)).min(cap) };
        if fw {
            theta.iter_mut().for_each(|w| *w *= 1.0 - gamma);
            theta[t] += gamma;
        } else {
            theta.iter_mut().for_each(|w| *w *= 1.0 + gamma);
            theta[aw] -= gamma;
            if theta[aw] < 1e-16 {
                theta[aw] = 0.0;
            }
        }
        v = math::axpy(&v, gamma, &dv);
    }
    math::axpy(x, -step, &v)
}

#[allow(clippy::too_many_arguments)]
fn active_sets(
    pieces: &[(&[f64], f64)],
    vals: &[f64],
    cand: &[usize],
    x: &[f64],
    step: f64,
    size: usize,
    from: usize,
    subset: &mut Vec<usize>,
    feasible: &dyn Fn(&[f64], f64) -> bool,
) -> Option<Vec<f64>> {
    if subset.len() == size {
        let k = size + 1;
        let mut a = vec![0.0; k * k];
        let mut rhs = vec![0.0; k];
        for (r, &i) in subset.iter().enumerate() {
            for (c, &j) in subset.iter().enumerate() {
                a[r * k + c] = step * math::dot(pieces[i].0, pieces[j].0);
            }
            a[r * k + size] = 1.0;
            a[size * k + r] = 1.0;
            rhs[r] = vals[i];
        }
        rhs[size] = 1.0;
        let sol = math::solve(a, rhs, k)?;
        if sol[..size].iter().any(|&t| t < -1e-13) {
            return None;
        }
        let mut y = x.to_vec();
        for (&i, &t) in subset.iter().zip(&sol) {
            y = math::axpy(&y, -step * t.max(0.0), pieces[i].0);
        }
        return if feasible(&y, sol[size]) { Some(y) } else { None };
    }
    for idx in from..cand.len() {
        subset.push(cand[idx]);
        let r = active_sets(pieces, vals, cand, x, step, size, idx + 1, subset, feasible);
        subset.pop();
        if r.is_some() {
            return r;
        }
    }
    None
}

/// Fixed-point iteration `y = x - step * grad f(y)` for fields that are
/// smooth along the iteration. `None` when the structure or convergence
/// does not allow it.
fn prox_smooth(
    space: &Space,
    f: &ScalarField,
    x: &[f64],
    step: f64,
    tol: &ToleranceProfile,
) -> Result<Option<Vec<f64>>> {
    let grad = |y: &[f64]| -> Result<Option<Vec<f64>>> {
        Ok(match f.flat_subgradient(space, y, tol)? {
            Some(s) if s.smooth => Some(s.vector),
            _ => None,
        })
    };
    let Some(g0) = grad(x)? else {
        return Ok(None);
    };
    let mut y = math::axpy(x, -step, &g0);
    let mut last = f64::INFINITY;
    for _ in 0..tol.prox_max_iterations {
        let Some(g) = grad(&y)? else {
            return Ok(None);
        };
        let next = math::axpy(x, -step, &g);
        let moved = math::dist(&next, &y);
        y = next;
        if moved <= 1e-15 * (1.0 + math::norm(&y)) {
            return Ok(Some(y));
        }
        if moved > 0.9 * last && moved > 1e-13 {
            return Ok(None);
        }
        last = moved;
    }
    Ok(None)
}

/// Descent on `phi(y) = f(y) + d(x, y)^2 / (2 step)` by golden-section line
/// searches along the steepest sampled direction.
fn prox_generic(space: &Space, f: &ScalarField, x: &Point, step: f64, tol: &ToleranceProfile) -> Result<Point> {
    let phi = |y: &Point| -> Result<f64> {
        let d = space.distance_unchecked(x, y);
        Ok(f.value(space, y, tol)? + d * d / (2.0 * step))
    };
    let lip = f.lipschitz().max(1e-12);
    let mut radius = step * lip;
    let floor = 1e-11 * radius;
    let mut y = x.clone();
    let mut best = phi(&y)?;
    for _ in 0..tol.prox_max_iterations {
        if radius <= floor {
            return Ok(y);
        }
        let mut cands: Vec<Point> = Vec::new();
        match (space, &y) {
            (Space::MetricTree { tree }, Point::Tree(tp)) => {
                cands.extend(tree.sphere_points(tp, radius, 1e-12).into_iter().map(Point::Tree));
            }
            _ => {
                let chart = Chart::at(space, &y)?;
                let mut dirs = math::sphere_directions(chart.dim(), 32);
                if let Ok(v) = chart.log(x) {
                    if let Some(u) = math::normalized(&v) {
                        dirs.push(u);
                    }
                }
                for d in dirs {
                    if let Ok(q) = chart.exp(&math::scale(&d, radius)) {
                        if space.check_point(&q, 1e-12).is_ok() {
                            cands.push(q);
                        }
                    }
                }
            }
        }
        let mut target: Option<(f64, Point)> = None;
        for q in cands {
            let v = phi(&q)?;
            if target.as_ref().is_none_or(|(b, _)| v < *b) {
                target = Some((v, q));
            }
        }
        let Some((_, q)) = target else {
            radius *= 0.5;
            continue;
        };
        let line = |t: f64| {
            space.geodesic_unchecked(&y, &q, t).ok().and_then(|p| phi(&p).ok()).map_or(f64::NEG_INFINITY, |v| -v)
        };
        let (t, neg) = golden_max(line, 0.0, 1.0, 50);
        if -neg < best - 1e-15 * (1.0 + fabs(best)) {
            let moved = t * radius;
            y = space.geodesic_unchecked(&y, &q, t)?;
            best = -neg;
            radius = radius.min(4.0 * moved.max(floor));
        } else {
            radius *= 0.5;
        }
    }
    Err(Error::Numerical(format!(
        "proximal line search did not converge within {} iterations (radius {radius:e}, objective {best})",
        tol.prox_max_iterations
    )))
}

/// Runs the flow up to `horizon` with step `step`.
pub fn run_flow(space: &Space, f: &ScalarField, x: &Point, horizon: f64, step: f64) -> Result<FlowTrajectory> {
    run_flow_with(space, f, x, &FlowSettings::new(step, horizon), &ToleranceProfile::default())
}

pub fn run_flow_with(
    space: &Space,
    f: &ScalarField,
    x: &Point,
    settings: &FlowSettings,
    tol: &ToleranceProfile,
) -> Result<FlowTrajectory> {
    let step = settings.step;
    if !(settings.horizon > 0.0 && step > 0.0) {
        return Err(usage("horizon and step must be positive"));
    }
    space.check_point(x, 1e-9)?;
    let n = libm::round(settings.horizon / step).max(1.0) as usize;
    let stride = settings.record_stride.max(1);
    let probe = step.max(1e-6);
    let mut p = x.clone();
    let mut fp = f.value(space, &p, tol)?;
    let (mut gp, mut exact) = slope(space, f, &p, probe, tol)?;
    let mut traj = FlowTrajectory {
        start: x.clone(),
        step,
        step_rule: "proximal".into(),
        times: vec![0.0],
        points: vec![p.clone()],
        values: vec![fp],
        grad_norms: vec![gp],
        exact_gradients: exact,
        energy_constant: 0.0,
        max_speed_gap: 0.0,
        max_value_increase: f64::NEG_INFINITY,
    };
    for k in 1..=n {
        let q = prox(space, f, &p, step, tol)?;
        let fq = f.value(space, &q, tol)?;
        let (gq, ex) = slope(space, f, &q, probe, tol)?;
        exact &= ex;
        let residual = fabs((fq - fp) / step + gq * gq);
        traj.energy_constant = traj.energy_constant.max(residual / step);
        let speed = space.distance_unchecked(&p, &q) / step;
        traj.max_speed_gap = traj.max_speed_gap.max(fabs(speed - gq));
        traj.max_value_increase = traj.max_value_increase.max(fq - fp);
        p = q;
        fp = fq;
        gp = gq;
        if k % stride == 0 || k == n {
            traj.times.push(k as f64 * step);
            traj.points.push(p.clone());
            traj.values.push(fp);
            traj.grad_norms.push(gp);
        }
    }
    traj.exact_gradients = exact;
    Ok(traj)
}

/// Largest ratio `d(phi_t x, phi_t y) / d(x, y)` over the run.
pub fn semicontraction_check(
    space: &Space,
    f: &ScalarField,
    x: &Point,
    y: &Point,
    horizon: f64,
    step: f64,
) -> Result<f64> {
    let tol = ToleranceProfile::default();
    let d0 = space.distance(x, y)?;
    if d0 == 0.0 {
        return Err(usage("semicontraction needs two distinct starting points"));
    }
    let n = libm::round(horizon / step).max(1.0) as usize;
    let (mut p, mut q) = (x.clone(), y.clone());
    let mut worst = 1.0f64;
    for _ in 0..n {
        p = prox(space, f, &p, step, &tol)?;
        q = prox(space, f, &q, step, &tol)?;
        worst = worst.max(space.distance_unchecked(&p, &q) / d0);
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeReport {
    /// `d(start, end) / T`.
    pub velocity: f64,
    /// `d(p(T/2), p(T)) / (T/2)`, the Cauchy increment over the last doubling.
    pub tail_velocity: f64,
    pub direction: Option<BoundaryDirection>,
    /// Angles between the start-to-point directions at consecutive doubling
    /// times, oldest first.
    pub direction_residuals: Vec<f64>,
    pub doubling_times: Vec<f64>,
    pub min_grad_norm: f64,
    /// `eps^2 / L` with `eps` the smallest recorded gradient norm.
    pub velocity_floor: f64,
    pub floor_holds: bool,
    pub bounded: bool,
}

/// Escape rate and limit direction of a trajectory, from its state at the
/// doubling times `T/16, ..., T`.
pub fn velocity_of_escape(space: &Space, traj: &FlowTrajectory, lipschitz: f64) -> Result<EscapeReport> {
    velocity_of_escape_with(space, traj, lipschitz, &ToleranceProfile::default())
}

pub fn velocity_of_escape_with(
    space: &Space,
    traj: &FlowTrajectory,
    lipschitz: f64,
    tol: &ToleranceProfile,
) -> Result<EscapeReport> {
    let total = *traj.times.last().ok_or_else(|| usage("empty trajectory"))?;
    if traj.times.len() < 5 || traj.times[1] > total / 16.0 + 1e-12 * total {
        return Err(usage("trajectory must span at least four doublings of time"));
    }
    let index_at = |t: f64| {
        let k = traj.times.partition_point(|&s| s < t);
        if k == 0 {
            0
        } else if k >= traj.times.len() || t - traj.times[k - 1] < traj.times[k] - t {
            (k - 1).min(traj.times.len() - 1)
        } else {
            k
        }
    };
    let idx: Vec<usize> = (0..5).rev().map(|j| index_at(total / (1u32 << j) as f64)).collect();
    let start = &traj.start;
    let end = traj.points.last().unwrap();
    let velocity = space.distance(start, end)? / total;
    let half = &traj.points[idx[3]];
    let tail_velocity = space.distance_unchecked(half, end) / (total - traj.times[idx[3]]).max(1e-300);
    let bounded = tail_velocity <= 1e-9 * (1.0 + lipschitz);

    let dirs: Vec<Option<Direction>> =
        idx.iter().map(|&k| direction_from(space, start, &traj.points[k])).collect::<Result<_>>()?;
    let mut residuals = Vec::new();
    for w in dirs.windows(2) {
        residuals.push(match (&w[0], &w[1]) {
            (Some(a), Some(b)) => a.angle(b),
            _ => math::PI,
        });
    }
    let min_grad = traj.grad_norms.iter().cloned().fold(f64::INFINITY, f64::min);
    let velocity_floor = if lipschitz > 0.0 { min_grad * min_grad / lipschitz } else { 0.0 };
    let converged = !bounded && residuals.last().is_some_and(|r| *r < tol.direction_residual);
    let direction = if converged { dirs.last().cloned().flatten().map(|d| d.boundary) } else { None };
    Ok(EscapeReport {
        velocity,
        tail_velocity,
        direction,
        direction_residuals: residuals,
        doubling_times: idx.iter().map(|&k| traj.times[k]).collect(),
        min_grad_norm: min_grad,
        velocity_floor,
        floor_holds: velocity >= velocity_floor * (1.0 - 1e-9) - 1e-12,
        bounded,
    })
}

#[derive(Debug, Clone)]
struct Direction {
    tangent: Vec<f64>,
    boundary: BoundaryDirection,
}

impl Direction {
    fn angle(&self, other: &Direction) -> f64 {
        match (&self.boundary, &other.boundary) {
            (BoundaryDirection::Ray { ray: a }, BoundaryDirection::Ray { ray: b }) => {
                if a == b {
                    0.0
                } else {
                    math::PI
                }
            }
            _ => math::angle_between(&self.tangent, &other.tangent),
        }
    }
}

/// The ideal point that the geodesic from `start` through `p` tends to.
fn direction_from(space: &Space, start: &Point, p: &Point) -> Result<Option<Direction>> {
    let d = space.distance_unchecked(start, p);
    if d <= 1e-12 {
        return Ok(None);
    }
    Ok(match (space, start, p) {
        (Space::Euclidean { .. } | Space::TruncatedHilbertBox { .. }, Point::Coords(a), Point::Coords(b)) => {
            let u = math::scale(&math::sub(b, a), 1.0 / d);
            Some(Direction { tangent: u.clone(), boundary: BoundaryDirection::Vector(u) })
        }
        (Space::Hyperbolic { .. }, Point::Coords(a), Point::Coords(b)) => {
            let w: Vec<f64> = a.iter().zip(b).map(|(x, y)| (y - cosh(d) * x) / sinh(d)).collect();
            let null: Vec<f64> = a.iter().zip(&w).map(|(x, y)| x + y).collect();
            let u: Vec<f64> = null[1..].iter().map(|c| c / null[0]).collect();
            let u = math::normalized(&u).unwrap_or(u);
            let tangent = Chart::at(space, start)?.log(p)?;
            Some(Direction { tangent, boundary: BoundaryDirection::Vector(u) })
        }
        (Space::MetricTree { tree }, _, Point::Tree(q)) => {
            if tree.edge(q.edge)?.is_ray() {
                Some(Direction { tangent: Vec::new(), boundary: BoundaryDirection::Ray { ray: q.edge } })
            } else {
                None
            }
        }
        _ => None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneReport {
    pub monotone: bool,
    pub max_slope: f64,
}

/// Samples `f` along rays toward `xi` from each basepoint; `xi` is
/// f-monotone when no sampled segment slope exceeds 1e-9.
pub fn monotone_point_check(
    space: &Space,
    f: &ScalarField,
    xi: &BoundaryDirection,
    basepoints: &[Point],
    length: f64,
    samples: usize,
) -> Result<MonotoneReport> {
    xi.validate(space)?;
    if basepoints.is_empty() || samples == 0 || !(length > 0.0) {
        return Err(usage("monotone check needs basepoints, samples and a positive ray length"));
    }
    let tol = ToleranceProfile::default();
    let mut worst = f64::NEG_INFINITY;
    let h = length / samples as f64;
    for b in basepoints {
        let mut prev = f.value(space, b, &tol)?;
        for k in 1..=samples {
            let q = xi.ray_point(space, b, h * k as f64)?;
            let v = f.value(space, &q, &tol)?;
            worst = worst.max((v - prev) / h);
            prev = v;
        }
    }
    Ok(MonotoneReport { monotone: worst <= 1e-9, max_slope: worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{ConvexBody, MetricTree, TreePoint};

    #[test]
    fn affine_step_is_translation() {
        let s = Space::euclidean(2);
        let f = ScalarField::affine(vec![0.6, 0.8], 0.0);
        let y = flow_step(&s, &f, &vec![1.0, 1.0].into(), 0.5).unwrap();
        assert_eq!(y, vec![0.7, 0.6].into());
    }

    #[test]
    fn distance_flow_reaches_anchor_distance() {
        let s = Space::euclidean(2);
        let f = ScalarField::normalized_distance(vec![0.0, 0.0], vec![0.0, 0.0]);
        let t = run_flow(&s, &f, &vec![3.0, 4.0].into(), 3.0, 0.01).unwrap();
        let end = t.points.last().unwrap();
        assert!((s.distance(end, &vec![0.0, 0.0].into()).unwrap() - 2.0).abs() < 1e-9);
        let fixed = flow_step(&s, &f, &vec![0.0, 0.0].into(), 0.1).unwrap();
        assert_eq!(fixed, vec![0.0, 0.0].into());
    }

    #[test]
    fn max_of_two_follows_bisector() {
        let s = Space::euclidean(2);
        let f = ScalarField::max_of(vec![
            ScalarField::affine(vec![1.0, 1.0], 0.0),
            ScalarField::affine(vec![-1.0, 1.0], 0.0),
        ]);
        let t = run_flow(&s, &f, &vec![0.05, 0.0].into(), 1.0, 0.1).unwrap();
        for p in &t.points[1..] {
            assert!(p.coords().unwrap()[0].abs() < 1e-12, "{p:?}");
        }
        let y = t.points.last().unwrap().coords().unwrap();
        assert!((y[1] + 1.0).abs() < 1e-9, "{y:?}");
    }

    #[test]
    fn generic_prox_agrees_with_closed_form_on_tree() {
        let tree = MetricTree::star(3);
        let s = Space::tree(tree);
        let f = ScalarField::convex_combination(vec![
            (0.5, ScalarField::normalized_distance(TreePoint::new(1, 2.0), TreePoint::new(0, 0.0))),
            (0.5, ScalarField::normalized_distance(TreePoint::new(1, 4.0), TreePoint::new(0, 0.0))),
        ]);
        // f is affine with unit slope on ray 0; value-based line search
        // resolves the minimizer to about sqrt(machine epsilon)
        let y = flow_step(&s, &f, &TreePoint::new(0, 1.0).into(), 0.25).unwrap();
        assert!(s.distance(&y, &TreePoint::new(0, 0.75).into()).unwrap() < 1e-6, "{y:?}");
    }

    #[test]
    fn escape_of_affine_flow() {
        let s = Space::euclidean(2);
        let f = ScalarField::affine(vec![1.0, 0.0], 0.0);
        let t = run_flow(&s, &f, &vec![0.0, 0.0].into(), 16.0, 0.5).unwrap();
        let r = velocity_of_escape(&s, &t, 1.0).unwrap();
        assert!((r.velocity - 1.0).abs() < 1e-12);
        assert_eq!(r.direction, Some(BoundaryDirection::Vector(vec![-1.0, 0.0])));
        assert!(r.floor_holds);
        let d = ScalarField::distance_to(ConvexBody::ball(vec![5.0, 0.0], 1.0));
        let t = run_flow(&s, &d, &vec![0.0, 0.0].into(), 64.0, 0.5).unwrap();
        let r = velocity_of_escape(&s, &t, 1.0).unwrap();
        assert!(r.bounded && r.direction.is_none() && r.tail_velocity == 0.0);
        let short = run_flow(&s, &f, &vec![0.0, 0.0].into(), 1.0, 0.5).unwrap();
        assert!(velocity_of_escape(&s, &short, 1.0).is_err());
    }

    #[test]
    fn monotone_examples() {
        let s = Space::euclidean(2);
        let xi = BoundaryDirection::Vector(vec![1.0, 0.0]);
        let bases: Vec<Point> = vec![vec![0.0, 0.0].into(), vec![3.0, -2.0].into()];
        let b = ScalarField::busemann(xi.clone(), vec![0.0, 0.0]);
        let r = monotone_point_check(&s, &b, &xi, &bases, 5.0, 10).unwrap();
        assert!(r.monotone && (r.max_slope + 1.0).abs() < 1e-12);
        let anti = ScalarField::busemann(BoundaryDirection::Vector(vec![-1.0, 0.0]), vec![0.0, 0.0]);
        let r = monotone_point_check(&s, &anti, &xi, &bases, 5.0, 10).unwrap();
        assert!(!r.monotone && (r.max_slope - 1.0).abs() < 1e-12);
        let h = ScalarField::distance_to(ConvexBody::half_space(vec![1.0, 0.0], 0.0));
        let left = BoundaryDirection::Vector(vec![-1.0, 0.0]);
        assert!(monotone_point_check(&s, &h, &left, &bases, 10.0, 20).unwrap().monotone);
    }
}

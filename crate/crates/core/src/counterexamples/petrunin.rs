//! A concave, piecewise affine function on the plane whose gradient curve
//! runs to infinity without a limit direction: it zigzags between the two
//! sides of an acute angle while the gradient norms decay to zero.
//!
//! The pieces are `f_n(w) = <w, x_n>` with shifts `C_n`; the curve follows
//! `x_n` from `p_n` (on one side) to `p_{n+1}` (on the other side).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use libm::{atan2, cos, fabs, sin};
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::field::ScalarField;
use crate::flow::{run_flow_with, velocity_of_escape_with, EscapeReport, FlowSettings, FlowTrajectory};
use crate::math::{self, PI};
use crate::space::{Point, Space};
use crate::tolerance::ToleranceProfile;

/// Offsets `delta_n` of the direction of `x_n` beyond the nearer side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OffsetSchedule {
    /// `delta_n = initial * ratio^(n-1)`.
    Geometric {
        initial: f64,
        ratio: f64,
    },
    Explicit {
        values: Vec<f64>,
    },
}

impl OffsetSchedule {
    fn offset(&self, n: usize) -> f64 {
        match self {
            OffsetSchedule::Geometric { initial, ratio } => initial * libm::pow(*ratio, (n - 1) as f64),
            OffsetSchedule::Explicit { values } => values.get(n - 1).copied().unwrap_or(f64::NAN),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PetruninConfig {
    /// Half of the opening angle; the sides are at `+-half_angle`.
    pub half_angle: f64,
    pub offsets: OffsetSchedule,
    /// `|x_n| = contraction * <x_{n-1}, x_n / |x_n|>`.
    pub contraction: f64,
    pub segments: usize,
}

impl Default for PetruninConfig {
    fn default() -> Self {
        let half_angle = PI / 6.0;
        Self {
            half_angle,
            offsets: OffsetSchedule::Geometric { initial: half_angle / 4.0, ratio: 0.9 },
            contraction: 0.9,
            segments: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PetruninInstance {
    pub config: PetruninConfig,
    /// `v-` and `v+`.
    pub sides: [Vec<f64>; 2],
    pub directions: Vec<Vec<f64>>,
    pub anchors: Vec<Vec<f64>>,
    /// `shifts[n-1]` is the shift of piece `n`; the first is zero.
    pub shifts: Vec<f64>,
    pub field: ScalarField,
}

fn cross(a: &[f64], b: &[f64]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub fn build_petrunin(config: &PetruninConfig) -> Result<PetruninInstance> {
    let a = config.half_angle;
    if !(a > 0.0 && a < PI / 4.0) {
        return Err(usage("half angle must lie in (0, pi/4)"));
    }
    if config.segments < 3 {
        return Err(usage("at least three segments are required"));
    }
    if !(config.contraction > 0.0 && config.contraction < 1.0) {
        return Err(Error::Construction("norm decay: contraction must lie in (0, 1)".into()));
    }
    let n_max = config.segments;
    let vm = vec![cos(a), -sin(a)];
    let vp = vec![cos(a), sin(a)];

    let mut directions: Vec<Vec<f64>> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let d = config.offsets.offset(n);
        if !(d > 0.0 && 2.0 * a + d < PI / 2.0) {
            return Err(Error::Construction(format!(
                "positivity: offset {d} of direction {n} must lie in (0, pi/2 - 2*half_angle)"
            )));
        }
        let theta = if n % 2 == 1 { a + d } else { -(a + d) };
        let u = vec![cos(theta), sin(theta)];
        let len = match directions.last() {
            None => 1.0,
            Some(prev) => config.contraction * math::dot(prev, &u),
        };
        if !(len > 0.0) {
            return Err(Error::Construction(format!(
                "norm decay: directions {} and {n} are not within a right angle",
                n - 1
            )));
        }
        directions.push(math::scale(&u, len));
    }

    let mut anchors = vec![vm.clone()];
    for n in 1..n_max {
        let p = &anchors[n - 1];
        let target = if (n + 1) % 2 == 0 { &vp } else { &vm };
        let x = &directions[n - 1];
        // p + t x = s target
        let det = cross(target, x);
        let t = cross(p, target) / det;
        let s = cross(p, x) / det;
        if !(t > 0.0 && s > 0.0) {
            return Err(Error::Construction(format!("anchor {}: line does not meet the opposite side", n + 1)));
        }
        if !(s * s).is_finite() {
            return Err(Error::Construction(format!("overflow: anchor {} is out of floating-point range", n + 1)));
        }
        anchors.push(math::scale(target, s));
    }

    let mut shifts = vec![0.0];
    for n in 1..n_max {
        let q = &anchors[n];
        let c = shifts[n - 1] + math::dot(&directions[n - 1], q) - math::dot(&directions[n], q);
        shifts.push(c);
    }
    let field = ScalarField::inf_shift_of(
        directions.iter().zip(&shifts).map(|(x, &c)| (ScalarField::affine(x.clone(), 0.0), c)).collect(),
    );
    Ok(PetruninInstance { config: config.clone(), sides: [vm, vp], directions, anchors, shifts, field })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PetruninInvariants {
    /// `min_n min(<x_n, v->, <x_n, v+>) / |x_n|`.
    pub min_side_product: f64,
    /// Residual of `|x_n| = rho <x_{n-1}, x_n/|x_n|>`, relative to `|x_{n-1}|`.
    pub recursion_residual: f64,
    /// Residual of the alternating side-product recursion, relative to
    /// `|x_{n-1}|`. Diagnostic only: it cannot hold together with decaying
    /// norms for directions on these sides.
    pub literal_recursion_residual: f64,
    pub norms_decreasing: bool,
    pub last_norm: f64,
    /// Sine of the angle between `p_n` and its side, worst case.
    pub ray_residual: f64,
    /// Sine of the angle between `p_{n+1} - p_n` and `x_n`, worst case.
    pub parallel_residual: f64,
    /// Relative residual of `f_n(p_{n+1}) - f_{n+1}(p_{n+1}) = C_{n+1} - C_n`.
    pub shift_residual: f64,
    /// Interior samples of some segment where another piece is smaller.
    pub active_piece_failures: usize,
    /// `|f - (f_n + C_n)|` on segment `n`, relative to the magnitude there.
    pub active_piece_residual: f64,
    pub holds: bool,
}

impl PetruninInstance {
    pub fn side(&self, n: usize) -> &[f64] {
        if n.is_multiple_of(2) {
            &self.sides[1]
        } else {
            &self.sides[0]
        }
    }

    fn piece(&self, n: usize, w: &[f64]) -> f64 {
        math::dot(&self.directions[n - 1], w) + self.shifts[n - 1]
    }

    /// Value of `f` and the smallest minimizing piece.
    pub fn value_and_piece(&self, w: &[f64]) -> (f64, usize) {
        let mut best = (f64::INFINITY, 0);
        for n in 1..=self.directions.len() {
            let v = self.piece(n, w);
            if v < best.0 {
                best = (v, n);
            }
        }
        best
    }

    /// Checks every structural property from the stored fields, sampling
    /// `samples` interior points per segment.
    pub fn invariants(&self, samples: usize) -> PetruninInvariants {
        let rho = self.config.contraction;
        let [vm, vp] = &self.sides;
        let x = &self.directions;
        let p = &self.anchors;
        let n_max = x.len();

        let mut min_side = f64::INFINITY;
        let mut rec = 0.0f64;
        let mut lit = 0.0f64;
        let mut decreasing = true;
        for n in 1..=n_max {
            let xn = &x[n - 1];
            let len = math::norm(xn);
            min_side = min_side.min(math::dot(xn, vm).min(math::dot(xn, vp)) / len);
            if n >= 2 {
                let prev = &x[n - 2];
                let plen = math::norm(prev);
                rec = rec.max(fabs(len - rho * math::dot(prev, xn) / len) / plen);
                let l = if n % 2 == 0 {
                    math::dot(xn, vm) - math::dot(prev, vp)
                } else {
                    math::dot(xn, vp) - math::dot(prev, vm)
                };
                lit = lit.max(fabs(l) / plen);
                decreasing &= len < plen;
            }
        }

        let mut ray = 0.0f64;
        for (i, q) in p.iter().enumerate() {
            let side = self.side(i + 1);
            let r = if math::dot(q, side) > 0.0 { fabs(cross(q, side)) / math::norm(q) } else { 1.0 };
            ray = ray.max(r);
        }
        let mut par = 0.0f64;
        let mut shift = 0.0f64;
        let mut failures = 0;
        let mut active = 0.0f64;
        for n in 1..n_max {
            let seg = math::sub(&p[n], &p[n - 1]);
            let xn = &x[n - 1];
            let s = if math::dot(&seg, xn) > 0.0 {
                fabs(cross(&seg, xn)) / (math::norm(&seg) * math::norm(xn))
            } else {
                1.0
            };
            par = par.max(s);

            let q = &p[n];
            let lhs = math::dot(xn, q) - math::dot(&x[n], q);
            let rhs = self.shifts[n] - self.shifts[n - 1];
            let scale = 1.0 + fabs(math::dot(xn, q)) + fabs(self.shifts[n]) + fabs(self.shifts[n - 1]);
            shift = shift.max(fabs(lhs - rhs) / scale);

            for k in 1..=samples {
                let w = math::lerp(&p[n - 1], &p[n], k as f64 / (samples + 1) as f64);
                let (v, arg) = self.value_and_piece(&w);
                let own = self.piece(n, &w);
                let mag = 1.0 + fabs(math::dot(xn, &w)) + fabs(self.shifts[n - 1]);
                active = active.max(fabs(own - v) / mag);
                if arg != n && own - v > 1e-12 * mag {
                    failures += 1;
                }
            }
        }
        let holds = min_side > 0.0
            && rec <= 1e-12
            && decreasing
            && ray <= 1e-12
            && par <= 1e-12
            && shift <= 1e-12
            && failures == 0
            && active <= 1e-10;
        PetruninInvariants {
            min_side_product: min_side,
            recursion_residual: rec,
            literal_recursion_residual: lit,
            norms_decreasing: decreasing,
            last_norm: math::norm(&x[n_max - 1]),
            ray_residual: ray,
            parallel_residual: par,
            shift_residual: shift,
            active_piece_failures: failures,
            active_piece_residual: active,
            holds,
        }
    }

    /// Flow time at which the gradient curve of `f` from `p_1` reaches each
    /// anchor; the speed on segment `n` is `|x_n|`.
    pub fn anchor_times(&self) -> Vec<f64> {
        let mut t = vec![0.0];
        for n in 1..self.anchors.len() {
            let len = math::dist(&self.anchors[n], &self.anchors[n - 1]);
            t.push(t[n - 1] + len / math::norm(&self.directions[n - 1]));
        }
        t
    }

    /// Point of the gradient curve at time `t`.
    pub fn curve_point(&self, times: &[f64], t: f64) -> Vec<f64> {
        let k = times.partition_point(|&s| s <= t).max(1);
        math::axpy(&self.anchors[k - 1], t - times[k - 1], &self.directions[k - 1])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillationReport {
    pub angles: Vec<f64>,
    pub norms: Vec<f64>,
    /// Largest `|angle_n -+ half_angle|` with the sign set by parity.
    pub angle_residual: f64,
    pub norms_increasing: bool,
    /// Anchors on the upper and lower side.
    pub upper: usize,
    pub lower: usize,
}

pub fn oscillation_report(inst: &PetruninInstance) -> OscillationReport {
    let a = inst.config.half_angle;
    let angles: Vec<f64> = inst.anchors.iter().map(|p| atan2(p[1], p[0])).collect();
    let norms: Vec<f64> = inst.anchors.iter().map(|p| math::norm(p)).collect();
    let mut residual = 0.0f64;
    let (mut upper, mut lower) = (0, 0);
    for (i, &th) in angles.iter().enumerate() {
        let want = if (i + 1) % 2 == 0 { a } else { -a };
        residual = residual.max(fabs(th - want));
        if th > 0.0 {
            upper += 1;
        } else {
            lower += 1;
        }
    }
    let norms_increasing = norms.windows(2).all(|w| w[1] > w[0]);
    OscillationReport { angles, norms, angle_residual: residual, norms_increasing, upper, lower }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowAgreement {
    pub step: f64,
    pub horizon: f64,
    /// Hausdorff distance between the discrete trajectory and the covered
    /// part of the polygon through the anchors.
    pub deviation: f64,
    pub bound: f64,
    pub within: bool,
    /// `max_k |x_k - gamma(t_k)|` against the exact curve at equal times.
    /// Unlike the Hausdorff deviation it does not depend on where the step
    /// grid meets a kink, so it shows the first-order rate cleanly.
    pub time_error: f64,
    /// Segment of the first trajectory point farther than `bound`.
    pub first_divergence: Option<usize>,
    /// Segments reached by the trajectory.
    pub segments_covered: usize,
    /// Largest angle between a step inside the first segment and `x_1`.
    pub first_segment_angle: f64,
    pub escape: EscapeReport,
}

fn segment_distance(a: &[f64], b: &[f64], w: &[f64]) -> f64 {
    let ab = math::sub(b, a);
    let den = math::dot(&ab, &ab);
    let t = if den > 0.0 { math::clamp(math::dot(&math::sub(w, a), &ab) / den, 0.0, 1.0) } else { 0.0 };
    math::dist(&math::axpy(a, t, &ab), w)
}

fn polyline_distance(poly: &[Vec<f64>], w: &[f64]) -> (f64, usize) {
    let mut best = (math::dist(&poly[0], w), 0);
    for i in 1..poly.len() {
        let d = segment_distance(&poly[i - 1], &poly[i], w);
        if d <= best.0 {
            best = (d, i - 1);
        }
    }
    best
}

/// Ascends `f` from `p_1 + phase * step * x_1`; returns the trajectory and
/// its largest distance to the exact curve at the matching times.
fn discrete_flow(inst: &PetruninInstance, step: f64, horizon: f64, phase: f64) -> Result<(FlowTrajectory, f64)> {
    let space = Space::euclidean(2);
    let tol = ToleranceProfile::default();
    let descent = inst.field.negated()?;
    let start = math::axpy(&inst.anchors[0], phase * step, &inst.directions[0]);
    let traj = run_flow_with(&space, &descent, &Point::Coords(start), &FlowSettings::new(step, horizon), &tol)?;
    let times = inst.anchor_times();
    let mut err = 0.0f64;
    for (p, &t) in traj.points.iter().zip(&traj.times) {
        let w = p.coords().ok_or_else(|| usage("planar trajectory expected"))?;
        err = err.max(math::dist(w, &inst.curve_point(&times, t + phase * step)));
    }
    Ok((traj, err))
}

/// Ascends `f` with the proximal flow of `-f` from `p_1` for the given
/// horizon and compares with the polygon through the anchors.
pub fn flow_agreement_check(inst: &PetruninInstance, step: f64, horizon: f64) -> Result<FlowAgreement> {
    let scale = math::norm(&inst.directions[0]);
    if !(step > 0.0 && step <= 1e-3 * scale * 1.000001) {
        return Err(usage("step must be positive and at most 1e-3 times |x_1|"));
    }
    let (traj, time_error) = discrete_flow(inst, step, horizon, 0.0)?;
    let pts: Vec<Vec<f64>> = traj.points.iter().map(|p| p.coords().unwrap().to_vec()).collect();

    // covered polygon: anchors up to the last point's segment, cut at its foot
    let last = pts.last().unwrap();
    let (_, seg) = polyline_distance(&inst.anchors, last);
    let a = &inst.anchors[seg];
    let b = &inst.anchors[seg + 1];
    let ab = math::sub(b, a);
    let t = math::clamp(math::dot(&math::sub(last, a), &ab) / math::dot(&ab, &ab), 0.0, 1.0);
    let mut poly: Vec<Vec<f64>> = inst.anchors[..=seg].to_vec();
    poly.push(math::axpy(a, t, &ab));

    let bound = 10.0 * step * scale;
    let mut dev = 0.0f64;
    let mut first = None;
    for w in &pts {
        let (d, s) = polyline_distance(&poly, w);
        if d > bound && first.is_none() {
            first = Some(s + 1);
        }
        dev = dev.max(d);
    }
    for i in 1..poly.len() {
        for k in 0..=8 {
            let w = math::lerp(&poly[i - 1], &poly[i], k as f64 / 8.0);
            dev = dev.max(polyline_distance(&pts, &w).0);
        }
    }

    let x1 = &inst.directions[0];
    let mut first_angle = 0.0f64;
    for w in pts.windows(2) {
        let (_, s0) = polyline_distance(&inst.anchors, &w[0]);
        let (_, s1) = polyline_distance(&inst.anchors, &w[1]);
        let inside = segment_distance(&inst.anchors[0], &inst.anchors[1], &w[1]) < 1e-12 * (1.0 + math::norm(&w[1]));
        if s0 == 0 && s1 == 0 && inside {
            first_angle = first_angle.max(math::angle_between(&math::sub(&w[1], &w[0]), x1));
        }
    }
    let lipschitz = inst.field.lipschitz();
    let escape = velocity_of_escape_with(&Space::euclidean(2), &traj, lipschitz, &ToleranceProfile::default())?;
    Ok(FlowAgreement {
        step,
        horizon,
        deviation: dev,
        bound,
        within: dev <= bound,
        time_error,
        first_divergence: first,
        segments_covered: seg + 1,
        first_segment_angle: first_angle,
        escape,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalvingReport {
    pub coarse: f64,
    pub fine: f64,
    /// `coarse / fine`; first-order behaviour gives about 2.
    pub ratio: f64,
    pub within_factor: bool,
}

/// Time-synchronous error at `step` and `step / 2`, each maximized over
/// eight start phases within one step; passes if the ratio is within a
/// factor 1.5 of 2. A single phase is not enough: the error left by a kink
/// depends on where the step grid meets it, and halving the step can keep
/// that position.
pub fn halving_check(inst: &PetruninInstance, step: f64, horizon: f64) -> Result<HalvingReport> {
    let worst = |h: f64| -> Result<f64> {
        let mut e = 0.0f64;
        for k in 0..8 {
            e = e.max(discrete_flow(inst, h, horizon, k as f64 / 8.0)?.1);
        }
        Ok(e)
    };
    let coarse = worst(step)?;
    let fine = worst(step / 2.0)?;
    let ratio = coarse / fine;
    Ok(HalvingReport { coarse, fine, ratio, within_factor: (2.0 / 1.5..=3.0).contains(&ratio) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveResiduals {
    /// Doubling times `t_k = 2^k t_0`, starting at the second anchor.
    pub times: Vec<f64>,
    /// Angle between the directions from `p_1` at consecutive times.
    pub residuals: Vec<f64>,
    /// Largest residual over the second half of the sequence.
    pub tail_max: f64,
    /// `tail_max < 1e-2`; false means no limit direction is approached.
    pub converges: bool,
}

/// Direction residuals of the exact gradient curve at doubling times up to
/// the last anchor.
pub fn curve_residuals(inst: &PetruninInstance) -> CurveResiduals {
    let times = inst.anchor_times();
    let end = *times.last().unwrap();
    let p1 = &inst.anchors[0];
    let mut ts = Vec::new();
    let mut t = times[1];
    while t <= end {
        ts.push(t);
        t *= 2.0;
    }
    let dirs: Vec<Vec<f64>> = ts.iter().map(|&t| math::sub(&inst.curve_point(&times, t), p1)).collect();
    let residuals: Vec<f64> = dirs.windows(2).map(|w| math::angle_between(&w[0], &w[1])).collect();
    let tail_max = residuals[residuals.len() / 2..].iter().cloned().fold(0.0, f64::max);
    CurveResiduals { times: ts, residuals, tail_max, converges: tail_max < 1e-2 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_instance_holds() {
        let inst = build_petrunin(&PetruninConfig::default()).unwrap();
        let inv = inst.invariants(50);
        assert!(inv.holds, "{inv:?}");
        assert!(inv.literal_recursion_residual > 1e-3);
        let osc = oscillation_report(&inst);
        assert!(osc.angle_residual < 1e-12 && osc.norms_increasing);
        assert_eq!((osc.upper, osc.lower), (25, 25));
    }

    #[test]
    fn minimal_and_spec_shapes() {
        let cfg = PetruninConfig { segments: 3, ..Default::default() };
        let inst = build_petrunin(&cfg).unwrap();
        assert!(cross(&inst.anchors[1], &inst.sides[1]).abs() < 1e-15);
        assert!(cross(&inst.anchors[2], &inst.sides[0]).abs() < 1e-14);
        let a = PI / 6.0;
        let cfg = PetruninConfig {
            half_angle: a,
            offsets: OffsetSchedule::Geometric { initial: a / 2.0, ratio: 0.8 },
            segments: 20,
            ..Default::default()
        };
        assert!(build_petrunin(&cfg).unwrap().invariants(50).holds);
    }

    #[test]
    fn bad_schedules_name_the_constraint() {
        let cfg =
            PetruninConfig { offsets: OffsetSchedule::Geometric { initial: 0.1, ratio: 3.0 }, ..Default::default() };
        match build_petrunin(&cfg) {
            Err(Error::Construction(m)) => assert!(m.starts_with("positivity")),
            e => panic!("{e:?}"),
        }
        let cfg = PetruninConfig { contraction: 1.0, ..Default::default() };
        assert!(matches!(build_petrunin(&cfg), Err(Error::Construction(m)) if m.starts_with("norm decay")));
    }

    #[test]
    fn concave() {
        let inst = build_petrunin(&PetruninConfig { segments: 12, ..Default::default() }).unwrap();
        let neg = inst.field.negated().unwrap();
        let s = Space::euclidean(2);
        let mut rng = math::SplitMix::new(5);
        for _ in 0..200 {
            let mut pick = || {
                let r = 50.0 * rng.next_f64();
                let th = inst.config.half_angle * (2.0 * rng.next_f64() - 1.0);
                Point::Coords(vec![r * cos(th), r * sin(th)])
            };
            let (x, y) = (pick(), pick());
            assert!(neg.convexity_defect(&s, &x, &y).unwrap() >= -1e-9);
        }
    }

    #[test]
    fn curve_keeps_turning() {
        let inst = build_petrunin(&PetruninConfig::default()).unwrap();
        let r = curve_residuals(&inst);
        assert!(!r.converges, "{:?}", r.tail_max);
    }

    #[test]
    fn discrete_flow_follows_the_polygon() {
        let inst = build_petrunin(&PetruninConfig::default()).unwrap();
        let r = flow_agreement_check(&inst, 1e-3, 20.0).unwrap();
        assert!(r.within && r.first_divergence.is_none(), "{r:?}");
        assert_eq!(r.segments_covered, 2);
        assert!(r.first_segment_angle < 1e-6);
        assert!(*r.escape.direction_residuals.last().unwrap() > 1e-2);
        let h = halving_check(&inst, 1e-3, 8.0).unwrap();
        assert!(h.within_factor, "{h:?}");
    }
}

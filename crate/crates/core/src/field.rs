//! Convex (and concave) real-valued fields on model spaces, with numerical
//! absolute-gradient estimation.

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{capability, usage, Error, Result};
use crate::math::{self, fabs, log, PI};
use crate::space::{minkowski, BoundaryDirection, Chart, ConvexBody, Point, Space};
use crate::tolerance::ToleranceProfile;

/// A real-valued field on a [`Space`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ScalarField {
    DistanceTo {
        body: ConvexBody,
    },
    /// `x -> d(x, anchor) - d(basepoint, anchor)`.
    NormalizedDistance {
        anchor: Point,
        basepoint: Point,
    },
    /// Busemann function of the ideal point, vanishing at `basepoint`.
    Busemann {
        direction: BoundaryDirection,
        basepoint: Point,
    },
    /// `x -> <normal, x> + constant`, flat spaces only.
    Affine {
        normal: Vec<f64>,
        constant: f64,
    },
    MaxOf {
        members: Vec<ScalarField>,
    },
    /// `x -> min_i (f_i(x) + c_i)`.
    InfShiftOf {
        members: Vec<(ScalarField, f64)>,
    },
    ConvexCombination {
        members: Vec<(f64, ScalarField)>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Curvature {
    Affine,
    Convex,
    Concave,
    Unknown,
}

impl Curvature {
    pub fn is_convex(self) -> bool {
        matches!(self, Curvature::Affine | Curvature::Convex)
    }

    pub fn is_concave(self) -> bool {
        matches!(self, Curvature::Affine | Curvature::Concave)
    }
}

/// A subgradient in flat coordinates; `smooth` marks a singleton
/// subdifferential.
#[derive(Debug, Clone)]
pub(crate) struct Subgradient {
    pub vector: Vec<f64>,
    pub smooth: bool,
}

impl ScalarField {
    pub fn distance_to(body: ConvexBody) -> Self {
        ScalarField::DistanceTo { body }
    }

    pub fn normalized_distance(anchor: impl Into<Point>, basepoint: impl Into<Point>) -> Self {
        ScalarField::NormalizedDistance { anchor: anchor.into(), basepoint: basepoint.into() }
    }

    pub fn busemann(direction: BoundaryDirection, basepoint: impl Into<Point>) -> Self {
        ScalarField::Busemann { direction, basepoint: basepoint.into() }
    }

    pub fn affine(normal: Vec<f64>, constant: f64) -> Self {
        ScalarField::Affine { normal, constant }
    }

    pub fn max_of(members: Vec<ScalarField>) -> Self {
        ScalarField::MaxOf { members }
    }

    pub fn inf_shift_of(members: Vec<(ScalarField, f64)>) -> Self {
        ScalarField::InfShiftOf { members }
    }

    pub fn convex_combination(members: Vec<(f64, ScalarField)>) -> Self {
        ScalarField::ConvexCombination { members }
    }

    /// `f + c`, expressed as a single-member shifted infimum.
    pub fn shifted(self, c: f64) -> Self {
        ScalarField::InfShiftOf { members: vec![(self, c)] }
    }

    pub fn validate(&self, space: &Space) -> Result<()> {
        match self {
            ScalarField::DistanceTo { body } => body.validate(space),
            ScalarField::NormalizedDistance { anchor, basepoint } => {
                space.check_point(anchor, 1e-9)?;
                space.check_point(basepoint, 1e-9)
            }
            ScalarField::Busemann { direction, basepoint } => {
                direction.validate(space)?;
                space.check_point(basepoint, 1e-9)
            }
            ScalarField::Affine { normal, constant } => {
                if !space.is_flat() {
                    return Err(capability("affine fields live in flat spaces"));
                }
                if normal.len() != space.dimension() || !constant.is_finite() {
                    return Err(usage("affine field has the wrong dimension or a non-finite constant"));
                }
                Ok(())
            }
            ScalarField::MaxOf { members } => {
                if members.is_empty() {
                    return Err(usage("empty max"));
                }
                members.iter().try_for_each(|m| m.validate(space))
            }
            ScalarField::InfShiftOf { members } => {
                if members.is_empty() {
                    return Err(usage("empty infimum"));
                }
                members.iter().try_for_each(|(m, _)| m.validate(space))
            }
            ScalarField::ConvexCombination { members } => {
                if members.is_empty() {
                    return Err(usage("empty convex combination"));
                }
                let mut total = 0.0;
                for (w, m) in members {
                    if *w < 0.0 {
                        return Err(usage("convex combination weights must be nonnegative"));
                    }
                    total += w;
                    m.validate(space)?;
                }
                if fabs(total - 1.0) > 1e-12 {
                    return Err(usage("convex combination weights must sum to 1"));
                }
                Ok(())
            }
        }
    }

    /// Convexity class implied by the structure (in CAT(0) spaces).
    pub fn curvature(&self) -> Curvature {
        match self {
            ScalarField::Affine { .. } => Curvature::Affine,
            ScalarField::DistanceTo { .. } | ScalarField::NormalizedDistance { .. } | ScalarField::Busemann { .. } => {
                Curvature::Convex
            }
            ScalarField::MaxOf { members } => {
                if members.iter().all(|m| m.curvature().is_convex()) {
                    Curvature::Convex
                } else {
                    Curvature::Unknown
                }
            }
            ScalarField::InfShiftOf { members } => {
                if members.len() == 1 {
                    members[0].0.curvature()
                } else if members.iter().all(|(m, _)| m.curvature().is_concave()) {
                    Curvature::Concave
                } else {
                    Curvature::Unknown
                }
            }
            ScalarField::ConvexCombination { members } => {
                let kinds: Vec<Curvature> = members.iter().map(|(_, m)| m.curvature()).collect();
                if kinds.iter().all(|k| *k == Curvature::Affine) {
                    Curvature::Affine
                } else if kinds.iter().all(|k| k.is_convex()) {
                    Curvature::Convex
                } else if kinds.iter().all(|k| k.is_concave()) {
                    Curvature::Concave
                } else {
                    Curvature::Unknown
                }
            }
        }
    }

    /// A Lipschitz constant implied by the structure.
    pub fn lipschitz(&self) -> f64 {
        match self {
            ScalarField::DistanceTo { .. } | ScalarField::NormalizedDistance { .. } | ScalarField::Busemann { .. } => {
                1.0
            }
            ScalarField::Affine { normal, .. } => math::norm(normal),
            ScalarField::MaxOf { members } => members.iter().map(|m| m.lipschitz()).fold(0.0, f64::max),
            ScalarField::InfShiftOf { members } => members.iter().map(|(m, _)| m.lipschitz()).fold(0.0, f64::max),
            ScalarField::ConvexCombination { members } => members.iter().map(|(w, m)| w * m.lipschitz()).sum(),
        }
    }

    /// `-f` in closed form where the structure allows it.
    pub fn negated(&self) -> Result<ScalarField> {
        match self {
            ScalarField::Affine { normal, constant } => Ok(ScalarField::affine(math::scale(normal, -1.0), -constant)),
            ScalarField::InfShiftOf { members } => Ok(ScalarField::MaxOf {
                members: members.iter().map(|(m, c)| Ok(m.negated()?.shifted(-c))).collect::<Result<_>>()?,
            }
            .flatten_shifts()),
            ScalarField::MaxOf { members } => Ok(ScalarField::InfShiftOf {
                members: members.iter().map(|m| Ok((m.negated()?, 0.0))).collect::<Result<_>>()?,
            }),
            ScalarField::ConvexCombination { members } => Ok(ScalarField::ConvexCombination {
                members: members.iter().map(|(w, m)| Ok((*w, m.negated()?))).collect::<Result<_>>()?,
            }),
            _ => Err(capability("negation is only available for affine-built fields")),
        }
    }

    /// Folds single-member shifts of affine fields into their constants.
    fn flatten_shifts(self) -> Self {
        match self {
            ScalarField::MaxOf { members } => {
                ScalarField::MaxOf { members: members.into_iter().map(|m| m.flatten_shifts()).collect() }
            }
            ScalarField::InfShiftOf { mut members } if members.len() == 1 => {
                let (m, c) = members.pop().unwrap();
                match m.flatten_shifts() {
                    ScalarField::Affine { normal, constant } => ScalarField::Affine { normal, constant: constant + c },
                    other => other.shifted(c),
                }
            }
            other => other,
        }
    }

    /// Value of the field at `x`.
    pub fn evaluate(&self, space: &Space, x: &Point) -> Result<f64> {
        space.check_point(x, 1e-9)?;
        self.value(space, x, &ToleranceProfile::default())
    }

    pub(crate) fn value(&self, space: &Space, x: &Point, tol: &ToleranceProfile) -> Result<f64> {
        match self {
            ScalarField::DistanceTo { body } => body.distance_with(space, x, tol),
            ScalarField::NormalizedDistance { anchor, basepoint } => {
                Ok(space.distance_unchecked(x, anchor) - space.distance_unchecked(basepoint, anchor))
            }
            ScalarField::Busemann { direction, basepoint } => busemann(space, direction, basepoint, x),
            ScalarField::Affine { normal, constant } => {
                let c = x.coords().ok_or(Error::SpaceMismatch)?;
                Ok(math::dot(normal, c) + constant)
            }
            ScalarField::MaxOf { members } => {
                let mut best = f64::NEG_INFINITY;
                for m in members {
                    best = best.max(m.value(space, x, tol)?);
                }
                Ok(best)
            }
            ScalarField::InfShiftOf { members } => {
                let mut best = f64::INFINITY;
                for (m, c) in members {
                    best = best.min(m.value(space, x, tol)? + c);
                }
                Ok(best)
            }
            ScalarField::ConvexCombination { members } => {
                let mut total = 0.0;
                for (w, m) in members {
                    total += w * m.value(space, x, tol)?;
                }
                Ok(total)
            }
        }
    }

    /// Index of the member attaining the max / shifted infimum at `x`
    /// (lowest index on ties).
    pub fn active_index(&self, space: &Space, x: &Point) -> Result<Option<usize>> {
        let tol = ToleranceProfile::default();
        let vals: Vec<f64> = match self {
            ScalarField::MaxOf { members } => {
                members.iter().map(|m| m.value(space, x, &tol).map(|v| -v)).collect::<Result<_>>()?
            }
            ScalarField::InfShiftOf { members } => {
                members.iter().map(|(m, c)| m.value(space, x, &tol).map(|v| v + c)).collect::<Result<_>>()?
            }
            _ => return Ok(None),
        };
        Ok((0..vals.len()).min_by(|&a, &b| vals[a].total_cmp(&vals[b])))
    }

    /// `f(x) + f(y) - 2 f(m)` with `m` the geodesic midpoint.
    pub fn convexity_defect(&self, space: &Space, x: &Point, y: &Point) -> Result<f64> {
        let m = space.midpoint(x, y)?;
        Ok(self.evaluate(space, x)? + self.evaluate(space, y)? - 2.0 * self.evaluate(space, &m)?)
    }

    /// Minimal-norm subgradient for flat spaces, when it is determined by
    /// the structure.
    pub(crate) fn flat_subgradient(
        &self,
        space: &Space,
        x: &[f64],
        tol: &ToleranceProfile,
    ) -> Result<Option<Subgradient>> {
        let p = Point::Coords(x.to_vec());
        Ok(match self {
            ScalarField::Affine { normal, .. } => Some(Subgradient { vector: normal.clone(), smooth: true }),
            ScalarField::DistanceTo { body } => {
                let q = body.project_with(space, &p, tol)?;
                let q = q.coords().ok_or(Error::SpaceMismatch)?;
                let d = math::dist(x, q);
                if d > tol.zero_distance {
                    Some(Subgradient { vector: math::scale(&math::sub(x, q), 1.0 / d), smooth: true })
                } else {
                    Some(Subgradient { vector: vec![0.0; x.len()], smooth: false })
                }
            }
            ScalarField::NormalizedDistance { anchor, .. } => {
                let a = anchor.coords().ok_or(Error::SpaceMismatch)?;
                let d = math::dist(x, a);
                if d > tol.zero_distance {
                    Some(Subgradient { vector: math::scale(&math::sub(x, a), 1.0 / d), smooth: true })
                } else {
                    Some(Subgradient { vector: vec![0.0; x.len()], smooth: false })
                }
            }
            ScalarField::Busemann { direction, .. } => {
                let u = direction.vector().ok_or(Error::SpaceMismatch)?;
                Some(Subgradient { vector: math::scale(u, -1.0), smooth: true })
            }
            ScalarField::MaxOf { members } => {
                let vals: Vec<f64> = members.iter().map(|m| m.value(space, &p, tol)).collect::<Result<_>>()?;
                let top = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let cut = top - 1e-12 * (1.0 + fabs(top));
                let active: Vec<usize> = (0..members.len()).filter(|&i| vals[i] >= cut).collect();
                if active.len() == 1 {
                    return members[active[0]].flat_subgradient(space, x, tol);
                }
                let mut grads = Vec::with_capacity(active.len());
                for &i in &active {
                    match members[i].flat_subgradient(space, x, tol)? {
                        Some(s) if s.smooth => grads.push(s.vector),
                        _ => return Ok(None),
                    }
                }
                let (v, _) = math::min_norm_hull(&grads);
                Some(Subgradient { vector: v, smooth: false })
            }
            ScalarField::InfShiftOf { members } if members.len() == 1 => {
                members[0].0.flat_subgradient(space, x, tol)?
            }
            ScalarField::InfShiftOf { .. } => None,
            ScalarField::ConvexCombination { members } => {
                let mut acc = vec![0.0; x.len()];
                for (w, m) in members {
                    if *w == 0.0 {
                        continue;
                    }
                    match m.flat_subgradient(space, x, tol)? {
                        Some(s) if s.smooth => acc = math::axpy(&acc, *w, &s.vector),
                        _ => return Ok(None),
                    }
                }
                Some(Subgradient { vector: acc, smooth: true })
            }
        })
    }

    /// `|grad_x(-f)|` when known in closed form.
    pub(crate) fn analytic_slope(&self, space: &Space, x: &Point, tol: &ToleranceProfile) -> Result<Option<f64>> {
        if !self.curvature().is_convex() {
            return Ok(None);
        }
        if let (Space::Euclidean { .. }, Point::Coords(c)) = (space, x) {
            return Ok(self.flat_subgradient(space, c, tol)?.map(|s| math::norm(&s.vector)));
        }
        if let (Space::TruncatedHilbertBox { .. }, Point::Coords(c)) = (space, x) {
            let interior = c.iter().enumerate().all(|(i, a)| fabs(*a) < (i + 1) as f64 - 1e-9);
            if interior {
                return Ok(self.flat_subgradient(space, c, tol)?.map(|s| math::norm(&s.vector)));
            }
            return Ok(None);
        }
        if !space.is_cat0() {
            return Ok(None);
        }
        Ok(match self {
            ScalarField::DistanceTo { body } => {
                Some(if body.distance_with(space, x, tol)? > tol.zero_distance { 1.0 } else { 0.0 })
            }
            ScalarField::NormalizedDistance { anchor, .. } => {
                Some(if space.distance_unchecked(x, anchor) > tol.zero_distance { 1.0 } else { 0.0 })
            }
            ScalarField::Busemann { .. } => Some(1.0),
            ScalarField::InfShiftOf { members } if members.len() == 1 => members[0].0.analytic_slope(space, x, tol)?,
            _ => None,
        })
    }

    /// Points that steepest descent is likely to head for; used to seed the
    /// direction sampling.
    fn hint_targets(&self, space: &Space, x: &Point, out: &mut Vec<Point>, tol: &ToleranceProfile) {
        if out.len() >= 16 {
            return;
        }
        match self {
            ScalarField::DistanceTo { body } => {
                if let Ok(q) = body.project_with(space, x, tol) {
                    out.push(q);
                }
            }
            ScalarField::NormalizedDistance { anchor, .. } => out.push(anchor.clone()),
            ScalarField::Busemann { direction, .. } => {
                if let Ok(q) = direction.ray_point(space, x, 1.0) {
                    out.push(q);
                }
            }
            ScalarField::Affine { normal, .. } => {
                if let Some(c) = x.coords() {
                    out.push(Point::Coords(math::axpy(c, -1.0, normal)));
                }
            }
            ScalarField::MaxOf { members } => members.iter().for_each(|m| m.hint_targets(space, x, out, tol)),
            ScalarField::InfShiftOf { members } => members.iter().for_each(|(m, _)| m.hint_targets(space, x, out, tol)),
            ScalarField::ConvexCombination { members } => {
                members.iter().for_each(|(_, m)| m.hint_targets(space, x, out, tol))
            }
        }
    }
}

/// Busemann function of `direction`, normalized to vanish at `base`.
pub fn busemann(space: &Space, direction: &BoundaryDirection, base: &Point, x: &Point) -> Result<f64> {
    match (space, direction, base, x) {
        (
            Space::Euclidean { .. } | Space::TruncatedHilbertBox { .. },
            BoundaryDirection::Vector(u),
            Point::Coords(o),
            Point::Coords(c),
        ) => Ok(-math::dot(&math::sub(c, o), u)),
        (Space::Hyperbolic { .. }, BoundaryDirection::Vector(u), Point::Coords(o), Point::Coords(c)) => {
            let xi = crate::space::ideal_vector(u);
            Ok(log(-minkowski(c, &xi)) - log(-minkowski(o, &xi)))
        }
        (Space::MetricTree { tree }, BoundaryDirection::Ray { ray }, Point::Tree(o), Point::Tree(p)) => {
            let root = tree.edge(*ray)?.from;
            let h = |q: &crate::space::TreePoint| {
                if q.edge == *ray {
                    -q.offset
                } else {
                    tree.distance_to_vertex(q, root)
                }
            };
            Ok(h(p) - h(o))
        }
        (Space::Product { factors }, BoundaryDirection::Product(entries), Point::Product(os), Point::Product(ps)) => {
            let mut total = 0.0;
            for (((f, (w, d)), o), p) in factors.iter().zip(entries).zip(os).zip(ps) {
                if *w != 0.0 {
                    total += w * busemann(f, d, o, p)?;
                }
            }
            Ok(total)
        }
        (Space::Sphere { .. }, _, _, _) => Err(capability("a sphere has no Busemann functions")),
        _ => Err(Error::SpaceMismatch),
    }
}

/// Sum of convexity defects of every field over every witness pair.
pub fn affinity_defect_functional(space: &Space, fields: &[ScalarField], witnesses: &[(Point, Point)]) -> Result<f64> {
    if witnesses.is_empty() {
        return Err(usage("affinity defect needs at least one witness pair"));
    }
    let mut total = 0.0;
    for f in fields {
        for (x, y) in witnesses {
            total += f.convexity_defect(space, x, y)?;
        }
    }
    Ok(total)
}

/// Sampling settings for [`absolute_gradient`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProbeSettings {
    /// Largest probe radius.
    pub scale: f64,
    /// Radii are `scale * 2^-k` for `k < levels`.
    pub levels: usize,
    pub directions: usize,
    pub refine: bool,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        Self { scale: 1.0, levels: 11, directions: 64, refine: true }
    }
}

impl ProbeSettings {
    /// A cheap profile for per-step diagnostics.
    pub fn light(scale: f64) -> Self {
        Self { scale, levels: 3, directions: 16, refine: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientEstimate {
    pub point: Point,
    pub value: f64,
    /// True when `value` comes from sampling rather than the closed form.
    pub at_resolution: bool,
    pub probe_radii: Vec<f64>,
    pub per_radius_max: Vec<f64>,
    /// Whether the sampled quotients grow (within tolerance) as the radius
    /// shrinks, as they must for a convex field.
    pub monotone: bool,
}

/// Estimates `|grad_p(-f)| = max(0, limsup (f(p) - f(x)) / d(p, x))`.
pub fn absolute_gradient(
    space: &Space,
    f: &ScalarField,
    p: &Point,
    settings: &ProbeSettings,
) -> Result<GradientEstimate> {
    absolute_gradient_with(space, f, p, settings, &ToleranceProfile::default())
}

pub fn absolute_gradient_with(
    space: &Space,
    f: &ScalarField,
    p: &Point,
    settings: &ProbeSettings,
    tol: &ToleranceProfile,
) -> Result<GradientEstimate> {
    if settings.levels == 0 || settings.directions == 0 || !(settings.scale > 0.0) {
        return Err(usage("probe schedule is empty"));
    }
    space.check_point(p, 1e-9)?;
    let sampler = Sampler::new(space, f, p, settings, tol)?;
    let mut radii = Vec::with_capacity(settings.levels);
    let mut maxima = Vec::with_capacity(settings.levels);
    let mut h = settings.scale;
    for _ in 0..settings.levels {
        radii.push(h);
        maxima.push(sampler.max_quotient(h)?);
        h *= 0.5;
    }
    let monotone = maxima.windows(2).all(|w| w[1] >= w[0] - tol.gradient_monotonicity);
    let analytic = f.analytic_slope(space, p, tol)?;
    let sampled = maxima.last().copied().unwrap_or(0.0).max(0.0);
    Ok(GradientEstimate {
        point: p.clone(),
        value: analytic.unwrap_or(sampled),
        at_resolution: analytic.is_none(),
        probe_radii: radii,
        per_radius_max: maxima,
        monotone,
    })
}

/// Closed-form slope if available, otherwise the light sampled estimate.
pub(crate) fn slope(
    space: &Space,
    f: &ScalarField,
    p: &Point,
    scale: f64,
    tol: &ToleranceProfile,
) -> Result<(f64, bool)> {
    if let Some(s) = f.analytic_slope(space, p, tol)? {
        return Ok((s, true));
    }
    let est = absolute_gradient_with(space, f, p, &ProbeSettings::light(scale), tol)?;
    Ok((est.value, false))
}

/// The steepest sampled descent direction of `phi` at `p` at radius `h`.
pub(crate) struct Sampler<'a> {
    space: &'a Space,
    f: &'a ScalarField,
    p: &'a Point,
    fp: f64,
    chart: Option<Chart>,
    dirs: Vec<Vec<f64>>,
    refine: bool,
    tol: &'a ToleranceProfile,
}

impl<'a> Sampler<'a> {
    pub(crate) fn new(
        space: &'a Space,
        f: &'a ScalarField,
        p: &'a Point,
        settings: &ProbeSettings,
        tol: &'a ToleranceProfile,
    ) -> Result<Self> {
        let fp = f.value(space, p, tol)?;
        let (chart, dirs) = match space {
            Space::MetricTree { .. } => (None, Vec::new()),
            _ => {
                let chart = Chart::at(space, p)?;
                let mut dirs = math::sphere_directions(chart.dim(), settings.directions);
                let mut targets = Vec::new();
                f.hint_targets(space, p, &mut targets, tol);
                for t in targets {
                    if let Ok(v) = chart.log(&t) {
                        if let Some(u) = math::normalized(&v) {
                            dirs.push(u);
                        }
                    }
                }
                if let Point::Coords(c) = p {
                    if space.is_flat() {
                        if let Some(s) = f.flat_subgradient(space, c, tol)? {
                            if let Some(u) = math::normalized(&s.vector) {
                                dirs.push(math::scale(&u, -1.0));
                            }
                        }
                    }
                }
                (Some(chart), dirs)
            }
        };
        Ok(Self { space, f, p, fp, chart, dirs, refine: settings.refine, tol })
    }

    fn quotient_at(&self, chart: &Chart, v: &[f64], h: f64) -> Option<f64> {
        let x = chart.exp(&math::scale(v, h)).ok()?;
        if self.space.check_point(&x, 1e-12).is_err() {
            return None;
        }
        let fx = self.f.value(self.space, &x, self.tol).ok()?;
        Some((self.fp - fx) / h)
    }

    /// Maximum of `(f(p) - f(x)) / h` over the sampled sphere of radius `h`.
    pub(crate) fn max_quotient(&self, h: f64) -> Result<f64> {
        Ok(self.steepest(h)?.map_or(f64::NEG_INFINITY, |(q, _)| q))
    }

    /// Best quotient and the corresponding probe point.
    pub(crate) fn steepest(&self, h: f64) -> Result<Option<(f64, Point)>> {
        if let (Space::MetricTree { tree }, Point::Tree(tp)) = (self.space, self.p) {
            let mut best: Option<(f64, Point)> = None;
            for q in tree.sphere_points(tp, h, 1e-12) {
                let q = Point::Tree(q);
                let v = (self.fp - self.f.value(self.space, &q, self.tol)?) / h;
                if best.as_ref().is_none_or(|(b, _)| v > *b) {
                    best = Some((v, q));
                }
            }
            return Ok(best);
        }
        let chart = self.chart.as_ref().ok_or_else(|| capability("no tangent chart"))?;
        let mut best: Option<(f64, Vec<f64>)> = None;
        for d in &self.dirs {
            if let Some(q) = self.quotient_at(chart, d, h) {
                if best.as_ref().is_none_or(|(b, _)| q > *b) {
                    best = Some((q, d.clone()));
                }
            }
        }
        let Some((mut bq, mut bv)) = best else {
            return Ok(None);
        };
        if self.refine {
            let dim = chart.dim();
            if dim == 2 {
                let th0 = math::atan2(bv[1], bv[0]);
                let width = 2.0 * PI / self.dirs.len().max(8) as f64;
                let g =
                    |th: f64| self.quotient_at(chart, &[math::cos(th), math::sin(th)], h).unwrap_or(f64::NEG_INFINITY);
                let (th, q) = golden_max(g, th0 - width, th0 + width, 60);
                if q > bq {
                    bq = q;
                    bv = vec![math::cos(th), math::sin(th)];
                }
            } else if dim > 2 {
                let mut delta = 0.25;
                for _ in 0..40 {
                    let mut improved = false;
                    for j in 0..dim {
                        for s in [delta, -delta] {
                            let mut w = bv.clone();
                            w[j] += s;
                            if let Some(u) = math::normalized(&w) {
                                if let Some(q) = self.quotient_at(chart, &u, h) {
                                    if q > bq {
                                        bq = q;
                                        bv = u;
                                        improved = true;
                                    }
                                }
                            }
                        }
                    }
                    if !improved {
                        delta *= 0.5;
                        if delta < 1e-9 {
                            break;
                        }
                    }
                }
            }
        }
        Ok(Some((bq, chart.exp(&math::scale(&bv, h))?)))
    }
}

/// Golden-section search for the maximum of a unimodal function on `[a, b]`.
pub(crate) fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iterations: usize) -> (f64, f64) {
    let r = (math::sqrt(5.0) - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iterations {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

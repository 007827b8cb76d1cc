//! Nested convex families with empty intersection: limit fields, gradient
//! floors, projection spread, boundary certificates and the Hilbert box.

use hadamard_core::filtering::{
    build_limit_field, gradient_floor, gradient_floor_check, hilbert_box_family, intersection_at_infinity,
    monotone_radius_check, probe_points, projection_spread_check, InfinitySettings, LimitSettings, NestedFamily,
};
use hadamard_core::{BoundaryDirection, MetricTree, Point, Space};
use rand::Rng;
use rand_distr::StandardNormal;
use serde_json::{json, Value};

use crate::config::{default_offsets, FamilySpec};
use crate::error::{usage, CliResult};
use crate::report::{Check, Outcome, Table};
use crate::run::Context;

const START_GAP: f64 = 2e-3;
const HILBERT_TOLERANCE: f64 = 1e-12;
const MONOTONE_CANDIDATES: usize = 256;
const GRADIENT_SAMPLES: usize = 16;
const SPREAD_STEP: f64 = 1.0;

pub fn build_family(spec: &FamilySpec) -> CliResult<NestedFamily> {
    let offsets = |o: &Option<Vec<f64>>| o.clone().unwrap_or_else(default_offsets);
    Ok(match spec {
        FamilySpec::Parallel { dimension, offsets: o } => NestedFamily::parallel_half_spaces(*dimension, &offsets(o))?,
        FamilySpec::Cone { normals, offsets: o } => NestedFamily::translated_cone(normals, &offsets(o))?,
        FamilySpec::Accumulating { normals, offsets } => NestedFamily::accumulating(normals, offsets)?,
        FamilySpec::TreeSubrays { rays, ray, offsets: o } => {
            let tree = MetricTree::star(*rays);
            let center = Point::Tree(tree.vertex_point(0));
            NestedFamily::tree_subrays(tree, *ray, &offsets(o), center)?
        }
        FamilySpec::Hilbert { dimension, length } => hilbert_box_family(*dimension, *length)?.family,
        FamilySpec::Explicit { family } => family.clone(),
    })
}

/// Per-family measurements; `None` where a check does not apply.
#[derive(Default)]
struct Row {
    dimension: usize,
    truncation: Option<usize>,
    min_gradient: Option<f64>,
    floor: Option<f64>,
    spread: Option<(f64, f64)>,
    recession_angle: Option<f64>,
    start_gap: Option<f64>,
    monotone_angle: Option<f64>,
    hilbert_error: Option<f64>,
    nesting_violation: f64,
}

fn run_family(ctx: &Context, index: usize, spec: &FamilySpec) -> CliResult<(Row, Value)> {
    let seed = ctx.config.seed;
    if let FamilySpec::Hilbert { dimension, length } = spec {
        let h = hilbert_box_family(*dimension, *length)?;
        let err = h.distances.iter().enumerate().map(|(i, d)| (d - ((i + 1) as f64).sqrt()).abs()).fold(0.0, f64::max);
        let row = Row { dimension: *dimension, hilbert_error: Some(err), ..Row::default() };
        let value =
            json!({ "kind": "hilbert", "distances": h.distances, "squared_slope": h.squared_slope, "max_error": err });
        return Ok((row, value));
    }

    let family = build_family(spec)?;
    let space = &family.space;
    let o = &family.basepoint;
    let nesting = family.check_nested(256, seed)?;
    let settings = LimitSettings {
        tolerance: ctx.tol.limit_field,
        emptiness_threshold: ctx.tol.emptiness_threshold,
        seed,
        ..LimitSettings::default()
    };
    let limit = build_limit_field(&family, &settings)?;
    let n = space.dimension();
    let samples = probe_points(space, o, GRADIENT_SAMPLES, 10.0, seed.wrapping_add(index as u64))?;
    let floor = gradient_floor_check(&limit, n, &samples)?;
    let spread = projection_spread_check(&limit, o, SPREAD_STEP)?;
    let mut row = Row {
        dimension: n,
        truncation: Some(limit.truncation),
        min_gradient: Some(floor.min_gradient),
        floor: Some(floor.floor),
        spread: Some((spread.max_pair_distance, spread.bound)),
        nesting_violation: nesting.max_violation,
        ..Row::default()
    };

    let mut certificate = None;
    let mut monotone = None;
    if matches!(space, Space::Euclidean { .. } | Space::MetricTree { .. }) {
        let inf = InfinitySettings {
            limit: settings.clone(),
            angular_tolerance: ctx.tol.direction_residual,
            ..InfinitySettings::default()
        };
        let cert = intersection_at_infinity(&family, &inf)?;
        row.recession_angle = Some(cert.bodies.iter().map(|b| b.angle).fold(0.0, f64::max));
        row.start_gap = Some(cert.start_gap);
        if let (BoundaryDirection::Vector(xi), Space::Euclidean { dimension }) = (&cert.direction, space) {
            let mut rng = ctx.rng(index as u64);
            let candidates: Vec<Vec<f64>> = (0..MONOTONE_CANDIDATES)
                .map(|_| {
                    let g: Vec<f64> = (0..*dimension).map(|_| rng.sample(StandardNormal)).collect();
                    let r = g.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
                    g.into_iter().map(|x| x / r).collect()
                })
                .collect();
            let m = monotone_radius_check(&family, xi, &candidates)?;
            row.monotone_angle = Some(m.max_angle);
            monotone = Some(m);
        }
        certificate = Some(cert);
    }
    let value = json!({
        "kind": "nested",
        "dimension": n,
        "nesting": nesting,
        "truncation": limit.truncation,
        "stability": limit.stability,
        "basepoint_distances": limit.basepoint_distances,
        "gradient_floor": floor,
        "spread": spread,
        "certificate": certificate,
        "monotone": monotone,
    });
    Ok((row, value))
}

fn opt(x: Option<f64>) -> f64 {
    x.unwrap_or(f64::NAN)
}

fn worst<F: Fn(&Row) -> Option<f64>>(rows: &[Row], f: F) -> Option<f64> {
    rows.iter().filter_map(f).fold(None, |acc, x| Some(acc.map_or(x, |a: f64| a.max(x))))
}

pub fn filtering(ctx: &Context) -> CliResult<Outcome> {
    let inputs = &ctx.config.inputs;
    let specs: Vec<FamilySpec> = match (&inputs.family, &inputs.families) {
        (Some(f), None) => vec![f.clone()],
        (None, Some(list)) if !list.is_empty() => list.clone(),
        (Some(_), Some(_)) => return Err(usage("give either inputs.family or inputs.families, not both")),
        _ => return Err(usage("filtering needs a family (--family) or inputs.families")),
    };
    let outputs = ctx.map(specs.iter().enumerate().collect(), |(i, spec)| run_family(ctx, i, spec))?;
    let (rows, values): (Vec<Row>, Vec<Value>) = outputs.into_iter().unzip();

    let mut table = Table::new([
        "family",
        "dimension",
        "truncation",
        "min_gradient",
        "floor",
        "max_pair_distance",
        "spread_bound",
        "recession_angle",
        "start_gap",
        "max_monotone_angle",
        "hilbert_error",
    ]);
    for (i, r) in rows.iter().enumerate() {
        table.rows.push(vec![
            i as f64,
            r.dimension as f64,
            r.truncation.map_or(f64::NAN, |t| t as f64),
            opt(r.min_gradient),
            opt(r.floor),
            opt(r.spread.map(|s| s.0)),
            opt(r.spread.map(|s| s.1)),
            opt(r.recession_angle),
            opt(r.start_gap),
            opt(r.monotone_angle),
            opt(r.hilbert_error),
        ]);
    }

    let mut checks = Vec::new();
    let nesting = rows.iter().map(|r| r.nesting_violation).fold(0.0, f64::max);
    checks.push(Check::new(
        "lem:nested",
        "families-nested",
        nesting <= 1e-8,
        format!("largest nesting violation {nesting:.3e}"),
    ));
    if let Some(margin) = worst(&rows, |r| Some(r.floor? - r.min_gradient?)) {
        let floor_one = gradient_floor(1);
        checks.push(Check::new(
            "lem:gradient",
            "gradient-floor",
            margin <= 1e-3 && (floor_one - 0.146447).abs() <= 1e-6,
            format!("largest shortfall below the floor {margin:.3e}; floor(1) = {floor_one:.9}"),
        ));
    }
    if let Some(excess) = worst(&rows, |r| r.spread.map(|(d, b)| d - b)) {
        checks.push(Check::new(
            "lem:nested",
            "projection-spread",
            excess <= 1e-9,
            format!("largest pair distance minus t*sqrt(2): {excess:.3e}"),
        ));
    }
    if let Some(angle) = worst(&rows, |r| r.recession_angle) {
        let gap = worst(&rows, |r| r.start_gap).unwrap_or(0.0);
        checks.push(Check::new(
            "thm:filtering",
            "direction-at-infinity",
            angle <= ctx.tol.direction_residual && gap <= START_GAP,
            format!("largest recession angle {angle:.3e}, largest start gap {gap:.3e}"),
        ));
    }
    if let Some(angle) = worst(&rows, |r| r.monotone_angle) {
        checks.push(Check::new(
            "lem:eberle",
            "monotone-radius",
            angle <= std::f64::consts::FRAC_PI_2 + 1e-3,
            format!("largest angle to a monotone direction {angle:.6}"),
        ));
    }
    if let Some(err) = worst(&rows, |r| r.hilbert_error) {
        checks.push(Check::new(
            "ex:Hilbert",
            "distances-are-square-roots",
            err <= HILBERT_TOLERANCE,
            format!("largest |d(o, X_n) - sqrt(n)| {err:.3e}"),
        ));
    }
    Ok(Outcome { results: json!({ "families": values }), checks, table })
}

//! Finite point-set experiments: Jung, circumcenters, Helly reduction,
//! dimension estimates, comparison triangles and curvature constants.

use std::f64::consts::PI;

use hadamard_core::circum::{
    circumcenter as enclosing_ball, curvature_constants, dimension_lower_bound, helly_subset_check, jung_bound,
    jung_check, telescopic_jung_scan, DimensionBound, JungReport,
};
use hadamard_core::math::{min_norm_hull, norm, sub};
use hadamard_core::{Point, Space};
use rand::Rng;
use serde_json::json;

use crate::config::PointsSpec;
use crate::error::{usage, CliResult};
use crate::points;
use crate::report::{Check, Outcome, Table};
use crate::run::Context;

/// Slack allowed on the Jung inequality.
const JUNG_TOLERANCE: f64 = 1e-7;
/// Allowed excess of the full radius over the subset radius.
const HELLY_TOLERANCE: f64 = 1e-6;
const COMPARISON_TOLERANCE: f64 = 1e-9;

/// One sampled instance: the space index in the sweep, the trial, and its points.
struct Instance {
    space: usize,
    trial: usize,
    points: Vec<Point>,
}

fn instances(ctx: &Context, spaces: &[Space]) -> CliResult<Vec<Instance>> {
    let spec = ctx
        .config
        .inputs
        .points
        .as_ref()
        .ok_or_else(|| usage(format!("'{}' needs points (--points)", ctx.config.command.name())))?;
    let trials = ctx.config.inputs.trials.unwrap_or(1).max(1);
    let mut out = Vec::with_capacity(spaces.len() * trials);
    for (s, space) in spaces.iter().enumerate() {
        for trial in 0..trials {
            let mut rng = ctx.rng(((s as u64) << 32) | trial as u64);
            out.push(Instance { space: s, trial, points: points::resolve(spec, space, &mut rng)? });
        }
    }
    Ok(out)
}

fn is_simplex(spec: &Option<PointsSpec>) -> bool {
    matches!(spec, Some(PointsSpec::Source(s)) if s.starts_with("simplex:"))
}

pub fn jung(ctx: &Context) -> CliResult<Outcome> {
    let inputs = &ctx.config.inputs;
    let spaces = ctx.config.spaces()?;
    let telescopic = match (inputs.delta, inputs.min_diameter) {
        (Some(d), Some(m)) => Some((d, m)),
        (None, None) => None,
        _ => return Err(usage("--delta and --min-diameter go together")),
    };
    let work = instances(ctx, &spaces)?;
    let reports: Vec<(usize, usize, Vec<JungReport>)> = ctx.map(work, |inst| {
        let space = &spaces[inst.space];
        let n = inputs.dimension.unwrap_or_else(|| space.dimension());
        let reps = match telescopic {
            Some((delta, min_d)) => telescopic_jung_scan(space, &inst.points, n, delta, min_d)?,
            None => vec![jung_check(space, &inst.points, n)?],
        };
        Ok((inst.space, inst.trial, reps))
    })?;

    let mut table =
        Table::new(["space", "trial", "n", "diameter", "radius", "ratio", "bound", "slack", "scale", "bucket_size"]);
    let mut min_slack = f64::INFINITY;
    let mut max_abs_slack = 0.0f64;
    let mut rows = Vec::new();
    for (s, trial, reps) in &reports {
        for r in reps {
            table.rows.push(vec![
                *s as f64,
                *trial as f64,
                r.n as f64,
                r.diameter,
                r.radius,
                r.ratio,
                r.bound,
                r.slack,
                r.scale_bucket.unwrap_or(f64::NAN),
                r.bucket_size.map_or(f64::NAN, |b| b as f64),
            ]);
            if spaces[*s].is_cat0() {
                min_slack = min_slack.min(r.slack);
            }
            max_abs_slack = max_abs_slack.max(r.slack.abs());
        }
        rows.push(json!({ "space": s, "trial": trial, "reports": reps }));
    }

    let mut checks = Vec::new();
    if spaces.iter().any(Space::is_cat0) {
        checks.push(Check::new(
            "thm:raddiam",
            "jung-inequality",
            min_slack >= -JUNG_TOLERANCE,
            format!("smallest slack {min_slack:.3e} over {} instances", table.rows.len()),
        ));
    }
    if is_simplex(&inputs.points) && telescopic.is_none() {
        checks.push(Check::new(
            "thm:raddiam",
            "simplex-equality",
            max_abs_slack <= JUNG_TOLERANCE,
            format!("largest |slack| {max_abs_slack:.3e} on regular simplices"),
        ));
    }
    let results = json!({
        "instances": rows,
        "min_slack": finite_or_null(min_slack),
        "spaces": spaces,
    });
    Ok(Outcome { results, checks, table })
}

fn finite_or_null(x: f64) -> serde_json::Value {
    if x.is_finite() {
        json!(x)
    } else {
        serde_json::Value::Null
    }
}

pub fn circumcenter(ctx: &Context) -> CliResult<Outcome> {
    let spaces = ctx.config.spaces()?;
    let support_tol = ctx.tol.support;
    let work = instances(ctx, &spaces)?;
    let results = ctx.map(work, |inst| {
        let space = &spaces[inst.space];
        let c = enclosing_ball(space, &inst.points)?;
        let excess = inst
            .points
            .iter()
            .map(|p| space.distance(&c.center, p).map(|d| d - c.radius))
            .collect::<hadamard_core::Result<Vec<f64>>>()?
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        // First-order optimality in flat spaces: the center is a convex
        // combination of its support points.
        let kkt = match (&c.center, space.is_flat()) {
            (Point::Coords(z), true) => {
                let offsets: Vec<Vec<f64>> =
                    c.support.iter().map(|&i| sub(inst.points[i].coords().unwrap(), z)).collect();
                Some(if offsets.is_empty() { f64::INFINITY } else { norm(&min_norm_hull(&offsets).0) })
            }
            _ => None,
        };
        Ok((inst.space, inst.trial, c, excess, kkt))
    })?;

    let mut table = Table::new(["space", "trial", "radius", "support_size", "enclosure_excess", "optimality_residual"]);
    let (mut worst_excess, mut worst_kkt) = (f64::NEG_INFINITY, 0.0f64);
    let mut rows = Vec::new();
    for (s, trial, c, excess, kkt) in results {
        table.rows.push(vec![
            s as f64,
            trial as f64,
            c.radius,
            c.support.len() as f64,
            excess,
            kkt.unwrap_or(f64::NAN),
        ]);
        worst_excess = worst_excess.max(excess / (1.0 + c.radius));
        if let Some(k) = kkt {
            worst_kkt = worst_kkt.max(k / (1.0 + c.radius));
        }
        rows.push(
            json!({ "space": s, "trial": trial, "result": c, "enclosure_excess": excess, "optimality_residual": kkt }),
        );
    }
    let mut checks = vec![Check::new(
        "sec:Jung:cat0",
        "enclosure",
        worst_excess <= support_tol,
        format!("largest relative distance beyond the radius {worst_excess:.3e}"),
    )];
    if spaces.iter().any(Space::is_flat) {
        checks.push(Check::new(
            "sec:Jung:cat0",
            "optimality",
            worst_kkt <= support_tol,
            format!("largest distance from the center to the support hull {worst_kkt:.3e}"),
        ));
    }
    Ok(Outcome { results: json!({ "instances": rows }), checks, table })
}

pub fn helly(ctx: &Context) -> CliResult<Outcome> {
    let inputs = &ctx.config.inputs;
    let spaces = ctx.config.spaces()?;
    let work = instances(ctx, &spaces)?;
    let results = ctx.map(work, |inst| {
        let space = &spaces[inst.space];
        let n = inputs.dimension.unwrap_or_else(|| space.dimension());
        // Without an explicit radius, use the largest small-subset radius so
        // the premise holds by construction.
        let r = match inputs.radius {
            Some(r) => r,
            None => helly_subset_check(space, &inst.points, n, f64::INFINITY)?.worst_subset_radius,
        };
        Ok((inst.space, inst.trial, helly_subset_check(space, &inst.points, n, r)?))
    })?;

    let mut table = Table::new(["space", "trial", "n", "r", "worst_subset_radius", "full_radius", "premise", "holds"]);
    let mut rows = Vec::new();
    let (mut failures, mut premises, mut worst) = (0, 0, f64::NEG_INFINITY);
    for (s, trial, rep) in results {
        table.rows.push(vec![
            s as f64,
            trial as f64,
            rep.n as f64,
            rep.r,
            rep.worst_subset_radius,
            rep.full_radius,
            rep.premise as u8 as f64,
            rep.holds as u8 as f64,
        ]);
        if rep.premise {
            premises += 1;
            worst = worst.max(rep.full_radius - rep.r);
            if rep.full_radius > rep.r + HELLY_TOLERANCE {
                failures += 1;
            }
        }
        rows.push(json!({ "space": s, "trial": trial, "report": rep }));
    }
    let checks = vec![Check::new(
        "lem:nplus",
        "subset-reduction",
        failures == 0,
        format!("{failures} failures among {premises} instances meeting the premise; largest excess {worst:.3e}"),
    )];
    Ok(Outcome { results: json!({ "instances": rows }), checks, table })
}

pub fn dimension(ctx: &Context) -> CliResult<Outcome> {
    let spaces = ctx.config.spaces()?;
    let work = instances(ctx, &spaces)?;
    let results =
        ctx.map(work, |inst| Ok((inst.space, inst.trial, dimension_lower_bound(&spaces[inst.space], &inst.points)?)))?;

    let mut table = Table::new(["space", "trial", "ratio", "lower_bound"]);
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for (s, trial, rep) in results {
        let bound = match rep.bound {
            DimensionBound::Finite(n) => n as f64,
            DimensionBound::ExceedsAllFiniteBounds => f64::INFINITY,
        };
        // A CAT(0) space of dimension d cannot certify more than d.
        let space = &spaces[s];
        if space.is_cat0() && bound > space.dimension() as f64 {
            violations.push(format!("space {s} trial {trial}: bound {bound} exceeds {}", space.dimension()));
        }
        table.rows.push(vec![s as f64, trial as f64, rep.ratio, bound]);
        rows.push(json!({ "space": s, "trial": trial, "report": rep }));
    }
    let checks = vec![Check::new(
        "thm:dimension",
        "bound-within-dimension",
        violations.is_empty(),
        if violations.is_empty() {
            "every certified bound is at most the model dimension".to_string()
        } else {
            violations.join("; ")
        },
    )];
    Ok(Outcome { results: json!({ "instances": rows }), checks, table })
}

pub fn comparison(ctx: &Context) -> CliResult<Outcome> {
    let spaces = ctx.config.spaces()?;
    let trials = ctx.config.inputs.trials.unwrap_or(1000).max(1);
    let work: Vec<usize> = (0..spaces.len()).collect();
    let results = ctx.map(work, |s| {
        let space = &spaces[s];
        let mut rng = ctx.rng((s as u64) << 32);
        let (mut worst, mut witness) = (f64::INFINITY, None);
        for _ in 0..trials {
            let pts = points::generate("gaussian", 3, space, &mut rng)?;
            let t = rng.gen_range(0.0..=1.0);
            let d = space.comparison_check(&pts[0], &pts[1], &pts[2], t)?;
            if d < worst {
                worst = d;
                witness = Some(json!({ "points": pts, "t": t }));
            }
        }
        Ok((s, worst, witness))
    })?;

    let mut table = Table::new(["space", "triples", "min_defect"]);
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for (s, worst, witness) in results {
        let space = &spaces[s];
        table.rows.push(vec![s as f64, trials as f64, worst]);
        let (name, passed) = if space.is_cat0() {
            ("comparison-holds", worst >= -COMPARISON_TOLERANCE)
        } else {
            ("comparison-violated", worst < 0.0)
        };
        checks.push(Check::new(
            "sec:Jung:cat0",
            format!("{name}[{s}]"),
            passed,
            format!("smallest defect {worst:.3e}"),
        ));
        rows.push(json!({ "space": space, "min_defect": worst, "witness": witness }));
    }
    Ok(Outcome { results: json!({ "spaces": rows }), checks, table })
}

pub fn constants(ctx: &Context) -> CliResult<Outcome> {
    let inputs = &ctx.config.inputs;
    let ns: Vec<usize> = match (&inputs.dimensions, inputs.kn) {
        (Some(list), _) if !list.is_empty() => list.clone(),
        (_, Some(n)) => vec![n],
        _ => return Err(usage("constants needs --kn n (or inputs.dimensions)")),
    };
    let mut table = Table::new(["n", "k_n", "r", "s_n", "d", "r_n"]);
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let mut worst_limit = 0.0f64;
    for &n in &ns {
        let c = curvature_constants(n, inputs.sn, inputs.rn)?;
        let (r, s) = c.s_n.unwrap_or((f64::NAN, f64::NAN));
        let (d, rr) = c.r_n.unwrap_or((f64::NAN, f64::NAN));
        table.rows.push(vec![n as f64, c.k_n, r, s, d, rr]);
        if n == 1 {
            checks.push(Check::new(
                "sec:Jung:cat0",
                "k_1",
                c.k_n == 2.0 * PI / 3.0,
                format!("k_1 = {:.17}, 2pi/3 = {:.17}", c.k_n, 2.0 * PI / 3.0),
            ));
        }
        // Small simplices are nearly flat: compare with the Jung ratio.
        if r <= 1e-3 {
            worst_limit = worst_limit.max((s / r - 1.0 / jung_bound(n)).abs());
        }
        if d <= 1e-3 {
            worst_limit = worst_limit.max((rr / d - jung_bound(n)).abs());
        }
        rows.push(json!(c));
    }
    if inputs.sn.is_some_and(|r| r <= 1e-3) || inputs.rn.is_some_and(|d| d <= 1e-3) {
        checks.push(Check::new(
            "sec:Jung:cat0",
            "flat-limit",
            worst_limit <= 1e-4,
            format!("largest deviation from the flat Jung ratios {worst_limit:.3e}"),
        ));
    }
    Ok(Outcome { results: json!({ "constants": rows }), checks, table })
}

//! Proximal gradient flow: single trajectories with escape diagnostics, and
//! random field ensembles for semicontraction and energy-rate checks.

use hadamard_core::flow::{run_flow_with, semicontraction_check, velocity_of_escape_with, FlowSettings};
use hadamard_core::{Point, ScalarField, Space};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::json;

use crate::config::FieldEnsemble;
use crate::error::{usage, CliResult};
use crate::report::{point_columns, Check, Outcome, Table};
use crate::run::Context;

const SEMICONTRACTION_TOLERANCE: f64 = 1e-6;
const ENERGY_NOISE: f64 = 1e-8;
/// Trajectories longer than this are thinned before recording.
const MAX_RECORDED: usize = 20_000;

pub fn flow(ctx: &Context) -> CliResult<Outcome> {
    match &ctx.config.inputs.ensemble {
        Some(FieldEnsemble::MaxAffine { fields, pairs }) => max_affine(ctx, *fields, *pairs),
        Some(FieldEnsemble::DistanceMix { fields }) => distance_mix(ctx, *fields),
        None => single(ctx),
    }
}

/// `C(step) / C(step / 2)`; the per-step energy defect is first order.
fn energy_ratio(
    space: &Space,
    f: &ScalarField,
    x: &Point,
    horizon: f64,
    step: f64,
    ctx: &Context,
) -> CliResult<(f64, f64)> {
    let coarse = run_flow_with(space, f, x, &FlowSettings::new(step, horizon).stride(usize::MAX), &ctx.tol)?;
    let fine = run_flow_with(space, f, x, &FlowSettings::new(step / 2.0, horizon).stride(usize::MAX), &ctx.tol)?;
    Ok((coarse.energy_constant, fine.energy_constant))
}

fn single(ctx: &Context) -> CliResult<Outcome> {
    let inputs = &ctx.config.inputs;
    let space = ctx.config.space()?;
    let f = inputs.field.as_ref().ok_or_else(|| usage("flow needs a field (--field) or an ensemble"))?;
    f.validate(&space)?;
    let start = inputs.start.clone().ok_or_else(|| usage("flow needs a start point (--start)"))?;
    let step = inputs.step.unwrap_or(1e-3);
    let horizon = inputs.horizon.unwrap_or(1.0);
    let steps = (horizon / step).round().max(1.0) as usize;
    let stride = steps.div_ceil(MAX_RECORDED).max(1);
    let traj = run_flow_with(&space, f, &start, &FlowSettings::new(step, horizon).stride(stride), &ctx.tol)?;
    let escape = velocity_of_escape_with(&space, &traj, f.lipschitz(), &ctx.tol)?;
    let (c1, c2) = energy_ratio(&space, f, &start, horizon, step, ctx)?;

    let dim = traj.points.first().map_or(0, |p| point_columns(p).len());
    let mut columns = vec!["t".to_string()];
    columns.extend((0..dim).map(|i| format!("x{i}")));
    columns.extend(["f".to_string(), "grad_norm".to_string()]);
    let mut table = Table { columns, rows: Vec::new() };
    for k in 0..traj.points.len() {
        let mut row = vec![traj.times[k]];
        row.extend(point_columns(&traj.points[k]));
        row.extend([traj.values[k], traj.grad_norms[k]]);
        table.rows.push(row);
    }

    let scale = 1.0 + traj.values.first().map_or(0.0, |v| v.abs());
    let mut checks = vec![Check::new(
        "sec:gradient",
        "descent",
        traj.max_value_increase <= 1e-9 * scale,
        format!("largest one-step increase of f {:.3e}", traj.max_value_increase),
    )];
    // Piecewise affine fields have no curvature: C is then rounding noise.
    if c1 > ENERGY_NOISE && c2 > ENERGY_NOISE {
        let ratio = c1 / c2;
        checks.push(Check::new(
            "sec:gradient",
            "energy-rate",
            (0.5..=2.0).contains(&ratio),
            format!("energy constant {c1:.4e} at step {step:e}, {c2:.4e} at half step"),
        ));
    }
    checks.push(Check::new(
        "prop:karlsson",
        "escape-velocity-floor",
        escape.floor_holds,
        format!("velocity {:.6e}, floor {:.6e}", escape.velocity, escape.velocity_floor),
    ));
    let results = json!({
        "escape": escape,
        "energy_constant": c1,
        "energy_constant_half_step": c2,
        "max_speed_gap": traj.max_speed_gap,
        "recorded_points": traj.points.len(),
        "record_stride": stride,
    });
    Ok(Outcome { results, checks, table })
}

fn euclidean_dimension(space: &Space) -> CliResult<usize> {
    match space {
        Space::Euclidean { dimension } => Ok(*dimension),
        _ => Err(usage("field ensembles are defined in Euclidean spaces")),
    }
}

fn gaussian_vec(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.sample(StandardNormal)).collect()
}

fn max_affine(ctx: &Context, fields: usize, pairs: usize) -> CliResult<Outcome> {
    let space = ctx.config.space()?;
    let d = euclidean_dimension(&space)?;
    let step = ctx.config.inputs.step.unwrap_or(1e-3);
    let horizon = ctx.config.inputs.horizon.unwrap_or(0.05);
    let ratios = ctx.map((0..fields).collect(), |i| {
        let mut rng = ctx.rng(i as u64);
        let k = rng.gen_range(2..=7);
        let f = ScalarField::max_of(
            (0..k).map(|_| ScalarField::affine(gaussian_vec(&mut rng, d), rng.sample(StandardNormal))).collect(),
        );
        let mut worst = 0.0f64;
        for _ in 0..pairs {
            let x = Point::Coords(gaussian_vec(&mut rng, d));
            let y = Point::Coords(gaussian_vec(&mut rng, d));
            worst = worst.max(semicontraction_check(&space, &f, &x, &y, horizon, step)?);
        }
        Ok(worst)
    })?;
    let mut table = Table::new(["field", "max_expansion"]);
    table.rows = ratios.iter().enumerate().map(|(i, r)| vec![i as f64, *r]).collect();
    let worst = ratios.iter().cloned().fold(0.0, f64::max);
    let checks = vec![Check::new(
        "sec:gradient",
        "semicontraction",
        worst <= 1.0 + SEMICONTRACTION_TOLERANCE,
        format!("largest distance ratio {worst:.12} over {fields} fields x {pairs} pairs"),
    )];
    let results = json!({ "step": step, "horizon": horizon, "max_expansion": ratios, "worst": worst });
    Ok(Outcome { results, checks, table })
}

fn distance_mix(ctx: &Context, fields: usize) -> CliResult<Outcome> {
    let space = ctx.config.space()?;
    let d = euclidean_dimension(&space)?;
    let step = ctx.config.inputs.step.unwrap_or(1e-3);
    let horizon = ctx.config.inputs.horizon.unwrap_or(0.5);
    let unit = |rng: &mut ChaCha8Rng| loop {
        let g = gaussian_vec(rng, d);
        let r = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > 1e-9 {
            break g.into_iter().map(|x| x / r).collect::<Vec<f64>>();
        }
    };
    let constants = ctx.map((0..fields).collect(), |i| {
        let mut rng = ctx.rng(i as u64);
        let k = rng.gen_range(2..=4);
        let weights: Vec<f64> = (0..k).map(|_| rng.gen_range(0.2..1.0)).collect();
        let total: f64 = weights.iter().sum();
        // Anchors on the sphere of radius 3, start in the unit ball: the
        // anchors stay out of reach and pull in different directions.
        let members = weights
            .iter()
            .map(|w| {
                let a: Vec<f64> = unit(&mut rng).into_iter().map(|x| 3.0 * x).collect();
                (w / total, ScalarField::normalized_distance(a, vec![0.0; d]))
            })
            .collect();
        let f = ScalarField::convex_combination(members);
        let r = rng.gen_range(0.0..1.0);
        let x = Point::Coords(unit(&mut rng).into_iter().map(|c| r * c).collect());
        energy_ratio(&space, &f, &x, horizon, step, ctx)
    })?;
    let mut table = Table::new(["field", "energy_constant", "energy_constant_half_step", "ratio"]);
    let mut worst: f64 = 1.0;
    for (i, (c1, c2)) in constants.iter().enumerate() {
        let ratio = c1 / c2;
        if ratio.is_nan() || ratio.ln().abs() > worst.ln().abs() {
            worst = ratio;
        }
        table.rows.push(vec![i as f64, *c1, *c2, ratio]);
    }
    let checks = vec![Check::new(
        "sec:gradient",
        "energy-rate",
        (0.5..=2.0).contains(&worst),
        format!("worst C(step)/C(step/2) {worst:.4} over {fields} fields"),
    )];
    let results = json!({
        "step": step,
        "horizon": horizon,
        "energy_constants": constants,
        "worst_ratio": worst,
    });
    Ok(Outcome { results, checks, table })
}

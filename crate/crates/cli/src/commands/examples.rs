//! The oscillating concave field and the convergence demos of the
//! function space of 1-Lipschitz convex functions.

use hadamard_core::counterexamples::c0::{hilbert_basis_demo, star_tree_demo, C0Demos};
use hadamard_core::counterexamples::{
    build_petrunin, curve_residuals, flow_agreement_check, halving_check, oscillation_report,
};
use serde_json::json;

use crate::error::CliResult;
use crate::report::{Check, Outcome, Table};
use crate::run::Context;

/// Residuals above this mean no limit direction is approached.
const NON_CONVERGENCE: f64 = 1e-2;

pub fn petrunin(ctx: &Context) -> CliResult<Outcome> {
    let inputs = &ctx.config.inputs;
    let config = inputs.petrunin.clone().unwrap_or_default();
    let inst = build_petrunin(&config)?;
    let step = inputs.step.unwrap_or(1e-3);
    let horizon = inputs.horizon.unwrap_or(20.0);
    let invariants = inst.invariants(50);
    let oscillation = oscillation_report(&inst);
    let agreement = flow_agreement_check(&inst, step, horizon)?;
    let halving = halving_check(&inst, step, horizon)?;
    let curve = curve_residuals(&inst);
    let discrete_last = agreement.escape.direction_residuals.last().copied().unwrap_or(f64::NAN);

    let mut table = Table::new(["n", "anchor_x", "anchor_y", "angle", "norm", "direction_norm", "shift"]);
    for (i, p) in inst.anchors.iter().enumerate() {
        let dn = inst.directions.get(i).map_or(f64::NAN, |x| x.iter().map(|c| c * c).sum::<f64>().sqrt());
        table.rows.push(vec![
            (i + 1) as f64,
            p[0],
            p[1],
            oscillation.angles[i],
            oscillation.norms[i],
            dn,
            inst.shifts.get(i).copied().unwrap_or(f64::NAN),
        ]);
    }

    let checks = vec![
        Check::new(
            "ex:Petrunin",
            "structural-invariants",
            invariants.holds,
            format!(
                "side product {:.3e}, recursion {:.1e}, ray {:.1e}, parallel {:.1e}, shift {:.1e}, active piece {:.1e}",
                invariants.min_side_product,
                invariants.recursion_residual,
                invariants.ray_residual,
                invariants.parallel_residual,
                invariants.shift_residual,
                invariants.active_piece_residual
            ),
        ),
        Check::new(
            "ex:Petrunin",
            "both-sides-visited",
            oscillation.upper > 0 && oscillation.lower > 0 && oscillation.angle_residual <= 1e-12,
            format!(
                "{} anchors above, {} below, angle residual {:.1e}",
                oscillation.upper, oscillation.lower, oscillation.angle_residual
            ),
        ),
        Check::new(
            "ex:Petrunin",
            "flow-tracks-polygon",
            agreement.within,
            format!("deviation {:.3e} against bound {:.3e}", agreement.deviation, agreement.bound),
        ),
        Check::new(
            "ex:Petrunin",
            "first-order-in-step",
            halving.within_factor,
            format!("error ratio {:.3} under step halving", halving.ratio),
        ),
        // Negative control: without curvature bounds the limit direction
        // need not exist, and here it does not.
        Check::new(
            "prop:karlsson",
            "no-limit-direction",
            !curve.converges && discrete_last > NON_CONVERGENCE,
            format!("curve residual tail {:.4}, last discrete residual {discrete_last:.4}", curve.tail_max),
        ),
    ];
    let results = json!({
        "instance": inst,
        "invariants": invariants,
        "oscillation": oscillation,
        "flow": agreement,
        "halving": halving,
        "curve_residuals": curve,
    });
    Ok(Outcome { results, checks, table })
}

pub fn c0_demo(ctx: &Context) -> CliResult<Outcome> {
    let inputs = &ctx.config.inputs;
    let demos = C0Demos {
        hilbert: hilbert_basis_demo(inputs.dimension.unwrap_or(512))?,
        tree: star_tree_demo(inputs.rays.unwrap_or(6))?,
    };
    let h = &demos.hilbert;
    let mut table = Table::new(["index", "sup_value", "rate"]);
    for i in 0..h.indices.len() {
        table.rows.push(vec![h.indices[i] as f64, h.sup_values[i], h.rates[i]]);
    }
    let decreasing = h.sup_values.windows(2).all(|w| w[1] < w[0]);
    let rate = h.rates.last().copied().unwrap_or(f64::NAN);
    let off = demos.tree.off_ray_gap.iter().cloned().fold(0.0, f64::max);
    let on = demos.tree.on_ray_gap.iter().cloned().fold(0.0, f64::max);
    let checks = vec![
        Check::new(
            "spacefunction",
            "basis-functions-vanish",
            decreasing && h.sup_values.len() > 1,
            format!(
                "sup over probes falls from {:.3e} to {:.3e}, last rate {rate:.4}",
                h.sup_values[0],
                h.sup_values[h.sup_values.len() - 1]
            ),
        ),
        Check::new(
            "spacefunction",
            "tree-busemann-closed-form",
            off <= 1e-12 && on <= 1e-12,
            format!("largest gap off the ray {off:.1e}, on the ray {on:.1e}"),
        ),
    ];
    Ok(Outcome { results: json!(demos), checks, table })
}

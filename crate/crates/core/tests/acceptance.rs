//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the lines always show.

#![allow(clippy::needless_range_loop, clippy::type_complexity)]

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use hadamard_core::circum::{curvature_constants, helly_subset_check, jung_bound, jung_check, k_n, min_enclosing_ball};
use hadamard_core::counterexamples::petrunin::curve_residuals;
use hadamard_core::counterexamples::{build_petrunin, flow_agreement_check, oscillation_report, PetruninConfig};
use hadamard_core::filtering::{
    build_limit_field, gradient_floor, gradient_floor_check, hilbert_box_family, intersection_at_infinity,
    monotone_radius_check, probe_points, InfinitySettings, LimitSettings, NestedFamily,
};
use hadamard_core::flow::{run_flow, semicontraction_check};
use hadamard_core::math::regular_simplex;
use hadamard_core::space::Edge;
use hadamard_core::{BoundaryDirection, MetricTree, Point, ScalarField, Space, TreePoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn gauss_vec(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Vec<f64> {
    (0..dim).map(|_| scale * gaussian(rng)).collect()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn jung(rng: &mut ChaCha8Rng) -> Outcome {
    let start = Instant::now();
    let mut worst = f64::INFINITY;
    for n in 1..=6 {
        let space = Space::euclidean(n);
        for k in 0..500 {
            let m = rng.gen_range(n + 1..=3 * n + 3);
            let pts: Vec<Point> = (0..m)
                .map(|_| {
                    let g = gauss_vec(rng, n, 1.0);
                    // on S^0 every point is +-1, so the sphere case starts at n = 2
                    match if n == 1 { k % 2 } else { k % 3 } {
                        0 => g,
                        1 => g.iter().map(|_| rng.gen_range(-1.0..1.0)).collect(),
                        _ => {
                            let r = dot(&g, &g).sqrt().max(1e-300);
                            g.iter().map(|x| x / r).collect()
                        }
                    }
                    .into()
                })
                .collect();
            match jung_check(&space, &pts, n) {
                Ok(r) => worst = worst.min(r.slack),
                Err(e) => return outcome(false, format!("n={n}: {e}")),
            }
        }
    }
    let mut simplex_slack = 0.0f64;
    for n in 1..=6 {
        let pts: Vec<Point> = regular_simplex(n).into_iter().map(Point::from).collect();
        let r = jung_check(&Space::euclidean(n), &pts, n).unwrap();
        simplex_slack = simplex_slack.max(r.slack.abs());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst >= -1e-7 && simplex_slack <= 1e-7 && secs < 60.0,
        format!("min slack {worst:.3e}, simplex |slack| {simplex_slack:.1e}, {secs:.2} s"),
    )
}

/// Ball through `boundary` with center in its affine hull.
fn ball_through(boundary: &[Vec<f64>], dim: usize) -> (Vec<f64>, f64) {
    match boundary.len() {
        0 => (vec![0.0; dim], -1.0),
        1 => (boundary[0].clone(), 0.0),
        k1 => {
            let p0 = &boundary[0];
            let k = k1 - 1;
            let d: Vec<Vec<f64>> =
                boundary[1..].iter().map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect()).collect();
            let mut a = vec![vec![0.0; k + 1]; k];
            for i in 0..k {
                for j in 0..k {
                    a[i][j] = dot(&d[i], &d[j]);
                }
                a[i][k] = 0.5 * dot(&d[i], &d[i]);
            }
            // Gauss-Jordan with partial pivoting
            for c in 0..k {
                let piv = (c..k).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())).unwrap();
                a.swap(c, piv);
                for r in 0..k {
                    if r != c {
                        let f = a[r][c] / a[c][c];
                        for j in c..=k {
                            a[r][j] -= f * a[c][j];
                        }
                    }
                }
            }
            let mut c = p0.clone();
            for i in 0..k {
                let l = a[i][k] / a[i][i];
                for (cj, dj) in c.iter_mut().zip(&d[i]) {
                    *cj += l * dj;
                }
            }
            let r = dist(&c, p0);
            (c, r)
        }
    }
}

fn welzl(pts: &[Vec<f64>], n: usize, boundary: &mut Vec<Vec<f64>>, dim: usize) -> (Vec<f64>, f64) {
    if n == 0 || boundary.len() == dim + 1 {
        return ball_through(boundary, dim);
    }
    let (c, r) = welzl(pts, n - 1, boundary, dim);
    let p = &pts[n - 1];
    if r >= 0.0 && dist(p, &c) <= r * (1.0 + 1e-12) {
        return (c, r);
    }
    boundary.push(p.clone());
    let out = welzl(pts, n - 1, boundary, dim);
    boundary.pop();
    out
}

fn circumcenter_oracle(rng: &mut ChaCha8Rng) -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for dim in [2, 3] {
        for _ in 0..500 {
            let m = rng.gen_range(2..=40);
            let mut pts: Vec<Vec<f64>> = (0..m).map(|_| gauss_vec(rng, dim, 1.0)).collect();
            let (_, r, _) = min_enclosing_ball(&pts);
            // Welzl's expected linear time needs a random order.
            for i in (1..pts.len()).rev() {
                pts.swap(i, rng.gen_range(0..=i));
            }
            let (_, ro) = welzl(&pts, pts.len(), &mut Vec::new(), dim);
            worst = worst.max((r - ro).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(worst <= 1e-7 && secs < 30.0, format!("max |r - r_welzl| {worst:.2e}, {secs:.2} s"))
}

fn helly(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst_excess = f64::NEG_INFINITY;
    let mut failures = 0;
    for dim in [2, 3] {
        let space = Space::euclidean(dim);
        for _ in 0..200 {
            let pts: Vec<Point> = (0..8).map(|_| Point::from(gauss_vec(rng, dim, 1.0))).collect();
            let probe = helly_subset_check(&space, &pts, dim, f64::INFINITY).unwrap();
            let r = probe.worst_subset_radius;
            let rep = helly_subset_check(&space, &pts, dim, r).unwrap();
            if !(rep.premise && rep.holds) {
                failures += 1;
            }
            worst_excess = worst_excess.max(rep.full_radius - r);
        }
    }
    outcome(
        failures == 0 && worst_excess <= 1e-6,
        format!("{failures} failures, max full - subset radius {worst_excess:.2e}"),
    )
}

fn random_max_affine(rng: &mut ChaCha8Rng, dim: usize) -> ScalarField {
    let k = rng.gen_range(2..=7);
    ScalarField::max_of((0..k).map(|_| ScalarField::affine(gauss_vec(rng, dim, 1.0), gaussian(rng))).collect())
}

fn semicontraction(rng: &mut ChaCha8Rng) -> Outcome {
    let space = Space::euclidean(3);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let f = random_max_affine(rng, 3);
        for _ in 0..100 {
            let x = Point::from(gauss_vec(rng, 3, 1.0));
            let y = Point::from(gauss_vec(rng, 3, 1.0));
            match semicontraction_check(&space, &f, &x, &y, 0.05, 1e-3) {
                Ok(r) => worst = worst.max(r),
                Err(e) => return outcome(false, format!("{e}")),
            }
        }
    }
    outcome(worst <= 1.0 + 1e-6, format!("max expansion ratio {worst:.12}"))
}

fn energy(rng: &mut ChaCha8Rng) -> Outcome {
    let space = Space::euclidean(2);
    let mut worst_ratio: f64 = 1.0;
    let mut cs = (f64::INFINITY, 0.0f64);
    for _ in 0..50 {
        // Distance functions have no curvature along their own gradient, so
        // anchors are spread around the start to make C nonzero.
        let k = rng.gen_range(2..=4);
        let mut weights: Vec<f64> = (0..k).map(|_| rng.gen_range(0.2..1.0)).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let members = weights
            .iter()
            .map(|&w| {
                let a = rng.gen_range(0.0..2.0 * PI);
                (w, ScalarField::normalized_distance(vec![3.0 * a.cos(), 3.0 * a.sin()], vec![0.0, 0.0]))
            })
            .collect();
        let f = ScalarField::convex_combination(members);
        // at least 2 from every anchor, farther than the flow can travel
        let (a, r) = (rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..1.0));
        let x = Point::from(vec![r * a.cos(), r * a.sin()]);
        let c1 = run_flow(&space, &f, &x, 0.5, 1e-3).unwrap().energy_constant;
        let c2 = run_flow(&space, &f, &x, 0.5, 5e-4).unwrap().energy_constant;
        let ratio = c1 / c2;
        if (ratio.ln()).abs() > worst_ratio.ln().abs() {
            worst_ratio = ratio;
        }
        cs = (cs.0.min(c1), cs.1.max(c1));
    }
    outcome(
        (0.5..=2.0).contains(&worst_ratio),
        format!("C in [{:.3e}, {:.3e}], worst C(l)/C(l/2) {worst_ratio:.4}", cs.0, cs.1),
    )
}

fn unit_vec(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let g = gauss_vec(rng, dim, 1.0);
    let r = dot(&g, &g).sqrt();
    g.iter().map(|x| x / r).collect()
}

/// Twenty nested families with empty intersection in dimensions 1 to 3.
fn families(rng: &mut ChaCha8Rng) -> Vec<(usize, NestedFamily)> {
    let offsets: Vec<f64> = (0..=30).map(|i| 2f64.powi(i)).collect();
    let mut out = Vec::new();
    for s in [1.0, -1.0, 1.0, -1.0] {
        let scaled: Vec<f64> = offsets.iter().map(|t| t * rng.gen_range(0.5..2.0)).collect();
        out.push((1, NestedFamily::translated_cone(&[vec![s]], &scaled).unwrap()));
    }
    for k in 0..8 {
        let axis = rng.gen_range(0.0..2.0 * PI);
        let fam = match k % 4 {
            0 => NestedFamily::translated_cone(&[vec![axis.cos(), axis.sin()]], &offsets),
            3 => {
                let normals: Vec<Vec<f64>> = (0..32)
                    .map(|j| {
                        let th = axis + 0.4 * (1.0 - 0.5f64.powi(j));
                        vec![th.cos(), th.sin()]
                    })
                    .collect();
                let offs: Vec<f64> = (0..32).map(|j| 2f64.powi(j + 4)).collect();
                NestedFamily::accumulating(&normals, &offs)
            }
            _ => {
                let spread = rng.gen_range(0.1..0.7);
                let normals = [-spread, spread].map(|d| vec![(axis + d).cos(), (axis + d).sin()]);
                NestedFamily::translated_cone(&normals, &offsets)
            }
        };
        out.push((2, fam.unwrap()));
    }
    for _ in 0..8 {
        let axis = unit_vec(rng, 3);
        let normals: Vec<Vec<f64>> = (0..3)
            .map(|_| {
                let tilt = unit_vec(rng, 3);
                let v: Vec<f64> = axis.iter().zip(&tilt).map(|(a, t)| a + 0.4 * t).collect();
                let r = dot(&v, &v).sqrt();
                v.iter().map(|x| x / r).collect()
            })
            .collect();
        out.push((3, NestedFamily::translated_cone(&normals, &offsets).unwrap()));
    }
    out
}

fn gradient_floors(fams: &[(usize, NestedFamily)]) -> Outcome {
    let constant = (gradient_floor(1) - 0.146447).abs() <= 1e-6;
    let mut worst_margin = f64::INFINITY;
    for (i, (n, fam)) in fams.iter().enumerate() {
        let lim = match build_limit_field(fam, &LimitSettings::default()) {
            Ok(l) => l,
            Err(e) => return outcome(false, format!("family {i}: {e}")),
        };
        let samples = probe_points(&fam.space, &fam.basepoint, 16, 10.0, i as u64).unwrap();
        let rep = gradient_floor_check(&lim, *n, &samples).unwrap();
        worst_margin = worst_margin.min(rep.min_gradient - rep.floor);
        if !rep.holds {
            return outcome(false, format!("family {i}: min gradient {} below floor {}", rep.min_gradient, rep.floor));
        }
    }
    outcome(constant, format!("floor(1) = {:.7}, smallest margin over the floor {worst_margin:.4}", gradient_floor(1)))
}

fn infinity(fams: &[(usize, NestedFamily)], rng: &mut ChaCha8Rng) -> Outcome {
    let (mut angle, mut gap, mut radius) = (0.0f64, 0.0f64, 0.0f64);
    let mut tested = 0;
    for (i, (n, fam)) in fams.iter().enumerate() {
        let cert = match intersection_at_infinity(fam, &InfinitySettings::default()) {
            Ok(c) => c,
            Err(e) => return outcome(false, format!("family {i}: {e}")),
        };
        angle = cert.bodies.iter().map(|b| b.angle).fold(angle, f64::max);
        gap = gap.max(cert.start_gap);
        let BoundaryDirection::Vector(xi) = &cert.direction else {
            return outcome(false, format!("family {i}: unexpected direction"));
        };
        let candidates: Vec<Vec<f64>> = (0..256).map(|_| unit_vec(rng, *n)).collect();
        let m = monotone_radius_check(fam, xi, &candidates).unwrap();
        tested += m.angles.len();
        radius = radius.max(m.max_angle);
    }
    outcome(
        angle <= 1e-3 && gap <= 2e-3 && radius <= PI / 2.0 + 1e-3,
        format!("max recession angle {angle:.2e}, start gap {gap:.2e}, max monotone angle {radius:.4} over {tested} directions"),
    )
}

fn constants() -> Outcome {
    let exact = k_n(1) == 2.0 * PI / 3.0;
    let mut worst = 0.0f64;
    for n in 1..=4 {
        let c = curvature_constants(n, Some(1e-3), Some(1e-3)).unwrap();
        let (r, s) = c.s_n.unwrap();
        let (d, rr) = c.r_n.unwrap();
        worst = worst.max((s / r - 1.0 / jung_bound(n)).abs());
        worst = worst.max((rr / d - jung_bound(n)).abs());
    }
    outcome(exact && worst <= 1e-4, format!("k_1 == 2pi/3: {exact}, max deviation from the flat limits {worst:.2e}"))
}

fn petrunin() -> Outcome {
    let inst = match build_petrunin(&PetruninConfig::default()) {
        Ok(i) => i,
        Err(e) => return outcome(false, format!("{e}")),
    };
    let inv = inst.invariants(50);
    let osc = oscillation_report(&inst);
    let both = osc.upper > 0 && osc.lower > 0 && osc.angle_residual <= 1e-12;
    let flow = flow_agreement_check(&inst, 1e-3, 20.0).unwrap();
    let curve = curve_residuals(&inst);
    let discrete_last = *flow.escape.direction_residuals.last().unwrap();
    let pass = inv.holds && both && flow.within && !curve.converges && discrete_last > 1e-2;
    outcome(
        pass,
        format!(
            "invariants {}, sides {}/{}, flow deviation {:.2e} (bound {:.0e}), residual tail {:.3} / last discrete {:.3}",
            inv.holds, osc.upper, osc.lower, flow.deviation, flow.bound, curve.tail_max, discrete_last
        ),
    )
}

fn hilbert() -> Outcome {
    let h = match hilbert_box_family(100, 50) {
        Ok(h) => h,
        Err(e) => return outcome(false, format!("{e}")),
    };
    let worst = h.distances.iter().enumerate().map(|(i, d)| (d - ((i + 1) as f64).sqrt()).abs()).fold(0.0, f64::max);
    outcome(worst <= 1e-12, format!("max |d(o, X_n) - sqrt(n)| {worst:.1e}, slope of d^2 {:.12}", h.squared_slope))
}

fn sample_tree() -> MetricTree {
    let e = |from, to, length| Edge { from, to: Some(to), length };
    let ray = |from| Edge { from, to: None, length: f64::INFINITY };
    MetricTree::new(
        6,
        vec![e(0, 1, 1.0), e(0, 2, 2.0), e(1, 3, 1.5), e(1, 4, 0.5), e(2, 5, 1.0), ray(3), ray(4), ray(5), ray(0)],
    )
    .unwrap()
}

fn tree_point(rng: &mut ChaCha8Rng, tree: &MetricTree) -> Point {
    let edge = rng.gen_range(0..tree.edges().len());
    let len = tree.edges()[edge].length;
    let offset = if len.is_finite() { rng.gen_range(0.0..=len) } else { rng.gen_range(0.0..5.0) };
    TreePoint::new(edge, offset).into()
}

fn hyperboloid_point(rng: &mut ChaCha8Rng, dim: usize) -> Point {
    let v = gauss_vec(rng, dim, 1.5);
    let r = dot(&v, &v).sqrt();
    let mut p = vec![r.cosh()];
    p.extend(v.iter().map(|x| r.sinh() * x / r.max(1e-300)));
    p.into()
}

fn comparison(rng: &mut ChaCha8Rng) -> Outcome {
    let tree = sample_tree();
    let product = Space::product(vec![Space::euclidean(2), Space::hyperbolic(2), Space::tree(tree.clone())]);
    let spaces: Vec<(&str, Space)> = vec![
        ("euclidean", Space::euclidean(3)),
        ("tree", Space::tree(tree.clone())),
        ("hyperbolic", Space::hyperbolic(2)),
        ("box", Space::hilbert_box(6)),
        ("product", product),
    ];
    let mut worst = f64::INFINITY;
    let mut per_space = Vec::new();
    for (name, space) in &spaces {
        let mut w = f64::INFINITY;
        for _ in 0..2000 {
            let sample = |rng: &mut ChaCha8Rng| -> Point {
                match *name {
                    "euclidean" => gauss_vec(rng, 3, 2.0).into(),
                    "tree" => tree_point(rng, &tree),
                    "hyperbolic" => hyperboloid_point(rng, 2),
                    "box" => (0..6).map(|_| rng.gen_range(-1.0..=1.0)).collect::<Vec<f64>>().into(),
                    _ => Point::Product(vec![
                        gauss_vec(rng, 2, 2.0).into(),
                        hyperboloid_point(rng, 2),
                        tree_point(rng, &tree),
                    ]),
                }
            };
            let (x, y, z) = (sample(rng), sample(rng), sample(rng));
            let t = rng.gen_range(0.0..=1.0);
            match space.comparison_check(&x, &y, &z, t) {
                Ok(d) => w = w.min(d),
                Err(e) => return outcome(false, format!("{name}: {e}")),
            }
        }
        per_space.push(format!("{name} {w:.1e}"));
        worst = worst.min(w);
    }
    let sphere = Space::sphere(2);
    let violation = sphere
        .comparison_check(&vec![1.0, 0.0, 0.0].into(), &vec![0.0, 1.0, 0.0].into(), &vec![0.0, 0.0, 1.0].into(), 0.5)
        .unwrap();
    outcome(
        worst >= -1e-9 && violation < 0.0,
        format!("min defect {} ; sphere triple defect {violation:.4}", per_space.join(", ")),
    )
}

fn main() -> ExitCode {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_611);
    let fams = families(&mut rng);
    let checks: Vec<(&str, Box<dyn FnOnce(&mut ChaCha8Rng) -> Outcome + '_>)> = vec![
        ("Jung bound in R^1..R^6", Box::new(jung)),
        ("circumcenter vs Welzl oracle", Box::new(circumcenter_oracle)),
        ("Helly subset reduction", Box::new(helly)),
        ("semicontraction of the flow", Box::new(semicontraction)),
        ("energy identity constant", Box::new(energy)),
        ("gradient floor of limit fields", Box::new(|_: &mut ChaCha8Rng| gradient_floors(&fams))),
        ("intersection at infinity", Box::new(|r: &mut ChaCha8Rng| infinity(&fams, r))),
        ("curvature constants", Box::new(|_: &mut ChaCha8Rng| constants())),
        ("zigzag gradient curve", Box::new(|_: &mut ChaCha8Rng| petrunin())),
        ("Hilbert box family", Box::new(|_: &mut ChaCha8Rng| hilbert())),
        ("CAT(0) comparison", Box::new(comparison)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.into_iter().enumerate() {
        let start = Instant::now();
        let o = check(&mut rng);
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("{tag} {:>2} {name}: {} [{:.2} s]", i + 1, o.detail, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

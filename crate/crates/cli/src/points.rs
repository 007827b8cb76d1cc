//! Point sources: generator specs, CSV files and inline lists.

use std::path::Path;

use hadamard_core::math::regular_simplex;
use hadamard_core::{Point, Space, TreePoint};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::config::PointsSpec;
use crate::error::{usage, CliResult};

pub fn resolve(spec: &PointsSpec, space: &Space, rng: &mut ChaCha8Rng) -> CliResult<Vec<Point>> {
    let pts = match spec {
        PointsSpec::Inline(p) => p.clone(),
        PointsSpec::Source(s) => match s.split_once(':') {
            Some((kind, arg)) if matches!(kind, "simplex" | "gaussian" | "uniform") => {
                let n: usize = arg.parse().map_err(|_| usage(format!("points '{s}': '{arg}' is not a count")))?;
                generate(kind, n, space, rng)?
            }
            _ => read_csv(Path::new(s), space)?,
        },
    };
    if pts.is_empty() {
        return Err(usage("no points"));
    }
    for p in &pts {
        space.check_point(p, 1e-9)?;
    }
    Ok(pts)
}

fn flat_dimension(space: &Space, what: &str) -> CliResult<usize> {
    match space {
        Space::Euclidean { dimension } | Space::TruncatedHilbertBox { dimension } => Ok(*dimension),
        _ => Err(usage(format!("'{what}' points need a Euclidean or box space"))),
    }
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// `simplex:n` (regular simplex, circumradius 1), `gaussian:m` (standard
/// normal samples, pushed to the model) and `uniform:m` (the cube
/// `[-1, 1]^d`, flat spaces only).
pub fn generate(kind: &str, n: usize, space: &Space, rng: &mut ChaCha8Rng) -> CliResult<Vec<Point>> {
    match kind {
        "simplex" => {
            let d = flat_dimension(space, "simplex")?;
            if n == 0 || n > d {
                return Err(usage(format!("simplex:{n} does not fit in dimension {d}")));
            }
            Ok(regular_simplex(n)
                .into_iter()
                .map(|mut v| {
                    v.resize(d, 0.0);
                    Point::Coords(v)
                })
                .collect())
        }
        "uniform" => {
            let d = flat_dimension(space, "uniform")?;
            Ok((0..n).map(|_| Point::Coords((0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect())).collect())
        }
        "gaussian" => (0..n).map(|_| sample(space, rng)).collect(),
        _ => Err(usage(format!("unknown generator '{kind}'"))),
    }
}

fn sample(space: &Space, rng: &mut ChaCha8Rng) -> CliResult<Point> {
    Ok(match space {
        Space::Euclidean { dimension } => Point::Coords(gaussian(rng, *dimension)),
        Space::TruncatedHilbertBox { dimension } => {
            // keep samples inside |a_i| <= i
            Point::Coords(
                gaussian(rng, *dimension)
                    .iter()
                    .enumerate()
                    .map(|(i, x)| x.clamp(-(i as f64 + 1.0), i as f64 + 1.0))
                    .collect(),
            )
        }
        Space::Sphere { dimension } => loop {
            let g = gaussian(rng, dimension + 1);
            if let Ok(p) = Point::sphere(&g) {
                break p;
            }
        },
        Space::Hyperbolic { dimension } => {
            let v = gaussian(rng, *dimension);
            let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let s = if r > 0.0 { r.sinh() / r } else { 1.0 };
            let mut p = vec![r.cosh()];
            p.extend(v.iter().map(|x| s * x));
            Point::Coords(p)
        }
        Space::MetricTree { tree } => {
            let edges = tree.edges();
            let e = rng.gen_range(0..edges.len());
            let len = edges[e].length;
            let offset = if len.is_finite() {
                rng.gen_range(0.0..=len)
            } else {
                rng.sample::<f64, _>(StandardNormal).abs() * 2.0
            };
            Point::Tree(TreePoint::new(e, offset))
        }
        Space::Product { factors } => Point::Product(factors.iter().map(|f| sample(f, rng)).collect::<CliResult<_>>()?),
    })
}

/// One point per row, comma-separated, no header. Tree points are
/// `edge,offset` rows.
pub fn read_csv(path: &Path, space: &Space) -> CliResult<Vec<Point>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path)?;
    let mut out = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec?;
        let nums: Vec<f64> = rec
            .iter()
            .map(|f| {
                f.parse::<f64>().map_err(|_| usage(format!("{}:{}: '{f}' is not a number", path.display(), line + 1)))
            })
            .collect::<CliResult<_>>()?;
        out.push(match space {
            Space::MetricTree { .. } => {
                if nums.len() != 2 || nums[0] < 0.0 || nums[0].fract() != 0.0 {
                    return Err(usage(format!("{}:{}: tree rows are 'edge,offset'", path.display(), line + 1)));
                }
                Point::Tree(TreePoint::new(nums[0] as usize, nums[1]))
            }
            Space::Product { .. } => return Err(usage("product points must be given inline in a JSON config")),
            _ => Point::Coords(nums),
        });
    }
    Ok(out)
}

//! Scalar functions (through `libm`) and small dense vector helpers.

use alloc::vec;
use alloc::vec::Vec;

pub use libm::{acos, acosh, asin, asinh, atan2, cos, cosh, exp, fabs, log, sin, sinh, sqrt};

pub const PI: f64 = core::f64::consts::PI;
pub const SQRT_2: f64 = core::f64::consts::SQRT_2;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    sqrt(dot(a, a))
}

#[inline]
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[inline]
pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

#[inline]
pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `a + s * b`
#[inline]
pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

/// `(1 - t) a + t b`
#[inline]
pub fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

pub fn normalized(a: &[f64]) -> Option<Vec<f64>> {
    let n = norm(a);
    if n > 0.0 && n.is_finite() {
        Some(scale(a, 1.0 / n))
    } else {
        None
    }
}

pub fn clamp(x: f64, lo: f64, hi: f64) -> f64 {
    if x < lo {
        lo
    } else if x > hi {
        hi
    } else {
        x
    }
}

/// Angle between two nonzero vectors, computed as `2 atan2(|u - v|, |u + v|)`
/// on the normalized vectors, which stays accurate near 0 and pi.
pub fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    match (normalized(a), normalized(b)) {
        (Some(u), Some(v)) => {
            let d = norm(&sub(&u, &v));
            let s = norm(&add(&u, &v));
            2.0 * atan2(d, s)
        }
        _ => 0.0,
    }
}

/// Solves `A x = b` for a small dense square system by Gaussian elimination
/// with partial pivoting. `a` is row-major `n x n`. Returns `None` when the
/// matrix is numerically singular.
pub fn solve(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    let scale_ref = a.iter().fold(0.0f64, |m, v| m.max(fabs(*v))).max(1e-300);
    for col in 0..n {
        let (piv, pval) =
            (col..n)
                .map(|r| (r, fabs(a[r * n + col])))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pval <= 1e-14 * scale_ref {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / d;
            if f != 0.0 {
                for k in col..n {
                    a[r * n + k] -= f * a[col * n + k];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for k in r + 1..n {
            s -= a[r * n + k] * x[k];
        }
        x[r] = s / a[r * n + r];
    }
    Some(x)
}

/// Vertices of the regular simplex in `R^n` with `n + 1` vertices, centered
/// at the origin with circumradius 1.
pub fn regular_simplex(n: usize) -> Vec<Vec<f64>> {
    // Center the standard basis of R^{n+1} and express it in an orthonormal
    // basis of the hyperplane sum = 0 (Helmert rows).
    let m = n + 1;
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    for k in 1..m {
        let kf = k as f64;
        let c = 1.0 / sqrt(kf * (kf + 1.0));
        let mut row = vec![0.0; m];
        for item in row.iter_mut().take(k) {
            *item = c;
        }
        row[k] = -kf * c;
        basis.push(row);
    }
    let r = sqrt(n as f64 / m as f64);
    (0..m)
        .map(|i| {
            basis
                .iter()
                .map(|b| {
                    // <e_i - centroid, b> = b[i] since b sums to 0
                    b[i] / r
                })
                .collect()
        })
        .collect()
}

/// Deterministic splitmix64 stream used for direction sampling inside the
/// library (no external RNG dependency in the core).
#[derive(Debug, Clone)]
pub struct SplitMix(u64);

impl SplitMix {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller.
    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = self.next_f64().max(1e-300);
        let u2 = self.next_f64();
        sqrt(-2.0 * log(u1)) * cos(2.0 * PI * u2)
    }
}

/// `count` unit vectors in `R^dim`: evenly spaced on the circle for
/// `dim == 2`, signed axes followed by seeded Gaussian directions otherwise.
pub fn sphere_directions(dim: usize, count: usize) -> Vec<Vec<f64>> {
    match dim {
        0 => Vec::new(),
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / count as f64;
                vec![cos(th), sin(th)]
            })
            .collect(),
        _ => {
            let mut out = Vec::with_capacity(count.max(2 * dim));
            for i in 0..dim {
                for s in [1.0, -1.0] {
                    let mut e = vec![0.0; dim];
                    e[i] = s;
                    out.push(e);
                }
            }
            let mut rng = SplitMix::new(0x5eed_d1ec_7105 ^ dim as u64);
            while out.len() < count.max(2 * dim) {
                let g: Vec<f64> = (0..dim).map(|_| rng.next_gaussian()).collect();
                if let Some(u) = normalized(&g) {
                    out.push(u);
                }
            }
            out
        }
    }
}

/// Minimum-norm point of the convex hull of `vectors`, with its convex
/// weights. Exact (active-set enumeration) for small inputs, Frank-Wolfe
/// with away steps otherwise.
pub fn min_norm_hull(vectors: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let m = vectors.len();
    assert!(m > 0, "empty hull");
    if m == 1 {
        return (vectors[0].clone(), vec![1.0]);
    }
    let dim = vectors[0].len();
    let big = vectors.iter().map(|g| dot(g, g)).fold(0.0, f64::max);
    let slack = 1e-12 * (1.0 + big);
    let optimal = |v: &[f64]| {
        let vv = dot(v, v);
        vectors.iter().all(|g| dot(g, v) >= vv - slack)
    };
    if m <= 16 {
        let mut subset = Vec::new();
        for size in 1..=m.min(dim + 1) {
            if let Some(r) = hull_subsets(vectors, size, 0, &mut subset, &optimal) {
                return r;
            }
        }
    }
    let mut w: Vec<f64> = vec![0.0; m];
    let start =
        (0..m).min_by(|&a, &b| dot(&vectors[a], &vectors[a]).total_cmp(&dot(&vectors[b], &vectors[b]))).unwrap();
    w[start] = 1.0;
    let mut v = vectors[start].clone();
    for _ in 0..20_000 {
        let scores: Vec<f64> = vectors.iter().map(|g| dot(g, &v)).collect();
        let toward = (0..m).min_by(|&a, &b| scores[a].total_cmp(&scores[b])).unwrap();
        let away = (0..m).filter(|&i| w[i] > 0.0).max_by(|&a, &b| scores[a].total_cmp(&scores[b])).unwrap();
        let vv = dot(&v, &v);
        let gap_fw = vv - scores[toward];
        let gap_away = scores[away] - vv;
        if gap_fw.max(gap_away) <= slack {
            break;
        }
        let (dir, cap) = if gap_fw >= gap_away {
            (sub(&vectors[toward], &v), 1.0)
        } else {
            (sub(&v, &vectors[away]), w[away] / (1.0 - w[away]).max(1e-300))
        };
        let dd = dot(&dir, &dir);
        if dd == 0.0 {
            break;
        }
        let step = (-dot(&v, &dir) / dd).clamp(0.0, cap);
        if gap_fw >= gap_away {
            for x in w.iter_mut() {
                *x *= 1.0 - step;
            }
            w[toward] += step;
        } else {
            for x in w.iter_mut() {
                *x *= 1.0 + step;
            }
            w[away] -= step;
            if w[away] < 1e-15 {
                w[away] = 0.0;
            }
        }
        v = axpy(&v, step, &dir);
    }
    (v, w)
}

fn hull_subsets(
    vectors: &[Vec<f64>],
    size: usize,
    from: usize,
    subset: &mut Vec<usize>,
    optimal: &dyn Fn(&[f64]) -> bool,
) -> Option<(Vec<f64>, Vec<f64>)> {
    if subset.len() == size {
        let k = size + 1;
        let mut a = vec![0.0; k * k];
        let mut b = vec![0.0; k];
        for (r, &i) in subset.iter().enumerate() {
            for (c, &j) in subset.iter().enumerate() {
                a[r * k + c] = dot(&vectors[i], &vectors[j]);
            }
            a[r * k + size] = 1.0;
            a[size * k + r] = 1.0;
        }
        b[size] = 1.0;
        let sol = solve(a, b, k)?;
        if sol[..size].iter().any(|&t| t < -1e-13) {
            return None;
        }
        let mut v = vec![0.0; vectors[0].len()];
        let mut w = vec![0.0; vectors.len()];
        for (&i, &t) in subset.iter().zip(&sol) {
            let t = t.max(0.0);
            w[i] = t;
            v = axpy(&v, t, &vectors[i]);
        }
        return if optimal(&v) { Some((v, w)) } else { None };
    }
    for i in from..vectors.len() {
        subset.push(i);
        let r = hull_subsets(vectors, size, i + 1, subset, optimal);
        subset.pop();
        if r.is_some() {
            return r;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_is_regular() {
        for n in 1..7 {
            let v = regular_simplex(n);
            assert_eq!(v.len(), n + 1);
            for p in &v {
                assert!((norm(p) - 1.0).abs() < 1e-14);
            }
            let expected = -1.0 / n as f64;
            for i in 0..=n {
                for j in i + 1..=n {
                    assert!((dot(&v[i], &v[j]) - expected).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn solve_small_system() {
        let x = solve(vec![2.0, 1.0, 1.0, 3.0], vec![3.0, 5.0], 2).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
        assert!(solve(vec![1.0, 2.0, 2.0, 4.0], vec![1.0, 1.0], 2).is_none());
    }

    #[test]
    fn angle_is_accurate_near_zero() {
        let a = [1.0, 0.0];
        let b = [1.0, 1e-9];
        assert!((angle_between(&a, &b) - 1e-9).abs() < 1e-20);
    }

    #[test]
    fn min_norm_hull_cases() {
        let (v, w) = min_norm_hull(&[vec![1.0, 1.0], vec![-1.0, 1.0]]);
        assert!(dist(&v, &[0.0, 1.0]) < 1e-14);
        assert!((w[0] - 0.5).abs() < 1e-14);
        let (v, _) = min_norm_hull(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]]);
        assert!(norm(&v) < 1e-14);
        let many: Vec<Vec<f64>> = (0..20).map(|k| vec![2.0 + k as f64 * 0.1, (k as f64 - 9.5) * 0.3]).collect();
        let (v, _) = min_norm_hull(&many);
        assert!(dist(&v, &[2.655, -0.885]) < 1e-6, "{v:?}");
    }
}

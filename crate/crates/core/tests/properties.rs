use hadamard_core::circum::{jung_bound, min_enclosing_ball};
use hadamard_core::flow::flow_step;
use hadamard_core::{ConvexBody, HalfSpace, Point, ScalarField, Space};
use proptest::prelude::*;

fn vec2() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, 2)
}

fn hyperboloid(v: &[f64]) -> Point {
    let r = (v[0] * v[0] + v[1] * v[1]).sqrt();
    let s = if r > 0.0 { r.sinh() / r } else { 1.0 };
    Point::Coords(vec![r.cosh(), s * v[0], s * v[1]])
}

proptest! {
    #[test]
    fn hyperbolic_triangle_inequality(a in prop::collection::vec(-3.0..3.0f64, 2), b in prop::collection::vec(-3.0..3.0f64, 2), c in prop::collection::vec(-3.0..3.0f64, 2)) {
        let s = Space::hyperbolic(2);
        let (x, y, z) = (hyperboloid(&a), hyperboloid(&b), hyperboloid(&c));
        let dxy = s.distance(&x, &y).unwrap();
        prop_assert!((dxy - s.distance(&y, &x).unwrap()).abs() <= 1e-12 * (1.0 + dxy));
        prop_assert!(dxy <= s.distance(&x, &z).unwrap() + s.distance(&z, &y).unwrap() + 1e-9);
    }

    #[test]
    fn half_space_projection_is_idempotent(n in vec2(), off in -5.0..5.0f64, x in vec2()) {
        prop_assume!(n[0].abs() + n[1].abs() > 1e-3);
        let s = Space::euclidean(2);
        let body = ConvexBody::HalfSpace(HalfSpace::new(n, off));
        let p = body.project(&s, &Point::Coords(x)).unwrap();
        let q = body.project(&s, &p).unwrap();
        prop_assert!(s.distance(&p, &q).unwrap() <= 1e-9);
        prop_assert!(body.contains(&s, &p, 1e-9).unwrap());
    }

    #[test]
    fn enclosing_ball_encloses_and_obeys_jung(pts in prop::collection::vec(prop::collection::vec(-5.0..5.0f64, 3), 2..20)) {
        let (c, r, _) = min_enclosing_ball(&pts);
        let mut diam = 0.0f64;
        for p in &pts {
            let d = p.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            prop_assert!(d <= r * (1.0 + 1e-9) + 1e-12);
            for q in &pts {
                diam = diam.max(p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt());
            }
        }
        prop_assert!(r <= jung_bound(3) * diam + 1e-9);
    }

    #[test]
    fn proximal_step_does_not_increase_value(a in vec2(), b in vec2(), c in -1.0..1.0f64, x in vec2(), step in 1e-3..1.0f64) {
        let s = Space::euclidean(2);
        let f = ScalarField::max_of(vec![ScalarField::affine(a, 0.0), ScalarField::affine(b, c)]);
        let p = Point::Coords(x);
        let q = flow_step(&s, &f, &p, step).unwrap();
        prop_assert!(f.evaluate(&s, &q).unwrap() <= f.evaluate(&s, &p).unwrap() + 1e-12);
    }
}

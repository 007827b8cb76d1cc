//! Geometry of nonpositively curved model spaces: convex bodies, convex
//! fields and their gradient flows, circumcenters and filtering families.
#![no_std]
// NaN must fail positivity guards, so `!(x > 0.0)` is intended.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

extern crate alloc;

pub mod circum;
pub mod counterexamples;
pub mod error;
pub mod field;
pub mod filtering;
pub mod flow;
pub mod math;
pub mod space;
pub mod tolerance;

pub use error::{Error, Result};
pub use field::{absolute_gradient, Curvature, GradientEstimate, ProbeSettings, ScalarField};
pub use space::{BoundaryDirection, Chart, ConvexBody, EdgeInterval, HalfSpace, MetricTree, Point, Space, TreePoint};
pub use tolerance::ToleranceProfile;

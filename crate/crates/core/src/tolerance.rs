//! Numerical tolerances shared by all modules.
//!
//! Every threshold that an operation compares against lives in
//! [`ToleranceProfile`]; the defaults are the values the test suites pin.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceProfile {
    /// Two points closer than this are considered equal.
    pub zero_distance: f64,
    /// Allowed violation of a space membership constraint (box bounds,
    /// unit norm, hyperboloid equation).
    pub membership: f64,
    /// Accuracy of geodesic interpolation.
    pub geodesic: f64,
    /// Accuracy of nearest-point projections.
    pub projection: f64,
    /// Stop tolerance of cyclic (Dykstra) projection.
    pub dykstra_tolerance: f64,
    pub dykstra_max_cycles: usize,
    /// Points within this distance of the circumradius count as support.
    pub support: f64,
    /// Allowed violation of the monotonicity of difference quotients.
    pub gradient_monotonicity: f64,
    /// Angular residual below which a flow direction is accepted (radians).
    pub direction_residual: f64,
    /// Sup-norm change on the probe set that stops limit-field truncation.
    pub limit_field: f64,
    /// Distance from the basepoint that certifies an empty intersection,
    /// in units of the family scale.
    pub emptiness_threshold: f64,
    /// Iteration cap of the inner proximal line search.
    pub prox_max_iterations: usize,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        Self {
            zero_distance: 1e-12,
            membership: 1e-12,
            geodesic: 1e-10,
            projection: 1e-8,
            dykstra_tolerance: 1e-10,
            dykstra_max_cycles: 10_000,
            support: 1e-7,
            gradient_monotonicity: 1e-7,
            direction_residual: 1e-3,
            limit_field: 1e-6,
            emptiness_threshold: 1e6,
            prox_max_iterations: 200,
        }
    }
}

use alloc::string::String;

/// Errors raised by the geometric and analytic routines of this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("points or bodies belong to different spaces")]
    SpaceMismatch,
    #[error("invalid space description: {0}")]
    InvalidSpace(String),
    #[error("point violates the membership constraint of its space: {0}")]
    InvalidPoint(String),
    #[error("geodesic between antipodal points is not unique")]
    NonUniqueGeodesic,
    #[error("intersection appears to be empty (residual violation {violation:e})")]
    Infeasible { violation: f64 },
    #[error("operation not supported: {0}")]
    Capability(String),
    #[error("spherical circumradius {radius} is not below pi/2")]
    NonConvexRegime { radius: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("family has a bounded distance to the basepoint ({distance}); use the finite intersection instead")]
    BoundedIntersection { distance: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

pub(crate) fn capability(msg: impl Into<String>) -> Error {
    Error::Capability(msg.into())
}

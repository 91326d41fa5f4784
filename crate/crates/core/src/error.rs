use thiserror::Error;

/// Errors raised by the geometry kernel and the constructions built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("director is not spacelike")]
    NotSpacelike,
    #[error("null frame of this director is not representable in the exact field")]
    IrrationalFrame,
    #[error("wing data invalid: {0}")]
    BadWingData(&'static str),
    #[error("point lies on the lightcone of the point at infinity")]
    AtInfinity,
    #[error("the two points coincide")]
    SamePoint,
    #[error("the two points are incident")]
    IncidentPoints,
    #[error("torus data is degenerate: {0}")]
    DegenerateData(&'static str),
    #[error("directors are not consistently oriented")]
    NotConsistentlyOriented,
    #[error("displacement pair is not allowable")]
    NotAllowable,
    #[error("matrix does not preserve the form (residual {0:e})")]
    NotInGroup(f64),
    #[error("matrix does not preserve the (2,1) form (residual {0:e})")]
    NotLorentz(f64),
    #[error("linear part is not hyperbolic")]
    NotHyperbolic,
    #[error("linear part does not carry the first halfspace onto the complement of the second")]
    NotPaired,
    #[error("sequence is empty")]
    EmptySequence,
    #[error("resolution {got} is below the minimum {min}")]
    ResolutionTooSmall { got: usize, min: usize },
    #[error("mesh has {0} unmatched edges after gluing")]
    UngluedMesh(usize),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;

use thiserror::Error;

/// Failures raised by the library. Certificate checks that merely fail a
/// predicate are reported in their report structs, not through this type.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {coords:?} is not strictly inside the unit ball (norm {norm})")]
    OutsideBall { coords: [f64; 3], norm: f64 },

    #[error("point {coords:?} exceeds the configured radius limit {r_max} (norm {norm})")]
    RadiusLimit { coords: [f64; 3], norm: f64, r_max: f64 },

    #[error("points {i} and {j} are too close (hyperbolic distance {distance}, minimum {min_sep})")]
    DistinctPointsViolated { i: usize, j: usize, distance: f64, min_sep: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("configuration is not coplanar (residual {residual})")]
    NotCoplanar { residual: f64 },

    #[error("face {face:?} is degenerate: {reason}")]
    DegenerateFace { face: [usize; 3], reason: String },

    #[error("relation cannot be solved for the third root: {0}")]
    Indeterminate(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),

    #[error("sampling budget of {tries} tries exhausted for {spec}")]
    SamplingExhausted { tries: usize, spec: String },
}

impl Error {
    /// True for errors that indicate the library disagreed with itself
    /// rather than rejecting its input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::InternalConsistency(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

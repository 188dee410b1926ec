//! Error type shared by all modules.

/// Everything that can go wrong while building or solving a problem.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parametric coordinate left the unit interval / unit cube.
    #[error("parametric coordinate {value} outside [0, 1]")]
    OutOfDomain { value: f64 },

    /// Requested derivative order exceeds the spline degree.
    #[error("derivative order {order} exceeds spline degree {degree}")]
    DerivativeOrder { order: usize, degree: usize },

    /// A knot vector violated the open/nondecreasing/multiplicity rules.
    #[error("invalid knot vector: {0}")]
    InvalidKnots(String),

    /// Bad argument to an operation (quadrature order 0, level count < 2, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// |det J| fell below tolerance somewhere on a patch.
    #[error("singular geometry on patch {patch} at {point:?}: det J = {det:.3e}")]
    SingularGeometry {
        patch: usize,
        point: [f64; 3],
        det: f64,
    },

    /// Geometry construction failed (overlap too wide, inconsistent faces, ...).
    #[error("geometry error: {0}")]
    Geometry(String),

    /// Interface topology is inconsistent (bad orientation data, unpaired faces).
    #[error("topology error: {0}")]
    Topology(String),

    /// The linear solver did not reach the requested residual.
    #[error(
        "solver did not converge after {iterations} iterations (relative residual {residual:.3e})"
    )]
    SolverDiverged { iterations: usize, residual: f64 },

    /// Run configuration is unusable (missing exact solution, bad lambda, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Geometry file could not be parsed or failed schema validation.
    #[error("geometry file: {0}")]
    GeometryFile(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 config, 3 geometry, 4 solver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidArgument(_) | Error::DerivativeOrder { .. } => 2,
            Error::SolverDiverged { .. } => 4,
            _ => 3,
        }
    }
}

use thiserror::Error;

/// Every failure the pipeline can report. Variants carry enough context to
/// tell which stage raised them.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("rank deficient: sigma_min = {sigma_min:e}, threshold = {threshold:e}")]
    RankDeficient { sigma_min: f64, threshold: f64 },
    #[error("singular matrix: sigma_min = {sigma_min:e}, threshold = {threshold:e}")]
    Singular { sigma_min: f64, threshold: f64 },
    #[error("no convergence in {routine} after {iterations} iterations")]
    ConvergenceFailure { routine: &'static str, iterations: usize },
    #[error("matrix is not diagonalizable to working precision: kappa2(X) ~ {kappa:e} > {cap:e}")]
    NotDiagonalizable { kappa: f64, cap: f64 },
    #[error("columns are not orthonormal: residual {residual:e} > {tol:e}")]
    NotOrthonormal { residual: f64, tol: f64 },
    #[error("sinTheta cross-check failed: {first:e} vs {second:e}")]
    CrossCheckFailure { first: f64, second: f64 },
    #[error("selector captured {captured} of {total} eigenvalues; both sides must be nonempty")]
    EmptySide { captured: usize, total: usize },
    #[error("eigenvalue {index} lies within the boundary tolerance of the selector disk")]
    BoundaryAmbiguity { index: usize },
    #[error("invalid selector: {0}")]
    InvalidSelector(String),
    #[error("eigenvalue assignment is ambiguous: costs {best:e} and {alternative:e}")]
    AssignmentAmbiguous { best: f64, alternative: f64 },
    #[error("eigengap violated: delta_lambda = {delta:e}")]
    GapViolated { delta: f64 },
    #[error("Sylvester operator too large: {size} > {cap}")]
    SizeCap { size: usize, cap: usize },
    #[error("contour does not separate the spectral sets: {0}")]
    EnclosureViolated(String),
    #[error("contour node within {distance:e} of eigenvalue {index}")]
    ResolventSingular { index: usize, distance: f64 },
    #[error("elementary symmetric product underflow: |sigma_r| = {0:e}")]
    SymmetricUnderflow(f64),
    #[error("example parameters violate guard: {0}")]
    SpecViolation(String),
    #[error("index ({i}, {j}) out of range for dimension {n}")]
    IndexOutOfRange { i: usize, j: usize, n: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Attach a provenance label.
    pub fn at(self, stage: &'static str) -> Self {
        Error::Stage { stage, source: Box::new(self) }
    }

    /// The innermost error, with provenance labels stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }

    /// Whether this is a numerical failure (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self.root(),
            Error::ConvergenceFailure { .. }
                | Error::NotDiagonalizable { .. }
                | Error::RankDeficient { .. }
                | Error::Singular { .. }
                | Error::NotOrthonormal { .. }
                | Error::CrossCheckFailure { .. }
                | Error::ResolventSingular { .. }
                | Error::SymmetricUnderflow(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Extension for labelling errors with the stage that produced them.
pub trait Context<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> Context<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| e.at(stage))
    }
}

use thiserror::Error;

/// Errors raised while building or running the solver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("level-set value is not finite at node (i={i}, j={j})")]
    NonFiniteLevelSet { i: usize, j: usize },

    #[error("domain touches the computational boundary at node (i={i}, j={j})")]
    DomainTouchesBoundary { i: usize, j: usize },

    #[error("degenerate level-set gradient at ({x}, {y})")]
    DegenerateGradient { x: f64, y: f64 },

    #[error(
        "under-resolved geometry: ghost (i={i}, j={j}) on grid N={n} has no admissible stencil"
    )]
    UnderResolvedGeometry { i: usize, j: usize, n: usize },

    #[error("stencil of interior node (i={i}, j={j}) touches an exterior node")]
    InconsistentClassification { i: usize, j: usize },

    #[error("singular system: {0}")]
    SingularSystem(String),

    #[error("row {0} of the assembled system has zero norm")]
    ZeroRow(usize),

    #[error("singular block relaxation at node (i={i}, j={j}), condition estimate {condition:e}")]
    SingularBlock { i: usize, j: usize, condition: f64 },

    #[error("coarse ghost (i={i}, j={j}) was not set by restriction")]
    UnsetCoarseGhost { i: usize, j: usize },

    #[error("initial guess is identically zero")]
    ZeroInitialGuess,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

/// Errors produced by construction, solvers, quadrature and simulation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate root: the zero vector cannot define a reflection")]
    DegenerateRoot,
    #[error("empty root list")]
    EmptyRootSystem,
    #[error("root system not closed under reflections: sigma_a maps {root:?} outside the set")]
    ClosureViolation { root: Vec<f64> },
    #[error("not reduced: {a:?} and {b:?} are parallel with ratio != +-1")]
    NotReduced { a: Vec<f64>, b: Vec<f64> },
    #[error("multiplicity not W-invariant: kappa({a:?}) = {ka} but kappa({b:?}) = {kb}")]
    KappaNotInvariant { a: Vec<f64>, b: Vec<f64>, ka: f64, kb: f64 },
    #[error("multiplicities must be positive, got {0}")]
    KappaNotPositive(f64),
    #[error("no root carries unit multiplicity; renormalize so that kappa = 1 on one orbit")]
    KappaNotRenormalized,
    #[error("kappa list length {got} does not match root list length {expected}")]
    KappaLengthMismatch { got: usize, expected: usize },
    #[error("could not find an admissible positive-subsystem direction after {0} attempts")]
    NoAdmissibleDirection(usize),
    #[error("group closure exceeded the cap of {0} elements")]
    GroupTooLarge(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("particle count must be >= 2, got {0}")]
    TooFewParticles(usize),
    #[error("Bessel index out of range: nu must be > -1, got {0}")]
    BesselIndexOutOfRange(f64),
    #[error("Bessel order unsupported: nu must be >= -1/2, got {0}")]
    BesselOrderUnsupported(f64),

    #[error("point lies on a chamber wall (|alpha.Y| = {0:e})")]
    OnChamberWall(f64),
    #[error("peak solver did not converge after {iterations} iterations (residual {residual:e})")]
    PeakSolverDiverged { iterations: usize, residual: f64 },
    #[error("coupling must be positive, got beta = {0}")]
    NonPositiveBeta(f64),
    #[error("time must be positive, got t = {0}")]
    NonPositiveTime(f64),
    #[error("tolerance delta must lie in (0, 1), got {0}")]
    DeltaOutOfRange(f64),
    #[error("quadrature failed to converge: error estimate {estimate:e} above tolerance {tolerance:e}")]
    QuadratureNoConvergence { estimate: f64, tolerance: f64 },
    #[error("initial point must lie in Span(R): projection residual {0:e}")]
    NotInRootSpan(f64),

    #[error("simulation path stuck at a chamber wall after {0} step halvings")]
    StuckAtWall(usize),
    #[error("{stuck} of {total} paths stuck at chamber walls (limit 0.1%)")]
    TooManyStuckPaths { stuck: usize, total: usize },
    #[error("tabulated CDF is not monotone near y = {0}")]
    CdfNonMonotone(f64),

    #[error("fit needs at least {need} points, got {got}")]
    NotEnoughPoints { need: usize, got: usize },
    #[error("fit window spans only {got:.2} decades, need {need}")]
    InsufficientDecadeSpan { need: f64, got: f64 },
    #[error("decay signal lost: deviations fell below the numerical floor {0:e}")]
    SignalLost(f64),
    #[error("peak windows overlap; beta too small to resolve the mixture")]
    PeaksUnresolved,
    #[error("least-squares fit did not converge after {0} iterations")]
    FitDiverged(usize),
    #[error("invalid tail-family parameter: {0}")]
    InvalidTailParameter(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

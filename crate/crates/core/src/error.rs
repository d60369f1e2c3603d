use thiserror::Error;

/// Errors produced by the walk simulator and its analyses.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unit cell requires even ring (got {0} sites)")]
    OddRing(usize),

    #[error("lattice needs at least {min} sites (got {got})")]
    LatticeTooSmall { min: usize, got: usize },

    #[error("interface site {site} out of range for lattice {lattice}")]
    InterfaceOutOfRange { site: i64, lattice: String },

    #[error("a ring needs an even number of interfaces (got {0})")]
    OddInterfaceCount(usize),

    #[error("explicit angle list has {got} entries, lattice has {expected} sites")]
    AngleCountMismatch { expected: usize, got: usize },

    #[error("angle {0} is not finite")]
    NonFiniteAngle(f64),

    #[error("site {site} is not on lattice {lattice}")]
    SiteOutOfRange { site: i64, lattice: String },

    #[error("state and coin profile live on different lattices")]
    LatticeMismatch,

    #[error("operation requires a {expected} frame state")]
    FrameMismatch { expected: &'static str },

    #[error("walk reached boundary at site {site}")]
    ReachedBoundary { site: i64 },

    #[error("operation requires ring topology")]
    NotARing,

    #[error("dense spectrum limited to dimension {max} (got {got})")]
    TooLarge { max: usize, got: usize },

    #[error("eigensolver did not converge{}", at_k.map(|k| format!(" at k = {k}")).unwrap_or_default())]
    EigenFailure { at_k: Option<f64> },

    #[error("k grid must be non-empty and sorted")]
    BadGrid,

    #[error("state violates bulk symmetry constraints (pair radius {radius})")]
    SymmetryViolation { radius: f64 },

    #[error("cannot compute winding at a phase transition (gap {gap:e})")]
    GapClosed { gap: f64 },

    #[error("resolution {0} below minimum 256")]
    ResolutionTooLow(usize),

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("site unoccupied (probability {0:e})")]
    SiteUnoccupied(f64),

    #[error("total intensity must be positive")]
    NoIntensity,

    #[error("angle grid is empty")]
    EmptyGrid,

    #[error("tolerance {0} outside (0, gap/2)")]
    BadTolerance(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

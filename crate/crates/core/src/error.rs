use std::path::PathBuf;

/// Errors raised anywhere in the multiscale pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid mesh parameter: {0}")]
    InvalidMesh(String),

    #[error("degenerate tetrahedron {element} (signed volume {volume:e})")]
    DegenerateElement { element: usize, volume: f64 },

    #[error("periodic pairing failed on axis {axis}: node {node} at {coords:?} has no partner")]
    UnmatchedPeriodicNode { node: usize, axis: usize, coords: [f64; 3] },

    #[error("Lamé coefficient H{index} = {value:e} is not positive at alpha = {alpha:?}")]
    NonPositiveMetric { index: usize, value: f64, alpha: [f64; 3] },

    #[error("invalid material: {0}")]
    InvalidMaterial(String),

    #[error("no material entry for phase tag {0}")]
    MissingMaterial(u32),

    #[error("conflicting constraints on node {node}, component {component}")]
    ConflictingConstraint { node: usize, component: usize },

    #[error("solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("solvability check failed for load case {case}: |mean rhs| = {residual:e} exceeds {limit:e}")]
    Solvability { case: String, residual: f64, limit: f64 },

    #[error("homogenized tensor asymmetry {0:e} exceeds the strict-mode limit")]
    Asymmetry(f64),

    #[error("point {0:?} lies outside the mesh")]
    OutsideMesh([f64; 3]),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("format error in {path}: line {line}: {msg}")]
    Format { path: PathBuf, line: usize, msg: String },

    #[error("archive mismatch: {0}")]
    ArchiveMismatch(String),

    #[error("no finite critical load: the reference load produces zero equivalent stress")]
    NoCriticalLoad,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::MissingMaterial(_)
            | Error::InvalidMaterial(_)
            | Error::InvalidArgument(_)
            | Error::InvalidMesh(_)
            | Error::Format { .. }
            | Error::ArchiveMismatch(_)
            | Error::Io(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors produced by the solvers, oracles and I/O layer.
#[derive(Debug, Error)]
pub enum Error {
    /// The input data violates a precondition (too few points, ragged rows).
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    /// Two rows share an abscissa. Rows are numbered from 1 in input order.
    #[error("duplicate abscissa {x} in rows {first} and {second}")]
    DuplicateAbscissa { x: String, first: usize, second: usize },

    /// A numeric parameter is outside its domain.
    #[error("parameter out of range: {0}")]
    Domain(String),

    /// A combinatorial search would exceed its configured cap.
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A structural assumption failed. Indicates a bug, not bad input.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("format error: {0}")]
    Format(String),

    /// Training produced a non-finite objective.
    #[error("training diverged at step {step}")]
    Divergence { step: usize, trajectory: Vec<crate::trainer::TrajectoryRow> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

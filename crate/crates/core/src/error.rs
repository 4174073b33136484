use thiserror::Error;

/// Errors raised by the solvers.
///
/// Payloads are stored as `f64` regardless of the scalar type used for the
/// computation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("argument outside the domain of {function}: {value}")]
    Domain { function: &'static str, value: f64 },
    #[error("{function} diverges at {value}")]
    Divergence { function: &'static str, value: f64 },
    #[error("branch {branch} is not admissible at mu = {mu}")]
    BranchNotAdmissible { branch: &'static str, mu: f64 },
    #[error("no admissible branch at mu = {mu}")]
    NoAdmissibleBranch { mu: f64 },
    #[error("failed to bracket a root of {what} after {attempts} expansions")]
    Bracket { what: &'static str, attempts: usize },
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

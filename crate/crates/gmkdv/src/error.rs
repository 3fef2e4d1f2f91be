use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("no root of F in the bracket [{lo}, {hi}] (conditions on q violated)")]
    NoRoot { lo: f64, hi: f64 },

    #[error("amplitude/velocity coupling has no solution for A = {amplitude}")]
    NoSolution { amplitude: f64 },

    #[error("gamma + alpha^2 V = {value} <= 0 at the computed velocity")]
    ViolatedCondition { value: f64 },

    #[error("profile integration stagnated at eta = {eta} (g = {g})")]
    Stagnation { eta: f64, g: f64 },

    #[error("singular pentadiagonal system: pivot {pivot:.3e} below guard at row {row}")]
    SingularSystem { row: usize, pivot: f64 },

    #[error("initial data violates the boundary-smallness contract: |u| = {max_abs:.3e} > eps^2 near x = {x:.3}")]
    DomainTooSmall { x: f64, max_abs: f64 },

    #[error("solution blow-up at t = {t}: max |y| = {max_abs:.3e}")]
    BlowUp { t: f64, max_abs: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

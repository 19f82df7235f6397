use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("filter must contain at least one nonzero tap")]
    InvalidFilter,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not strongly convex: least Gram eigenvalue {s:e} vs greatest {sigma:e}")]
    NotStronglyConvex { s: f64, sigma: f64 },

    #[error("Cholesky factorization failed at pivot {pivot} (value {value:e})")]
    Factorization { pivot: usize, value: f64 },

    #[error("step too large: alpha = {alpha} with rho = {rho} requires alpha * rho < 1")]
    StepTooLarge { alpha: f64, rho: f64 },

    #[error("step alpha = {alpha} exceeds the admissible bound {bound} for {variant}")]
    InvalidStep {
        variant: &'static str,
        alpha: f64,
        bound: f64,
    },

    #[error("shifted term f - (rho/2)|x|^2 is nonconvex: rho = {rho} > s = {s}")]
    ShiftedTermNonconvex { rho: f64, s: f64 },

    #[error("{variant} requires a smooth data term with a Lipschitz gradient")]
    NotSmooth { variant: &'static str },

    #[error("bound is not applicable: {0}")]
    BoundInapplicable(String),

    #[error("non-finite value encountered at iteration {iter}")]
    Divergence { iter: usize },

    #[error("filter design failed: target ratio {target} outside achievable range [{min}, {max}]")]
    DesignFailure { target: f64, min: f64, max: f64 },

    #[error("signal is identically zero")]
    ZeroSignal,

    #[error("sampler produced only coincident pairs")]
    DegenerateSampler,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

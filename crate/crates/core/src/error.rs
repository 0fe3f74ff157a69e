use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("integrand returned NaN at z = {abscissa}")]
    NanIntegrand { abscissa: f64 },

    #[error("quadrature did not converge: partial value {value}, error estimate {abs_error}")]
    QuadratureNotConverged { value: f64, abs_error: f64 },

    #[error("no sign change on bracket [{lower}, {upper}]: f = ({f_lower}, {f_upper})")]
    Bracketing {
        lower: f64,
        upper: f64,
        f_lower: f64,
        f_upper: f64,
    },

    #[error("degenerate uniform noise: covert communication is not possible (L = 0)")]
    DegenerateUniform,

    #[error("target divergence {target} per channel use is above the reachable maximum {max} on the tilt bracket")]
    Unreachable { target: f64, max: f64 },

    #[error("blocklength too small: delta/n = {per_letter} must exceed n^-chi = {floor}")]
    BlocklengthTooSmall { per_letter: f64, floor: f64 },

    #[error("integral {term} diverges or fails to converge")]
    Integrability { term: &'static str },

    #[error("{family} noise has no closed-form input law; use the characteristic-function residual to test candidate inputs")]
    NotSynthesizable { family: &'static str },

    #[error("cumulant function diverges: {0}")]
    Divergence(String),

    #[error("codebook of {entries} entries exceeds the limit of {limit}")]
    CodebookTooLarge { entries: u128, limit: u128 },

    #[error("no feasible key length on the rho grid: {0}")]
    Infeasible(String),

    #[error("invalid model specification: {0}")]
    InvalidModel(String),
}

pub type Result<T> = std::result::Result<T, Error>;

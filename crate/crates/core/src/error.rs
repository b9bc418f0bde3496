use thiserror::Error;

/// Errors produced by the simulation and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unsupported reuse factor {kappa}; supported values are 1, 3, 4, 7")]
    UnsupportedReuse { kappa: u32 },

    #[error("interference covariance is singular or ill-conditioned (condition estimate {condition:e})")]
    SingularCovariance { condition: f64 },

    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("empty input")]
    EmptyInput,

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("hypergeometric series diverges for a={a}, b={b}, c={c}, z={z}")]
    Divergent { a: f64, b: f64, c: f64, z: f64 },

    #[error("series or iteration did not converge: {0}")]
    NonConvergence(String),

    #[error("no sign change found for the fixed point (rho={rho}, c={c}, alpha={alpha}, nu={nu})")]
    NoBracket { rho: f64, c: f64, alpha: f64, nu: f64 },

    #[error("adaptive quadrature did not converge (error estimate {estimate:e})")]
    QuadratureFailed { estimate: f64 },

    #[error("realization failed after {attempts} singular redraws")]
    RealizationFailed { attempts: u32 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("{name} = {value} is out of range: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The adaptive ODE integrator gave up.
    #[error("integration failed at t = {t}: {reason}")]
    IntegrationFailure { t: f64, reason: &'static str },

    /// Adaptive quadrature hit its subdivision limit before reaching tolerance.
    #[error("quadrature did not converge: estimate {estimate}, error bound {error}")]
    QuadratureFailure { estimate: f64, error: f64 },

    /// No sign change of `|trace| - threshold` was found in the search window.
    #[error("no crossing for tongue {ell} at delta = {delta} in window [{lo}, {hi}]")]
    BracketNotFound {
        ell: u32,
        delta: f64,
        lo: f64,
        hi: f64,
    },
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            reason,
        }
    }
}

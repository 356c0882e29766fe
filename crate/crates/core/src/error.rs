use thiserror::Error;

pub type Result<T> = std::result::Result<T, HorseError>;

#[derive(Debug, Clone, Error)]
pub enum HorseError {
    #[error("closed channel at this energy: E = {energy} MeV is below threshold")]
    ClosedChannel { energy: f64 },

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: String,
    },

    /// Energy sits on (or within the guard band of) an eigenvalue of the truncated Hamiltonian.
    #[error("energy {energy} MeV is within the pole guard of eigenvalue #{index} (E = {eigenvalue} MeV)")]
    Pole {
        energy: f64,
        index: usize,
        eigenvalue: f64,
    },

    #[error("degenerate phase-shift ratio at E = {energy} MeV (numerator and denominator both vanish)")]
    Degenerate { energy: f64 },

    #[error("{what} did not converge after {iterations} iterations (last estimate {estimate:e}, error {error:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        estimate: f64,
        error: f64,
    },

    #[error("Coulomb functions failed for l = {l}, eta = {eta}, rho = {rho}: {reason}")]
    Coulomb {
        l: usize,
        eta: f64,
        rho: f64,
        reason: &'static str,
    },

    #[error("no sign change of the channel-radius residual on [{lower}, {upper}] fm (values {f_lower:e}, {f_upper:e})")]
    RootBracket {
        lower: f64,
        upper: f64,
        f_lower: f64,
        f_upper: f64,
    },

    #[error("singular matrix in {context} (condition estimate {condition:e})")]
    Singular { context: &'static str, condition: f64 },

    #[error("quadrature failed: estimate {estimate:e}, error bound {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("eigensolver failure: {0}")]
    Eigen(String),

    #[error("matching instability: phase from r_m = {r1} fm and r_m = {r2} fm differ by {diff:e} rad")]
    MatchingInstability { r1: f64, r2: f64, diff: f64 },

    #[error("wave function has a node at the matching radius b = {b} fm; choose a different b")]
    NodeAtRadius { b: f64 },

    #[error("channel radius b = {b} fm outside the window [{lower}, {upper}) fm")]
    RadiusWindow { b: f64, lower: f64, upper: f64 },

    #[error("numerical overflow in {0}")]
    Overflow(&'static str),

    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl HorseError {
    pub(crate) fn invalid(name: &'static str, value: f64, reason: impl Into<String>) -> Self {
        HorseError::InvalidParameter {
            name,
            value,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        HorseError::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for HorseError {
    fn from(e: std::io::Error) -> Self {
        HorseError::Io(e.to_string())
    }
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the domain of a pointwise function (e.g. negative protein level).
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid parameters, grid or run configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// `sinh(theta)` vanishes: the shift hits the Neumann spectrum of the unshifted operator.
    #[error("singular Green's kernel: |sinh(theta)| = {modulus:e} for shift {shift_re}+{shift_im}i")]
    SingularKernel {
        shift_re: f64,
        shift_im: f64,
        modulus: f64,
    },

    #[error("characteristic function evaluated at its singular point lambda = -mu")]
    SingularPoint,

    #[error("simulation diverged at t = {t}: {reason}")]
    Divergence { t: f64, reason: String },

    #[error("no stability change inside bracket [{lo:e}, {hi:e}]")]
    Bracket { lo: f64, hi: f64 },

    #[error("{what} did not converge after {iterations} iterations (last residual {residual:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("root is not simple: |R'(lambda)| = {0:e}")]
    SimplicityViolation(f64),

    #[error("degenerate resonance: {0}")]
    DegenerateResonance(String),

    #[error("insufficient data: {samples} samples in analysis window (need at least {needed})")]
    InsufficientData { samples: usize, needed: usize },

    #[error("trajectory is oscillatory; no steady late-time profile")]
    NotSteady,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Config(_) | Error::Io(_) => 2,
            Error::Divergence { .. } => 3,
            _ => 4,
        }
    }
}

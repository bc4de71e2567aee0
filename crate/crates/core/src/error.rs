use alloc::string::String;
use core::fmt;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Matrix or vector dimensions disagree.
    DimensionMismatch { expected: usize, found: usize },
    /// Operators must be at least 2x2.
    DimensionTooSmall(usize),
    /// Input claimed to be Hermitian is not; carries the largest |a_ij - conj(a_ji)|.
    NotHermitian { max_asymmetry: f64 },
    /// A pulse was evaluated at (or too close to) its pole.
    Singularity { distance: f64 },
    /// The requested operation is not available for this pulse kind.
    Unsupported(&'static str),
    /// Spectrum of a pole pulse whose pole sits on the real axis cannot be sampled.
    PoleTooCloseToAxis { t_p: f64 },
    /// An argument is outside its allowed range.
    InvalidArgument(String),
    /// Adaptive step control shrank the step below the representable limit.
    StepSizeUnderflow { t: f64 },
    /// The amplitudes stopped being finite; `last_good_t` is the last accepted time.
    Divergence { last_good_t: f64 },
    /// The integrator hit its step budget.
    TooManySteps { t: f64 },
    /// The asymptotic fit did not settle; the integration window is too short.
    AsymptoticsNotReached { residual: f64 },
    /// The loop z(t) passes too close to the exceptional point.
    DegenerateLoop { min_distance: f64 },
    /// The Hermitian eigen-solver did not converge.
    NoConvergence,
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::DimensionTooSmall(n) => write!(f, "operator dimension {n} is below 2"),
            Error::NotHermitian { max_asymmetry } => write!(
                f,
                "operator is not Hermitian (max |a_ij - conj(a_ji)| = {max_asymmetry:e})"
            ),
            Error::Singularity { distance } => {
                write!(f, "pulse evaluated {distance:e} away from its pole")
            }
            Error::Unsupported(what) => write!(f, "unsupported: {what}"),
            Error::PoleTooCloseToAxis { t_p } => {
                write!(f, "pole offset t_p = {t_p:e} is too close to the real axis")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::StepSizeUnderflow { t } => write!(f, "step size underflow at t = {t}"),
            Error::Divergence { last_good_t } => {
                write!(f, "amplitudes diverged after t = {last_good_t}")
            }
            Error::TooManySteps { t } => write!(f, "step budget exhausted at t = {t}"),
            Error::AsymptoticsNotReached { residual } => write!(
                f,
                "asymptotic regime not reached (fit residual {residual:e}); increase t_end"
            ),
            Error::DegenerateLoop { min_distance } => write!(
                f,
                "loop passes within {min_distance:e} of the exceptional point"
            ),
            Error::NoConvergence => write!(f, "eigenvalue iteration did not converge"),
        }
    }
}

impl core::error::Error for Error {}

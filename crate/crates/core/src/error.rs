use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not Hermitian (max |a - a^dag| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    EigenFailure { sweeps: usize },

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    #[error("Born probability {value:e} for outcome `{label}` is negative beyond rounding")]
    NegativeProbability { label: String, value: f64 },

    #[error("quantum Fisher information {value:e} is negative beyond rounding")]
    NegativeFisher { value: f64 },

    #[error("outcome `{label}` has vanishing probability but derivative {derivative:e}")]
    EstimatorSingularity { label: String, derivative: f64 },

    #[error("zero Fisher information: variance bound is unbounded")]
    UnboundedVariance,

    #[error("signal amplitude v*sqrt(1-eta) vanishes (eta = {eta}, v = {v}); the phase cannot be estimated")]
    DegenerateSignal { eta: f64, v: f64 },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            range: "[0, 1]",
        })
    }
}

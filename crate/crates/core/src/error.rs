use alloc::string::String;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("series length {got} is below the minimum of {min}")]
    InvalidLength { got: usize, min: usize },
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("singular design matrix (column {column} is collinear with earlier regressors)")]
    SingularDesign { column: usize },
    #[error("effective sample size {got} is below the required {min}")]
    SampleSize { got: usize, min: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("invalid simulation spec: {0}")]
    Spec(String),
    #[error("evaluation window needs at least 9 observations, got {0}")]
    Window(usize),
    #[error("zero sample variance")]
    ZeroVariance,
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check_finite(y: &[f64]) -> Result<()> {
    match y.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

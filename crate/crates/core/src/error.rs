use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Failures surfaced by the simulation core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two objects that must share a space or size do not.
    DimensionMismatch { expected: usize, found: usize },
    /// A state expected to be normalised is not.
    NotNormalized { norm: f64 },
    /// A matrix expected to be unitary is not.
    NotUnitary { defect: f64 },
    /// A structural rule was violated (e.g. a control reads a target register).
    Structure(String),
    /// A probability or other parameter is out of its admissible range.
    Parameter(String),
    /// The catalyst system could not be solved to the requested tolerance.
    NearSingularTransduction { residual: f64, tolerance: f64 },
    /// The polynomial construction would exceed the supported degree.
    DegreeCap { required: usize, cap: usize },
    /// Polynomial completion failed to meet its residual target.
    Completion { residual: f64 },
    /// Layer stripping lost too much precision to continue.
    Stripping { degree_reached: usize },
    /// An operation was asked for outside its contract.
    Contract(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NotNormalized { norm } => write!(f, "state is not normalised (norm {norm})"),
            Error::NotUnitary { defect } => {
                write!(f, "operator is not unitary (max |U*U - I| = {defect:e})")
            }
            Error::Structure(msg) => write!(f, "structural error: {msg}"),
            Error::Parameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::NearSingularTransduction { residual, tolerance } => {
                write!(f, "near-singular transduction: best residual {residual:e} exceeds tolerance {tolerance:e}")
            }
            Error::DegreeCap { required, cap } => {
                write!(f, "degree cap: polynomial needs degree {required} > {cap}; use a larger epsilon")
            }
            Error::Completion { residual } => {
                write!(f, "polynomial completion failed (grid residual {residual:e})")
            }
            Error::Stripping { degree_reached } => {
                write!(f, "phase-factor layer stripping became unstable at degree {degree_reached}")
            }
            Error::Contract(msg) => write!(f, "contract violation: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

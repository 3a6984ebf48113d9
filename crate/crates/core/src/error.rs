use thiserror::Error;

use crate::novikov::{Exponent, Precision};

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed or inconsistent input.
    Config,
    /// The input is well formed but the mathematics refuses (non-Morse, obstructed lift, ...).
    Obstruction,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("not invertible at this precision (series is 0 mod T^{0})")]
    NotInvertible(Precision),

    #[error("point not in unitary torus: coordinate {index} has valuation {valuation}")]
    NotUnitary { index: usize, valuation: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("leading system not zero-dimensional")]
    NotZeroDimensional,

    #[error("rational root search: coefficient {0} too large to factor")]
    RootSearchTooLarge(String),

    #[error("non-Morse: cannot lift ({0})")]
    NonMorse(String),

    #[error("obstructed at order {order}")]
    Obstructed { order: Exponent },

    #[error("lift did not reach precision {target} within {steps} steps")]
    LiftStalled { target: Exponent, steps: usize },

    #[error("no rational leading solution: requires extension field")]
    RequiresExtensionField,

    #[error("leading gradient system has no solution on the unitary torus")]
    NoLeadingSolution,

    #[error("branch index {index} out of range ({count} leading solutions)")]
    BranchOutOfRange { index: usize, count: usize },

    #[error("not η-monotone: annulus area {annulus} must be in (0, disc area {disc})")]
    NotEtaMonotone { annulus: Exponent, disc: Exponent },

    #[error("areas inconsistent: (k-1)*A + 2*B = {found}, total area is {total}")]
    AreasInconsistent { found: Exponent, total: Exponent },

    #[error("bulk parameter: {0}")]
    InvalidBulk(String),

    #[error("algebra mismatch: {0} vs {1} generators")]
    AlgebraMismatch(usize, usize),

    #[error("form is not symmetric at ({0}, {1})")]
    AsymmetricForm(usize, usize),

    #[error("degenerate: not Morse (Z = 0)")]
    DegenerateTrace,

    #[error("omega mismatch: {0} vs {1}")]
    OmegaMismatch(Exponent, Exponent),

    #[error("omega must be positive, got {0}")]
    NonPositiveOmega(Exponent),

    #[error("no orbits: spectrum undefined for autonomous model")]
    NoOrbits,

    #[error("subadditivity violated at (m, n) = ({m}, {n})")]
    SubadditivityViolation { m: usize, n: usize },

    #[error("spectrality violated at index {index}")]
    SpectralityViolated { index: usize },

    #[error("insufficient separation: spectrum gap {gap} <= step bound {step}")]
    InsufficientSeparation { gap: String, step: String },

    #[error("schedule invalid at k = {k}: {source}")]
    Schedule {
        k: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::NonMorse(_)
            | Error::Obstructed { .. }
            | Error::LiftStalled { .. }
            | Error::RequiresExtensionField
            | Error::NoLeadingSolution
            | Error::NotZeroDimensional
            | Error::DegenerateTrace
            | Error::NotInvertible(_) => ErrorKind::Obstruction,
            Error::Schedule { source, .. } => source.kind(),
            _ => ErrorKind::Config,
        }
    }
}

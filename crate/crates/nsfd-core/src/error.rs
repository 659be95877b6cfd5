//! Error types shared across the crate.

use core::fmt;

/// Errors raised by constructors and pointwise operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Vector lengths disagree with the governing dimension.
    DimensionMismatch { expected: usize, got: usize },
    /// A component was NaN or infinite where a finite real is required.
    NonFinite,
    /// A state vector must have at least one component.
    EmptyState,
    /// The supplied point is not a fixed point of the vector field.
    NotAnEquilibrium { residual: f64 },
    /// A Lyapunov coefficient or other parameter violated strict positivity.
    NonPositiveParameter { name: &'static str, value: f64 },
    /// The Lyapunov weight bound is undefined at the equilibrium itself.
    BoundUndefinedAtEquilibrium,
    /// The Lyapunov rate is not strictly negative off the equilibrium, so
    /// the supplied function is not a strict Lyapunov function there.
    RateNotStrictlyNegative { rate: f64 },
    /// A weight function evaluated to a negative value.
    NegativeWeight { value: f64 },
    /// The vector field is negative on a boundary face where a component
    /// vanishes, so the nonnegative orthant is not positively invariant.
    QuasiPositivityViolated { component: usize },
    /// A state left the nonnegative orthant where positivity machinery
    /// requires it.
    OutsideNonnegativeOrthant { component: usize, value: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::NonFinite => write!(f, "non-finite component encountered"),
            Error::EmptyState => write!(f, "state must have at least one component"),
            Error::NotAnEquilibrium { residual } => {
                write!(f, "rhs at the designated equilibrium has max-norm {residual:e} > 1e-12")
            }
            Error::NonPositiveParameter { name, value } => {
                write!(f, "parameter `{name}` must be strictly positive, got {value}")
            }
            Error::BoundUndefinedAtEquilibrium => {
                write!(f, "Lyapunov weight bound undefined at equilibrium")
            }
            Error::RateNotStrictlyNegative { rate } => write!(
                f,
                "Lyapunov rate {rate:e} is not strictly negative off the equilibrium; \
                 V is not a valid strict Lyapunov function here"
            ),
            Error::NegativeWeight { value } => {
                write!(f, "weight must be nonnegative, got {value}")
            }
            Error::QuasiPositivityViolated { component } => write!(
                f,
                "system violates quasi-positivity at this state: component {component} \
                 decreases while sitting at zero"
            ),
            Error::OutsideNonnegativeOrthant { component, value } => write!(
                f,
                "component {component} = {value} lies outside the nonnegative orthant"
            ),
        }
    }
}

impl core::error::Error for Error {}

/// A pointwise [`Error`] tagged with the index of the integration step at
/// which it occurred.
#[derive(Debug, Clone, PartialEq)]
pub struct StepError {
    pub step: usize,
    pub source: Error,
}

impl fmt::Display for StepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {} failed: {}", self.step, self.source)
    }
}

impl core::error::Error for StepError {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        Some(&self.source)
    }
}

//! Explicit nonstandard finite difference (NSFD) methods that preserve a
//! given quadratic Lyapunov function, and hence global asymptotic stability,
//! at every positive step size. The same weighted schemes can also keep the
//! nonnegative orthant positively invariant.
//!
//! The scheme replaces the step size `dt` in the forward difference quotient
//! by a denominator function `phi(dt)` and adds a weighted non-local zero
//! approximation, giving the explicit update
//!
//! ```text
//! y_i^{k+1} = y_i^k + phi(dt) * f_i(y^k) / (1 + phi(dt) * tau(y^k))
//! ```
//!
//! Choosing the weight `tau` above the pointwise bound
//! [`tau_lyapunov_bound`](lyapunov::tau_lyapunov_bound) makes the quadratic
//! Lyapunov function strictly decrease along iterates regardless of `dt`;
//! choosing it above [`tau_positivity`](positivity::tau_positivity) keeps
//! nonnegative states nonnegative.
//!
//! The crate is `no_std` (with `alloc`); all types are immutable after
//! construction and every operation is a pure function of its inputs.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod lyapunov;
pub mod positivity;
pub mod problems;
pub mod reference;
pub mod state;
pub mod stepper;
pub mod system;

pub use error::{Error, StepError};
pub use lyapunov::{tau_lyapunov_bound, QuadraticLyapunov};
pub use reference::OneStepMethod;
pub use state::State;
pub use stepper::{DenominatorFunction, NsfdScheme, WeightFunction};
pub use system::OdeSystem;

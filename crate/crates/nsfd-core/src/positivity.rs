//! Weight lower bounds that keep the nonnegative orthant positively
//! invariant, and a sampling-based checker for the quasi-positivity
//! hypothesis the bounds rest on.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::lyapunov::{tau_lyapunov_bound, QuadraticLyapunov};
use crate::state::State;
use crate::system::OdeSystem;

fn check_orthant(y: &State) -> Result<(), Error> {
    for (i, &yi) in y.as_slice().iter().enumerate() {
        if yi < 0.0 {
            return Err(Error::OutsideNonnegativeOrthant {
                component: i,
                value: yi,
            });
        }
    }
    Ok(())
}

fn tau_star_from_f(y: &State, f: &State, i: usize) -> Result<f64, Error> {
    let fi = f[i];
    if fi >= 0.0 {
        return Ok(0.0);
    }
    let yi = y[i];
    if yi <= 0.0 {
        // f_i < 0 with y_i = 0 means the flow leaves the orthant here.
        return Err(Error::QuasiPositivityViolated { component: i });
    }
    Ok(-fi / yi)
}

/// The per-component bound `tau*_i(y)`: zero when `f_i(y) >= 0`, otherwise
/// `-f_i(y) / y_i`. Defined on the nonnegative orthant.
pub fn tau_star(sys: &OdeSystem, y: &State, i: usize) -> Result<f64, Error> {
    check_orthant(y)?;
    let f = sys.rhs(y)?;
    tau_star_from_f(y, &f, i)
}

/// The aggregate bound `tau_P(y) = max_i tau*_i(y)`. Any weight at or above
/// it keeps nonnegative states nonnegative at every step size.
pub fn tau_positivity(sys: &OdeSystem, y: &State) -> Result<f64, Error> {
    check_orthant(y)?;
    let f = sys.rhs(y)?;
    let mut max = 0.0;
    for i in 0..y.dim() {
        let t = tau_star_from_f(y, &f, i)?;
        if t > max {
            max = t;
        }
    }
    Ok(max)
}

/// `max(tau_L(y), tau_P(y)) + margin`: the smallest weight (up to the
/// margin) satisfying the Lyapunov-decrease and positivity bounds at once.
pub fn tau_combined(
    v: &QuadraticLyapunov,
    sys: &OdeSystem,
    y: &State,
    margin: f64,
) -> Result<f64, Error> {
    if margin < 0.0 || !margin.is_finite() {
        return Err(Error::NegativeWeight { value: margin });
    }
    let tau_l = tau_lyapunov_bound(v, sys, y)?;
    let tau_p = tau_positivity(sys, y)?;
    Ok(tau_l.max(tau_p) + margin)
}

/// A sampled point on a boundary face where the vector field points out of
/// the nonnegative orthant.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// The face `y_i = 0` on which the point lies.
    pub face: usize,
    pub point: Vec<f64>,
    /// The offending value `f_i(point) < 0`.
    pub value: f64,
}

/// Result of [`check_quasi_positivity`]. An empty violation list means no
/// counterexample was found among the samples; it is not a proof.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiPositivityReport {
    pub samples_per_face: usize,
    pub violations: Vec<Violation>,
}

impl QuasiPositivityReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Randomized falsification of the quasi-positivity condition: on each face
/// `y_i = 0` draw `samples` points with the other components uniform in
/// `[0, bounds_j]` and report every point where `f_i < -1e-12`.
pub fn check_quasi_positivity(
    sys: &OdeSystem,
    samples: usize,
    bounds: &[f64],
    seed: u64,
) -> Result<QuasiPositivityReport, Error> {
    if bounds.len() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            got: bounds.len(),
        });
    }
    for &b in bounds {
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::NonPositiveParameter {
                name: "bounds",
                value: b,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    for face in 0..sys.dim() {
        for _ in 0..samples {
            let point: Vec<f64> = (0..sys.dim())
                .map(|j| {
                    if j == face {
                        0.0
                    } else {
                        rng.random_range(0.0..bounds[j])
                    }
                })
                .collect();
            let f = sys.rhs(&State::new(point.clone())?)?;
            if f[face] < -1e-12 {
                violations.push(Violation {
                    face,
                    point,
                    value: f[face],
                });
            }
        }
    }
    Ok(QuasiPositivityReport {
        samples_per_face: samples,
        violations,
    })
}

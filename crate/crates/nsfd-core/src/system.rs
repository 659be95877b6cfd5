//! Autonomous ODE systems `y' = f(y)` with a designated equilibrium.

use alloc::sync::Arc;
use alloc::vec;

use crate::error::Error;
use crate::state::State;

type RhsFn = dyn Fn(&[f64], &mut [f64]) + Send + Sync;

/// An autonomous system `y' = f(y)` on `R^n` together with the equilibrium
/// `y*` whose stability is under study.
///
/// Construction verifies that `f(y*)` has max-norm at most `1e-12`.
/// The right-hand side is shared behind an `Arc`, so cloning is cheap and
/// systems can be evaluated concurrently from any number of threads.
#[derive(Clone)]
pub struct OdeSystem {
    dim: usize,
    rhs: Arc<RhsFn>,
    equilibrium: State,
}

impl core::fmt::Debug for OdeSystem {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("OdeSystem")
            .field("dim", &self.dim)
            .field("equilibrium", &self.equilibrium)
            .finish_non_exhaustive()
    }
}

impl OdeSystem {
    pub fn new<F>(equilibrium: State, rhs: F) -> Result<Self, Error>
    where
        F: Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    {
        let dim = equilibrium.dim();
        let sys = OdeSystem {
            dim,
            rhs: Arc::new(rhs),
            equilibrium,
        };
        let residual = sys.rhs(&sys.equilibrium)?.max_norm();
        if residual > 1e-12 {
            return Err(Error::NotAnEquilibrium { residual });
        }
        Ok(sys)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn equilibrium(&self) -> &State {
        &self.equilibrium
    }

    /// Evaluates `f(y)`. Errors on dimension mismatch or a non-finite
    /// component in the output.
    pub fn rhs(&self, y: &State) -> Result<State, Error> {
        if y.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: y.dim(),
            });
        }
        let mut out = vec![0.0; self.dim];
        (self.rhs)(y.as_slice(), &mut out);
        State::new(out)
    }
}

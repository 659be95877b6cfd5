//! Finite real state vectors.

use alloc::vec::Vec;
use core::ops::Index;

use crate::error::Error;

/// An `n`-dimensional state vector with all components finite.
///
/// Construction rejects NaN and infinities; every downstream result assumes
/// finite reals, so the check happens once at the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    components: Vec<f64>,
}

impl State {
    pub fn new(components: Vec<f64>) -> Result<Self, Error> {
        if components.is_empty() {
            return Err(Error::EmptyState);
        }
        if components.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(State { components })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.components
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.components
    }

    /// Max-norm of the vector.
    pub fn max_norm(&self) -> f64 {
        self.components.iter().fold(0.0, |m, &c| {
            let a = libm::fabs(c);
            if a > m {
                a
            } else {
                m
            }
        })
    }

    /// Component-wise max-norm distance to `other`.
    pub fn max_distance(&self, other: &State) -> Result<f64, Error> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .components
            .iter()
            .zip(other.components.iter())
            .fold(0.0, |m, (&a, &b)| {
                let d = libm::fabs(a - b);
                if d > m {
                    d
                } else {
                    m
                }
            }))
    }

    /// Scale-aware proximity test: true when the max-norm distance to
    /// `other` is at most `1e-12 * (1 + max_norm(other))`.
    pub fn is_near(&self, other: &State) -> Result<bool, Error> {
        let d = self.max_distance(other)?;
        Ok(d <= 1e-12 * (1.0 + other.max_norm()))
    }
}

impl Index<usize> for State {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.components[i]
    }
}

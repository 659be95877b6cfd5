//! Quadratic Lyapunov functions, their rate along solutions, and the
//! pointwise weight lower bound that makes the NSFD scheme dissipative.

use alloc::vec::Vec;

use crate::error::Error;
use crate::state::State;
use crate::system::OdeSystem;

/// The weighted squared-deviation function
/// `V(y) = sum_i alpha_i * (y_i - c_i)^2` with all `alpha_i > 0`.
///
/// `V` vanishes exactly at the center and is strictly positive elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticLyapunov {
    alphas: Vec<f64>,
    center: State,
}

impl QuadraticLyapunov {
    pub fn new(alphas: Vec<f64>, center: State) -> Result<Self, Error> {
        if alphas.len() != center.dim() {
            return Err(Error::DimensionMismatch {
                expected: center.dim(),
                got: alphas.len(),
            });
        }
        for &a in &alphas {
            if !(a > 0.0) || !a.is_finite() {
                return Err(Error::NonPositiveParameter {
                    name: "alpha",
                    value: a,
                });
            }
        }
        Ok(QuadraticLyapunov { alphas, center })
    }

    pub fn dim(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn center(&self) -> &State {
        &self.center
    }

    /// `V(y) = sum_i alpha_i (y_i - c_i)^2`.
    pub fn value(&self, y: &State) -> Result<f64, Error> {
        self.check_dim(y)?;
        Ok(self
            .alphas
            .iter()
            .zip(y.as_slice())
            .zip(self.center.as_slice())
            .map(|((&a, &yi), &ci)| {
                let d = yi - ci;
                a * d * d
            })
            .sum())
    }

    /// Derivative of `V` along solutions of `sys`:
    /// `2 sum_i alpha_i (y_i - c_i) f_i(y)`.
    pub fn rate(&self, sys: &OdeSystem, y: &State) -> Result<f64, Error> {
        self.check_dim(y)?;
        let f = sys.rhs(y)?;
        Ok(2.0
            * self
                .alphas
                .iter()
                .zip(y.as_slice())
                .zip(self.center.as_slice())
                .zip(f.as_slice())
                .map(|(((&a, &yi), &ci), &fi)| a * (yi - ci) * fi)
                .sum::<f64>())
    }

    fn check_dim(&self, y: &State) -> Result<(), Error> {
        if y.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: y.dim(),
            });
        }
        Ok(())
    }
}

/// The pointwise lower bound on the NSFD weight that guarantees strict
/// decrease of `V` along iterates at every step size:
///
/// ```text
/// tau_L(y) = - sum_i alpha_i f_i(y)^2 / Vdot(y)
/// ```
///
/// Defined for `y != y*` with `Vdot(y) < 0`; nonnegative wherever defined.
/// Near the equilibrium the bound typically grows without limit, which is
/// fine: the NSFD increment `phi f / (1 + phi tau)` shrinks as `tau` grows,
/// and an infinite weight yields a zero increment in the stepper.
pub fn tau_lyapunov_bound(
    v: &QuadraticLyapunov,
    sys: &OdeSystem,
    y: &State,
) -> Result<f64, Error> {
    if y.is_near(sys.equilibrium())? {
        return Err(Error::BoundUndefinedAtEquilibrium);
    }
    let rate = v.rate(sys, y)?;
    if !(rate < 0.0) {
        return Err(Error::RateNotStrictlyNegative { rate });
    }
    let f = sys.rhs(y)?;
    let numerator: f64 = v
        .alphas()
        .iter()
        .zip(f.as_slice())
        .map(|(&a, &fi)| a * fi * fi)
        .sum();
    Ok(-numerator / rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::GhaffariSystem;
    use alloc::vec;

    fn st(c: &[f64]) -> State {
        State::new(c.to_vec()).unwrap()
    }

    fn decay_1d() -> OdeSystem {
        OdeSystem::new(st(&[0.0]), |y, out| out[0] = -y[0]).unwrap()
    }

    #[test]
    fn value_at_center_is_zero() {
        let v = QuadraticLyapunov::new(vec![1.0, 1.0], st(&[0.0, 0.0])).unwrap();
        assert_eq!(v.value(&st(&[0.0, 0.0])).unwrap(), 0.0);
    }

    #[test]
    fn value_matches_hand_arithmetic() {
        let v = QuadraticLyapunov::new(vec![1.0, 1.0], st(&[0.0, 0.0])).unwrap();
        assert_eq!(v.value(&st(&[0.5, 0.01])).unwrap(), 0.2501);

        let v = QuadraticLyapunov::new(vec![2.0, 3.0], st(&[1.0, -1.0])).unwrap();
        assert_eq!(v.value(&st(&[2.0, 1.0])).unwrap(), 14.0);
    }

    #[test]
    fn rejects_nonpositive_alpha() {
        assert!(matches!(
            QuadraticLyapunov::new(vec![1.0, 0.0], st(&[0.0, 0.0])),
            Err(Error::NonPositiveParameter { .. })
        ));
    }

    #[test]
    fn rate_vanishes_at_equilibrium() {
        let p = GhaffariSystem::section3();
        let sys = p.system();
        let v = p.lyapunov(1.0).unwrap();
        assert_eq!(v.rate(&sys, &st(&[0.0, 0.0])).unwrap(), 0.0);
    }

    #[test]
    fn rate_matches_closed_form_at_reference_state() {
        let p = GhaffariSystem::section3();
        let sys = p.system();
        let v = p.lyapunov(1.0).unwrap();
        let rate = v.rate(&sys, &st(&[0.5, 0.01])).unwrap();
        // -2*0.16*0.5^4 - 2*0.1*0.01^4
        assert!((rate - (-0.020000002)).abs() < 1e-15);
    }

    #[test]
    fn rate_1d_hand_value() {
        let sys = decay_1d();
        let v = QuadraticLyapunov::new(vec![1.0], st(&[0.0])).unwrap();
        assert_eq!(v.rate(&sys, &st(&[3.0])).unwrap(), -18.0);
    }

    #[test]
    fn tau_bound_reference_values() {
        let p = GhaffariSystem::section3();
        let sys = p.system();
        let v = p.lyapunov(1.0).unwrap();
        let tau = tau_lyapunov_bound(&v, &sys, &st(&[0.5, 0.01])).unwrap();
        assert!((tau - 12.505003749500123).abs() / tau < 1e-14);

        let sys = decay_1d();
        let v = QuadraticLyapunov::new(vec![1.0], st(&[0.0])).unwrap();
        assert_eq!(tau_lyapunov_bound(&v, &sys, &st(&[3.0])).unwrap(), 0.5);
    }

    #[test]
    fn tau_bound_errors_at_equilibrium() {
        let sys = decay_1d();
        let v = QuadraticLyapunov::new(vec![1.0], st(&[0.0])).unwrap();
        assert_eq!(
            tau_lyapunov_bound(&v, &sys, &st(&[0.0])),
            Err(Error::BoundUndefinedAtEquilibrium)
        );
    }

    #[test]
    fn tau_bound_errors_when_rate_not_negative() {
        // f has a second zero at y = 1 where the rate vanishes.
        let sys = OdeSystem::new(st(&[0.0]), |y, out| out[0] = -y[0] * (1.0 - y[0])).unwrap();
        let v = QuadraticLyapunov::new(vec![1.0], st(&[0.0])).unwrap();
        assert!(matches!(
            tau_lyapunov_bound(&v, &sys, &st(&[1.0])),
            Err(Error::RateNotStrictlyNegative { .. })
        ));
    }
}

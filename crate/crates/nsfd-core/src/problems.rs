//! Built-in benchmark systems.

use alloc::vec;

use crate::error::Error;
use crate::lyapunov::QuadraticLyapunov;
use crate::state::State;
use crate::system::OdeSystem;

/// The planar test system
///
/// ```text
/// y1' = -A y1^3 + B y2
/// y2' = -C y1 - D y2^3
/// ```
///
/// with positive parameters. The origin is globally asymptotically stable
/// and `V = alpha1 y1^2 + alpha2 y2^2` with `alpha1 = (C/B) alpha2` is a
/// strict quadratic Lyapunov function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhaffariSystem {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl GhaffariSystem {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self, Error> {
        for (name, value) in [("A", a), ("B", b), ("C", c), ("D", d)] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositiveParameter { name, value });
            }
        }
        Ok(GhaffariSystem { a, b, c, d })
    }

    /// The parameter set `(A, B, C, D) = (0.16, 1, 1, 0.1)` used throughout
    /// the numerical experiments.
    pub fn section3() -> Self {
        GhaffariSystem {
            a: 0.16,
            b: 1.0,
            c: 1.0,
            d: 0.1,
        }
    }

    pub fn rhs(&self, y: &State) -> Result<State, Error> {
        if y.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: y.dim(),
            });
        }
        let (y1, y2) = (y[0], y[1]);
        State::new(vec![
            -self.a * y1 * y1 * y1 + self.b * y2,
            -self.c * y1 - self.d * y2 * y2 * y2,
        ])
    }

    pub fn system(&self) -> OdeSystem {
        let p = *self;
        OdeSystem::new(State::new(vec![0.0, 0.0]).unwrap(), move |y, out| {
            out[0] = -p.a * y[0] * y[0] * y[0] + p.b * y[1];
            out[1] = -p.c * y[0] - p.d * y[1] * y[1] * y[1];
        })
        .expect("origin is an exact equilibrium")
    }

    /// The Lyapunov function `V = alpha1 y1^2 + alpha2 y2^2` with
    /// `alpha1 = (C/B) alpha2`, centered at the origin.
    pub fn lyapunov(&self, alpha2: f64) -> Result<QuadraticLyapunov, Error> {
        if !(alpha2 > 0.0) || !alpha2.is_finite() {
            return Err(Error::NonPositiveParameter {
                name: "alpha2",
                value: alpha2,
            });
        }
        QuadraticLyapunov::new(
            vec![self.c / self.b * alpha2, alpha2],
            State::new(vec![0.0, 0.0]).unwrap(),
        )
    }

    /// Closed-form specialization of the Lyapunov weight bound:
    ///
    /// ```text
    /// tau_L(y) = [a1 (-A y1^3 + B y2)^2 + a2 (-C y1 - D y2^3)^2]
    ///            / (2 A a1 y1^4 + 2 D a2 y2^4)
    /// ```
    ///
    /// Must agree with the generic bound to relative `1e-12`.
    pub fn tau_l(&self, alphas: [f64; 2], y: &State) -> Result<f64, Error> {
        if y.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: y.dim(),
            });
        }
        let (y1, y2) = (y[0], y[1]);
        if y1 == 0.0 && y2 == 0.0 {
            return Err(Error::BoundUndefinedAtEquilibrium);
        }
        let [a1, a2] = alphas;
        let f1 = -self.a * y1 * y1 * y1 + self.b * y2;
        let f2 = -self.c * y1 - self.d * y2 * y2 * y2;
        let y1_4 = y1 * y1 * y1 * y1;
        let y2_4 = y2 * y2 * y2 * y2;
        let denom = 2.0 * self.a * a1 * y1_4 + 2.0 * self.d * a2 * y2_4;
        if !(denom > 0.0) {
            return Err(Error::RateNotStrictlyNegative { rate: -denom });
        }
        Ok((a1 * f1 * f1 + a2 * f2 * f2) / denom)
    }
}

/// `y' = -rate * y` with the exact solution `y0 exp(-rate t)`, used as the
/// convergence-order oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearDecay1D {
    pub rate: f64,
}

impl LinearDecay1D {
    pub fn new(rate: f64) -> Result<Self, Error> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::NonPositiveParameter {
                name: "rate",
                value: rate,
            });
        }
        Ok(LinearDecay1D { rate })
    }

    pub fn system(&self) -> OdeSystem {
        let rate = self.rate;
        OdeSystem::new(State::new(vec![0.0]).unwrap(), move |y, out| {
            out[0] = -rate * y[0]
        })
        .expect("origin is an exact equilibrium")
    }

    pub fn exact(&self, y0: f64, t: f64) -> f64 {
        y0 * libm::exp(-self.rate * t)
    }

    pub fn lyapunov(&self) -> QuadraticLyapunov {
        QuadraticLyapunov::new(vec![1.0], State::new(vec![0.0]).unwrap())
            .expect("unit coefficient is positive")
    }
}

/// The quasi-positive demonstration system
///
/// ```text
/// y1' = -y1 + coupling * y2
/// y2' = -y2 + coupling * y1
/// ```
///
/// with `0 <= coupling < 1`. On each face `y_i = 0` the field satisfies
/// `f_i = coupling * y_j >= 0`, so the nonnegative orthant is positively
/// invariant, and `V = y1^2 + y2^2` is a strict Lyapunov function for the
/// origin since `Vdot = -2 (y1^2 - 2 c y1 y2 + y2^2) ... < 0` for `c < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledDecay {
    pub coupling: f64,
}

impl CoupledDecay {
    pub fn new(coupling: f64) -> Result<Self, Error> {
        if !(0.0..1.0).contains(&coupling) {
            return Err(Error::NonPositiveParameter {
                name: "coupling",
                value: coupling,
            });
        }
        Ok(CoupledDecay { coupling })
    }

    pub fn system(&self) -> OdeSystem {
        let c = self.coupling;
        OdeSystem::new(State::new(vec![0.0, 0.0]).unwrap(), move |y, out| {
            out[0] = -y[0] + c * y[1];
            out[1] = -y[1] + c * y[0];
        })
        .expect("origin is an exact equilibrium")
    }

    pub fn lyapunov(&self) -> QuadraticLyapunov {
        QuadraticLyapunov::new(vec![1.0, 1.0], State::new(vec![0.0, 0.0]).unwrap())
            .expect("unit coefficients are positive")
    }
}

/// The symmetric exchange field `f = (y2 - y1, y1 - y2)`: quasi-positive by
/// inspection, with every diagonal point an equilibrium. The quadratic
/// function centered at `(level, level)` is a Lyapunov function but not a
/// strict one (its rate vanishes on the whole diagonal), so this system
/// only exercises the positivity machinery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricExchange {
    pub level: f64,
}

impl SymmetricExchange {
    pub fn new(level: f64) -> Result<Self, Error> {
        if level < 0.0 || !level.is_finite() {
            return Err(Error::NonPositiveParameter {
                name: "level",
                value: level,
            });
        }
        Ok(SymmetricExchange { level })
    }

    pub fn system(&self) -> OdeSystem {
        OdeSystem::new(
            State::new(vec![self.level, self.level]).unwrap(),
            |y, out| {
                out[0] = y[1] - y[0];
                out[1] = y[0] - y[1];
            },
        )
        .expect("diagonal points are exact equilibria")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lyapunov::tau_lyapunov_bound;
    use crate::positivity::check_quasi_positivity;

    fn st(c: &[f64]) -> State {
        State::new(c.to_vec()).unwrap()
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        assert!(GhaffariSystem::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(GhaffariSystem::new(1.0, 1.0, 1.0, -0.1).is_err());
        assert!(LinearDecay1D::new(0.0).is_err());
        assert!(CoupledDecay::new(1.0).is_err());
    }

    #[test]
    fn rhs_reference_values() {
        let p = GhaffariSystem::section3();
        assert_eq!(p.rhs(&st(&[0.0, 0.0])).unwrap().as_slice(), &[0.0, 0.0]);
        let f = p.rhs(&st(&[0.5, 0.01])).unwrap();
        assert!((f[0] - (-0.01)).abs() < 1e-17);
        assert!((f[1] - (-0.5000001)).abs() < 1e-16);
        let f = p.rhs(&st(&[1.0, 0.0])).unwrap();
        assert_eq!(f.as_slice(), &[-0.16, -1.0]);
    }

    #[test]
    fn rhs_struct_and_system_agree() {
        let p = GhaffariSystem::section3();
        let sys = p.system();
        let y = st(&[0.3, -0.7]);
        assert_eq!(p.rhs(&y).unwrap(), sys.rhs(&y).unwrap());
    }

    #[test]
    fn lyapunov_coefficient_ratio() {
        let p = GhaffariSystem::section3();
        assert_eq!(p.lyapunov(1.0).unwrap().alphas(), &[1.0, 1.0]);

        let p = GhaffariSystem::new(1.0, 2.0, 6.0, 1.0).unwrap();
        assert_eq!(p.lyapunov(1.0).unwrap().alphas(), &[3.0, 1.0]);
    }

    #[test]
    fn tau_l_hand_values() {
        let p = GhaffariSystem::section3();
        let t = p.tau_l([1.0, 1.0], &st(&[0.5, 0.01])).unwrap();
        assert!((t - 12.505003749500123).abs() / t < 1e-14);

        // (A^2 + C^2) / (2A) at (1, 0)
        let t = p.tau_l([1.0, 1.0], &st(&[1.0, 0.0])).unwrap();
        assert!((t - 3.205).abs() < 1e-14);

        assert_eq!(
            p.tau_l([1.0, 1.0], &st(&[0.0, 0.0])),
            Err(Error::BoundUndefinedAtEquilibrium)
        );
    }

    #[test]
    fn tau_l_matches_generic_bound() {
        let p = GhaffariSystem::section3();
        let sys = p.system();
        let v = p.lyapunov(1.0).unwrap();
        for y in [
            st(&[0.5, 0.01]),
            st(&[-1.3, 2.2]),
            st(&[1e-4, -3.0]),
            st(&[7.0, 7.0]),
        ] {
            let specialized = p.tau_l([1.0, 1.0], &y).unwrap();
            let generic = tau_lyapunov_bound(&v, &sys, &y).unwrap();
            assert!((specialized - generic).abs() <= 1e-12 * generic.abs().max(1.0));
        }
    }

    #[test]
    fn linear_decay_exact_solution() {
        let p = LinearDecay1D::new(2.0).unwrap();
        assert_eq!(p.exact(3.0, 0.0), 3.0);
        assert!((p.exact(1.0, 1.0) - libm::exp(-2.0)).abs() < 1e-16);
    }

    #[test]
    fn demonstration_systems_are_quasi_positive() {
        let cd = CoupledDecay::new(0.5).unwrap();
        assert!(check_quasi_positivity(&cd.system(), 200, &[5.0, 5.0], 3)
            .unwrap()
            .is_clean());
        let se = SymmetricExchange::new(1.0).unwrap();
        assert!(check_quasi_positivity(&se.system(), 200, &[5.0, 5.0], 3)
            .unwrap()
            .is_clean());
    }
}

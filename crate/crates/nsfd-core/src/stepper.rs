//! The explicit NSFD update, denominator functions, weight functions, and
//! the time-stepping loop.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, StepError};
use crate::lyapunov::{tau_lyapunov_bound, QuadraticLyapunov};
use crate::positivity::{tau_combined, tau_positivity};
use crate::state::State;
use crate::system::OdeSystem;

/// The step-size transform `phi` in the nonstandard difference quotient
/// `(y^{k+1} - y^k) / phi(dt)`. Must satisfy `phi(dt) > 0` for `dt > 0`
/// and `phi(dt) = dt + O(dt^2)`.
#[derive(Clone)]
pub enum DenominatorFunction {
    /// `phi(dt) = dt`, the classical choice.
    Identity,
    /// `phi(dt) = 1 - exp(-dt)`, common in the NSFD literature.
    Exponential,
    /// A user-supplied transform. The caller is responsible for the
    /// positivity and consistency conditions.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl core::fmt::Debug for DenominatorFunction {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DenominatorFunction::Identity => f.write_str("Identity"),
            DenominatorFunction::Exponential => f.write_str("Exponential"),
            DenominatorFunction::Custom(_) => f.write_str("Custom"),
        }
    }
}

impl DenominatorFunction {
    pub fn eval(&self, dt: f64) -> f64 {
        match self {
            DenominatorFunction::Identity => dt,
            DenominatorFunction::Exponential => -libm::expm1(-dt),
            DenominatorFunction::Custom(f) => f(dt),
        }
    }
}

type WeightFn = dyn Fn(&State) -> Result<f64, Error> + Send + Sync;

/// The scalar weight field `tau(y) >= 0` entering the NSFD denominator.
///
/// Larger weights shorten the effective step. The named constructors build
/// the weights used by the dissipativity and positivity theorems; `tau_L`
/// and `tau_P` are pointwise lower bounds, and any nonnegative margin may
/// be added on top.
#[derive(Clone)]
pub struct WeightFunction {
    eval: Arc<WeightFn>,
}

impl core::fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("WeightFunction")
    }
}

impl WeightFunction {
    pub fn constant(value: f64) -> Result<Self, Error> {
        if value < 0.0 || !value.is_finite() {
            return Err(Error::NegativeWeight { value });
        }
        Ok(WeightFunction {
            eval: Arc::new(move |_| Ok(value)),
        })
    }

    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(&State) -> Result<f64, Error> + Send + Sync + 'static,
    {
        WeightFunction { eval: Arc::new(f) }
    }

    /// `tau(y) = tau_L(y) + margin`, the Lyapunov-preserving weight.
    ///
    /// Inside the equilibrium proximity guard, where the bound is formally
    /// undefined, the weight evaluates to infinity; the stepper then leaves
    /// the state unchanged, which is the correct limit of the update as
    /// `tau` grows.
    pub fn from_lyapunov_bound(
        v: QuadraticLyapunov,
        sys: OdeSystem,
        margin: f64,
    ) -> Result<Self, Error> {
        check_margin(margin)?;
        Ok(WeightFunction {
            eval: Arc::new(move |y| match tau_lyapunov_bound(&v, &sys, y) {
                Ok(tau) => Ok(tau + margin),
                Err(Error::BoundUndefinedAtEquilibrium) => Ok(f64::INFINITY),
                Err(e) => Err(e),
            }),
        })
    }

    /// `tau(y) = tau_P(y) + margin`, the positivity-preserving weight.
    pub fn from_positivity_bound(sys: OdeSystem, margin: f64) -> Result<Self, Error> {
        check_margin(margin)?;
        Ok(WeightFunction {
            eval: Arc::new(move |y| Ok(tau_positivity(&sys, y)? + margin)),
        })
    }

    /// `tau(y) = max(tau_L(y), tau_P(y)) + margin`, satisfying both the
    /// dissipativity and the positivity bound simultaneously. Evaluates to
    /// infinity inside the equilibrium proximity guard, like
    /// [`from_lyapunov_bound`](Self::from_lyapunov_bound).
    pub fn combined(
        v: QuadraticLyapunov,
        sys: OdeSystem,
        margin: f64,
    ) -> Result<Self, Error> {
        check_margin(margin)?;
        Ok(WeightFunction {
            eval: Arc::new(move |y| match tau_combined(&v, &sys, y, margin) {
                Ok(tau) => Ok(tau),
                Err(Error::BoundUndefinedAtEquilibrium) => Ok(f64::INFINITY),
                Err(e) => Err(e),
            }),
        })
    }

    pub fn eval(&self, y: &State) -> Result<f64, Error> {
        let tau = (self.eval)(y)?;
        if tau.is_nan() {
            return Err(Error::NonFinite);
        }
        if tau < 0.0 {
            return Err(Error::NegativeWeight { value: tau });
        }
        Ok(tau)
    }
}

fn check_margin(margin: f64) -> Result<(), Error> {
    if margin < 0.0 || !margin.is_finite() {
        return Err(Error::NegativeWeight { value: margin });
    }
    Ok(())
}

/// Per-step data handed to an integration observer: the Lyapunov function
/// to evaluate and a callback receiving `(k, t_k, y^k, V(y^k), dV(y^k))`.
/// `dV` is `None` on the final state of the trajectory.
pub struct Observer<'a> {
    pub lyapunov: &'a QuadraticLyapunov,
    pub on_step: &'a mut dyn FnMut(usize, f64, &State, f64, Option<f64>),
}

impl core::fmt::Debug for Observer<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("Observer")
    }
}

/// The explicit scheme
/// `y_i^{k+1} = y_i^k + phi(dt) f_i(y^k) / (1 + phi(dt) tau(y^k))`.
#[derive(Debug, Clone)]
pub struct NsfdScheme {
    system: OdeSystem,
    phi: DenominatorFunction,
    tau: WeightFunction,
}

impl NsfdScheme {
    pub fn new(system: OdeSystem, phi: DenominatorFunction, tau: WeightFunction) -> Self {
        NsfdScheme { system, phi, tau }
    }

    pub fn system(&self) -> &OdeSystem {
        &self.system
    }

    /// One NSFD update. If `f(y) = 0` the state is returned unchanged
    /// without consulting the weight, so fixed points are exact and the
    /// weight's singularity at the equilibrium is never touched.
    pub fn step(&self, y: &State, dt: f64) -> Result<State, Error> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::NonPositiveParameter {
                name: "dt",
                value: dt,
            });
        }
        let f = self.system.rhs(y)?;
        if f.as_slice().iter().all(|&fi| fi == 0.0) {
            return Ok(y.clone());
        }
        let tau = self.tau.eval(y)?;
        let phi = self.phi.eval(dt);
        if !(phi > 0.0) {
            return Err(Error::NonPositiveParameter {
                name: "phi(dt)",
                value: phi,
            });
        }
        let denom = 1.0 + phi * tau;
        let next: Vec<f64> = y
            .as_slice()
            .iter()
            .zip(f.as_slice())
            .map(|(&yi, &fi)| {
                // phi * f_i first, then the division: if tau is huge the
                // denominator saturates and the increment goes to 0, the
                // mathematical limit.
                let inc = (phi * fi) / denom;
                yi + inc
            })
            .collect();
        State::new(next)
    }

    /// `V(y^{k+1}) - V(y^k)` computed by actually taking the step.
    pub fn delta_v_direct(
        &self,
        v: &QuadraticLyapunov,
        y: &State,
        dt: f64,
    ) -> Result<f64, Error> {
        let next = self.step(y, dt)?;
        Ok(v.value(&next)? - v.value(y)?)
    }

    /// `V(y^{k+1}) - V(y^k)` via the closed-form identity
    ///
    /// ```text
    /// dV = r * (Vdot(y) + r * sum_i alpha_i f_i(y)^2),   r = phi / (1 + phi tau)
    /// ```
    ///
    /// which must agree with [`delta_v_direct`](Self::delta_v_direct) to
    /// relative `1e-10` at any state and step size.
    pub fn delta_v_closed_form(
        &self,
        v: &QuadraticLyapunov,
        y: &State,
        dt: f64,
    ) -> Result<f64, Error> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::NonPositiveParameter {
                name: "dt",
                value: dt,
            });
        }
        let f = self.system.rhs(y)?;
        if f.as_slice().iter().all(|&fi| fi == 0.0) {
            return Ok(0.0);
        }
        let tau = self.tau.eval(y)?;
        let phi = self.phi.eval(dt);
        let r = phi / (1.0 + phi * tau);
        let rate = v.rate(&self.system, y)?;
        let sum_af2: f64 = v
            .alphas()
            .iter()
            .zip(f.as_slice())
            .map(|(&a, &fi)| a * fi * fi)
            .sum();
        Ok(r * (rate + r * sum_af2))
    }

    /// Streams `steps` NSFD updates, returning only the final state.
    /// Memory stays O(1) in the step count; pair with an [`Observer`] to
    /// record the trajectory incrementally.
    pub fn run(
        &self,
        y0: &State,
        dt: f64,
        steps: usize,
        mut observer: Option<Observer<'_>>,
    ) -> Result<State, StepError> {
        if steps == 0 {
            return Err(StepError {
                step: 0,
                source: Error::NonPositiveParameter {
                    name: "steps",
                    value: 0.0,
                },
            });
        }
        let mut current = y0.clone();
        let mut v_current = match &observer {
            Some(obs) => Some(
                obs.lyapunov
                    .value(&current)
                    .map_err(|source| StepError { step: 0, source })?,
            ),
            None => None,
        };
        for k in 0..steps {
            let next = self
                .step(&current, dt)
                .map_err(|source| StepError { step: k, source })?;
            if let Some(obs) = observer.as_mut() {
                let v_next = obs
                    .lyapunov
                    .value(&next)
                    .map_err(|source| StepError { step: k, source })?;
                let v_cur = v_current.unwrap();
                (obs.on_step)(k, k as f64 * dt, &current, v_cur, Some(v_next - v_cur));
                v_current = Some(v_next);
            }
            current = next;
        }
        if let Some(obs) = observer.as_mut() {
            (obs.on_step)(
                steps,
                steps as f64 * dt,
                &current,
                v_current.unwrap(),
                None,
            );
        }
        Ok(current)
    }

    /// Dense integration: returns the full trajectory `[y^0, ..., y^steps]`.
    pub fn integrate(
        &self,
        y0: &State,
        dt: f64,
        steps: usize,
        observer: Option<Observer<'_>>,
    ) -> Result<Vec<State>, StepError> {
        let mut trajectory = Vec::with_capacity(steps + 1);
        trajectory.push(y0.clone());
        let mut current = y0.clone();
        let mut observer = observer;
        let mut v_current = match &observer {
            Some(obs) => Some(
                obs.lyapunov
                    .value(&current)
                    .map_err(|source| StepError { step: 0, source })?,
            ),
            None => None,
        };
        if steps == 0 {
            return Err(StepError {
                step: 0,
                source: Error::NonPositiveParameter {
                    name: "steps",
                    value: 0.0,
                },
            });
        }
        for k in 0..steps {
            let next = self
                .step(&current, dt)
                .map_err(|source| StepError { step: k, source })?;
            if let Some(obs) = observer.as_mut() {
                let v_next = obs
                    .lyapunov
                    .value(&next)
                    .map_err(|source| StepError { step: k, source })?;
                let v_cur = v_current.unwrap();
                (obs.on_step)(k, k as f64 * dt, &current, v_cur, Some(v_next - v_cur));
                v_current = Some(v_next);
            }
            trajectory.push(next.clone());
            current = next;
        }
        if let Some(obs) = observer.as_mut() {
            (obs.on_step)(
                steps,
                steps as f64 * dt,
                &current,
                v_current.unwrap(),
                None,
            );
        }
        Ok(trajectory)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::GhaffariSystem;
    use alloc::vec;

    fn st(c: &[f64]) -> State {
        State::new(c.to_vec()).unwrap()
    }

    fn section3_scheme() -> (NsfdScheme, QuadraticLyapunov) {
        let p = GhaffariSystem::section3();
        let sys = p.system();
        let v = p.lyapunov(1.0).unwrap();
        let tau =
            WeightFunction::from_lyapunov_bound(v.clone(), sys.clone(), 0.001).unwrap();
        (
            NsfdScheme::new(sys, DenominatorFunction::Identity, tau),
            v,
        )
    }

    #[test]
    fn denominator_functions_are_consistent() {
        for phi in [DenominatorFunction::Identity, DenominatorFunction::Exponential] {
            for dt in [1e-3, 1e-4, 1e-5] {
                let p = phi.eval(dt);
                assert!(p > 0.0);
                assert!((p / dt - 1.0).abs() <= 10.0 * dt);
            }
        }
        assert!(DenominatorFunction::Exponential.eval(1e3) > 0.0);
    }

    #[test]
    fn step_fixes_equilibrium_exactly() {
        let (scheme, _) = section3_scheme();
        let eq = st(&[0.0, 0.0]);
        for dt in [1e-6, 1.0, 1e3] {
            assert_eq!(scheme.step(&eq, dt).unwrap(), eq);
        }
    }

    #[test]
    fn step_matches_reference_evaluation() {
        let (scheme, _) = section3_scheme();
        let next = scheme.step(&st(&[0.5, 0.01]), 1.0).unwrap();
        assert!((next[0] - 0.4992595885366632).abs() < 1e-15);
        assert!((next[1] - (-0.027020580570955764)).abs() < 1e-15);
    }

    #[test]
    fn step_with_zero_weight_is_euler() {
        let sys = OdeSystem::new(st(&[0.0]), |y, out| out[0] = -y[0]).unwrap();
        let scheme = NsfdScheme::new(
            sys,
            DenominatorFunction::Identity,
            WeightFunction::constant(0.0).unwrap(),
        );
        assert_eq!(scheme.step(&st(&[2.0]), 0.5).unwrap()[0], 1.0);
    }

    #[test]
    fn negative_weight_is_rejected() {
        let sys = OdeSystem::new(st(&[0.0]), |y, out| out[0] = -y[0]).unwrap();
        let scheme = NsfdScheme::new(
            sys,
            DenominatorFunction::Identity,
            WeightFunction::custom(|_| Ok(-1.0)),
        );
        assert!(matches!(
            scheme.step(&st(&[2.0]), 0.5),
            Err(Error::NegativeWeight { .. })
        ));
    }

    #[test]
    fn infinite_weight_freezes_the_state() {
        let sys = OdeSystem::new(st(&[0.0]), |y, out| out[0] = -y[0]).unwrap();
        let scheme = NsfdScheme::new(
            sys,
            DenominatorFunction::Identity,
            WeightFunction::custom(|_| Ok(f64::INFINITY)),
        );
        let y = st(&[2.0]);
        assert_eq!(scheme.step(&y, 0.5).unwrap(), y);
    }

    #[test]
    fn delta_v_reference_values() {
        let (scheme, v) = section3_scheme();
        let y = st(&[0.5, 0.01]);
        let dv = scheme.delta_v_direct(&v, &y, 1.0).unwrap();
        assert!((dv - (-0.00010975147981026612)).abs() < 1e-16);
        let dv_cf = scheme.delta_v_closed_form(&v, &y, 1.0).unwrap();
        assert!((dv_cf - dv).abs() <= 1e-10 * dv.abs().max(1.0));

        assert_eq!(scheme.delta_v_direct(&v, &st(&[0.0, 0.0]), 1.0).unwrap(), 0.0);
        assert_eq!(
            scheme.delta_v_closed_form(&v, &st(&[0.0, 0.0]), 1.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn delta_v_euler_degenerate_hand_case() {
        let sys = OdeSystem::new(st(&[0.0]), |y, out| out[0] = -y[0]).unwrap();
        let v = QuadraticLyapunov::new(vec![1.0], st(&[0.0])).unwrap();
        let scheme = NsfdScheme::new(
            sys,
            DenominatorFunction::Identity,
            WeightFunction::constant(0.0).unwrap(),
        );
        let y = st(&[2.0]);
        assert_eq!(scheme.delta_v_direct(&v, &y, 0.5).unwrap(), -3.0);
        assert_eq!(scheme.delta_v_closed_form(&v, &y, 0.5).unwrap(), -3.0);
    }

    #[test]
    fn integrate_shapes_and_observer() {
        let (scheme, v) = section3_scheme();
        let y0 = st(&[0.5, 0.01]);
        let mut rows = vec![];
        let mut on_step = |k: usize, t: f64, _y: &State, vv: f64, dv: Option<f64>| {
            rows.push((k, t, vv, dv));
        };
        let traj = scheme
            .integrate(
                &y0,
                0.8,
                5,
                Some(Observer {
                    lyapunov: &v,
                    on_step: &mut on_step,
                }),
            )
            .unwrap();
        assert_eq!(traj.len(), 6);
        assert_eq!(traj[0], y0);
        assert_eq!(rows.len(), 6);
        assert!(rows[5].3.is_none());
        // observer dv matches the V series
        for k in 0..5 {
            assert!((rows[k].3.unwrap() - (rows[k + 1].2 - rows[k].2)).abs() < 1e-15);
        }
        // single step agrees with step()
        let one = scheme.integrate(&y0, 0.8, 1, None).unwrap();
        assert_eq!(one[1], scheme.step(&y0, 0.8).unwrap());
    }

    #[test]
    fn constant_trajectory_from_equilibrium() {
        let (scheme, _) = section3_scheme();
        let eq = st(&[0.0, 0.0]);
        let traj = scheme.integrate(&eq, 10.0, 7, None).unwrap();
        assert!(traj.iter().all(|y| *y == eq));
    }

    #[test]
    fn zero_steps_is_an_error() {
        let (scheme, _) = section3_scheme();
        assert!(scheme.integrate(&st(&[0.5, 0.01]), 1.0, 0, None).is_err());
    }

    #[test]
    fn long_run_has_monotone_v() {
        let (scheme, v) = section3_scheme();
        let mut monotone = true;
        let mut on_step = |_k: usize, _t: f64, _y: &State, _v: f64, dv: Option<f64>| {
            if let Some(dv) = dv {
                if dv >= 0.0 {
                    monotone = false;
                }
            }
        };
        scheme
            .run(
                &st(&[0.5, 0.01]),
                0.8,
                1250,
                Some(Observer {
                    lyapunov: &v,
                    on_step: &mut on_step,
                }),
            )
            .unwrap();
        assert!(monotone);
    }
}

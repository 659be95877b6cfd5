//! Classical explicit one-step integrators used as comparison baselines
//! and as the reference-solution generator.

use alloc::vec::Vec;

use crate::error::Error;
use crate::state::State;
use crate::system::OdeSystem;

/// Forward Euler: `y + dt f(y)`.
pub fn euler_step(sys: &OdeSystem, y: &State, dt: f64) -> Result<State, Error> {
    check_dt(dt)?;
    let f = sys.rhs(y)?;
    combine(y, &[(dt, &f)])
}

/// Explicit trapezoidal (Heun) method:
/// `k1 = f(y)`, `k2 = f(y + dt k1)`, `y + dt/2 (k1 + k2)`.
pub fn rk2_trapezoidal_step(sys: &OdeSystem, y: &State, dt: f64) -> Result<State, Error> {
    check_dt(dt)?;
    let k1 = sys.rhs(y)?;
    let k2 = sys.rhs(&combine(y, &[(dt, &k1)])?)?;
    combine(y, &[(dt / 2.0, &k1), (dt / 2.0, &k2)])
}

/// Classical four-stage Runge-Kutta.
pub fn rk4_step(sys: &OdeSystem, y: &State, dt: f64) -> Result<State, Error> {
    check_dt(dt)?;
    let k1 = sys.rhs(y)?;
    let k2 = sys.rhs(&combine(y, &[(dt / 2.0, &k1)])?)?;
    let k3 = sys.rhs(&combine(y, &[(dt / 2.0, &k2)])?)?;
    let k4 = sys.rhs(&combine(y, &[(dt, &k3)])?)?;
    combine(
        y,
        &[
            (dt / 6.0, &k1),
            (dt / 3.0, &k2),
            (dt / 3.0, &k3),
            (dt / 6.0, &k4),
        ],
    )
}

fn check_dt(dt: f64) -> Result<(), Error> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::NonPositiveParameter {
            name: "dt",
            value: dt,
        });
    }
    Ok(())
}

fn combine(y: &State, terms: &[(f64, &State)]) -> Result<State, Error> {
    let out: Vec<f64> = y
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, &yi)| terms.iter().fold(yi, |acc, (w, k)| acc + w * k[i]))
        .collect();
    State::new(out)
}

/// Identifier for the three baseline integrators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OneStepMethod {
    Euler,
    Rk2Trapezoidal,
    Rk4,
}

impl OneStepMethod {
    pub fn step(&self, sys: &OdeSystem, y: &State, dt: f64) -> Result<State, Error> {
        match self {
            OneStepMethod::Euler => euler_step(sys, y, dt),
            OneStepMethod::Rk2Trapezoidal => rk2_trapezoidal_step(sys, y, dt),
            OneStepMethod::Rk4 => rk4_step(sys, y, dt),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OneStepMethod::Euler => "euler",
            OneStepMethod::Rk2Trapezoidal => "rk2",
            OneStepMethod::Rk4 => "rk4",
        }
    }
}

/// A possibly truncated trajectory. Divergence to a non-finite state is a
/// first-class result here: `truncated_at` carries the index of the first
/// step that could not be completed, and `states` holds everything up to
/// and including the last finite state.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<State>,
    pub truncated_at: Option<usize>,
}

impl Trajectory {
    pub fn final_state(&self) -> &State {
        self.states.last().expect("trajectory holds at least y0")
    }
}

/// Repeated application of `method`, retaining every state. The observer,
/// when supplied, receives `(k, t_k, y^k)` for each retained state.
pub fn integrate_with(
    method: OneStepMethod,
    sys: &OdeSystem,
    y0: &State,
    dt: f64,
    steps: usize,
    mut observer: Option<&mut dyn FnMut(usize, f64, &State)>,
) -> Result<Trajectory, Error> {
    check_dt(dt)?;
    let mut states = Vec::with_capacity(steps + 1);
    let mut current = y0.clone();
    if let Some(obs) = observer.as_mut() {
        obs(0, 0.0, &current);
    }
    states.push(current.clone());
    for k in 0..steps {
        match method.step(sys, &current, dt) {
            Ok(next) => {
                if let Some(obs) = observer.as_mut() {
                    obs(k + 1, (k + 1) as f64 * dt, &next);
                }
                states.push(next.clone());
                current = next;
            }
            Err(Error::NonFinite) => {
                return Ok(Trajectory {
                    states,
                    truncated_at: Some(k),
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Trajectory {
        states,
        truncated_at: None,
    })
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
    fn all_methods_fix_the_equilibrium() {
        let p = GhaffariSystem::section3();
        let sys = p.system();
        let eq = st(&[0.0, 0.0]);
        for m in [
            OneStepMethod::Euler,
            OneStepMethod::Rk2Trapezoidal,
            OneStepMethod::Rk4,
        ] {
            for dt in [1e-6, 1.0, 1e3] {
                assert_eq!(m.step(&sys, &eq, dt).unwrap(), eq);
            }
        }
    }

    #[test]
    fn euler_hand_value() {
        let sys = decay_1d();
        assert_eq!(euler_step(&sys, &st(&[2.0]), 0.5).unwrap()[0], 1.0);
    }

    #[test]
    fn rk2_hand_value() {
        // k1 = -2, k2 = f(2 + 0.5 * (-2)) = -1, result 2 + 0.25 * (-3) = 1.25
        let sys = decay_1d();
        assert_eq!(rk2_trapezoidal_step(&sys, &st(&[2.0]), 0.5).unwrap()[0], 1.25);
    }

    #[test]
    fn rk4_hand_value() {
        // one RK4 step on y' = -y reproduces the degree-4 Taylor truncation
        // of exp(-dt)
        let sys = decay_1d();
        let y = rk4_step(&sys, &st(&[1.0]), 0.1).unwrap();
        assert!((y[0] - 0.9048375).abs() < 1e-15);
    }

    #[test]
    fn euler_trajectory_shows_lyapunov_violation_at_large_dt() {
        let p = GhaffariSystem::section3();
        let sys = p.system();
        let v = p.lyapunov(1.0).unwrap();
        let traj = integrate_with(
            OneStepMethod::Euler,
            &sys,
            &st(&[0.5, 0.01]),
            0.8,
            2000,
            None,
        )
        .unwrap();
        let mut violated = false;
        for w in traj.states.windows(2) {
            if v.value(&w[1]).unwrap() > v.value(&w[0]).unwrap() {
                violated = true;
                break;
            }
        }
        assert!(violated);
    }

    #[test]
    fn divergence_truncates_with_index() {
        // y' = y^3 with Euler at a large step blows up fast
        let sys = OdeSystem::new(st(&[0.0]), |y, out| out[0] = y[0] * y[0] * y[0]).unwrap();
        let traj = integrate_with(
            OneStepMethod::Euler,
            &sys,
            &st(&[10.0]),
            10.0,
            100,
            None,
        )
        .unwrap();
        let k = traj.truncated_at.expect("must diverge");
        assert_eq!(traj.states.len(), k + 1);
        assert!(traj.final_state().as_slice().iter().all(|c| c.is_finite()));
    }

    #[test]
    fn observer_sees_every_state() {
        let sys = decay_1d();
        let mut seen = vec![];
        let mut obs = |k: usize, t: f64, y: &State| seen.push((k, t, y[0]));
        integrate_with(
            OneStepMethod::Rk4,
            &sys,
            &st(&[1.0]),
            0.25,
            4,
            Some(&mut obs),
        )
        .unwrap();
        assert_eq!(seen.len(), 5);
        assert_eq!(seen[0], (0, 0.0, 1.0));
        assert_eq!(seen[4].1, 1.0);
    }

    #[test]
    fn single_step_integration_matches_step() {
        let sys = decay_1d();
        let y0 = st(&[2.0]);
        let traj =
            integrate_with(OneStepMethod::Rk2Trapezoidal, &sys, &y0, 0.5, 1, None).unwrap();
        assert_eq!(
            traj.states[1],
            rk2_trapezoidal_step(&sys, &y0, 0.5).unwrap()
        );
    }
}

//! Experiment configuration: JSON manifests mirrored by CLI flags.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use nsfd_core::problems::{CoupledDecay, GhaffariSystem, LinearDecay1D};
use nsfd_core::reference::OneStepMethod;
use nsfd_core::stepper::{DenominatorFunction, NsfdScheme, WeightFunction};
use nsfd_core::{Error, OdeSystem, QuadraticLyapunov, State};

use crate::CliError;

fn default_alpha2() -> f64 {
    1.0
}

fn default_coupling() -> f64 {
    0.5
}

fn default_margin() -> f64 {
    0.001
}

/// Which built-in system an experiment runs on.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ProblemConfig {
    Ghaffari {
        a: f64,
        b: f64,
        c: f64,
        d: f64,
        #[serde(default = "default_alpha2")]
        alpha2: f64,
    },
    LinearDecay {
        rate: f64,
    },
    CoupledDecay {
        #[serde(default = "default_coupling")]
        coupling: f64,
    },
}

impl ProblemConfig {
    pub fn section3() -> Self {
        let p = GhaffariSystem::section3();
        ProblemConfig::Ghaffari {
            a: p.a,
            b: p.b,
            c: p.c,
            d: p.d,
            alpha2: 1.0,
        }
    }

    pub fn build(&self) -> Result<(OdeSystem, QuadraticLyapunov), CliError> {
        let out = match self {
            ProblemConfig::Ghaffari { a, b, c, d, alpha2 } => {
                let p = GhaffariSystem::new(*a, *b, *c, *d).map_err(config_err)?;
                (p.system(), p.lyapunov(*alpha2).map_err(config_err)?)
            }
            ProblemConfig::LinearDecay { rate } => {
                let p = LinearDecay1D::new(*rate).map_err(config_err)?;
                (p.system(), p.lyapunov())
            }
            ProblemConfig::CoupledDecay { coupling } => {
                let p = CoupledDecay::new(*coupling).map_err(config_err)?;
                (p.system(), p.lyapunov())
            }
        };
        Ok(out)
    }

    /// Whether the nonnegative orthant is expected to be invariant; decides
    /// where random property-suite states are drawn from.
    pub fn is_quasi_positive(&self) -> bool {
        matches!(self, ProblemConfig::CoupledDecay { .. })
    }
}

fn config_err(e: Error) -> CliError {
    CliError::Config(e.to_string())
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum MethodId {
    Nsfd,
    Euler,
    Rk2,
    Rk4,
}

impl MethodId {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "nsfd" => Ok(MethodId::Nsfd),
            "euler" => Ok(MethodId::Euler),
            "rk2" => Ok(MethodId::Rk2),
            "rk4" => Ok(MethodId::Rk4),
            other => Err(CliError::Config(format!(
                "unknown method `{other}` (expected nsfd|euler|rk2|rk4)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MethodId::Nsfd => "nsfd",
            MethodId::Euler => "euler",
            MethodId::Rk2 => "rk2",
            MethodId::Rk4 => "rk4",
        }
    }
}

/// How the NSFD weight is assembled. The margin from the experiment config
/// is added on top of the lyapunov/positivity/combined bounds.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum WeightRecipe {
    Lyapunov,
    Positivity,
    Combined,
    Constant(f64),
}

impl WeightRecipe {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "lyapunov" => Ok(WeightRecipe::Lyapunov),
            "positivity" => Ok(WeightRecipe::Positivity),
            "combined" => Ok(WeightRecipe::Combined),
            other => {
                if let Some(v) = other.strip_prefix("constant:") {
                    let value: f64 = v.parse().map_err(|_| {
                        CliError::Config(format!("bad constant weight `{v}`"))
                    })?;
                    Ok(WeightRecipe::Constant(value))
                } else {
                    Err(CliError::Config(format!(
                        "unknown weight `{other}` (expected lyapunov|positivity|combined|constant:<v>)"
                    )))
                }
            }
        }
    }

    pub fn build(
        &self,
        v: &QuadraticLyapunov,
        sys: &OdeSystem,
        margin: f64,
    ) -> Result<WeightFunction, CliError> {
        match self {
            WeightRecipe::Lyapunov => {
                WeightFunction::from_lyapunov_bound(v.clone(), sys.clone(), margin)
            }
            WeightRecipe::Positivity => {
                WeightFunction::from_positivity_bound(sys.clone(), margin)
            }
            WeightRecipe::Combined => {
                WeightFunction::combined(v.clone(), sys.clone(), margin)
            }
            WeightRecipe::Constant(value) => WeightFunction::constant(*value),
        }
        .map_err(config_err)
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum PhiId {
    #[default]
    Identity,
    Exponential,
}

impl PhiId {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "identity" => Ok(PhiId::Identity),
            "exponential" => Ok(PhiId::Exponential),
            other => Err(CliError::Config(format!(
                "unknown denominator function `{other}` (expected identity|exponential)"
            ))),
        }
    }

    pub fn build(&self) -> DenominatorFunction {
        match self {
            PhiId::Identity => DenominatorFunction::Identity,
            PhiId::Exponential => DenominatorFunction::Exponential,
        }
    }
}

/// One experiment manifest. Exactly one of `steps` / `final_time` must be
/// set; the other is derived via `steps = ceil(final_time / dt)`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemConfig,
    pub method: MethodId,
    pub dt: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_time: Option<f64>,
    pub y0: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<WeightRecipe>,
    #[serde(default = "default_margin")]
    pub margin: f64,
    #[serde(default)]
    pub phi: PhiId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    /// The default section-3 setup: NSFD on the test system over
    /// `t in [0, 1000]`.
    pub fn section3_default() -> Self {
        ExperimentConfig {
            problem: ProblemConfig::section3(),
            method: MethodId::Nsfd,
            dt: 1.0,
            steps: None,
            final_time: Some(1000.0),
            y0: vec![0.5, 0.01],
            weight: None,
            margin: default_margin(),
            phi: PhiId::Identity,
            out: None,
            seed: 0,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("bad config: {e}")))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<Experiment, CliError> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(CliError::Config(format!("dt must be positive, got {}", self.dt)));
        }
        let steps = match (self.steps, self.final_time) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "give exactly one of `steps` and `final_time`, not both".into(),
                ))
            }
            (None, None) => {
                return Err(CliError::Config(
                    "give exactly one of `steps` and `final_time`".into(),
                ))
            }
            (Some(s), None) => s,
            (None, Some(t)) => {
                if !(t > 0.0) || !t.is_finite() {
                    return Err(CliError::Config(format!(
                        "final_time must be positive, got {t}"
                    )));
                }
                (t / self.dt).ceil() as u64
            }
        };
        if steps < 1 {
            return Err(CliError::Config("steps must be at least 1".into()));
        }
        if self.weight.is_some() && self.method != MethodId::Nsfd {
            return Err(CliError::Config(
                "a weight recipe is only accepted when method = nsfd".into(),
            ));
        }
        if !(self.margin >= 0.0) || !self.margin.is_finite() {
            return Err(CliError::Config(format!(
                "margin must be nonnegative, got {}",
                self.margin
            )));
        }
        let (system, lyapunov) = self.problem.build()?;
        if self.y0.len() != system.dim() {
            return Err(CliError::Config(format!(
                "y0 has {} components but the problem has dimension {}",
                self.y0.len(),
                system.dim()
            )));
        }
        let y0 = State::new(self.y0.clone())
            .map_err(|e| CliError::Config(format!("bad y0: {e}")))?;
        let stepper = match self.method {
            MethodId::Nsfd => {
                let recipe = self.weight.unwrap_or(WeightRecipe::Lyapunov);
                let tau = recipe.build(&lyapunov, &system, self.margin)?;
                Stepper::Nsfd(NsfdScheme::new(system.clone(), self.phi.build(), tau))
            }
            MethodId::Euler => Stepper::Classic(OneStepMethod::Euler),
            MethodId::Rk2 => Stepper::Classic(OneStepMethod::Rk2Trapezoidal),
            MethodId::Rk4 => Stepper::Classic(OneStepMethod::Rk4),
        };
        Ok(Experiment {
            system,
            lyapunov,
            stepper,
            dt: self.dt,
            steps,
            y0,
            out: self.out.clone(),
            seed: self.seed,
        })
    }

    /// Same configuration rebuilt around a different method; the weight
    /// recipe is kept only when the target is NSFD.
    pub fn with_method(&self, method: MethodId) -> Self {
        let mut c = self.clone();
        c.method = method;
        if method != MethodId::Nsfd {
            c.weight = None;
        }
        c
    }
}

/// A validated, ready-to-run experiment.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub system: OdeSystem,
    pub lyapunov: QuadraticLyapunov,
    pub stepper: Stepper,
    pub dt: f64,
    pub steps: u64,
    pub y0: State,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub enum Stepper {
    Nsfd(NsfdScheme),
    Classic(OneStepMethod),
}

impl Stepper {
    pub fn step(&self, sys: &OdeSystem, y: &State, dt: f64) -> Result<State, Error> {
        match self {
            Stepper::Nsfd(scheme) => scheme.step(y, dt),
            Stepper::Classic(m) => m.step(sys, y, dt),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrips_through_json() {
        let cfg = ExperimentConfig::section3_default();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back = ExperimentConfig::from_json(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn derives_steps_from_final_time() {
        let cfg = ExperimentConfig {
            dt: 0.8,
            ..ExperimentConfig::section3_default()
        };
        let exp = cfg.validate().unwrap();
        assert_eq!(exp.steps, 1250);
    }

    #[test]
    fn rejects_zero_steps_and_double_spec() {
        let mut cfg = ExperimentConfig::section3_default();
        cfg.final_time = None;
        cfg.steps = Some(0);
        assert!(cfg.validate().is_err());
        cfg.steps = Some(10);
        cfg.final_time = Some(1.0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn weight_only_for_nsfd() {
        let mut cfg = ExperimentConfig::section3_default();
        cfg.method = MethodId::Euler;
        cfg.weight = Some(WeightRecipe::Lyapunov);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn parses_weight_recipes() {
        assert_eq!(WeightRecipe::parse("lyapunov").unwrap(), WeightRecipe::Lyapunov);
        assert_eq!(
            WeightRecipe::parse("constant:0").unwrap(),
            WeightRecipe::Constant(0.0)
        );
        assert!(WeightRecipe::parse("nope").is_err());
    }

    #[test]
    fn y0_dimension_checked() {
        let mut cfg = ExperimentConfig::section3_default();
        cfg.y0 = vec![0.5];
        assert!(cfg.validate().is_err());
    }
}

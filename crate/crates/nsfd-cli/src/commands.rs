//! The four subcommands: run, compare, convergence, property-suite.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nsfd_core::positivity::check_quasi_positivity;
use nsfd_core::stepper::{NsfdScheme, WeightFunction};
use nsfd_core::{OdeSystem, QuadraticLyapunov, State};

use crate::config::{ExperimentConfig, MethodId, Stepper};
use crate::runner::{stream, RunSummary};
use crate::{csvio, CliError};

/// Runs one experiment, writing the CSV record to the configured path (or
/// `stdout` when none is given) and returning the summary.
pub fn cmd_run(cfg: &ExperimentConfig) -> Result<RunSummary, CliError> {
    let exp = cfg.validate()?;
    let dim = exp.system.dim();
    let mut writer: BufWriter<Box<dyn Write>> = match &exp.out {
        Some(path) => BufWriter::new(Box::new(
            File::create(path).map_err(|e| {
                CliError::Io(format!("cannot create {}: {e}", path.display()))
            })?,
        )),
        None => BufWriter::new(Box::new(std::io::stdout())),
    };
    csvio::write_header(&mut writer, dim)?;
    let summary = stream(&exp, |row| csvio::write_row(&mut writer, row))?;
    writer.flush().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(summary)
}

/// One line of the method-comparison table.
#[derive(Debug, Clone)]
pub struct CompareRow {
    pub method: MethodId,
    pub result: Result<RunSummary, CliError>,
}

impl CompareRow {
    pub fn render(&self) -> String {
        match &self.result {
            Ok(s) => format!(
                "{:<6} monotone_v={:<5} first_violation={:<8} final_norm={:<12} truncated_at={}",
                self.method.name(),
                s.monotone_decreasing,
                s.first_violation_step
                    .map_or_else(|| "-".to_string(), |k| k.to_string()),
                format!("{:.6e}", s.final_max_norm()),
                s.truncated_at
                    .map_or_else(|| "-".to_string(), |k| k.to_string()),
            ),
            Err(e) => format!("{:<6} error: {e}", self.method.name()),
        }
    }
}

/// Runs all four methods on bit-identical initial data and collects one
/// row per method. A failing member is reported in its row and does not
/// abort the others.
pub fn cmd_compare(cfg: &ExperimentConfig) -> Result<Vec<CompareRow>, CliError> {
    // validate the base config once so bad input exits before any run
    cfg.validate()?;
    let rows = [MethodId::Nsfd, MethodId::Euler, MethodId::Rk2, MethodId::Rk4]
        .into_iter()
        .map(|method| {
            let mut member = cfg.with_method(method);
            member.out = None;
            let result = member.validate().and_then(|exp| stream(&exp, |_| Ok(())));
            CompareRow { method, result }
        })
        .collect();
    Ok(rows)
}

pub fn write_compare_csv(rows: &[CompareRow], path: &Path) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path).map_err(|e| {
        CliError::Io(format!("cannot create {}: {e}", path.display()))
    })?);
    writeln!(w, "method,monotone_v,first_violation_step,final_norm,truncated_at")
        .map_err(|e| CliError::Io(e.to_string()))?;
    for row in rows {
        match &row.result {
            Ok(s) => writeln!(
                w,
                "{},{},{},{:e},{}",
                row.method.name(),
                s.monotone_decreasing,
                s.first_violation_step
                    .map_or_else(String::new, |k| k.to_string()),
                s.final_max_norm(),
                s.truncated_at.map_or_else(String::new, |k| k.to_string()),
            ),
            Err(e) => writeln!(w, "{},error,{e},,", row.method.name()),
        }
        .map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

/// Per-method convergence measurements: global error at the final time for
/// each step size, plus the fitted slope of `log(error)` vs `log(dt)`.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub method: MethodId,
    /// `(dt, error)`; an error below `1e-13` is the reference-degenerate
    /// case and is excluded from the fit.
    pub errors: Vec<(f64, f64)>,
    pub slope: Option<f64>,
}

impl ConvergenceRow {
    pub fn render(&self) -> String {
        let pts: Vec<String> = self
            .errors
            .iter()
            .map(|(dt, e)| {
                if *e < 1e-13 {
                    format!("dt={dt:e}: reference")
                } else {
                    format!("dt={dt:e}: {e:.6e}")
                }
            })
            .collect();
        format!(
            "{:<6} slope={} [{}]",
            self.method.name(),
            self.slope
                .map_or_else(|| "-".to_string(), |s| format!("{s:.3}")),
            pts.join(", ")
        )
    }
}

/// Measures convergence orders against an RK4 reference solution at
/// `reference_dt`. Every `dt` must be an integer multiple of
/// `reference_dt` so all runs share the same final time exactly.
pub fn cmd_convergence(
    cfg: &ExperimentConfig,
    dts: &[f64],
    reference_dt: f64,
) -> Result<Vec<ConvergenceRow>, CliError> {
    if dts.len() < 2 {
        return Err(CliError::Config(
            "convergence needs at least 2 step sizes".into(),
        ));
    }
    if !(reference_dt > 0.0) {
        return Err(CliError::Config("reference dt must be positive".into()));
    }
    let final_time = cfg.final_time.ok_or_else(|| {
        CliError::Config("convergence requires `final_time` in the config".into())
    })?;
    for &dt in dts {
        let ratio = dt / reference_dt;
        if ratio < 1.0 - 1e-9 || (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
            return Err(CliError::Config(format!(
                "dt = {dt} is not an integer multiple of reference dt = {reference_dt}"
            )));
        }
    }

    let reference = final_state_at(cfg, MethodId::Rk4, reference_dt, final_time)?;

    let mut rows = Vec::new();
    for method in [MethodId::Nsfd, MethodId::Euler, MethodId::Rk2, MethodId::Rk4] {
        let mut errors = Vec::new();
        for &dt in dts {
            let err = match final_state_at(cfg, method, dt, final_time) {
                Ok(y) => max_norm_diff(&y, &reference),
                Err(_) => f64::INFINITY,
            };
            errors.push((dt, err));
        }
        let fit: Vec<(f64, f64)> = errors
            .iter()
            .filter(|(_, e)| e.is_finite() && *e >= 1e-13)
            .map(|&(dt, e)| (dt.ln(), e.ln()))
            .collect();
        let slope = least_squares_slope(&fit);
        rows.push(ConvergenceRow {
            method,
            errors,
            slope,
        });
    }
    Ok(rows)
}

fn final_state_at(
    cfg: &ExperimentConfig,
    method: MethodId,
    dt: f64,
    final_time: f64,
) -> Result<Vec<f64>, CliError> {
    let mut member = cfg.with_method(method);
    member.dt = dt;
    member.steps = Some((final_time / dt).round() as u64);
    member.final_time = None;
    member.out = None;
    let exp = member.validate()?;
    let summary = stream(&exp, |_| Ok(()))?;
    if let Some(step) = summary.truncated_at {
        return Err(CliError::Step {
            step,
            message: "trajectory became non-finite".into(),
        });
    }
    Ok(summary.final_state)
}

fn max_norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    Some((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

/// Outcome of the randomized property suite.
#[derive(Debug, Clone)]
pub struct PropertyReport {
    pub lines: Vec<String>,
    pub passed: bool,
}

/// Randomized checks of the two theorems on the configured scheme: strict
/// Lyapunov decrease and the closed-form variation identity at arbitrary
/// `(y, dt)`, plus orthant invariance under the combined weight when the
/// system passes the quasi-positivity face check.
pub fn cmd_property_suite(
    cfg: &ExperimentConfig,
    samples: u64,
) -> Result<PropertyReport, CliError> {
    if samples < 1 {
        return Err(CliError::Config("samples must be at least 1".into()));
    }
    let exp = cfg.validate()?;
    let scheme = match &exp.stepper {
        Stepper::Nsfd(s) => s.clone(),
        Stepper::Classic(_) => {
            return Err(CliError::Config(
                "property-suite requires method = nsfd".into(),
            ))
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(exp.seed);
    let mut lines = Vec::new();
    let mut passed = true;

    let orthant_only = cfg.problem.is_quasi_positive();
    let mut decrease_violation = None;
    let mut identity_violation = None;
    for _ in 0..samples {
        let y = sample_state(&mut rng, &exp.system, orthant_only);
        let dt = log_uniform(&mut rng, 1e-6, 1e3);
        match scheme.delta_v_direct(&exp.lyapunov, &y, dt) {
            Ok(dv) if dv < 0.0 => {}
            Ok(dv) => {
                decrease_violation.get_or_insert((y.clone(), dt, format!("dV = {dv:e}")));
            }
            Err(e) => {
                decrease_violation.get_or_insert((y.clone(), dt, e.to_string()));
            }
        }
        match (
            scheme.delta_v_direct(&exp.lyapunov, &y, dt),
            scheme.delta_v_closed_form(&exp.lyapunov, &y, dt),
        ) {
            (Ok(direct), Ok(closed))
                if (closed - direct).abs() > 1e-10 * direct.abs().max(1.0) =>
            {
                identity_violation.get_or_insert((
                    y.clone(),
                    dt,
                    format!("direct {direct:e} vs closed {closed:e}"),
                ));
            }
            _ => {
                // already reported through the decrease suite
            }
        }
    }
    report_suite(
        &mut lines,
        &mut passed,
        "lyapunov-decrease",
        samples,
        decrease_violation,
    );
    report_suite(
        &mut lines,
        &mut passed,
        "variation-identity",
        samples,
        identity_violation,
    );

    let bounds = vec![10.0; exp.system.dim()];
    let face_report = check_quasi_positivity(&exp.system, samples as usize, &bounds, exp.seed)
        .map_err(|e| CliError::Config(e.to_string()))?;
    if face_report.is_clean() {
        let violation = positivity_suite(&exp.system, &exp.lyapunov, cfg.margin, samples, &mut rng);
        report_suite(&mut lines, &mut passed, "positivity", samples, violation);
    } else {
        let v = &face_report.violations[0];
        lines.push(format!(
            "positivity: skipped (system is not quasi-positive: f_{}{:?} = {:e} on the face y_{} = 0)",
            v.face + 1,
            v.point,
            v.value,
            v.face + 1,
        ));
    }

    Ok(PropertyReport { lines, passed })
}

fn report_suite(
    lines: &mut Vec<String>,
    passed: &mut bool,
    name: &str,
    samples: u64,
    violation: Option<(State, f64, String)>,
) {
    match violation {
        None => lines.push(format!("{name}: pass ({samples} samples)")),
        Some((y, dt, detail)) => {
            *passed = false;
            lines.push(format!(
                "{name}: FAIL at y = {:?}, dt = {dt:e} ({detail})",
                y.as_slice()
            ));
        }
    }
}

fn positivity_suite(
    sys: &OdeSystem,
    lyapunov: &QuadraticLyapunov,
    margin: f64,
    samples: u64,
    rng: &mut ChaCha8Rng,
) -> Option<(State, f64, String)> {
    let tau = match WeightFunction::combined(lyapunov.clone(), sys.clone(), margin) {
        Ok(tau) => tau,
        Err(e) => return Some((sys.equilibrium().clone(), 0.0, e.to_string())),
    };
    let scheme = NsfdScheme::new(
        sys.clone(),
        nsfd_core::stepper::DenominatorFunction::Identity,
        tau,
    );
    for _ in 0..samples {
        let y0 = sample_state(rng, sys, true);
        let dt = log_uniform(rng, 1e-3, 1e2);
        let mut y = y0.clone();
        for step in 0..200 {
            y = match scheme.step(&y, dt) {
                Ok(next) => next,
                Err(e) => return Some((y0, dt, format!("step {step}: {e}"))),
            };
            if y.as_slice().iter().any(|&c| c < -1e-14) {
                return Some((y0, dt, format!("left the orthant at step {step}: {:?}", y.as_slice())));
            }
        }
    }
    None
}

fn sample_state(rng: &mut ChaCha8Rng, sys: &OdeSystem, orthant: bool) -> State {
    loop {
        let components: Vec<f64> = (0..sys.dim())
            .map(|_| {
                if orthant {
                    rng.random_range(0.0..10.0)
                } else {
                    rng.random_range(-10.0..10.0)
                }
            })
            .collect();
        let y = State::new(components).expect("sampled components are finite");
        let dist = y
            .max_distance(sys.equilibrium())
            .expect("dimensions agree");
        if dist >= 1e-6 {
            return y;
        }
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let e = rng.random_range(lo.log10()..hi.log10());
    10f64.powf(e)
}

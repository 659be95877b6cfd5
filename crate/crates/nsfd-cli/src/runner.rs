//! Streaming experiment runner shared by all subcommands. Memory stays
//! O(1) in the step count; rows are handed to a sink as they are produced.

use nsfd_core::{Error, State};

use crate::config::Experiment;
use crate::CliError;

/// One output row: step index, time, state components, Lyapunov value, and
/// the variation to the next state (`None` on the final row).
#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub k: u64,
    pub t: f64,
    pub y: Vec<f64>,
    pub v: f64,
    pub dv: Option<f64>,
}

/// Aggregate facts about a finished (possibly truncated) run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub rows: u64,
    pub v_min: f64,
    pub v_max: f64,
    /// True when every recorded variation was strictly negative.
    pub monotone_decreasing: bool,
    /// First step index with `dV >= 0`, if any.
    pub first_violation_step: Option<u64>,
    pub final_state: Vec<f64>,
    /// Step index at which the trajectory became non-finite, if it did.
    pub truncated_at: Option<u64>,
}

impl RunSummary {
    pub fn final_max_norm(&self) -> f64 {
        self.final_state.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// One human-readable line per run.
    pub fn render(&self) -> String {
        format!(
            "rows={} v_min={:e} v_max={:e} v_monotone_decreasing={} first_violation_step={} final_state={:?} truncated_at={}",
            self.rows,
            self.v_min,
            self.v_max,
            self.monotone_decreasing,
            self.first_violation_step
                .map_or_else(|| "-".to_string(), |k| k.to_string()),
            self.final_state,
            self.truncated_at
                .map_or_else(|| "-".to_string(), |k| k.to_string()),
        )
    }
}

/// Runs the experiment, streaming one [`RunRow`] per retained state. A
/// step that produces a non-finite state ends the run early; the summary
/// carries the truncation index and the last finite state.
pub fn stream<F>(exp: &Experiment, mut sink: F) -> Result<RunSummary, CliError>
where
    F: FnMut(&RunRow) -> Result<(), CliError>,
{
    let mut current = exp.y0.clone();
    let mut v_current = lyap(exp, &current)?;
    let mut v_min = v_current;
    let mut v_max = v_current;
    let mut monotone = true;
    let mut first_violation = None;
    let mut truncated_at = None;
    let mut rows = 0u64;

    let mut k = 0u64;
    while k < exp.steps {
        let next = match exp.stepper.step(&exp.system, &current, exp.dt) {
            Ok(next) => next,
            Err(Error::NonFinite) => {
                truncated_at = Some(k);
                break;
            }
            Err(e) => return Err(CliError::Step { step: k, message: e.to_string() }),
        };
        let v_next = lyap(exp, &next)?;
        let dv = v_next - v_current;
        if dv >= 0.0 {
            monotone = false;
            first_violation.get_or_insert(k);
        }
        sink(&RunRow {
            k,
            t: k as f64 * exp.dt,
            y: current.as_slice().to_vec(),
            v: v_current,
            dv: Some(dv),
        })?;
        rows += 1;
        current = next;
        v_current = v_next;
        v_min = v_min.min(v_current);
        v_max = v_max.max(v_current);
        k += 1;
    }
    sink(&RunRow {
        k,
        t: k as f64 * exp.dt,
        y: current.as_slice().to_vec(),
        v: v_current,
        dv: None,
    })?;
    rows += 1;

    Ok(RunSummary {
        rows,
        v_min,
        v_max,
        monotone_decreasing: monotone,
        first_violation_step: first_violation,
        final_state: current.into_vec(),
        truncated_at,
    })
}

fn lyap(exp: &Experiment, y: &State) -> Result<f64, CliError> {
    exp.lyapunov
        .value(y)
        .map_err(|e| CliError::Step { step: 0, message: e.to_string() })
}

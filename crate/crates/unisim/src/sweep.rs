//! Parallel PID gain sweeps over a product grid.

use std::path::Path;

use rayon::prelude::*;
use unicycle_core::intent::intent_at;
use unicycle_core::simulation::run;
use unicycle_core::{PidConfig, PidController, SimOutcome, Termination};

use crate::error::{Error, Result};
use crate::numfmt::sig;
use crate::scenario::Scenario;

/// Lean angle below which the unicycle counts as settled.
pub const SETTLE_THETA: f64 = 0.01;

pub const SUMMARY_HEADER: [&str; 8] =
    ["kp", "ki", "kd", "fell", "fall_time", "max_abs_theta", "settling_time", "speed_error"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    pub fell: bool,
    pub fall_time: Option<f64>,
    pub max_abs_theta: f64,
    /// First time after which `|theta| < SETTLE_THETA` holds to the end, if it does.
    pub settling_time: Option<f64>,
    /// `|v_W - drive_intent|` at the last record.
    pub speed_error: f64,
}

pub fn summarize(kp: f64, ki: f64, kd: f64, outcome: &SimOutcome, scenario: &Scenario) -> SweepRow {
    let records = &outcome.records;
    let max_abs_theta = records.iter().map(|r| r.state.theta.abs()).fold(0.0, f64::max);
    let fall_time = match outcome.termination {
        Termination::Fallen { t } => Some(t),
        _ => None,
    };
    let settling_time = if outcome.termination != Termination::Completed {
        None
    } else {
        let unsettled = records.iter().rposition(|r| r.state.theta.abs() >= SETTLE_THETA);
        match unsettled {
            None => Some(0.0),
            Some(i) => records.get(i + 1).map(|r| r.t),
        }
    };
    let speed_error = records
        .last()
        .map(|r| (r.state.v_w - intent_at(&scenario.profile, r.t)).abs())
        .unwrap_or(f64::NAN);
    SweepRow { kp, ki, kd, fell: fall_time.is_some(), fall_time, max_abs_theta, settling_time, speed_error }
}

/// Runs the scenario's PID once per `(kp, ki, kd)` combination, rows in
/// `kp`-major order.
pub fn sweep(scenario: &Scenario, kps: &[f64], kis: &[f64], kds: &[f64]) -> Vec<SweepRow> {
    let grid: Vec<(f64, f64, f64)> =
        kps.iter().flat_map(|&kp| kis.iter().flat_map(move |&ki| kds.iter().map(move |&kd| (kp, ki, kd)))).collect();
    grid.par_iter()
        .map(|&(kp, ki, kd)| {
            let cfg = PidConfig { kp, ki, kd, ..scenario.controller.pid };
            let outcome = run(&scenario.sim, &scenario.params, &scenario.profile, PidController::new(cfg));
            summarize(kp, ki, kd, &outcome, scenario)
        })
        .collect()
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| sig(v, 9)).unwrap_or_default()
}

pub fn write_summary_csv(rows: &[SweepRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(SUMMARY_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            sig(r.kp, 9),
            sig(r.ki, 9),
            sig(r.kd, 9),
            r.fell.to_string(),
            opt(r.fall_time),
            sig(r.max_abs_theta, 9),
            opt(r.settling_time),
            sig(r.speed_error, 9),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

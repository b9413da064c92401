//! Simulation logs as CSV: one row per iteration, the state, the controller
//! request, the motor output, both automaton locations and every force.

use std::path::Path;

use unicycle_core::{ForceBreakdown, LogRecord, MotorLocation, State, UnicycleLocation};

use crate::error::{Error, Result};
use crate::numfmt::sig;

pub const LOG_HEADER: [&str; 20] = [
    "t", "x_W", "v_W", "theta", "omega", "drive_intent", "request", "tau_W_mot", "uni_loc", "motor_loc", "m_W",
    "F_W_mot", "tau_S_g", "F_W_g", "F_W", "beta", "F_W1", "F_W2", "tau_S_W", "tau_S",
];

/// Significant digits written for every float column.
pub const LOG_DIGITS: usize = 9;

/// Whether `name` is a numeric log column.
pub fn is_numeric_column(name: &str) -> bool {
    name != "uni_loc" && name != "motor_loc" && LOG_HEADER.contains(&name)
}

/// Value of a numeric column.
pub fn column(r: &LogRecord, name: &str) -> Option<f64> {
    let f = &r.forces;
    Some(match name {
        "t" => r.t,
        "x_W" => r.state.x_w,
        "v_W" => r.state.v_w,
        "theta" => r.state.theta,
        "omega" => r.state.omega,
        "drive_intent" => r.drive_intent,
        "request" => r.request,
        "tau_W_mot" => r.tau_w_mot,
        "m_W" => f.m_w,
        "F_W_mot" => f.f_w_mot,
        "tau_S_g" => f.tau_s_g,
        "F_W_g" => f.f_w_g,
        "F_W" => f.f_w,
        "beta" => f.beta,
        "F_W1" => f.f_w1,
        "F_W2" => f.f_w2,
        "tau_S_W" => f.tau_s_w,
        "tau_S" => f.tau_s,
        _ => return None,
    })
}

fn row(r: &LogRecord) -> Vec<String> {
    LOG_HEADER
        .iter()
        .map(|&name| match name {
            "uni_loc" => r.uni_loc.as_str().to_string(),
            "motor_loc" => r.motor_loc.as_str().to_string(),
            _ => sig(column(r, name).expect("numeric column"), LOG_DIGITS),
        })
        .collect()
}

pub fn write_log_csv(records: &[LogRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if records.is_empty() {
        return Err(Error::Format { path: path.to_path_buf(), message: "no records to write".into() });
    }
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(LOG_HEADER).map_err(csv_err)?;
    for r in records {
        w.write_record(row(r)).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn parse_uni(s: &str) -> Option<UnicycleLocation> {
    match s {
        "initial" => Some(UnicycleLocation::Initial),
        "fallen" => Some(UnicycleLocation::Fallen),
        _ => None,
    }
}

fn parse_motor(s: &str) -> Option<MotorLocation> {
    match s {
        "normal" => Some(MotorLocation::Normal),
        "max" => Some(MotorLocation::Max),
        "min" => Some(MotorLocation::Min),
        _ => None,
    }
}

pub fn read_log_csv(path: impl AsRef<Path>) -> Result<Vec<LogRecord>> {
    let path = path.as_ref();
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let format_err = |message: String| Error::Format { path: path.to_path_buf(), message };
    let mut rd = csv::Reader::from_path(path).map_err(csv_err)?;
    let header: Vec<String> = rd.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if header != LOG_HEADER {
        return Err(format_err(format!("unexpected header, expected {}", LOG_HEADER.join(","))));
    }
    let mut records = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = i + 2;
        let num = |k: usize| -> Result<f64> {
            rec[k].parse::<f64>().map_err(|_| format_err(format!("line {line}: bad number `{}` in {}", &rec[k], LOG_HEADER[k])))
        };
        let v: Vec<f64> = (0..20).filter(|&k| k != 8 && k != 9).map(num).collect::<Result<_>>()?;
        let uni_loc = parse_uni(&rec[8]).ok_or_else(|| format_err(format!("line {line}: bad uni_loc `{}`", &rec[8])))?;
        let motor_loc =
            parse_motor(&rec[9]).ok_or_else(|| format_err(format!("line {line}: bad motor_loc `{}`", &rec[9])))?;
        records.push(LogRecord {
            t: v[0],
            state: State::new(v[1], v[2], v[3], v[4]),
            drive_intent: v[5],
            request: v[6],
            tau_w_mot: v[7],
            uni_loc,
            motor_loc,
            forces: ForceBreakdown {
                m_w: v[8],
                f_w_mot: v[9],
                tau_s_g: v[10],
                f_w_g: v[11],
                f_w: v[12],
                beta: v[13],
                f_w1: v[14],
                f_w2: v[15],
                tau_s_w: v[16],
                tau_s: v[17],
            },
        });
    }
    Ok(records)
}

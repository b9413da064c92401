//! Command line.
//!
//! ```text
//! unisim simulate  --scenario s.json [--out log.csv] [--plot p.svg] [--fields theta,v_W] [--frames dir] [--frame-every N]
//! unisim linearize (--params p.json | --scenario s.json) [--out model.json] [--theta-min A] [--theta-max B] [--grid N]
//! unisim export    --model model.json --out unicycle.xml
//! unisim sweep     --scenario s.json --kp a,b --ki c,d --kd e,f --out summary.csv
//! unisim plot      --log log.csv --fields theta,omega --out p.svg
//! ```
//!
//! Exit codes: 0 success, 1 bad input or IO failure, 2 model fault (a
//! non-finite value during simulation; the log up to the fault is still
//! written). The environment variable `UNISIM_SEED` is reserved and unused,
//! since nothing here is random.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use unicycle_core::linearize::{assemble_bounded_model, fit_affine};
use unicycle_core::simulation::run;
use unicycle_core::{AffineModel, FitSpec, Params, PidController, Termination, ZeroController};

use crate::csvlog::{read_log_csv, write_log_csv};
use crate::error::{Error, Result};
use crate::frames::render_frames;
use crate::plot::plot_svg;
use crate::scenario::{load_params, load_scenario, ControllerKind};
use crate::spaceex::export_verification_model;
use crate::sweep::{sweep, write_summary_csv};

#[derive(Debug, Parser)]
#[command(name = "unisim", version, about = "Self-balancing unicycle simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario and write its log, plot and frames.
    Simulate(SimulateArgs),
    /// Fit the affine surrogates and write the model JSON.
    Linearize(LinearizeArgs),
    /// Write the SpaceEx model, configuration and companion JSON.
    Export(ExportArgs),
    /// Run a PID gain grid in parallel.
    Sweep(SweepArgs),
    /// Plot columns of an existing log.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Log CSV; overrides `outputs.log`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    plot: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    fields: Option<Vec<String>>,
    #[arg(long)]
    frames: Option<PathBuf>,
    #[arg(long)]
    frame_every: Option<usize>,
}

#[derive(Debug, Args)]
struct LinearizeArgs {
    #[arg(long, conflicts_with = "scenario", required_unless_present = "scenario")]
    params: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long, default_value = "affine_model.json")]
    out: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    theta_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta_max: Option<f64>,
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Debug, Args)]
struct ExportArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value = "unicycle.xml")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    kp: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    ki: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    kd: Vec<f64>,
    #[arg(long, default_value = "sweep.csv")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct PlotArgs {
    #[arg(long)]
    log: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "theta,v_W")]
    fields: Vec<String>,
    #[arg(long, default_value = "plot.svg")]
    out: PathBuf,
}

fn warn(issues: &[unicycle_core::Issue]) {
    for w in issues {
        eprintln!("warning: {w}");
    }
}

fn simulate(a: SimulateArgs) -> Result<i32> {
    let scenario = load_scenario(&a.scenario)?;
    warn(&scenario.sim.warnings());
    let outcome = match scenario.controller.kind {
        ControllerKind::Pid => {
            run(&scenario.sim, &scenario.params, &scenario.profile, PidController::new(scenario.controller.pid))
        }
        ControllerKind::Zero => run(&scenario.sim, &scenario.params, &scenario.profile, ZeroController),
    };
    let outputs = &scenario.outputs;
    let log = a.out.or_else(|| outputs.log.as_ref().map(PathBuf::from));
    if let Some(path) = &log {
        if !outcome.records.is_empty() {
            write_log_csv(&outcome.records, path)?;
        }
    }
    let fields = a.fields.unwrap_or_else(|| outputs.plot_fields.clone());
    if let Some(path) = a.plot.or_else(|| outputs.plot.as_ref().map(PathBuf::from)) {
        plot_svg(&outcome.records, &fields, path)?;
    }
    if let Some(dir) = a.frames.or_else(|| outputs.frames_dir.as_ref().map(PathBuf::from)) {
        let every = a.frame_every.unwrap_or(outputs.frame_every);
        render_frames(&outcome.records, &scenario.params, every, dir)?;
    }
    let last = outcome.final_record();
    match &outcome.termination {
        Termination::Completed => {
            if let Some(r) = last {
                println!(
                    "completed t={} theta={:.6} v_W={:.6} records={}",
                    r.t,
                    r.state.theta,
                    r.state.v_w,
                    outcome.records.len()
                );
            }
            Ok(0)
        }
        Termination::Fallen { t } => {
            println!("fallen at t={t} records={}", outcome.records.len());
            Ok(0)
        }
        Termination::Fault { t, fault, .. } => {
            eprintln!("error: model fault at t={t}: {fault}");
            Ok(2)
        }
    }
}

fn linearize(a: LinearizeArgs) -> Result<i32> {
    let (params, bounds) = match (&a.params, &a.scenario) {
        (Some(p), _) => (load_params(p)?, unicycle_core::Bounds::default()),
        (None, Some(s)) => {
            let s = load_scenario(s)?;
            (s.params, s.sim.bounds())
        }
        (None, None) => unreachable!("clap requires one of --params/--scenario"),
    };
    let mut spec = FitSpec::for_params(&params);
    if let Some(lo) = a.theta_min {
        spec.theta_range[0] = lo;
    }
    if let Some(hi) = a.theta_max {
        spec.theta_range[1] = hi;
    }
    if let Some(n) = a.grid {
        spec.grid_n = n;
    }
    let model = fit_affine(&params, &spec, bounds)?;
    let mut json = serde_json::to_string_pretty(&model).expect("model serialises");
    json.push('\n');
    fs::write(&a.out, json).map_err(|e| Error::io(&a.out, e))?;
    print_report(&model);
    Ok(0)
}

fn print_report(m: &AffineModel) {
    let c = &m.f2_coeffs;
    println!("F_W2  = {} + {}*theta + {}*tau", c.c0, c.c_theta, c.c_tau);
    println!(
        "       residual_max {:.6} of field max {:.6} ({:.2}%)",
        m.residual_max_f2,
        m.field_max_f2,
        100.0 * m.residual_max_f2 / m.field_max_f2
    );
    let c = &m.tau_s_coeffs;
    println!("tau_S = {} + {}*theta + {}*tau", c.c0, c.c_theta, c.c_tau);
    println!(
        "       residual_max {:.6} of field max {:.6} ({:.2}%)",
        m.residual_max_tau_s,
        m.field_max_tau_s,
        100.0 * m.residual_max_tau_s / m.field_max_tau_s
    );
}

fn export(a: ExportArgs) -> Result<i32> {
    let text = fs::read_to_string(&a.model).map_err(|e| Error::io(&a.model, e))?;
    let model: AffineModel =
        serde_json::from_str(&text).map_err(|source| Error::Json { path: a.model.clone(), source })?;
    let params: Params = model.params_snapshot;
    let issues = params.validate();
    if !issues.is_empty() {
        return Err(Error::Validation(issues.into_iter().map(|i| i.under("params_snapshot")).collect()));
    }
    let hybrid = assemble_bounded_model(&model, &params);
    let paths = export_verification_model(&hybrid, &model, &a.out)?;
    println!("wrote {} {} {}", paths.xml.display(), paths.cfg.display(), paths.json.display());
    Ok(0)
}

fn run_sweep(a: SweepArgs) -> Result<i32> {
    let scenario = load_scenario(&a.scenario)?;
    warn(&scenario.sim.warnings());
    let rows = sweep(&scenario, &a.kp, &a.ki, &a.kd);
    write_summary_csv(&rows, &a.out)?;
    let stable = rows.iter().filter(|r| !r.fell).count();
    println!("{} runs, {} stayed up, summary in {}", rows.len(), stable, a.out.display());
    Ok(0)
}

fn plot(a: PlotArgs) -> Result<i32> {
    let records = read_log_csv(&a.log)?;
    plot_svg(&records, &a.fields, &a.out)?;
    Ok(0)
}

/// Runs the command line and returns the process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Linearize(a) => linearize(a),
        Command::Export(a) => export(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Plot(a) => plot(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

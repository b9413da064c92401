//! Acceptance criteria A1–A10. Each test prints one `PASS`/`FAIL` line.
//!
//! Run with `cargo test -p unisim --test acceptance -- --nocapture`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use unicycle_core::automaton::{step_configuration, Bounds};
use unicycle_core::linearize::{assemble_bounded_model, fit_affine, LOC_FALLEN};
use unicycle_core::physics::{breakdown, derivatives};
use unicycle_core::simulation::run;
use unicycle_core::{
    Controller, FitSpec, HybridConfiguration, IntentProfile, Observation, Params, PidConfig, PidController,
    SimConfig, State, Termination, UnicycleLocation, ZeroController,
};
use unisim::spaceex::{export_verification_model, read_companion, read_verification_model};

// A1
const A1_STEPS: usize = 10_000;
const A1_DT: f64 = 0.001;
// A2
const A2_THETA0: f64 = 0.01;
const A2_FALL_BY: f64 = 10.0;
// A3
const A3_THETA0: f64 = 0.1;
const A3_DURATION: f64 = 30.0;
const A3_SETTLE_FROM: f64 = 5.0;
const A3_THETA_TOL: f64 = 0.01;
// A4
const A4_STEP_AT: f64 = 5.0;
const A4_TARGET: f64 = 2.0;
const A4_FROM: f64 = 20.0;
const A4_SPEED_TOL: f64 = 0.1;
// A5
const A5_GRID: usize = 101;
const A5_PIN_REL: f64 = 1e-6;
const A5_COEFF_ABS: f64 = 1e-9;
const A5_MAX_FRACTION: f64 = 0.20;
// A6, A7
const FUZZ_SAMPLES: usize = 10_000;
const FUZZ_REL: f64 = 1e-12;
// A8
const A8_DURATION: f64 = 2.0;
const A8_DTS: [f64; 3] = [0.004, 0.002, 0.001];
const A8_REF_DIVISOR: f64 = 64.0;
const A8_ORDER: [f64; 2] = [0.8, 1.5];
// A9
const A9_SEQUENCES: usize = 200;
const A9_STEPS: usize = 2_000;
// A10
const A10_REL: f64 = 1e-12;

fn report(id: &str, pass: bool, detail: String) {
    println!("{id} {}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{id} failed: {detail}");
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn default_run(theta0: f64, duration: f64, profile: &IntentProfile) -> unicycle_core::SimOutcome {
    let sim = SimConfig { duration, initial_state: State::new(0.0, 0.0, theta0, 0.0), ..SimConfig::default() };
    run(&sim, &Params::default(), profile, PidController::new(PidConfig::default()))
}

#[test]
fn a1_equilibrium_is_exact() {
    let sim = SimConfig { dt: A1_DT, duration: A1_STEPS as f64 * A1_DT, ..SimConfig::default() };
    let out = run(&sim, &Params::default(), &IntentProfile::constant(0.0), ZeroController);
    let nonzero = out
        .records
        .iter()
        .filter(|r| r.state != State::REST || r.tau_w_mot != 0.0 || r.forces.f_w2 != 0.0 || r.forces.tau_s != 0.0)
        .count();
    let pass = out.termination == Termination::Completed && out.records.len() == A1_STEPS && nonzero == 0;
    report("A1", pass, format!("{} steps, {nonzero} records off the rest state", out.records.len()));
}

#[test]
fn a2_uncontrolled_lean_diverges_and_falls() {
    let sim = SimConfig { initial_state: State::new(0.0, 0.0, A2_THETA0, 0.0), ..SimConfig::default() };
    let out = run(&sim, &Params::default(), &IntentProfile::constant(0.0), ZeroController);
    let mut prev = A2_THETA0;
    let mut monotone = true;
    for r in &out.records {
        monotone &= r.state.theta.abs() > prev;
        prev = r.state.theta.abs();
    }
    let last = out.final_record().unwrap();
    let fall_t = match out.termination {
        Termination::Fallen { t } => t,
        _ => f64::INFINITY,
    };
    let pass = monotone && fall_t <= A2_FALL_BY && last.uni_loc == UnicycleLocation::Fallen;
    report(
        "A2",
        pass,
        format!(
            "|theta| strictly increasing: {monotone}, fallen at t={fall_t} (theta={:.4}, omega={:.3})",
            last.state.theta, last.state.omega
        ),
    );
}

#[test]
fn a3_pid_stabilises_lean() {
    let out = default_run(A3_THETA0, A3_DURATION, &IntentProfile::constant(0.0));
    let worst = out
        .records
        .iter()
        .filter(|r| r.t >= A3_SETTLE_FROM - 1e-9)
        .map(|r| r.state.theta.abs())
        .fold(0.0, f64::max);
    let pass = out.termination == Termination::Completed && worst < A3_THETA_TOL;
    report(
        "A3",
        pass,
        format!("termination {:?}, max |theta| for t >= {A3_SETTLE_FROM} s = {worst:.3e} (< {A3_THETA_TOL})", out.termination),
    );
}

#[test]
fn a4_pid_tracks_speed_step() {
    let out = default_run(0.0, A3_DURATION, &IntentProfile::step(0.0, A4_STEP_AT, A4_TARGET));
    let worst = out
        .records
        .iter()
        .filter(|r| r.t >= A4_FROM - 1e-9)
        .map(|r| (r.state.v_w - A4_TARGET).abs())
        .fold(0.0, f64::max);
    let pass = out.termination == Termination::Completed && worst < A4_SPEED_TOL;
    report(
        "A4",
        pass,
        format!("termination {:?}, max |v_W - 2| for t >= {A4_FROM} s = {worst:.3e} (< {A4_SPEED_TOL})", out.termination),
    );
}

#[derive(Deserialize)]
struct FieldOracle {
    c0: f64,
    c_theta: f64,
    c_tau: f64,
    residual_max: f64,
    field_max: f64,
}

#[derive(Deserialize)]
struct FitOracle {
    f2: FieldOracle,
    tau_s: FieldOracle,
    grid_n: usize,
    theta_range: [f64; 2],
    tau_range: [f64; 2],
}

#[test]
fn a5_linearisation_residuals() {
    let oracle: FitOracle = serde_json::from_str(include_str!("fixtures/a5_fit.json")).unwrap();
    let p = Params::default();
    let spec = FitSpec { theta_range: [-FRAC_PI_4, FRAC_PI_4], tau_range: [-p.tau_max, p.tau_max], grid_n: A5_GRID };
    assert_eq!((oracle.grid_n, oracle.theta_range, oracle.tau_range), (spec.grid_n, spec.theta_range, spec.tau_range));
    let m = fit_affine(&p, &spec, Bounds::default()).unwrap();

    let mut lines = Vec::new();
    let mut pinned = true;
    let mut bounded = true;
    for (name, o, c, res, fmax) in [
        ("F_W2", &oracle.f2, m.f2_coeffs, m.residual_max_f2, m.field_max_f2),
        ("tau_S", &oracle.tau_s, m.tau_s_coeffs, m.residual_max_tau_s, m.field_max_tau_s),
    ] {
        let coeffs_ok = (c.c0 - o.c0).abs() <= A5_COEFF_ABS
            && close(c.c_theta, o.c_theta, A5_PIN_REL)
            && close(c.c_tau, o.c_tau, A5_PIN_REL);
        let res_ok = close(res, o.residual_max, A5_PIN_REL) && close(fmax, o.field_max, A5_PIN_REL);
        pinned &= coeffs_ok && res_ok;
        let fraction = res / fmax;
        bounded &= fraction <= A5_MAX_FRACTION;
        lines.push(format!(
            "{name} residual_max={res:.6} (pinned {:.6}, {}) = {:.1}% of field max {fmax:.3}",
            o.residual_max,
            if coeffs_ok && res_ok { "match" } else { "MISMATCH" },
            100.0 * fraction
        ));
    }
    report(
        "A5",
        pinned && bounded,
        format!("{}; bound {}%", lines.join("; "), 100.0 * A5_MAX_FRACTION),
    );
}

fn random_state(rng: &mut ChaCha8Rng) -> (State, f64) {
    let p = Params::default();
    let s = State::new(
        rng.gen_range(-100.0..100.0),
        rng.gen_range(-15.0..15.0),
        rng.gen_range(-FRAC_PI_2..FRAC_PI_2),
        rng.gen_range(-10.0..10.0),
    );
    (s, rng.gen_range(-p.tau_max..=p.tau_max))
}

#[test]
fn a6_split_identity() {
    let p = Params::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..FUZZ_SAMPLES {
        let (s, tau) = random_state(&mut rng);
        let f = breakdown(&s, tau, &p);
        let scale = f.f_w.abs().max(f.f_w1.abs()).max(f64::MIN_POSITIVE);
        worst = worst.max((f.f_w1 + f.f_w2 - f.f_w).abs() / scale);
        worst = worst.max((f.f_w1 - f.beta * f.f_w2).abs() / f.f_w1.abs().max(f64::MIN_POSITIVE));
    }
    report("A6", worst <= FUZZ_REL, format!("{FUZZ_SAMPLES} samples, worst relative error {worst:.2e}"));
}

#[test]
fn a7_mirror_symmetry() {
    let p = Params::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..FUZZ_SAMPLES {
        let (s, tau) = random_state(&mut rng);
        let mirrored = State::new(s.x_w, -s.v_w, -s.theta, -s.omega);
        let a = derivatives(&s, tau, &p);
        let b = derivatives(&mirrored, -tau, &p);
        for (x, y) in [(a.dx_w, b.dx_w), (a.dv_w, b.dv_w), (a.dtheta, b.dtheta), (a.domega, b.domega)] {
            worst = worst.max((x + y).abs() / x.abs().max(f64::MIN_POSITIVE));
        }
    }
    report("A7", worst <= FUZZ_REL, format!("{FUZZ_SAMPLES} samples, worst relative error {worst:.2e}"));
}

/// Stabilising state feedback with a superimposed sinusoidal torque.
struct ForcedPd;

impl Controller for ForcedPd {
    fn request(&mut self, o: &Observation, _dt: f64) -> f64 {
        -1500.0 * o.theta - 300.0 * o.omega + 20.0 * (2.0 * PI * o.t).sin()
    }
}

fn a8_final(dt: f64) -> State {
    let sim = SimConfig { dt, duration: A8_DURATION, ..SimConfig::default() };
    let out = run(&sim, &Params::default(), &IntentProfile::constant(0.0), ForcedPd);
    assert_eq!(out.termination, Termination::Completed);
    let last = out.final_record().unwrap();
    assert!((last.t - A8_DURATION).abs() < 1e-9);
    last.state
}

#[test]
fn a8_integrator_convergence_order() {
    let reference = a8_final(A8_DTS[A8_DTS.len() - 1] / A8_REF_DIVISOR);
    let errors: Vec<f64> = A8_DTS
        .iter()
        .map(|&dt| {
            let s = a8_final(dt);
            [s.x_w - reference.x_w, s.v_w - reference.v_w, s.theta - reference.theta, s.omega - reference.omega]
                .iter()
                .fold(0.0, |m: f64, e| m.max(e.abs()))
        })
        .collect();
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let pass = orders.iter().all(|o| (A8_ORDER[0]..=A8_ORDER[1]).contains(o));
    let errors: Vec<String> = errors.iter().map(|e| format!("{e:.3e}")).collect();
    report("A8", pass, format!("errors [{}], observed orders {orders:.3?} (want [0.8, 1.5])", errors.join(", ")));
}

#[test]
fn a9_saturation_and_absorption() {
    let p = Params::default();
    let bounds = Bounds::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let mut falls = 0;
    let mut violations = 0;
    for _ in 0..A9_SEQUENCES {
        let mut c = HybridConfiguration::new(State::new(0.0, 0.0, rng.gen_range(-0.2..0.2), 0.0));
        let mut absorbed: Option<HybridConfiguration> = None;
        for _ in 0..A9_STEPS {
            let request = rng.gen_range(-10.0 * p.tau_max..10.0 * p.tau_max);
            c = c.with_request(request, &p).unwrap();
            c = step_configuration(&c, 0.001, &p, &bounds).unwrap();
            worst = worst.max(c.tau_w_mot.abs());
            match absorbed {
                Some(a) if a != c => violations += 1,
                Some(_) => {}
                None if c.is_fallen() => {
                    falls += 1;
                    absorbed = Some(c);
                }
                None => {}
            }
        }
    }
    let pass = worst <= p.tau_max && violations == 0 && falls > 0;
    report(
        "A9",
        pass,
        format!("max |tau_W_mot| = {worst} (tau_max {}), {falls} falls, {violations} changes after falling", p.tau_max),
    );
}

#[test]
fn a10_export_round_trip() {
    let p = Params::default();
    let affine = fit_affine(&p, &FitSpec::for_params(&p), Bounds::default()).unwrap();
    let model = assemble_bounded_model(&affine, &p);
    let dir = tempfile::tempdir().unwrap();
    let paths = export_verification_model(&model, &affine, dir.path().join("unicycle.xml")).unwrap();

    let from_xml = read_verification_model(&paths.xml).unwrap();
    let companion = read_companion(&paths.json).unwrap();

    let mut worst: f64 = 0.0;
    let mut shape_ok = from_xml.locations.len() == model.locations.len()
        && from_xml.transitions.len() == model.transitions.len();
    for (a, b) in model.locations.iter().zip(&from_xml.locations) {
        shape_ok &= a.name == b.name && a.flows.len() == b.flows.len() && a.invariant.len() == b.invariant.len();
        for (fa, fb) in a.flows.iter().zip(&b.flows) {
            shape_ok &= fa.variable == fb.variable && fa.rhs.terms.len() == fb.rhs.terms.len();
            for ((va, ca), (vb, cb)) in fa.rhs.terms.iter().zip(&fb.rhs.terms) {
                shape_ok &= va == vb;
                worst = worst.max((ca - cb).abs() / ca.abs().max(f64::MIN_POSITIVE));
            }
            let (ka, kb) = (fa.rhs.constant, fb.rhs.constant);
            if ka != kb {
                worst = worst.max((ka - kb).abs() / ka.abs().max(kb.abs()));
            }
        }
    }
    let xml_equal = from_xml == model;
    let json_equal = companion.hybrid_model == model && companion.affine_model == affine;

    let xml_text = std::fs::read_to_string(&paths.xml).unwrap();
    let cfg_text = std::fs::read_to_string(&paths.cfg).unwrap();
    let n_locations = xml_text.matches("<location ").count();
    let n_variables = xml_text.matches(r#"controlled="true""#).count();
    let forbidden = cfg_text.contains(&format!("forbidden = \"loc(unicycle)=={LOC_FALLEN}\""));

    let pass = worst <= A10_REL && shape_ok && json_equal && n_locations == 4 && n_variables == 3 && forbidden;
    report(
        "A10",
        pass,
        format!(
            "worst coefficient error {worst:.2e}, xml model identical: {xml_equal}, json identical: {json_equal}, \
             {n_locations} locations, {n_variables} variables, fallen forbidden: {forbidden}"
        ),
    );
}

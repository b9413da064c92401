//! Fixed-step digital-time simulation.
//!
//! Each iteration, in order:
//!
//! 1. advance time by `dt`;
//! 2. compute `F_W2` and `tau_S` from the current state and motor torque;
//! 3. update `v_W`, `x_W`, `omega`, `theta` assuming those forces stay constant for `dt`;
//! 4. build the controller's observation;
//! 5. evaluate the rider's intent;
//! 6. evaluate the controller;
//! 7. update the motor torque;
//! 8. append a log record.
//!
//! The torque chosen in step 7 therefore acts from the next iteration on.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::automaton::{step_configuration, Bounds, HybridConfiguration, MotorLocation, UnicycleLocation};
use crate::controller::{Controller, Observation, SlewLimiter};
use crate::error::{Issue, ModelFault};
use crate::intent::{intent_at, IntentProfile};
use crate::physics::{breakdown, ForceBreakdown, Params, State};

/// Largest step accepted without `allow_large_dt`.
pub const MAX_STABLE_DT: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub dt: f64,
    pub duration: f64,
    pub initial_state: State,
    pub omega_bound: f64,
    pub v_bound: f64,
    /// Maximum rate of change of the torque request, N·m/s.
    pub slew_limit: Option<f64>,
    /// Accept `dt` above [`MAX_STABLE_DT`] (with a warning).
    #[serde(skip_serializing_if = "core::ops::Not::not")]
    pub allow_large_dt: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        let bounds = Bounds::default();
        SimConfig {
            dt: 0.001,
            duration: 30.0,
            initial_state: State::REST,
            omega_bound: bounds.omega_bound,
            v_bound: bounds.v_bound,
            slew_limit: None,
            allow_large_dt: false,
        }
    }
}

impl SimConfig {
    pub fn bounds(&self) -> Bounds {
        Bounds { omega_bound: self.omega_bound, v_bound: self.v_bound }
    }

    /// Number of iterations of a full run.
    pub fn steps(&self) -> usize {
        libm::floor(self.duration / self.dt + 1e-9) as usize
    }

    pub fn validate(&self) -> Vec<Issue> {
        let mut issues = Vec::new();
        if !(self.dt.is_finite() && self.dt > 0.0) {
            issues.push(Issue::new("dt", alloc::format!("must be > 0, got {}", self.dt)));
        } else if self.dt > MAX_STABLE_DT && !self.allow_large_dt {
            issues.push(Issue::new(
                "dt",
                alloc::format!("{} exceeds {MAX_STABLE_DT}; set allow_large_dt to override", self.dt),
            ));
        }
        if !(self.duration.is_finite() && self.duration >= self.dt) {
            issues.push(Issue::new("duration", alloc::format!("must be >= dt, got {}", self.duration)));
        }
        for (name, value) in [("omega_bound", self.omega_bound), ("v_bound", self.v_bound)] {
            if !(value.is_finite() && value > 0.0) {
                issues.push(Issue::new(name, alloc::format!("must be > 0, got {value}")));
            }
        }
        if let Some(rate) = self.slew_limit {
            if !(rate.is_finite() && rate > 0.0) {
                issues.push(Issue::new("slew_limit", alloc::format!("must be > 0, got {rate}")));
            }
        }
        issues.extend(self.initial_state.validate().into_iter().map(|i| i.under("initial_state")));
        issues
    }

    /// Non-fatal remarks about the configuration.
    pub fn warnings(&self) -> Vec<Issue> {
        let mut w = Vec::new();
        if self.allow_large_dt && self.dt > MAX_STABLE_DT {
            w.push(Issue::new("dt", alloc::format!("{} exceeds {MAX_STABLE_DT}; results may be inaccurate", self.dt)));
        }
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogRecord {
    pub t: f64,
    pub state: State,
    pub drive_intent: f64,
    /// Torque requested by the controller (after slew limiting).
    pub request: f64,
    #[serde(rename = "tau_W_mot")]
    pub tau_w_mot: f64,
    pub uni_loc: UnicycleLocation,
    pub motor_loc: MotorLocation,
    /// Forces at this record's state and applied torque.
    pub forces: ForceBreakdown,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    /// All iterations ran.
    Completed,
    /// Stopped early on entering `fallen` at time `t`.
    Fallen { t: f64 },
    /// A non-finite value appeared at time `t`; `last` is the last good configuration.
    Fault { t: f64, fault: ModelFault, last: HybridConfiguration },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutcome {
    pub records: Vec<LogRecord>,
    pub termination: Termination,
}

impl SimOutcome {
    pub fn fell(&self) -> bool {
        matches!(self.termination, Termination::Fallen { .. })
    }

    pub fn final_record(&self) -> Option<&LogRecord> {
        self.records.last()
    }
}

/// Advances the state by `dt` under constant accelerations taken from `fb`.
pub fn integrate_step(s: &State, fb: &ForceBreakdown, dt: f64, p: &Params) -> Result<State, ModelFault> {
    let a = fb.f_w2 / fb.m_w;
    let alpha = fb.tau_s / p.i_s;
    let next = State {
        x_w: s.x_w + s.v_w * dt + 0.5 * a * dt * dt,
        v_w: s.v_w + a * dt,
        theta: s.theta + s.omega * dt + 0.5 * alpha * dt * dt,
        omega: s.omega + alpha * dt,
    };
    ModelFault::check("x_W", next.x_w)?;
    ModelFault::check("v_W", next.v_w)?;
    ModelFault::check("theta", next.theta)?;
    ModelFault::check("omega", next.omega)?;
    Ok(next)
}

/// Runs a full scenario. Stops early if the unicycle falls.
pub fn run<C: Controller>(
    sim: &SimConfig,
    p: &Params,
    profile: &IntentProfile,
    mut controller: C,
) -> SimOutcome {
    let bounds = sim.bounds();
    let steps = sim.steps();
    let mut slew = sim.slew_limit.map(SlewLimiter::new);
    let mut config = HybridConfiguration::new(sim.initial_state);
    config.drive_intent = intent_at(profile, 0.0);
    let mut records = Vec::with_capacity(steps);

    for k in 1..=steps {
        let t = k as f64 * sim.dt;
        let stepped = match step_configuration(&config, sim.dt, p, &bounds) {
            Ok(c) => c,
            Err(fault) => return SimOutcome { records, termination: Termination::Fault { t, fault, last: config } },
        };
        if stepped.is_fallen() {
            records.push(record(t, &stepped, p));
            return SimOutcome { records, termination: Termination::Fallen { t } };
        }
        let s = stepped.state;
        let drive_intent = intent_at(profile, t);
        let obs = Observation { v_w: s.v_w, theta: s.theta, omega: s.omega, drive_intent, t };
        let mut request = controller.request(&obs, sim.dt);
        if let Some(limiter) = slew.as_mut() {
            request = limiter.limit(request, sim.dt);
        }
        config = match stepped.with_request(request, p) {
            Ok(c) => HybridConfiguration { drive_intent, ..c },
            Err(fault) => return SimOutcome { records, termination: Termination::Fault { t, fault, last: stepped } },
        };
        records.push(record(t, &config, p));
    }
    SimOutcome { records, termination: Termination::Completed }
}

fn record(t: f64, c: &HybridConfiguration, p: &Params) -> LogRecord {
    LogRecord {
        t,
        state: c.state,
        drive_intent: c.drive_intent,
        request: c.motor_torque,
        tau_w_mot: c.tau_w_mot,
        uni_loc: c.uni_loc,
        motor_loc: c.motor_loc,
        forces: breakdown(&c.state, c.tau_w_mot, p),
    }
}

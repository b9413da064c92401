//! Controllers map an [`Observation`] to a motor torque request.
//!
//! The reference controller is a discrete PID acting on a single error term
//! that blends the lean angle with the speed error:
//! `error = theta + (drive_intent - v_W) * intent_factor`.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::Issue;

/// What the controller gets to see after each physics update.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Observation {
    pub v_w: f64,
    pub theta: f64,
    pub omega: f64,
    pub drive_intent: f64,
    pub t: f64,
}

pub trait Controller {
    /// Torque request for the next step. `dt` is the step length.
    fn request(&mut self, obs: &Observation, dt: f64) -> f64;
}

impl<C: Controller + ?Sized> Controller for &mut C {
    fn request(&mut self, obs: &Observation, dt: f64) -> f64 {
        (**self).request(obs, dt)
    }
}

/// Baseline that never applies torque.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroController;

pub fn zero_controller(_obs: &Observation) -> f64 {
    0.0
}

impl Controller for ZeroController {
    fn request(&mut self, obs: &Observation, _dt: f64) -> f64 {
        zero_controller(obs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PidConfig {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Weight of the speed error against the lean angle, s/m.
    pub intent_factor: f64,
    /// Anti-windup clamp on the error integral.
    pub integral_limit: f64,
}

impl Default for PidConfig {
    /// Gains tuned for the default [`Params`](crate::Params). They are
    /// negative because positive motor torque tips the saddle further
    /// towards positive `theta`.
    fn default() -> Self {
        PidConfig { kp: -4000.0, ki: -6000.0, kd: -750.0, intent_factor: 0.08, integral_limit: 0.5 }
    }
}

impl PidConfig {
    pub fn validate(&self) -> Vec<Issue> {
        let mut issues = Vec::new();
        for (name, value) in [("kp", self.kp), ("ki", self.ki), ("kd", self.kd)] {
            if !value.is_finite() {
                issues.push(Issue::new(name, "must be finite"));
            }
        }
        if !(self.intent_factor.is_finite() && self.intent_factor >= 0.0) {
            issues.push(Issue::new("intent_factor", alloc::format!("must be >= 0, got {}", self.intent_factor)));
        }
        if !(self.integral_limit.is_finite() && self.integral_limit > 0.0) {
            issues.push(Issue::new("integral_limit", alloc::format!("must be > 0, got {}", self.integral_limit)));
        }
        issues
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PidState {
    pub integral: f64,
    pub prev_error: f64,
    pub initialized: bool,
}

pub fn error_term(o: &Observation, intent_factor: f64) -> f64 {
    o.theta + (o.drive_intent - o.v_w) * intent_factor
}

/// One PID update. The derivative is zero on the first call.
pub fn pid_step(ps: &PidState, o: &Observation, cfg: &PidConfig, dt: f64) -> (PidState, f64) {
    let e = error_term(o, cfg.intent_factor);
    let integral = (ps.integral + e * dt).clamp(-cfg.integral_limit, cfg.integral_limit);
    let derivative = if ps.initialized { (e - ps.prev_error) / dt } else { 0.0 };
    let request = cfg.kp * e + cfg.ki * integral + cfg.kd * derivative;
    (PidState { integral, prev_error: e, initialized: true }, request)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PidController {
    pub config: PidConfig,
    pub state: PidState,
}

impl PidController {
    pub fn new(config: PidConfig) -> Self {
        PidController { config, state: PidState::default() }
    }
}

impl Controller for PidController {
    fn request(&mut self, obs: &Observation, dt: f64) -> f64 {
        let (state, request) = pid_step(&self.state, obs, &self.config, dt);
        self.state = state;
        request
    }
}

/// Bounds how fast the request may change, `max_rate` in N·m/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlewLimiter {
    pub max_rate: f64,
    last: Option<f64>,
}

impl SlewLimiter {
    pub fn new(max_rate: f64) -> Self {
        SlewLimiter { max_rate, last: None }
    }

    /// The first request passes through unchanged.
    pub fn limit(&mut self, request: f64, dt: f64) -> f64 {
        let out = match self.last {
            Some(prev) => {
                let step = self.max_rate * dt;
                request.clamp(prev - step, prev + step)
            }
            None => request,
        };
        self.last = Some(out);
        out
    }
}

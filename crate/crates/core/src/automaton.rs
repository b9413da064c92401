//! Discrete structure of the composed model: the unicycle automaton
//! (`initial` / `fallen`), the motor saturation automaton (`normal` / `max` /
//! `min`) and the configuration that carries both together with the
//! continuous state.

use core::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::ModelFault;
use crate::physics::{breakdown, Params, State};
use crate::simulation::integrate_step;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnicycleLocation {
    #[default]
    Initial,
    /// The saddle is on the ground. Absorbing.
    Fallen,
}

impl UnicycleLocation {
    pub fn as_str(&self) -> &'static str {
        match self {
            UnicycleLocation::Initial => "initial",
            UnicycleLocation::Fallen => "fallen",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotorLocation {
    #[default]
    Normal,
    Max,
    Min,
}

impl MotorLocation {
    pub fn as_str(&self) -> &'static str {
        match self {
            MotorLocation::Normal => "normal",
            MotorLocation::Max => "max",
            MotorLocation::Min => "min",
        }
    }
}

/// Artificial bounds beyond which the unicycle counts as fallen.
///
/// Leaving either interval means no admissible motor torque can stop the fall
/// in time, so treating it as `fallen` over-approximates the unsafe set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub omega_bound: f64,
    pub v_bound: f64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { omega_bound: 10.0, v_bound: 15.0 }
    }
}

/// Clamps a torque request to the motor range and reports the motor location.
///
/// A request of exactly `±tau_max` stays in `Normal`.
pub fn apply_motor(requested: f64, p: &Params) -> Result<(f64, MotorLocation), ModelFault> {
    ModelFault::check("motor torque request", requested)?;
    Ok(if requested > p.tau_max {
        (p.tau_max, MotorLocation::Max)
    } else if requested < -p.tau_max {
        (-p.tau_max, MotorLocation::Min)
    } else {
        (requested, MotorLocation::Normal)
    })
}

pub fn check_fall(s: &State, bounds: &Bounds) -> UnicycleLocation {
    if s.theta.abs() >= FRAC_PI_2 || s.omega.abs() > bounds.omega_bound || s.v_w.abs() > bounds.v_bound {
        UnicycleLocation::Fallen
    } else {
        UnicycleLocation::Initial
    }
}

/// Snapshot of the composed automaton.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HybridConfiguration {
    pub uni_loc: UnicycleLocation,
    pub motor_loc: MotorLocation,
    pub state: State,
    /// Torque requested by the controller.
    pub motor_torque: f64,
    /// Torque the motor actually applies.
    #[serde(rename = "tau_W_mot")]
    pub tau_w_mot: f64,
    pub drive_intent: f64,
}

impl HybridConfiguration {
    pub fn new(state: State) -> Self {
        HybridConfiguration {
            uni_loc: UnicycleLocation::Initial,
            motor_loc: MotorLocation::Normal,
            state,
            motor_torque: 0.0,
            tau_w_mot: 0.0,
            drive_intent: 0.0,
        }
    }

    pub fn is_fallen(&self) -> bool {
        self.uni_loc == UnicycleLocation::Fallen
    }

    /// Records a new controller request and the resulting motor output.
    /// A fallen configuration ignores the request.
    pub fn with_request(self, requested: f64, p: &Params) -> Result<Self, ModelFault> {
        if self.is_fallen() {
            return Ok(self);
        }
        let (tau_w_mot, motor_loc) = apply_motor(requested, p)?;
        Ok(HybridConfiguration { motor_torque: requested, tau_w_mot, motor_loc, ..self })
    }
}

/// One discrete-time transition: integrate the flows for `dt` under the
/// current motor torque, then re-evaluate the motor and fall guards.
///
/// On entering `fallen` the continuous state is frozen at the entry state,
/// with `theta` held inside `[-pi/2, pi/2]`.
pub fn step_configuration(
    c: &HybridConfiguration,
    dt: f64,
    p: &Params,
    bounds: &Bounds,
) -> Result<HybridConfiguration, ModelFault> {
    if c.is_fallen() {
        return Ok(*c);
    }
    let fb = breakdown(&c.state, c.tau_w_mot, p);
    let mut state = integrate_step(&c.state, &fb, dt, p)?;
    let (tau_w_mot, motor_loc) = apply_motor(c.motor_torque, p)?;
    let uni_loc = check_fall(&state, bounds);
    if uni_loc == UnicycleLocation::Fallen {
        state.theta = state.theta.clamp(-FRAC_PI_2, FRAC_PI_2);
    }
    Ok(HybridConfiguration { uni_loc, motor_loc, state, tau_w_mot, ..*c })
}

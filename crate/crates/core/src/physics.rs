//! Longitudinal equations of motion.
//!
//! The unicycle is a wheel `W` with a rigid saddle `S` (rod, saddle and rider)
//! pinned at its hub. A hub motor applies `tau_W_mot` between the two; positive
//! torque turns the wheel counter-clockwise and the saddle clockwise. The
//! wheel's rotational inertia is folded into an adjusted translational mass.
//!
//! Everything here is a pure function of its arguments.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use libm::{cos, sin};
use serde::{Deserialize, Serialize};

use crate::error::Issue;

/// How the horizontal wheel force is split between saddle and wheel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaModel {
    /// `beta = (m_S / m_W) * (1 + 3 cos²θ)`, the reference model.
    #[default]
    Printed,
    /// `beta = (m_S / m_W) / (1 + m_S r_com² cos²θ / I_S)`, obtained by solving
    /// the rigid-contact constraint `a_S + alpha_S r_com cosθ = a_W` directly.
    Constraint,
}

impl BetaModel {
    fn is_printed(&self) -> bool {
        *self == BetaModel::Printed
    }
}

/// Physical constants of one unicycle. SI units throughout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Wheel radius.
    #[serde(rename = "r_W")]
    pub r_w: f64,
    /// Distance from the bottom of the saddle to its centre of mass.
    pub r_com: f64,
    /// Length of the saddle. Only used for drawing.
    #[serde(rename = "r_S")]
    pub r_s: f64,
    /// Actual wheel mass.
    #[serde(rename = "m_W_real")]
    pub m_w_real: f64,
    /// Saddle plus rider.
    #[serde(rename = "m_S")]
    pub m_s: f64,
    /// Saddle moment of inertia about its centre of mass.
    #[serde(rename = "I_S")]
    pub i_s: f64,
    /// Wheel mass distribution, 0.5 (solid disc) to 1 (ring).
    pub xi: f64,
    /// Symmetric motor torque limit.
    pub tau_max: f64,
    pub g: f64,
    #[serde(skip_serializing_if = "BetaModel::is_printed")]
    pub beta_model: BetaModel,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            r_w: 0.3,
            r_com: 0.8,
            r_s: 1.0,
            m_w_real: 3.0,
            m_s: 80.0,
            i_s: 17.07,
            xi: 0.75,
            tau_max: 150.0,
            g: 9.81,
            beta_model: BetaModel::Printed,
        }
    }
}

impl Params {
    /// Every violated invariant, with bare field names as paths.
    pub fn validate(&self) -> Vec<Issue> {
        let mut issues = Vec::new();
        let positive = [
            ("r_W", self.r_w),
            ("r_com", self.r_com),
            ("r_S", self.r_s),
            ("m_W_real", self.m_w_real),
            ("m_S", self.m_s),
            ("I_S", self.i_s),
            ("tau_max", self.tau_max),
            ("g", self.g),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                issues.push(Issue::new(name, alloc::format!("must be finite and > 0, got {value}")));
            }
        }
        if !(0.5..=1.0).contains(&self.xi) {
            issues.push(Issue::new("xi", alloc::format!("must lie in [0.5, 1], got {}", self.xi)));
        }
        if self.r_com > self.r_s {
            issues.push(Issue::new(
                "r_com",
                alloc::format!("must not exceed r_S ({} > {})", self.r_com, self.r_s),
            ));
        }
        issues
    }
}

/// Continuous state of the unicycle.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct State {
    #[serde(rename = "x_W")]
    pub x_w: f64,
    #[serde(rename = "v_W")]
    pub v_w: f64,
    pub theta: f64,
    pub omega: f64,
}

impl State {
    pub const REST: State = State { x_w: 0.0, v_w: 0.0, theta: 0.0, omega: 0.0 };

    pub fn new(x_w: f64, v_w: f64, theta: f64, omega: f64) -> Self {
        State { x_w, v_w, theta, omega }
    }

    pub fn is_finite(&self) -> bool {
        self.x_w.is_finite() && self.v_w.is_finite() && self.theta.is_finite() && self.omega.is_finite()
    }

    pub fn validate(&self) -> Vec<Issue> {
        let mut issues = Vec::new();
        for (name, value) in [("x_W", self.x_w), ("v_W", self.v_w), ("theta", self.theta), ("omega", self.omega)] {
            if !value.is_finite() {
                issues.push(Issue::new(name, "must be finite"));
            }
        }
        if self.theta.abs() > FRAC_PI_2 {
            issues.push(Issue::new("theta", alloc::format!("must lie in [-pi/2, pi/2], got {}", self.theta)));
        }
        issues
    }
}

/// Every intermediate force and torque of one evaluation of the model.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ForceBreakdown {
    #[serde(rename = "m_W")]
    pub m_w: f64,
    #[serde(rename = "F_W_mot")]
    pub f_w_mot: f64,
    #[serde(rename = "tau_S_g")]
    pub tau_s_g: f64,
    #[serde(rename = "F_W_g")]
    pub f_w_g: f64,
    #[serde(rename = "F_W")]
    pub f_w: f64,
    pub beta: f64,
    #[serde(rename = "F_W1")]
    pub f_w1: f64,
    #[serde(rename = "F_W2")]
    pub f_w2: f64,
    #[serde(rename = "tau_S_W")]
    pub tau_s_w: f64,
    #[serde(rename = "tau_S")]
    pub tau_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Derivatives {
    pub dx_w: f64,
    pub dv_w: f64,
    pub dtheta: f64,
    pub domega: f64,
}

impl Derivatives {
    pub fn is_finite(&self) -> bool {
        self.dx_w.is_finite() && self.dv_w.is_finite() && self.dtheta.is_finite() && self.domega.is_finite()
    }
}

/// Wheel mass with its rotational inertia folded in: `m_W_real (1 + xi)`.
pub fn adjusted_mass(p: &Params) -> f64 {
    p.m_w_real + p.xi * p.m_w_real
}

/// Horizontal force equivalent of the motor torque, positive along +x.
pub fn motor_force(tau_w_mot: f64, p: &Params) -> f64 {
    -(-tau_w_mot) / p.r_w
}

/// Gravity torque on the saddle and the horizontal push it transmits to the wheel.
pub fn gravity_terms(theta: f64, p: &Params) -> (f64, f64) {
    let weight = p.m_s * p.g;
    let (s, c) = (sin(theta), cos(theta));
    (weight * s * p.r_com, weight * c * s)
}

/// Ratio `F_W1 / F_W2` for the configured split model.
pub fn beta(theta: f64, p: &Params) -> f64 {
    let c = cos(theta);
    let mass_ratio = p.m_s / adjusted_mass(p);
    match p.beta_model {
        BetaModel::Printed => mass_ratio * (1.0 + 3.0 * c * c),
        BetaModel::Constraint => mass_ratio / (1.0 + p.m_s * p.r_com * p.r_com * c * c / p.i_s),
    }
}

/// Splits the horizontal wheel force into the saddle part `F_W1` and the wheel part `F_W2`.
pub fn force_split(f_w: f64, theta: f64, p: &Params) -> (f64, f64, f64) {
    let beta = beta(theta, p);
    let f_w1 = f_w * beta / (1.0 + beta);
    let f_w2 = f_w * 1.0 / (1.0 + beta);
    (beta, f_w1, f_w2)
}

/// Total torque on the saddle: motor reaction, gravity and the push from `F_W1`.
pub fn saddle_torque(f_w1: f64, theta: f64, tau_w_mot: f64, tau_s_g: f64, p: &Params) -> f64 {
    let tau_s_w = f_w1 * p.r_com * cos(theta);
    -tau_w_mot + tau_s_g + tau_s_w
}

pub fn breakdown(s: &State, tau_w_mot: f64, p: &Params) -> ForceBreakdown {
    let m_w = adjusted_mass(p);
    let f_w_mot = motor_force(tau_w_mot, p);
    let (tau_s_g, f_w_g) = gravity_terms(s.theta, p);
    let f_w = f_w_mot + f_w_g;
    let (beta, f_w1, f_w2) = force_split(f_w, s.theta, p);
    let tau_s_w = f_w1 * p.r_com * cos(s.theta);
    let tau_s = saddle_torque(f_w1, s.theta, tau_w_mot, tau_s_g, p);
    ForceBreakdown { m_w, f_w_mot, tau_s_g, f_w_g, f_w, beta, f_w1, f_w2, tau_s_w, tau_s }
}

/// Right-hand side of the flow equations.
pub fn derivatives(s: &State, tau_w_mot: f64, p: &Params) -> Derivatives {
    let fb = breakdown(s, tau_w_mot, p);
    Derivatives { dx_w: s.v_w, dv_w: fb.f_w2 / fb.m_w, dtheta: s.omega, domega: fb.tau_s / p.i_s }
}

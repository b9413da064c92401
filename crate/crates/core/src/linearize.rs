//! Affine surrogates for verification tools that only handle linear dynamics.
//!
//! The two nonlinear fields of the model, the wheel force `F_W2(theta, tau)`
//! and the saddle torque `tau_S(theta, tau)`, are sampled on a uniform grid
//! and replaced by their least-squares planes `c0 + c_theta*theta + c_tau*tau`.
//! The fitted model is then turned into a bounded affine hybrid automaton over
//! `(v_W, theta, omega)`; `x_W` does not feed back into anything and is dropped.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::automaton::Bounds;
use crate::error::FitError;
use crate::physics::{adjusted_mass, breakdown, Derivatives, Params, State};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AffineCoeffs {
    pub c0: f64,
    pub c_theta: f64,
    pub c_tau: f64,
}

impl AffineCoeffs {
    pub fn eval(&self, theta: f64, tau: f64) -> f64 {
        self.c0 + self.c_theta * theta + self.c_tau * tau
    }
}

/// Sampling domain of a fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitSpec {
    pub theta_range: [f64; 2],
    pub tau_range: [f64; 2],
    /// Points per axis.
    pub grid_n: usize,
}

impl FitSpec {
    /// `theta` in `[-pi/4, pi/4]`, the full motor band, 101 × 101 points.
    pub fn for_params(p: &Params) -> Self {
        FitSpec { theta_range: [-FRAC_PI_4, FRAC_PI_4], tau_range: [-p.tau_max, p.tau_max], grid_n: 101 }
    }

    fn check(&self) -> Result<(), FitError> {
        if self.grid_n < 3 {
            return Err(FitError::GridTooSmall(self.grid_n));
        }
        for (axis, [lo, hi]) in [("theta", self.theta_range), ("tau", self.tau_range)] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(FitError::EmptyRange { axis, lo, hi });
            }
        }
        Ok(())
    }

    /// Uniform grid points along one axis, endpoints included. Symmetric
    /// ranges give exactly mirrored points.
    pub fn axis(range: [f64; 2], n: usize) -> impl Iterator<Item = f64> + Clone {
        let [lo, hi] = range;
        let last = (n - 1) as f64;
        (0..n).map(move |i| {
            let s = i as f64 / last;
            let r = (n - 1 - i) as f64 / last;
            lo * r + hi * s
        })
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let taus = Self::axis(self.tau_range, self.grid_n);
        Self::axis(self.theta_range, self.grid_n).flat_map(move |th| taus.clone().map(move |tau| (th, tau)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldFit {
    pub coeffs: AffineCoeffs,
    /// Largest absolute residual on the grid.
    pub residual_max: f64,
    /// Sum of squared residuals on the grid.
    pub sse: f64,
    /// Largest absolute field value on the grid.
    pub field_max: f64,
}

/// Sum of squared residuals of `coeffs` against `field` on the grid.
pub fn grid_sse(spec: &FitSpec, coeffs: &AffineCoeffs, field: impl Fn(f64, f64) -> f64) -> f64 {
    spec.points().map(|(th, tau)| sq(field(th, tau) - coeffs.eval(th, tau))).sum()
}

/// Least-squares plane through `field` sampled on the grid of `spec`.
///
/// Solves the 3×3 normal equations in coordinates scaled to `[-1, 1]` on each
/// axis, then maps the coefficients back.
pub fn fit_field(spec: &FitSpec, field: impl Fn(f64, f64) -> f64) -> Result<FieldFit, FitError> {
    spec.check()?;
    let [tl, th_] = spec.theta_range;
    let [ul, uh] = spec.tau_range;
    let (theta_mid, theta_half) = (0.5 * (tl + th_), 0.5 * (th_ - tl));
    let (tau_mid, tau_half) = (0.5 * (ul + uh), 0.5 * (uh - ul));

    let mut normal = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    let mut samples = Vec::with_capacity(spec.grid_n * spec.grid_n);
    for (theta, tau) in spec.points() {
        let y = field(theta, tau);
        if !y.is_finite() {
            return Err(crate::error::ModelFault::NonFinite { quantity: "fitted field", value: y }.into());
        }
        let row = [1.0, (theta - theta_mid) / theta_half, (tau - tau_mid) / tau_half];
        for i in 0..3 {
            for j in 0..3 {
                normal[i][j] += row[i] * row[j];
            }
            rhs[i] += row[i] * y;
        }
        samples.push((theta, tau, y));
    }
    let [b0, b1, b2] = solve3(normal, rhs).ok_or(FitError::Singular)?;
    let c_theta = b1 / theta_half;
    let c_tau = b2 / tau_half;
    let coeffs = AffineCoeffs { c0: b0 - c_theta * theta_mid - c_tau * tau_mid, c_theta, c_tau };

    let mut residual_max: f64 = 0.0;
    let mut field_max: f64 = 0.0;
    let mut sse = 0.0;
    for (theta, tau, y) in samples {
        let r = y - coeffs.eval(theta, tau);
        residual_max = residual_max.max(r.abs());
        field_max = field_max.max(y.abs());
        sse += r * r;
    }
    Ok(FieldFit { coeffs, residual_max, sse, field_max })
}

/// Gaussian elimination with partial pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (x, p) in a[row].iter_mut().zip(pivot_row).skip(col) {
                *x -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}

fn sq(x: f64) -> f64 {
    x * x
}

/// Exact wheel force `F_W2` at lean `theta` and motor torque `tau`.
pub fn exact_f_w2(theta: f64, tau: f64, p: &Params) -> f64 {
    breakdown(&State::new(0.0, 0.0, theta, 0.0), tau, p).f_w2
}

/// Exact saddle torque `tau_S` at lean `theta` and motor torque `tau`.
pub fn exact_tau_s(theta: f64, tau: f64, p: &Params) -> f64 {
    breakdown(&State::new(0.0, 0.0, theta, 0.0), tau, p).tau_s
}

/// Fitted surrogates plus everything needed to rebuild the bounded model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineModel {
    pub format_version: u32,
    pub f2_coeffs: AffineCoeffs,
    #[serde(rename = "tauS_coeffs")]
    pub tau_s_coeffs: AffineCoeffs,
    pub theta_range: [f64; 2],
    pub tau_range: [f64; 2],
    pub grid_n: usize,
    pub residual_max_f2: f64,
    #[serde(rename = "residual_max_tauS")]
    pub residual_max_tau_s: f64,
    pub field_max_f2: f64,
    #[serde(rename = "field_max_tauS")]
    pub field_max_tau_s: f64,
    pub bounds: Bounds,
    pub params_snapshot: Params,
}

pub fn fit_affine(p: &Params, spec: &FitSpec, bounds: Bounds) -> Result<AffineModel, FitError> {
    let f2 = fit_field(spec, |th, tau| exact_f_w2(th, tau, p))?;
    let ts = fit_field(spec, |th, tau| exact_tau_s(th, tau, p))?;
    Ok(AffineModel {
        format_version: FORMAT_VERSION,
        f2_coeffs: f2.coeffs,
        tau_s_coeffs: ts.coeffs,
        theta_range: spec.theta_range,
        tau_range: spec.tau_range,
        grid_n: spec.grid_n,
        residual_max_f2: f2.residual_max,
        residual_max_tau_s: ts.residual_max,
        field_max_f2: f2.field_max,
        field_max_tau_s: ts.field_max,
        bounds,
        params_snapshot: *p,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Surrogate {
    pub derivatives: Derivatives,
    /// Whether `(theta, tau)` lay inside the fitted ranges.
    pub in_range: bool,
}

/// Flow equations with `F_W2` and `tau_S` replaced by their affine fits.
pub fn linearized_derivatives(s: &State, tau: f64, m: &AffineModel, p: &Params) -> Surrogate {
    let f_w2 = m.f2_coeffs.eval(s.theta, tau);
    let tau_s = m.tau_s_coeffs.eval(s.theta, tau);
    let in_range = (m.theta_range[0]..=m.theta_range[1]).contains(&s.theta)
        && (m.tau_range[0]..=m.tau_range[1]).contains(&tau);
    Surrogate {
        derivatives: Derivatives { dx_w: s.v_w, dv_w: f_w2 / adjusted_mass(p), dtheta: s.omega, domega: tau_s / p.i_s },
        in_range,
    }
}

/// `sum(coeff * var) + constant`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LinearExpr {
    pub terms: Vec<(String, f64)>,
    pub constant: f64,
}

impl LinearExpr {
    pub fn var(name: &str) -> Self {
        LinearExpr { terms: vec![(name.to_string(), 1.0)], constant: 0.0 }
    }

    pub fn constant(c: f64) -> Self {
        LinearExpr { terms: Vec::new(), constant: c }
    }

    pub fn coeff(&self, name: &str) -> f64 {
        self.terms.iter().filter(|(v, _)| v == name).map(|(_, c)| c).sum()
    }

    pub fn eval(&self, value_of: impl Fn(&str) -> f64) -> f64 {
        self.constant + self.terms.iter().map(|(v, c)| c * value_of(v)).sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    pub fn symbol(&self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "==",
        }
    }
}

/// `expr relation bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub expr: LinearExpr,
    pub relation: Relation,
    pub bound: f64,
}

impl Constraint {
    pub fn var(name: &str, relation: Relation, bound: f64) -> Self {
        Constraint { expr: LinearExpr::var(name), relation, bound }
    }

    pub fn holds(&self, value_of: impl Fn(&str) -> f64) -> bool {
        let lhs = self.expr.eval(value_of);
        match self.relation {
            Relation::Le => lhs <= self.bound,
            Relation::Ge => lhs >= self.bound,
            Relation::Eq => lhs == self.bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flow {
    pub variable: String,
    pub rhs: LinearExpr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub name: String,
    pub flows: Vec<Flow>,
    /// Conjunction; empty means `true`.
    pub invariant: Vec<Constraint>,
}

impl Location {
    pub fn flow(&self, variable: &str) -> Option<&LinearExpr> {
        self.flows.iter().find(|f| f.variable == variable).map(|f| &f.rhs)
    }
}

/// Guarded jump with identity reset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub source: String,
    pub target: String,
    pub label: String,
    /// Conjunction.
    pub guard: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundedHybridModel {
    pub name: String,
    /// Continuous state variables.
    pub variables: Vec<String>,
    /// Uncontrolled inputs (the torque request).
    pub inputs: Vec<String>,
    pub locations: Vec<Location>,
    pub transitions: Vec<Transition>,
    pub initial_location: String,
    pub initial: Vec<Constraint>,
    pub forbidden_location: String,
}

impl BoundedHybridModel {
    pub fn location(&self, name: &str) -> Option<&Location> {
        self.locations.iter().find(|l| l.name == name)
    }
}

pub const VAR_V: &str = "v";
pub const VAR_THETA: &str = "th";
pub const VAR_OMEGA: &str = "w";
pub const INPUT_TAU: &str = "u";
pub const LOC_NORMAL: &str = "riding_normal";
pub const LOC_MAX: &str = "riding_max";
pub const LOC_MIN: &str = "riding_min";
pub const LOC_FALLEN: &str = "fallen";

/// Builds the bounded affine automaton over `(v, th, w)` with the motor
/// torque request `u` as input.
///
/// Riding is split into the three motor locations; saturated locations use
/// the constant torque `±tau_max`. Leaving `|th| <= pi/2`, `|w| <= omega_bound`
/// or `|v| <= v_bound` leads to `fallen`, where everything stands still.
pub fn assemble_bounded_model(m: &AffineModel, p: &Params) -> BoundedHybridModel {
    let m_w = adjusted_mass(p);
    let tau_max = p.tau_max;
    let b = m.bounds;

    let affine_flow = |c: &AffineCoeffs, scale: f64, torque: Option<f64>| -> LinearExpr {
        let mut terms = vec![(VAR_THETA.to_string(), c.c_theta / scale)];
        let constant = match torque {
            None => {
                terms.push((INPUT_TAU.to_string(), c.c_tau / scale));
                c.c0 / scale
            }
            Some(t) => (c.c0 + c.c_tau * t) / scale,
        };
        LinearExpr { terms, constant }
    };
    let riding_flows = |torque: Option<f64>| {
        vec![
            Flow { variable: VAR_V.to_string(), rhs: affine_flow(&m.f2_coeffs, m_w, torque) },
            Flow { variable: VAR_THETA.to_string(), rhs: LinearExpr::var(VAR_OMEGA) },
            Flow { variable: VAR_OMEGA.to_string(), rhs: affine_flow(&m.tau_s_coeffs, p.i_s, torque) },
        ]
    };
    // Each bound as (upper, lower) constraint pairs.
    let state_box = [(VAR_THETA, FRAC_PI_2), (VAR_OMEGA, b.omega_bound), (VAR_V, b.v_bound)];
    let box_invariant: Vec<Constraint> = state_box
        .iter()
        .flat_map(|&(v, lim)| [Constraint::var(v, Relation::Le, lim), Constraint::var(v, Relation::Ge, -lim)])
        .collect();
    let with_box = |mut extra: Vec<Constraint>| {
        extra.extend(box_invariant.iter().cloned());
        extra
    };

    let locations = vec![
        Location {
            name: LOC_NORMAL.to_string(),
            flows: riding_flows(None),
            invariant: with_box(vec![
                Constraint::var(INPUT_TAU, Relation::Le, tau_max),
                Constraint::var(INPUT_TAU, Relation::Ge, -tau_max),
            ]),
        },
        Location {
            name: LOC_MAX.to_string(),
            flows: riding_flows(Some(tau_max)),
            invariant: with_box(vec![Constraint::var(INPUT_TAU, Relation::Ge, tau_max)]),
        },
        Location {
            name: LOC_MIN.to_string(),
            flows: riding_flows(Some(-tau_max)),
            invariant: with_box(vec![Constraint::var(INPUT_TAU, Relation::Le, -tau_max)]),
        },
        Location {
            name: LOC_FALLEN.to_string(),
            flows: [VAR_V, VAR_THETA, VAR_OMEGA]
                .iter()
                .map(|v| Flow { variable: v.to_string(), rhs: LinearExpr::constant(0.0) })
                .collect(),
            invariant: Vec::new(),
        },
    ];

    let jump = |source: &str, target: &str, label: &str, guard: Constraint| Transition {
        source: source.to_string(),
        target: target.to_string(),
        label: label.to_string(),
        guard: vec![guard],
    };
    let mut transitions = vec![
        jump(LOC_NORMAL, LOC_MAX, "saturate_max", Constraint::var(INPUT_TAU, Relation::Ge, tau_max)),
        jump(LOC_MAX, LOC_NORMAL, "release_max", Constraint::var(INPUT_TAU, Relation::Le, tau_max)),
        jump(LOC_NORMAL, LOC_MIN, "saturate_min", Constraint::var(INPUT_TAU, Relation::Le, -tau_max)),
        jump(LOC_MIN, LOC_NORMAL, "release_min", Constraint::var(INPUT_TAU, Relation::Ge, -tau_max)),
    ];
    for riding in [LOC_NORMAL, LOC_MAX, LOC_MIN] {
        for &(v, lim) in &state_box {
            transitions.push(jump(riding, LOC_FALLEN, "fall", Constraint::var(v, Relation::Ge, lim)));
            transitions.push(jump(riding, LOC_FALLEN, "fall", Constraint::var(v, Relation::Le, -lim)));
        }
    }

    BoundedHybridModel {
        name: "unicycle".to_string(),
        variables: vec![VAR_V.to_string(), VAR_THETA.to_string(), VAR_OMEGA.to_string()],
        inputs: vec![INPUT_TAU.to_string()],
        locations,
        transitions,
        initial_location: LOC_NORMAL.to_string(),
        initial: [VAR_V, VAR_THETA, VAR_OMEGA].iter().map(|v| Constraint::var(v, Relation::Eq, 0.0)).collect(),
        forbidden_location: LOC_FALLEN.to_string(),
    }
}

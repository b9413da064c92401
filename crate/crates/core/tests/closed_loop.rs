use unicycle_core::linearize::{fit_affine, linearized_derivatives};
use unicycle_core::physics::derivatives;
use unicycle_core::simulation::run;
use unicycle_core::{
    Bounds, FitSpec, IntentProfile, Params, PidConfig, PidController, SimConfig, State, Termination,
};

#[test]
fn runs_are_reproducible() {
    let sim = SimConfig { duration: 3.0, initial_state: State::new(0.0, 0.0, 0.08, 0.0), ..SimConfig::default() };
    let p = Params::default();
    let profile = IntentProfile::step(0.0, 1.0, 1.0);
    let a = run(&sim, &p, &profile, PidController::new(PidConfig::default()));
    let b = run(&sim, &p, &profile, PidController::new(PidConfig::default()));
    assert_eq!(a, b);
    assert_eq!(a.termination, Termination::Completed);
    assert_eq!(a.records.len(), 3000);
}

#[test]
fn narrow_fit_tracks_the_nonlinear_flow_near_upright() {
    let p = Params::default();
    let spec = FitSpec { theta_range: [-0.05, 0.05], tau_range: [-20.0, 20.0], grid_n: 41 };
    let m = fit_affine(&p, &spec, Bounds::default()).unwrap();
    for &(theta, tau) in &[(0.0, 0.0), (0.02, -5.0), (-0.04, 15.0), (0.05, 20.0)] {
        let s = State::new(0.0, 0.3, theta, -0.1);
        let exact = derivatives(&s, tau, &p);
        let lin = linearized_derivatives(&s, tau, &m, &p);
        assert!(lin.in_range);
        assert!((exact.dv_w - lin.derivatives.dv_w).abs() < 2e-3, "{exact:?} {lin:?}");
        assert!((exact.domega - lin.derivatives.domega).abs() < 2e-2, "{exact:?} {lin:?}");
        assert_eq!(exact.dtheta, lin.derivatives.dtheta);
    }
}

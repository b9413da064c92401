use unisim::scenario::Scenario;
use unisim::sweep::{sweep, write_summary_csv, SUMMARY_HEADER};

#[test]
fn three_by_three_by_three_grid() {
    let mut s = Scenario::default();
    s.sim.duration = 3.0;
    s.sim.initial_state.theta = 0.05;
    let rows = sweep(&s, &[-4000.0, -2000.0, 200.0], &[-6000.0, 0.0, 40.0], &[-750.0, -300.0, 30.0]);
    assert_eq!(rows.len(), 27);
    assert_eq!((rows[0].kp, rows[0].ki, rows[0].kd), (-4000.0, -6000.0, -750.0));
    assert_eq!((rows[26].kp, rows[26].ki, rows[26].kd), (200.0, 40.0, 30.0));
    // Positive gains push the saddle further over.
    assert!(rows.iter().filter(|r| r.kp > 0.0).all(|r| r.fell && r.fall_time.is_some()));
    assert!(!rows[0].fell);
    assert!(rows[0].settling_time.is_some());

    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("sweep.csv");
    write_summary_csv(&rows, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), SUMMARY_HEADER.join(","));
    assert_eq!(lines.count(), 27);
}

#[test]
fn sweep_matches_sequential_runs() {
    let mut s = Scenario::default();
    s.sim.duration = 1.0;
    s.sim.initial_state.theta = 0.05;
    let a = sweep(&s, &[-4000.0, -3000.0], &[-6000.0], &[-750.0]);
    let b = sweep(&s, &[-3000.0], &[-6000.0], &[-750.0]);
    assert_eq!(a[1], b[0]);
}

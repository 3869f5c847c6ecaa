use std::f64::consts::PI;

use lambda_imprint::analysis::PhaseFlip;
use lambda_imprint::pulses::{matched_input_for_target, PulseSpec};
use lambda_imprint::scenarios::{
    run_scenario, run_sweep, Case, PulseEvent, ScenarioConfig, ScenarioKind, SweepAxis, SweepSpec,
};
use lambda_imprint::Error;

#[test]
fn matched_pair_stores_near_target() {
    let cfg = ScenarioConfig::new(Case::SechIdeal, ScenarioKind::Storage)
        .with_event(PulseEvent::Pair(matched_input_for_target(4.0, 2.0 * PI, 1.0)));
    let res = run_scenario(&cfg).unwrap();
    let imprint = res.storage().unwrap();
    assert!((imprint.center - 4.0).abs() < 0.1, "{}", imprint.center);
    assert!(imprint.peak_population > 0.5);
    let (in13, in23) = res.input_areas;
    let (out13, out23) = res.output_areas;
    assert!((in13.hypot(in23) / out13.hypot(out23) - 1.0).abs() < 0.02);
    assert!(out23 > in23 && out13 < in13);
}

#[test]
fn longer_control_displaces_without_flip() {
    let cfg = ScenarioConfig::displacement(Case::SechIdeal, 3.0, 1.5, 2.0 * PI);
    let d = run_scenario(&cfg).unwrap().displacement.unwrap();
    assert_eq!(d.flip, Some(PhaseFlip::Unflipped));
    assert!(d.delta > 0.0 && !d.pushed_out, "{d:?}");
    assert!((d.predicted - 5.0f64.ln()).abs() < 1e-12);
}

#[test]
fn sweep_rows_keep_order_and_ignore_worker_count() {
    let mut cfg = ScenarioConfig::storage(Case::SechIdeal, 3.0, false);
    let values: Vec<f64> = [5.0, 2.0, 4.0].iter().map(|x: &f64| 2.0 * PI * (-x).exp()).collect();
    cfg.sweep = Some(SweepSpec { axis: SweepAxis::ControlArea, values: values.clone() });
    let serial = run_sweep(&cfg).unwrap();
    cfg.workers = 3;
    let parallel = run_sweep(&cfg).unwrap();
    assert_eq!(serial, parallel);
    assert_eq!(serial.rows.iter().map(|r| r.value).collect::<Vec<_>>(), values);
    for (area, loc) in serial.series() {
        let x = (2.0 * PI / area).ln();
        assert!((loc - x).abs() < 0.1, "{x} -> {loc}");
    }
}

#[test]
fn storage_beyond_the_medium_is_reported_as_pushed_out() {
    let mut cfg = ScenarioConfig::storage(Case::SechIdeal, 3.0, false).with_length(4.0);
    cfg.sweep = Some(SweepSpec { axis: SweepAxis::ControlArea, values: vec![2.0 * PI * (-5.0f64).exp()] });
    let table = run_sweep(&cfg).unwrap();
    let point = table.rows[0].outcome.clone().unwrap();
    assert!(point.pushed_out);
    assert_eq!(point.location, 4.0);
}

#[test]
fn invalid_configurations_are_rejected_before_running() {
    let empty = ScenarioConfig::new(Case::SechIdeal, ScenarioKind::Propagation);
    assert!(matches!(run_scenario(&empty), Err(Error::Validation(_))));

    let crowded = ScenarioConfig::new(Case::SechIdeal, ScenarioKind::Propagation)
        .with_event(PulseEvent::Signal(PulseSpec::sech(2.0 * PI, 1.0, 0.0)))
        .with_event(PulseEvent::Control(PulseSpec::sech(2.0 * PI, 1.0, 5.0)));
    assert!(matches!(run_scenario(&crowded), Err(Error::Validation(_))));

    assert!(ScenarioConfig::retrieval(Case::SechIdeal, 3).is_err());

    let mut no_workers = ScenarioConfig::sit(Case::SechIdeal);
    no_workers.workers = 0;
    assert!(matches!(run_scenario(&no_workers), Err(Error::Validation(_))));
}

#[test]
fn decay_lowers_the_transmitted_signal() {
    let ideal = run_scenario(&ScenarioConfig::sit(Case::SechIdeal)).unwrap();
    let mut cfg = ScenarioConfig::sit(Case::SechDecay);
    cfg.medium.gamma3_tau = 0.05;
    let lossy = run_scenario(&cfg).unwrap();
    assert!(lossy.output_areas.0 < ideal.output_areas.0);
}

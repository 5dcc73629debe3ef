use std::ffi::{CStr, CString};
use std::ptr;

use fpr_consensus_ffi::*;

const EXAMPLE: &str = include_str!("../../core/fixtures/worked_example.json");

fn load(json: &str) -> (FprStatus, *mut FprPanel) {
    let c = CString::new(json).unwrap();
    let mut panel = ptr::null_mut();
    let status = unsafe { fpr_panel_from_json(c.as_ptr(), &mut panel) };
    (status, panel)
}

fn last_error() -> String {
    let p = fpr_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn analyzes_reference_panel() {
    let (status, panel) = load(EXAMPLE);
    assert_eq!(status, FprStatus::Ok);
    unsafe {
        let mut m = 0;
        let mut n = 0;
        assert_eq!(fpr_panel_expert_count(panel, &mut m), FprStatus::Ok);
        assert_eq!(fpr_panel_alternative_count(panel, &mut n), FprStatus::Ok);
        assert_eq!((m, n), (4, 4));

        let (mut v, mut known) = (-1.0, true);
        assert_eq!(fpr_panel_get_cell(panel, 0, 1, 0, &mut v, &mut known), FprStatus::Ok);
        assert!(!known);
        assert_eq!(v, -1.0);

        let mut a = FprAnalysis::default();
        assert_eq!(fpr_panel_analyze(panel, 0.65, &mut a), FprStatus::Ok);
        assert!((a.global_cl - 0.93).abs() <= 0.02);
        assert!((a.cr - 0.74).abs() <= 0.01);
        assert!((a.ccl - 0.81).abs() <= 0.01);

        assert_eq!(fpr_panel_get_cell(panel, 0, 1, 0, &mut v, &mut known), FprStatus::Ok);
        assert!(known);
        assert!((v - 0.67).abs() < 1e-9);

        let mut json = ptr::null_mut();
        assert_eq!(fpr_panel_analysis_json(panel, 0.65, &mut json), FprStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        fpr_string_free(json);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["per_expert_cl"].as_array().unwrap().len(), 4);

        fpr_panel_free(panel);
    }
}

#[test]
fn optimizes_to_threshold() {
    let (_, panel) = load(EXAMPLE);
    unsafe {
        let mut opt = ptr::null_mut();
        assert_eq!(fpr_panel_optimize(panel, 0.65, 0.89, ptr::null(), &mut opt), FprStatus::Ok);
        assert!(fpr_optimization_best_ccl(opt) >= 0.89);
        let mut t = FprTermination::Frozen;
        assert_eq!(fpr_optimization_termination(opt, &mut t), FprStatus::Ok);
        assert_eq!(t, FprTermination::ThresholdReached);
        assert!(fpr_optimization_trials_used(opt) > 0);

        let count = fpr_optimization_suggestion_count(opt);
        assert!(count > 0);
        let mut s = FprSuggestion::default();
        assert_eq!(fpr_optimization_get_suggestion(opt, 0, &mut s), FprStatus::Ok);
        let mut best = 0.0;
        assert_eq!(fpr_optimization_best_cell(opt, s.expert, s.row, s.col, &mut best), FprStatus::Ok);
        assert_eq!(best, s.to);
        assert_eq!(fpr_optimization_get_suggestion(opt, count, &mut s), FprStatus::OutOfRange);
        assert!(fpr_optimization_unchanged_expert_count(opt) <= 4);

        fpr_optimization_free(opt);
        fpr_panel_free(panel);
    }
}

#[test]
fn config_round_trips_through_c_struct() {
    let cfg = fpr_sa_config_default();
    assert_eq!(cfg.temp0, 0.0);
    assert_eq!(cfg.tempfactor, 0.95);
    assert_eq!(cfg.sizefactor, 16);

    let (_, panel) = load(EXAMPLE);
    unsafe {
        let bad = FprSaConfig { fastfactor: 0.99, ..cfg };
        let mut opt = ptr::null_mut();
        assert_eq!(fpr_panel_optimize(panel, 0.65, 0.89, &bad, &mut opt), FprStatus::InvalidInput);
        assert!(opt.is_null());
        assert!(last_error().contains("fastfactor"));
        fpr_panel_free(panel);
    }
}

#[test]
fn reports_errors_with_codes() {
    let (status, panel) = load("{not json");
    assert_eq!(status, FprStatus::InvalidInput);
    assert!(panel.is_null());
    assert!(!last_error().is_empty());

    let out_of_range = EXAMPLE.replacen("0.33", "1.33", 1);
    assert_eq!(load(&out_of_range).0, FprStatus::InvalidInput);
    assert!(last_error().contains("outside [0, 1]"));

    let disconnected = r#"{"alternatives": ["a","b","c"], "experts": [
        {"id": "e1", "matrix": [[null, 0.6, null], [null, null, null], [null, null, null]]},
        {"id": "e2", "matrix": [[null, 0.6, 0.5], [0.4, null, 0.4], [0.5, 0.6, null]]}]}"#;
    let (status, panel) = load(disconnected);
    assert_eq!(status, FprStatus::Ok);
    unsafe {
        assert_eq!(fpr_panel_complete(panel), FprStatus::Unestimable);
        let mut a = FprAnalysis::default();
        assert_eq!(fpr_panel_analyze(panel, 0.5, &mut a), FprStatus::Unestimable);
        fpr_panel_free(panel);
    }

    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(fpr_panel_from_json(ptr::null(), &mut out), FprStatus::NullPointer);
        assert_eq!(fpr_panel_complete(ptr::null_mut()), FprStatus::NullPointer);
        assert!(fpr_optimization_best_ccl(ptr::null()).is_nan());
        fpr_panel_free(ptr::null_mut());
        fpr_string_free(ptr::null_mut());
    }

    let (_, panel) = load(EXAMPLE);
    unsafe {
        let mut a = FprAnalysis::default();
        assert_eq!(fpr_panel_analyze(panel, 1.5, &mut a), FprStatus::InvalidInput);
        assert_eq!(fpr_panel_analyze(panel, 0.5, &mut a), FprStatus::Ok);
        assert!(fpr_last_error_message().is_null());
        fpr_panel_free(panel);
    }
}

#[test]
fn version_is_static_string() {
    let v = unsafe { CStr::from_ptr(fpr_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

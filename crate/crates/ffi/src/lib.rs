//! C ABI over `fpr-consensus`.
//!
//! Panels and optimization results are opaque handles owned by the caller and
//! released with the matching `*_free` function. Every fallible call returns an
//! [`FprStatus`]; on failure a description is available from
//! [`fpr_last_error_message`] on the same thread. Strings returned through
//! `char **` out-parameters must be released with [`fpr_string_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use libc::{c_char, size_t};

use fpr_consensus::annealer::unchanged_experts;
use fpr_consensus::report::AnalysisPayload;
use fpr_consensus::{
    analyze_panel, anneal, complete_panel, suggest_changes, CompleteFpr, Error, ExpertPanel, IncompleteFpr,
    InitialTemperature, OptimizationResult, PanelDocument, SaParams, SuggestedChange, Termination,
    WeightConfig,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FprStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed document, out-of-range value, bad weights or parameters.
    InvalidInput = 3,
    /// Missing cells could not be estimated.
    Unestimable = 4,
    /// Expert, row or column index out of range.
    OutOfRange = 5,
    /// A Rust panic was caught at the boundary.
    Internal = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FprTermination {
    ThresholdReached = 0,
    Frozen = 1,
    TrialCapHit = 2,
}

impl From<Termination> for FprTermination {
    fn from(t: Termination) -> Self {
        match t {
            Termination::ThresholdReached => FprTermination::ThresholdReached,
            Termination::Frozen => FprTermination::Frozen,
            Termination::TrialCapHit => FprTermination::TrialCapHit,
        }
    }
}

/// Panel-level metrics.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FprAnalysis {
    pub global_cl: f64,
    pub cr: f64,
    pub ccl: f64,
}

/// Annealing parameters. A `temp0` of zero or less selects the adaptive start
/// temperature.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FprSaConfig {
    pub temp0: f64,
    pub fastfactor: f64,
    pub tempfactor: f64,
    pub frzlim: u32,
    pub sizefactor: u32,
    pub minpercent: f64,
    pub tcent: f64,
    pub move_width: f64,
    pub value_grid: f64,
    pub seed: u64,
    pub max_trials: u64,
    pub enforce_reciprocity: bool,
}

impl From<SaParams> for FprSaConfig {
    fn from(p: SaParams) -> Self {
        Self {
            temp0: match p.temp0 {
                InitialTemperature::Adaptive => 0.0,
                InitialTemperature::Fixed(t) => t,
            },
            fastfactor: p.fastfactor,
            tempfactor: p.tempfactor,
            frzlim: p.frzlim,
            sizefactor: p.sizefactor,
            minpercent: p.minpercent,
            tcent: p.tcent,
            move_width: p.move_width,
            value_grid: p.value_grid,
            seed: p.seed,
            max_trials: p.max_trials,
            enforce_reciprocity: p.enforce_reciprocity,
        }
    }
}

impl From<FprSaConfig> for SaParams {
    fn from(c: FprSaConfig) -> Self {
        Self {
            temp0: if c.temp0 > 0.0 {
                InitialTemperature::Fixed(c.temp0)
            } else {
                InitialTemperature::Adaptive
            },
            fastfactor: c.fastfactor,
            tempfactor: c.tempfactor,
            frzlim: c.frzlim,
            sizefactor: c.sizefactor,
            minpercent: c.minpercent,
            tcent: c.tcent,
            move_width: c.move_width,
            value_grid: c.value_grid,
            seed: c.seed,
            max_trials: c.max_trials,
            enforce_reciprocity: c.enforce_reciprocity,
        }
    }
}

/// One suggested modification. Indices are zero-based.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FprSuggestion {
    pub expert: size_t,
    pub row: size_t,
    pub col: size_t,
    pub from: f64,
    pub to: f64,
}

/// Opaque expert panel, possibly incomplete.
pub struct FprPanel {
    document: PanelDocument,
    raw: ExpertPanel<IncompleteFpr>,
    completed: Option<ExpertPanel<CompleteFpr>>,
}

impl FprPanel {
    fn completed(&mut self) -> Result<&ExpertPanel<CompleteFpr>, Error> {
        if self.completed.is_none() {
            self.completed = Some(complete_panel(&self.raw)?);
        }
        Ok(self.completed.as_ref().expect("just set"))
    }
}

/// Opaque annealing outcome.
pub struct FprOptimization {
    result: OptimizationResult,
    suggestions: Vec<SuggestedChange>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: impl Into<String>) {
    let message = message.into().replace('\0', " ");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(message).ok());
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn fail(status: FprStatus, message: impl Into<String>) -> FprStatus {
    set_last_error(message);
    status
}

fn status_of(e: &Error) -> FprStatus {
    match e {
        Error::Unestimable { .. } => FprStatus::Unestimable,
        Error::IndexOutOfRange { .. } | Error::DiagonalPair(_) => FprStatus::OutOfRange,
        _ => FprStatus::InvalidInput,
    }
}

fn from_core(e: Error) -> FprStatus {
    fail(status_of(&e), e.to_string())
}

fn guard(f: impl FnOnce() -> FprStatus) -> FprStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(FprStatus::Internal, "internal panic"),
    }
}

fn weights(delta: f64, gamma: f64) -> Result<WeightConfig, FprStatus> {
    WeightConfig::new(delta, gamma).map_err(from_core)
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> FprStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            FprStatus::Ok
        }
        Err(_) => fail(FprStatus::Internal, "string contains an interior NUL"),
    }
}

/// Message describing the last failure on this thread, or NULL. The pointer
/// stays valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn fpr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fpr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a pointer obtained from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn fpr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Default annealing parameters.
#[no_mangle]
pub extern "C" fn fpr_sa_config_default() -> FprSaConfig {
    SaParams::default().into()
}

/// Parses a JSON panel document into a new panel handle.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fpr_panel_from_json(json: *const c_char, out: *mut *mut FprPanel) -> FprStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return fail(FprStatus::NullPointer, "null argument");
        }
        let text = match CStr::from_ptr(json).to_str() {
            Ok(t) => t,
            Err(_) => return fail(FprStatus::InvalidUtf8, "panel document is not UTF-8"),
        };
        let document = match PanelDocument::from_json(text) {
            Ok(d) => d,
            Err(e) => return from_core(e),
        };
        let raw = match document.to_panel() {
            Ok(p) => p,
            Err(e) => return from_core(e),
        };
        *out = Box::into_raw(Box::new(FprPanel { document, raw, completed: None }));
        FprStatus::Ok
    })
}

/// Releases a panel handle.
///
/// # Safety
/// `panel` must be NULL or a handle from [`fpr_panel_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fpr_panel_free(panel: *mut FprPanel) {
    if !panel.is_null() {
        drop(Box::from_raw(panel));
    }
}

/// Number of experts in the panel.
///
/// # Safety
/// `panel` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fpr_panel_expert_count(panel: *const FprPanel, out: *mut size_t) -> FprStatus {
    guard(|| match (panel.as_ref(), out.is_null()) {
        (Some(p), false) => {
            *out = p.raw.m();
            FprStatus::Ok
        }
        _ => fail(FprStatus::NullPointer, "null argument"),
    })
}

/// Number of alternatives in the panel.
///
/// # Safety
/// `panel` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fpr_panel_alternative_count(panel: *const FprPanel, out: *mut size_t) -> FprStatus {
    guard(|| match (panel.as_ref(), out.is_null()) {
        (Some(p), false) => {
            *out = p.raw.n();
            FprStatus::Ok
        }
        _ => fail(FprStatus::NullPointer, "null argument"),
    })
}

/// Estimates all missing cells. Idempotent.
///
/// # Safety
/// `panel` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fpr_panel_complete(panel: *mut FprPanel) -> FprStatus {
    guard(|| match panel.as_mut() {
        Some(p) => match p.completed() {
            Ok(_) => FprStatus::Ok,
            Err(e) => from_core(e),
        },
        None => fail(FprStatus::NullPointer, "null panel"),
    })
}

/// Reads one cell. Before completion, `*out_known` is false for missing cells
/// and `*out_value` is left untouched; after [`fpr_panel_complete`] every cell
/// is known.
///
/// # Safety
/// `panel` must be a live handle; `out_value` and `out_known` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn fpr_panel_get_cell(
    panel: *const FprPanel,
    expert: size_t,
    row: size_t,
    col: size_t,
    out_value: *mut f64,
    out_known: *mut bool,
) -> FprStatus {
    guard(|| {
        let Some(p) = panel.as_ref() else {
            return fail(FprStatus::NullPointer, "null panel");
        };
        if out_value.is_null() || out_known.is_null() {
            return fail(FprStatus::NullPointer, "null output pointer");
        }
        let n = p.raw.n();
        if expert >= p.raw.m() || row >= n || col >= n {
            return fail(FprStatus::OutOfRange, format!("cell ({expert}, {row}, {col}) out of range"));
        }
        let value = match &p.completed {
            Some(c) => Some(c.relation(expert).get(row, col)),
            None => p.raw.relation(expert).get(row, col),
        };
        *out_known = value.is_some();
        if let Some(v) = value {
            *out_value = v;
        }
        FprStatus::Ok
    })
}

/// Completes the panel if needed and computes CL, CR and CCL for `delta`.
///
/// # Safety
/// `panel` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fpr_panel_analyze(
    panel: *mut FprPanel,
    delta: f64,
    out: *mut FprAnalysis,
) -> FprStatus {
    guard(|| {
        let Some(p) = panel.as_mut() else {
            return fail(FprStatus::NullPointer, "null panel");
        };
        if out.is_null() {
            return fail(FprStatus::NullPointer, "null output pointer");
        }
        let w = match weights(delta, WeightConfig::DEFAULT_GAMMA) {
            Ok(w) => w,
            Err(s) => return s,
        };
        let report = match p.completed().and_then(|c| analyze_panel(c, &w)) {
            Ok(r) => r,
            Err(e) => return from_core(e),
        };
        *out = FprAnalysis { global_cl: report.global_cl, cr: report.cr(), ccl: report.ccl };
        FprStatus::Ok
    })
}

/// Full analysis report as JSON, in the same layout the command-line tool writes.
///
/// # Safety
/// `panel` must be a live handle and `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fpr_panel_analysis_json(
    panel: *mut FprPanel,
    delta: f64,
    out_json: *mut *mut c_char,
) -> FprStatus {
    guard(|| {
        let Some(p) = panel.as_mut() else {
            return fail(FprStatus::NullPointer, "null panel");
        };
        if out_json.is_null() {
            return fail(FprStatus::NullPointer, "null output pointer");
        }
        let w = match weights(delta, WeightConfig::DEFAULT_GAMMA) {
            Ok(w) => w,
            Err(s) => return s,
        };
        let completed = match p.completed() {
            Ok(c) => c,
            Err(e) => return from_core(e),
        };
        let payload = match analyze_panel(completed, &w) {
            Ok(r) => AnalysisPayload::new(completed, &r),
            Err(e) => return from_core(e),
        };
        write_string(out_json, serde_json::to_string(&payload).expect("serializable"))
    })
}

/// Panel as a JSON document: completed values once [`fpr_panel_complete`] has
/// run, the original cells otherwise.
///
/// # Safety
/// `panel` must be a live handle and `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fpr_panel_to_json(panel: *const FprPanel, out_json: *mut *mut c_char) -> FprStatus {
    guard(|| {
        let Some(p) = panel.as_ref() else {
            return fail(FprStatus::NullPointer, "null panel");
        };
        if out_json.is_null() {
            return fail(FprStatus::NullPointer, "null output pointer");
        }
        let mut doc = match &p.completed {
            Some(c) => PanelDocument::from_complete_panel(c),
            None => PanelDocument::from_panel(&p.raw),
        };
        doc.weights = p.document.weights;
        doc.sa = p.document.sa;
        write_string(out_json, doc.to_json())
    })
}

/// Completes the panel if needed and anneals it. `config` may be NULL for defaults.
///
/// # Safety
/// `panel` must be a live handle, `config` NULL or valid, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fpr_panel_optimize(
    panel: *mut FprPanel,
    delta: f64,
    gamma: f64,
    config: *const FprSaConfig,
    out: *mut *mut FprOptimization,
) -> FprStatus {
    guard(|| {
        let Some(p) = panel.as_mut() else {
            return fail(FprStatus::NullPointer, "null panel");
        };
        if out.is_null() {
            return fail(FprStatus::NullPointer, "null output pointer");
        }
        let w = match weights(delta, gamma) {
            Ok(w) => w,
            Err(s) => return s,
        };
        let params: SaParams = config.as_ref().map_or_else(SaParams::default, |c| (*c).into());
        let completed = match p.completed() {
            Ok(c) => c,
            Err(e) => return from_core(e),
        };
        let result = match anneal(completed, &w, &params) {
            Ok(r) => r,
            Err(e) => return from_core(e),
        };
        let suggestions = match suggest_changes(completed, &result.best_panel, 0.0) {
            Ok(s) => s,
            Err(e) => return from_core(e),
        };
        *out = Box::into_raw(Box::new(FprOptimization { result, suggestions }));
        FprStatus::Ok
    })
}

/// Releases an optimization handle.
///
/// # Safety
/// `opt` must be NULL or a handle from [`fpr_panel_optimize`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fpr_optimization_free(opt: *mut FprOptimization) {
    if !opt.is_null() {
        drop(Box::from_raw(opt));
    }
}

/// Best CCL found, or NaN for a NULL handle.
///
/// # Safety
/// `opt` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fpr_optimization_best_ccl(opt: *const FprOptimization) -> f64 {
    opt.as_ref().map_or(f64::NAN, |o| o.result.best_ccl)
}

/// # Safety
/// `opt` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fpr_optimization_termination(
    opt: *const FprOptimization,
    out: *mut FprTermination,
) -> FprStatus {
    guard(|| match (opt.as_ref(), out.is_null()) {
        (Some(o), false) => {
            *out = o.result.termination.into();
            FprStatus::Ok
        }
        _ => fail(FprStatus::NullPointer, "null argument"),
    })
}

/// Total annealing trials, or 0 for a NULL handle.
///
/// # Safety
/// `opt` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fpr_optimization_trials_used(opt: *const FprOptimization) -> u64 {
    opt.as_ref().map_or(0, |o| o.result.trials_used)
}

/// Number of changed cells, grouped by expert and ordered by decreasing magnitude.
///
/// # Safety
/// `opt` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fpr_optimization_suggestion_count(opt: *const FprOptimization) -> size_t {
    opt.as_ref().map_or(0, |o| o.suggestions.len())
}

/// Number of experts whose relation was left unchanged.
///
/// # Safety
/// `opt` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fpr_optimization_unchanged_expert_count(opt: *const FprOptimization) -> size_t {
    opt.as_ref().map_or(0, |o| unchanged_experts(&o.suggestions, o.result.best_panel.m()).len())
}

/// # Safety
/// `opt` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fpr_optimization_get_suggestion(
    opt: *const FprOptimization,
    index: size_t,
    out: *mut FprSuggestion,
) -> FprStatus {
    guard(|| {
        let Some(o) = opt.as_ref() else {
            return fail(FprStatus::NullPointer, "null handle");
        };
        if out.is_null() {
            return fail(FprStatus::NullPointer, "null output pointer");
        }
        let Some(c) = o.suggestions.get(index) else {
            return fail(FprStatus::OutOfRange, format!("suggestion {index} out of range"));
        };
        *out = FprSuggestion {
            expert: c.expert,
            row: c.cell.0,
            col: c.cell.1,
            from: c.original,
            to: c.suggested,
        };
        FprStatus::Ok
    })
}

/// Reads one cell of the best panel found.
///
/// # Safety
/// `opt` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fpr_optimization_best_cell(
    opt: *const FprOptimization,
    expert: size_t,
    row: size_t,
    col: size_t,
    out: *mut f64,
) -> FprStatus {
    guard(|| {
        let Some(o) = opt.as_ref() else {
            return fail(FprStatus::NullPointer, "null handle");
        };
        if out.is_null() {
            return fail(FprStatus::NullPointer, "null output pointer");
        }
        let panel = &o.result.best_panel;
        if expert >= panel.m() || row >= panel.n() || col >= panel.n() {
            return fail(FprStatus::OutOfRange, format!("cell ({expert}, {row}, {col}) out of range"));
        }
        *out = panel.relation(expert).get(row, col);
        FprStatus::Ok
    })
}

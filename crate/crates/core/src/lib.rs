//! Group decision making with fuzzy preference relations.
//!
//! The crate completes incomplete expert relations from additive
//! transitivity, measures per-expert consistency and panel consensus, and
//! anneals a panel towards a combined consistency/consensus level (CCL),
//! reporting the cells each expert would need to change.
//!
//! ```
//! use fpr_consensus::{complete_panel, analyze_panel, ExpertPanel, IncompleteFpr, WeightConfig};
//!
//! let raw = |rows: [[Option<f64>; 3]; 3]| rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>();
//! let a = IncompleteFpr::validate(&raw([
//!     [None, Some(0.7), None],
//!     [Some(0.3), None, Some(0.6)],
//!     [None, Some(0.4), None],
//! ])).unwrap();
//! let b = IncompleteFpr::validate(&raw([
//!     [None, Some(0.6), Some(0.6)],
//!     [Some(0.4), None, Some(0.5)],
//!     [Some(0.4), Some(0.5), None],
//! ])).unwrap();
//! let panel = complete_panel(&ExpertPanel::from_relations(vec![a, b]).unwrap()).unwrap();
//! let report = analyze_panel(&panel, &WeightConfig::default()).unwrap();
//! assert!(report.ccl > 0.0 && report.ccl <= 1.0);
//! ```

pub mod annealer;
pub mod cli;
pub mod completion;
pub mod document;
pub mod error;
pub mod fpr;
pub mod metrics;
pub mod report;

pub use annealer::{
    anneal, anneal_restarts, cost, neighbor, suggest_changes, InitialTemperature, OptimizationResult,
    SaParams, SuggestedChange, Termination,
};
pub use completion::{candidate_estimates, complete, complete_panel, EstimateBundle};
pub use document::{generate_panel, GenerateSpec, PanelDocument};
pub use error::{Error, Result};
pub use fpr::{
    is_additively_consistent, CompleteFpr, ExpertPanel, IncompleteFpr, PreferenceDegree, WeightConfig,
};
pub use metrics::{
    analyze_panel, ccl, collective_similarity, consensus_degrees, consistency_level, consistency_pair,
    global_consistency, pair_similarity, AnalysisReport,
};

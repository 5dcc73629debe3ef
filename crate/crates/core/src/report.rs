//! Machine-readable report payloads written by the command-line tool.
//!
//! Every numeric payload carries full-precision values; the `rendered` block
//! repeats the headline figures rounded to two decimals.

use serde::Serialize;

use crate::annealer::{MultiRestartResult, RestartSummary, SuggestedChange, TraceEntry};
use crate::document::PanelDocument;
use crate::fpr::{CompleteFpr, ExpertPanel, SquareMatrix};
use crate::metrics::AnalysisReport;

pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

fn grid(m: &SquareMatrix) -> Vec<Vec<Option<f64>>> {
    m.off_diagonal_rows()
}

fn grid2(m: &SquareMatrix) -> Vec<Vec<Option<f64>>> {
    m.off_diagonal_rows().into_iter().map(|row| row.into_iter().map(|c| c.map(round2)).collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenderedMetrics {
    pub per_expert_cl: Vec<f64>,
    pub global_cl: f64,
    pub collective_sm: Vec<Vec<Option<f64>>>,
    pub ca: Vec<f64>,
    pub cr: f64,
    pub ccl: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisPayload {
    pub experts: Vec<String>,
    pub alternatives: Vec<String>,
    pub delta: f64,
    pub per_expert_cl: Vec<f64>,
    pub global_cl: f64,
    pub collective_sm: Vec<Vec<Option<f64>>>,
    pub ca: Vec<f64>,
    pub cr: f64,
    pub ccl: f64,
    pub rendered: RenderedMetrics,
}

impl AnalysisPayload {
    pub fn new(panel: &ExpertPanel<CompleteFpr>, report: &AnalysisReport) -> Self {
        let per_expert_cl = report.per_expert_cl();
        let sm = &report.consensus.collective_sm;
        let ca = report.consensus.alternative_consensus.clone();
        Self {
            experts: panel.experts().to_vec(),
            alternatives: panel.alternatives().to_vec(),
            delta: report.weights.delta(),
            rendered: RenderedMetrics {
                per_expert_cl: per_expert_cl.iter().copied().map(round2).collect(),
                global_cl: round2(report.global_cl),
                collective_sm: grid2(sm),
                ca: ca.iter().copied().map(round2).collect(),
                cr: round2(report.cr()),
                ccl: round2(report.ccl),
            },
            per_expert_cl,
            global_cl: report.global_cl,
            collective_sm: grid(sm),
            ca,
            cr: report.cr(),
            ccl: report.ccl,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuggestionEntry {
    pub expert: usize,
    pub expert_id: String,
    /// Zero-based `[row, column]`.
    pub cell: [usize; 2],
    pub from: f64,
    pub to: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitialMetrics {
    pub global_cl: f64,
    pub cr: f64,
    pub ccl: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationPayload {
    #[serde(flatten)]
    pub analysis: AnalysisPayload,
    pub gamma: f64,
    pub initial: InitialMetrics,
    pub best_ccl: f64,
    pub best_cost: f64,
    pub termination: &'static str,
    pub trials_used: u64,
    pub seed: u64,
    pub initial_temperature: f64,
    pub report_threshold: f64,
    pub suggestions: Vec<SuggestionEntry>,
    pub unchanged_experts: Vec<String>,
    pub restarts: Vec<RestartSummary>,
    pub best_panel: PanelDocument,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceEntry>>,
}

pub struct OptimizationInputs<'a> {
    pub initial_report: &'a AnalysisReport,
    pub result: &'a MultiRestartResult,
    pub final_report: &'a AnalysisReport,
    pub suggestions: &'a [SuggestedChange],
    pub report_threshold: f64,
    pub gamma: f64,
    pub include_trace: bool,
}

impl OptimizationPayload {
    pub fn new(inputs: OptimizationInputs<'_>) -> Self {
        let best = &inputs.result.best;
        let panel = &best.best_panel;
        let ids = panel.experts();
        let suggestions = inputs
            .suggestions
            .iter()
            .map(|c| SuggestionEntry {
                expert: c.expert,
                expert_id: ids[c.expert].clone(),
                cell: [c.cell.0, c.cell.1],
                from: c.original,
                to: c.suggested,
            })
            .collect();
        let unchanged_experts = crate::annealer::unchanged_experts(inputs.suggestions, panel.m())
            .into_iter()
            .map(|h| ids[h].clone())
            .collect();
        Self {
            analysis: AnalysisPayload::new(panel, inputs.final_report),
            gamma: inputs.gamma,
            initial: InitialMetrics {
                global_cl: inputs.initial_report.global_cl,
                cr: inputs.initial_report.cr(),
                ccl: inputs.initial_report.ccl,
            },
            best_ccl: best.best_ccl,
            best_cost: best.best_cost,
            termination: best.termination.as_str(),
            trials_used: best.trials_used,
            seed: best.seed,
            initial_temperature: best.initial_temperature,
            report_threshold: inputs.report_threshold,
            suggestions,
            unchanged_experts,
            restarts: inputs.result.runs.clone(),
            best_panel: PanelDocument::from_complete_panel(panel),
            trace: inputs.include_trace.then(|| best.trace.clone()),
        }
    }
}

/// Short human-readable summary of an analysis.
pub fn summarize(panel: &ExpertPanel<CompleteFpr>, report: &AnalysisReport) -> String {
    let mut out = String::new();
    for (id, cl) in panel.experts().iter().zip(report.per_expert_cl()) {
        out.push_str(&format!("CL[{id}] = {cl:.4}\n"));
    }
    out.push_str(&format!(
        "CL = {:.4}  CR = {:.4}  CCL(delta={}) = {:.4}\n",
        report.global_cl,
        report.cr(),
        report.weights.delta(),
        report.ccl
    ));
    out
}

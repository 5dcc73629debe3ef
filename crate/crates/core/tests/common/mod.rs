#![allow(dead_code)]

use std::path::PathBuf;

use fpr_consensus::{complete_panel, CompleteFpr, ExpertPanel, PanelDocument};
use serde::Deserialize;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn load_doc(name: &str) -> PanelDocument {
    PanelDocument::read(&fixture_path(name)).expect("fixture parses")
}

pub fn example_completed() -> ExpertPanel<CompleteFpr> {
    complete_panel(&load_doc("worked_example.json").to_panel().unwrap()).unwrap()
}

pub fn suggested_panel() -> ExpertPanel<CompleteFpr> {
    complete_panel(&load_doc("worked_example_suggested.json").to_panel().unwrap()).unwrap()
}

#[derive(Debug, Deserialize)]
pub struct Tolerances {
    pub completed_cell: f64,
    pub per_expert_cl: f64,
    pub global_cl: f64,
    pub collective_sm: f64,
    pub cr: f64,
    pub ccl: f64,
    pub suggested_metrics: f64,
}

#[derive(Debug, Deserialize)]
pub struct SuggestedExpected {
    pub global_cl: f64,
    pub cr: f64,
    pub ccl: f64,
}

#[derive(Debug, Deserialize)]
pub struct Golden {
    pub delta: f64,
    pub gamma: f64,
    pub tolerances: Tolerances,
    pub completed: Vec<Vec<Vec<Option<f64>>>>,
    pub per_expert_cl: Vec<f64>,
    pub global_cl: f64,
    pub collective_sm: Vec<Vec<Option<f64>>>,
    pub cr: f64,
    pub ccl: f64,
    pub suggested: SuggestedExpected,
}

pub fn golden() -> Golden {
    let text = std::fs::read_to_string(fixture_path("worked_example_expected.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

/// Largest absolute deviation between off-diagonal cells of two grids.
pub fn max_grid_dev(actual: impl Fn(usize, usize) -> f64, expected: &[Vec<Option<f64>>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, row) in expected.iter().enumerate() {
        for (k, cell) in row.iter().enumerate() {
            if let Some(e) = cell {
                worst = worst.max((actual(i, k) - e).abs());
            }
        }
    }
    worst
}

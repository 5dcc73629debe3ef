//! JSON panel documents and synthetic panel generation.
//!
//! A panel file looks like:
//!
//! ```json
//! {
//!   "alternatives": ["x1", "x2", "x3"],
//!   "experts": [{"id": "e1", "matrix": [[null, 0.7, null], [0.3, null, 0.6], [null, 0.4, null]]}],
//!   "weights": {"delta": 0.65, "gamma": 0.89},
//!   "sa": {"tempfactor": 0.95}
//! }
//! ```
//!
//! Missing cells are `null`; the diagonal may be `null` or `0.5`.

use std::fs;
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::annealer::SaParams;
use crate::completion::is_completable;
use crate::error::{Error, Result};
use crate::fpr::{off_diagonal_pairs, CompleteFpr, ExpertPanel, IncompleteFpr, WeightConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpertEntry {
    pub id: String,
    pub matrix: Vec<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PanelDocument {
    pub alternatives: Vec<String>,
    pub experts: Vec<ExpertEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightsBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sa: Option<SaParams>,
}

impl PanelDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(text).map_err(|e| Error::InvalidDocument(e.to_string()))?;
        doc.check_shape()?;
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("panel documents always serialize")
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::InvalidDocument(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn check_shape(&self) -> Result<()> {
        let n = self.alternatives.len();
        for e in &self.experts {
            if e.matrix.len() != n {
                return Err(Error::DimensionMismatch { left: n, right: e.matrix.len() });
            }
        }
        if let Some(w) = self.weights {
            if let Some(d) = w.delta {
                WeightConfig::new(d, 0.0)?;
            }
            if let Some(g) = w.gamma {
                WeightConfig::new(0.0, g)?;
            }
        }
        Ok(())
    }

    /// Validates every expert matrix into an incomplete panel.
    pub fn to_panel(&self) -> Result<ExpertPanel<IncompleteFpr>> {
        self.check_shape()?;
        let relations =
            self.experts.iter().map(|e| IncompleteFpr::validate(&e.matrix)).collect::<Result<Vec<_>>>()?;
        ExpertPanel::new(
            self.alternatives.clone(),
            self.experts.iter().map(|e| e.id.clone()).collect(),
            relations,
        )
    }

    /// Weights from the document, falling back to the defaults.
    pub fn weights(&self) -> Result<WeightConfig> {
        let block = self.weights.unwrap_or_default();
        WeightConfig::new(
            block.delta.unwrap_or(WeightConfig::DEFAULT_DELTA),
            block.gamma.unwrap_or(WeightConfig::DEFAULT_GAMMA),
        )
    }

    pub fn from_panel(panel: &ExpertPanel<IncompleteFpr>) -> Self {
        Self {
            alternatives: panel.alternatives().to_vec(),
            experts: panel
                .experts()
                .iter()
                .zip(panel.relations())
                .map(|(id, r)| ExpertEntry { id: id.clone(), matrix: r.to_rows() })
                .collect(),
            weights: None,
            sa: None,
        }
    }

    pub fn from_complete_panel(panel: &ExpertPanel<CompleteFpr>) -> Self {
        Self {
            alternatives: panel.alternatives().to_vec(),
            experts: panel
                .experts()
                .iter()
                .zip(panel.relations())
                .map(|(id, r)| ExpertEntry {
                    id: id.clone(),
                    matrix: r.to_rows().into_iter().map(|row| row.into_iter().map(Some).collect()).collect(),
                })
                .collect(),
            weights: None,
            sa: None,
        }
    }
}

/// Writes `contents` next to `path` in a temporary file, then renames it over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    if !contents.ends_with('\n') {
        tmp.write_all(b"\n")?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerateSpec {
    pub n: usize,
    pub m: usize,
    /// Fraction of off-diagonal cells to blank, in `[0, 1)`.
    pub missing_fraction: f64,
    /// Amplitude of uniform noise added to every off-diagonal cell.
    pub noise: f64,
    pub seed: u64,
}

/// Builds a random panel of additively consistent relations, optionally noisy,
/// with a fraction of cells blanked while keeping every relation completable.
///
/// Each relation derives from a random score vector `u` in `[0, 0.5)^n` as
/// `p_ik = 0.5 + u_i - u_k`, which stays inside `[0, 1]` without clamping.
pub fn generate_panel(spec: &GenerateSpec) -> Result<PanelDocument> {
    let GenerateSpec { n, m, missing_fraction, noise, seed } = *spec;
    if n < crate::fpr::MIN_ALTERNATIVES {
        return Err(Error::TooFewAlternatives(n));
    }
    if m < crate::fpr::MIN_EXPERTS {
        return Err(Error::TooFewExperts(m));
    }
    if !(0.0..1.0).contains(&missing_fraction) {
        return Err(Error::InvalidDocument(format!(
            "missing fraction must lie in [0, 1), got {missing_fraction}"
        )));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::InvalidDocument(format!("noise must be non-negative, got {noise}")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let off_diagonal = n * n - n;
    let target = (missing_fraction * off_diagonal as f64).round() as usize;

    // Values for every expert are drawn before any blanking, so the same seed
    // yields the same values whatever the missing fraction.
    let mut matrices: Vec<Vec<Vec<Option<f64>>>> = Vec::with_capacity(m);
    for _ in 0..m {
        let scores: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..0.5)).collect();
        let matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|k| {
                        if i == k {
                            return Some(0.5);
                        }
                        let mut v = 0.5 + scores[i] - scores[k];
                        if noise > 0.0 {
                            v = (v + rng.gen_range(-noise..=noise)).clamp(0.0, 1.0);
                        }
                        Some(v)
                    })
                    .collect()
            })
            .collect();
        matrices.push(matrix);
    }

    if target > 0 {
        for matrix in &mut matrices {
            let mut candidates: Vec<(usize, usize)> = off_diagonal_pairs(n).collect();
            candidates.shuffle(&mut rng);
            let mut known = vec![true; n * n];
            let mut blanked = 0;
            for (i, k) in candidates {
                if blanked == target {
                    break;
                }
                known[i * n + k] = false;
                if is_completable(n, &known) {
                    matrix[i][k] = None;
                    blanked += 1;
                } else {
                    known[i * n + k] = true;
                }
            }
            if blanked < target {
                return Err(Error::InfeasibleMask { requested: target, achieved: blanked });
            }
        }
    }

    let experts = matrices
        .into_iter()
        .enumerate()
        .map(|(h, matrix)| ExpertEntry { id: format!("e{}", h + 1), matrix })
        .collect();

    Ok(PanelDocument {
        alternatives: (1..=n).map(|i| format!("x{i}")).collect(),
        experts,
        weights: None,
        sa: None,
    })
}

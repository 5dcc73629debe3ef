//! Consistency and consensus measures over complete preference relations.

use crate::completion::EstimatorFamily;
use crate::error::{Error, Result};
use crate::fpr::{off_diagonal_pairs, CompleteFpr, ExpertPanel, SquareMatrix, WeightConfig};

/// Deviation of one preference degree from its indirect estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairConsistency {
    /// Mean absolute deviation per estimator family, in family order 1..3.
    pub family_errors: [f64; 3],
    /// Scaled error `(2/3) * mean(family_errors)`, in `[0, 1]`.
    pub error: f64,
    /// `1 - error`.
    pub level: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    /// `εp_ik` off the diagonal; the diagonal holds 0.
    pub pair_errors: SquareMatrix,
    /// `CL_ik` off the diagonal; the diagonal holds 1.
    pub pair_levels: SquareMatrix,
    /// Mean of the off-diagonal pair levels.
    pub relation_level: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusReport {
    pub collective_sm: SquareMatrix,
    pub pair_consensus: SquareMatrix,
    pub alternative_consensus: Vec<f64>,
    pub relation_consensus: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub per_expert: Vec<ConsistencyReport>,
    pub global_cl: f64,
    pub consensus: ConsensusReport,
    pub ccl: f64,
    pub weights: WeightConfig,
}

impl AnalysisReport {
    pub fn per_expert_cl(&self) -> Vec<f64> {
        self.per_expert.iter().map(|r| r.relation_level).collect()
    }

    pub fn cr(&self) -> f64 {
        self.consensus.relation_consensus
    }
}

pub fn consistency_pair(fpr: &CompleteFpr, i: usize, k: usize) -> Result<PairConsistency> {
    let n = fpr.n();
    if i >= n || k >= n {
        return Err(Error::IndexOutOfRange { i, k, n });
    }
    if i == k {
        return Err(Error::DiagonalPair(i));
    }
    Ok(pair_consistency_unchecked(fpr, i, k))
}

fn pair_consistency_unchecked(fpr: &CompleteFpr, i: usize, k: usize) -> PairConsistency {
    let n = fpr.n();
    let actual = fpr.get(i, k);
    let cell = |a: usize, b: usize| Some(fpr.get(a, b));
    let mut sums = [0.0; 3];
    for j in (0..n).filter(|&j| j != i && j != k) {
        for (slot, family) in sums.iter_mut().zip(EstimatorFamily::ALL) {
            let estimate = family.evaluate(cell, i, j, k).expect("complete relation");
            *slot += (estimate - actual).abs();
        }
    }
    let denom = (n - 2) as f64;
    let family_errors = sums.map(|s| s / denom);
    let error = (2.0 / 3.0) * (family_errors.iter().sum::<f64>() / 3.0);
    PairConsistency { family_errors, error, level: 1.0 - error }
}

pub fn consistency_level(fpr: &CompleteFpr) -> ConsistencyReport {
    let n = fpr.n();
    let mut pair_errors = SquareMatrix::filled(n, 0.0);
    let mut pair_levels = SquareMatrix::filled(n, 1.0);
    let mut total = 0.0;
    for (i, k) in off_diagonal_pairs(n) {
        let pc = pair_consistency_unchecked(fpr, i, k);
        pair_errors.set(i, k, pc.error);
        pair_levels.set(i, k, pc.level);
        total += pc.level;
    }
    ConsistencyReport { pair_errors, pair_levels, relation_level: total / (n * n - n) as f64 }
}

/// Arithmetic mean of per-expert consistency levels.
pub fn global_consistency(levels: &[f64]) -> Result<f64> {
    if levels.is_empty() {
        return Err(Error::EmptyList);
    }
    Ok(levels.iter().sum::<f64>() / levels.len() as f64)
}

/// `1 - |a_ik - b_ik|` off the diagonal; the diagonal holds 1.
pub fn pair_similarity(a: &CompleteFpr, b: &CompleteFpr) -> Result<SquareMatrix> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch { left: a.n(), right: b.n() });
    }
    Ok(SquareMatrix::from_fn(
        a.n(),
        |i, k| {
            if i == k {
                1.0
            } else {
                1.0 - (a.get(i, k) - b.get(i, k)).abs()
            }
        },
    ))
}

/// Entrywise mean of [`pair_similarity`] over all unordered expert pairs.
pub fn collective_similarity(panel: &ExpertPanel<CompleteFpr>) -> Result<SquareMatrix> {
    collective_similarity_of(panel.relations())
}

pub(crate) fn collective_similarity_of(relations: &[CompleteFpr]) -> Result<SquareMatrix> {
    let m = relations.len();
    if m < 2 {
        return Err(Error::TooFewExperts(m));
    }
    let n = relations[0].n();
    let mut acc = SquareMatrix::filled(n, 0.0);
    let mut pairs = 0usize;
    for h in 0..m {
        for l in (h + 1)..m {
            let sm = pair_similarity(&relations[h], &relations[l])?;
            for i in 0..n {
                for k in 0..n {
                    acc.set(i, k, acc.get(i, k) + sm.get(i, k));
                }
            }
            pairs += 1;
        }
    }
    let pairs = pairs as f64;
    Ok(SquareMatrix::from_fn(n, |i, k| acc.get(i, k) / pairs))
}

/// Rolls a collective similarity matrix up to pair, alternative and relation
/// consensus degrees.
pub fn consensus_degrees(sm: &SquareMatrix) -> ConsensusReport {
    let n = sm.n();
    let pair_consensus = sm.clone();
    let alternative_consensus: Vec<f64> = (0..n)
        .map(|i| {
            let s: f64 =
                (0..n).filter(|&k| k != i).map(|k| pair_consensus.get(i, k) + pair_consensus.get(k, i)).sum();
            s / (2 * (n - 1)) as f64
        })
        .collect();
    let relation_consensus = alternative_consensus.iter().sum::<f64>() / n as f64;
    ConsensusReport { collective_sm: sm.clone(), pair_consensus, alternative_consensus, relation_consensus }
}

/// Combined level `(1 - delta) * cl + delta * cr`.
pub fn ccl(cl: f64, cr: f64, weights: &WeightConfig) -> f64 {
    let delta = weights.delta();
    (1.0 - delta) * cl + delta * cr
}

pub fn analyze_panel(panel: &ExpertPanel<CompleteFpr>, weights: &WeightConfig) -> Result<AnalysisReport> {
    let per_expert: Vec<ConsistencyReport> = panel.relations().iter().map(consistency_level).collect();
    let levels: Vec<f64> = per_expert.iter().map(|r| r.relation_level).collect();
    let global_cl = global_consistency(&levels)?;
    let sm = collective_similarity(panel)?;
    let consensus = consensus_degrees(&sm);
    let ccl = ccl(global_cl, consensus.relation_consensus, weights);
    Ok(AnalysisReport { per_expert, global_cl, consensus, ccl, weights: *weights })
}

/// Global CL and CR for a set of relations, without building full reports.
pub(crate) fn cl_and_cr(relations: &[CompleteFpr]) -> Result<(f64, f64)> {
    let levels: Vec<f64> = relations.iter().map(|r| consistency_level(r).relation_level).collect();
    let cl = global_consistency(&levels)?;
    let cr = consensus_degrees(&collective_similarity_of(relations)?).relation_consensus;
    Ok((cl, cr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn m3() -> CompleteFpr {
        CompleteFpr::from_rows(&[vec![0.5, 0.7, 0.6], vec![0.3, 0.5, 0.6], vec![0.4, 0.4, 0.5]]).unwrap()
    }

    fn cp1() -> CompleteFpr {
        CompleteFpr::from_rows(&[
            vec![0.5, 0.33, 0.7, 0.6],
            vec![0.67, 0.5, 0.87, 0.77],
            vec![0.3, 0.13, 0.5, 0.4],
            vec![0.4, 0.23, 0.6, 0.5],
        ])
        .unwrap()
    }

    fn cp2() -> CompleteFpr {
        CompleteFpr::from_rows(&[
            vec![0.5, 0.19, 0.7, 0.3],
            vec![0.6, 0.5, 0.8, 0.7],
            vec![0.3, 0.2, 0.5, 0.1],
            vec![0.49, 0.47, 0.9, 0.5],
        ])
        .unwrap()
    }

    #[test]
    fn hand_evaluated_pair() {
        let pc = consistency_pair(&m3(), 0, 2).unwrap();
        for e in pc.family_errors {
            assert_abs_diff_eq!(e, 0.2, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(pc.error, 0.2 * 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pc.level, 0.866_666_666_666_666_7, epsilon = 1e-12);
        assert_eq!(consistency_pair(&m3(), 1, 1), Err(Error::DiagonalPair(1)));
    }

    #[test]
    fn consistent_relation_has_unit_level() {
        let r = consistency_level(&cp1());
        assert_abs_diff_eq!(r.relation_level, 1.0, epsilon = 1e-12);
        for (i, k) in off_diagonal_pairs(4) {
            assert_abs_diff_eq!(r.pair_errors.get(i, k), 0.0, epsilon = 1e-12);
        }
        let flat = consistency_level(&CompleteFpr::indifferent(4).unwrap());
        assert_eq!(flat.relation_level, 1.0);
    }

    #[test]
    fn global_mean() {
        assert_abs_diff_eq!(global_consistency(&[1.0, 0.9, 0.87, 0.97]).unwrap(), 0.935, epsilon = 1e-12);
        assert_eq!(global_consistency(&[0.42]).unwrap(), 0.42);
        assert_eq!(global_consistency(&[0.0, 1.0]).unwrap(), 0.5);
        assert_eq!(global_consistency(&[]), Err(Error::EmptyList));
    }

    #[test]
    fn pairwise_similarity() {
        let sm = pair_similarity(&cp1(), &cp2()).unwrap();
        assert_abs_diff_eq!(sm.get(0, 1), 0.86, epsilon = 1e-12);
        assert_abs_diff_eq!(sm.get(0, 2), 1.0, epsilon = 1e-12);
        let same = pair_similarity(&cp2(), &cp2()).unwrap();
        for (i, k) in off_diagonal_pairs(4) {
            assert_eq!(same.get(i, k), 1.0);
        }
        assert_eq!(sm, pair_similarity(&cp2(), &cp1()).unwrap());
        assert!(matches!(pair_similarity(&cp1(), &m3()), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn two_expert_collective_is_pairwise() {
        let panel = ExpertPanel::from_relations(vec![cp1(), cp2()]).unwrap();
        assert_eq!(collective_similarity(&panel).unwrap(), pair_similarity(&cp1(), &cp2()).unwrap());
    }

    #[test]
    fn consensus_rollup() {
        let ones = SquareMatrix::filled(4, 1.0);
        let r = consensus_degrees(&ones);
        assert!(r.alternative_consensus.iter().all(|&c| c == 1.0));
        assert_eq!(r.relation_consensus, 1.0);

        let sm = SquareMatrix::from_fn(4, |i, k| {
            [
                [0.0, 0.79, 0.88, 0.72],
                [0.87, 0.0, 0.77, 0.7],
                [0.69, 0.65, 0.0, 0.64],
                [0.79, 0.75, 0.66, 0.0],
            ][i][k]
        });
        let r = consensus_degrees(&sm);
        assert_abs_diff_eq!(r.alternative_consensus[2], 0.715, epsilon = 1e-12);
        assert_abs_diff_eq!(r.alternative_consensus[0], 0.79, epsilon = 1e-12);
        assert_abs_diff_eq!(r.relation_consensus, 0.74, epsilon = 0.01);
    }

    #[test]
    fn ccl_blend() {
        let w = WeightConfig::new(0.65, 0.89).unwrap();
        assert_abs_diff_eq!(ccl(0.93, 0.74, &w), 0.8065, epsilon = 1e-12);
        let w0 = WeightConfig::new(0.0, 0.5).unwrap();
        assert_eq!(ccl(0.37, 0.91, &w0), 0.37);
        let w1 = WeightConfig::new(1.0, 0.5).unwrap();
        assert_eq!(ccl(0.37, 0.91, &w1), 0.91);
    }

    #[test]
    fn identical_consistent_panel() {
        let panel = ExpertPanel::from_relations(vec![cp1(), cp1(), cp1()]).unwrap();
        let r = analyze_panel(&panel, &WeightConfig::default()).unwrap();
        assert_abs_diff_eq!(r.global_cl, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.cr(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.ccl, 1.0, epsilon = 1e-12);
    }
}

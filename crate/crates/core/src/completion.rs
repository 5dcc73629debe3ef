//! Estimation of missing preference degrees from additive transitivity.
//!
//! A missing `p_ik` is estimated through every intermediate alternative `j`
//! in up to three ways:
//!
//! * family 1: `p_ij + p_jk - 0.5`
//! * family 2: `p_jk - p_ji + 0.5`
//! * family 3: `p_ij - p_kj + 0.5`
//!
//! Only estimators whose source cells are known contribute. Completion runs in
//! synchronous rounds: every cell filled in a round is computed from the cells
//! known before that round, so the result does not depend on visiting order.

use crate::error::{Error, Result};
use crate::fpr::{CompleteFpr, ExpertPanel, IncompleteFpr, Relation, INDIFFERENCE};

/// One of the three additive-transitivity estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EstimatorFamily {
    /// `p_ij + p_jk - 0.5`
    Chained,
    /// `p_jk - p_ji + 0.5`
    ViaPredecessor,
    /// `p_ij - p_kj + 0.5`
    ViaSuccessor,
}

impl EstimatorFamily {
    pub const ALL: [EstimatorFamily; 3] =
        [EstimatorFamily::Chained, EstimatorFamily::ViaPredecessor, EstimatorFamily::ViaSuccessor];

    pub fn number(self) -> u8 {
        match self {
            EstimatorFamily::Chained => 1,
            EstimatorFamily::ViaPredecessor => 2,
            EstimatorFamily::ViaSuccessor => 3,
        }
    }

    /// Evaluates the estimator for pair `(i, k)` through `j` using `cell`
    /// as the source of known values.
    #[inline]
    pub fn evaluate(
        self,
        cell: impl Fn(usize, usize) -> Option<f64>,
        i: usize,
        j: usize,
        k: usize,
    ) -> Option<f64> {
        match self {
            EstimatorFamily::Chained => Some(cell(i, j)? + cell(j, k)? - INDIFFERENCE),
            EstimatorFamily::ViaPredecessor => Some(cell(j, k)? - cell(j, i)? + INDIFFERENCE),
            EstimatorFamily::ViaSuccessor => Some(cell(i, j)? - cell(k, j)? + INDIFFERENCE),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub family: EstimatorFamily,
    pub intermediary: usize,
    /// Raw estimate, possibly outside `[0, 1]`.
    pub value: f64,
}

/// All computable estimates for one ordered pair.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateBundle {
    pub pair: (usize, usize),
    pub estimates: Vec<Estimate>,
}

impl EstimateBundle {
    pub fn is_empty(&self) -> bool {
        self.estimates.is_empty()
    }

    pub fn len(&self) -> usize {
        self.estimates.len()
    }

    /// Arithmetic mean of the available raw estimates.
    pub fn mean(&self) -> Option<f64> {
        if self.estimates.is_empty() {
            return None;
        }
        let sum: f64 = self.estimates.iter().map(|e| e.value).sum();
        Some(sum / self.estimates.len() as f64)
    }
}

fn check_pair(n: usize, i: usize, k: usize) -> Result<()> {
    if i >= n || k >= n {
        return Err(Error::IndexOutOfRange { i, k, n });
    }
    if i == k {
        return Err(Error::DiagonalPair(i));
    }
    Ok(())
}

fn collect_estimates(fpr: &IncompleteFpr, i: usize, k: usize) -> EstimateBundle {
    let mut estimates = Vec::new();
    for j in (0..fpr.n()).filter(|&j| j != i && j != k) {
        for family in EstimatorFamily::ALL {
            if let Some(value) = family.evaluate(|a, b| fpr.get(a, b), i, j, k) {
                estimates.push(Estimate { family, intermediary: j, value });
            }
        }
    }
    EstimateBundle { pair: (i, k), estimates }
}

/// Estimates of `p_ik` computable from the currently known cells. May be empty.
pub fn candidate_estimates(fpr: &IncompleteFpr, i: usize, k: usize) -> Result<EstimateBundle> {
    check_pair(fpr.n(), i, k)?;
    Ok(collect_estimates(fpr, i, k))
}

/// Fills every missing cell by iterated estimation.
///
/// Known cells are never altered. Each estimated cell gets the mean of its
/// available raw estimates, clamped to `[0, 1]`. Fails with
/// [`Error::Unestimable`] when a round makes no progress while cells remain
/// missing.
pub fn complete(fpr: &IncompleteFpr) -> Result<CompleteFpr> {
    let n = fpr.n();
    let mut current = fpr.clone();
    loop {
        let missing = current.missing_pairs();
        if missing.is_empty() {
            break;
        }
        let filled: Vec<((usize, usize), f64)> = missing
            .iter()
            .filter_map(|&(i, k)| {
                collect_estimates(&current, i, k).mean().map(|m| ((i, k), m.clamp(0.0, 1.0)))
            })
            .collect();
        if filled.is_empty() {
            return Err(Error::Unestimable { cells: missing });
        }
        for ((i, k), value) in filled {
            current.set(i, k, value);
        }
    }
    debug_assert_eq!(current.n(), n);
    Ok(current.try_complete().expect("no missing cells remain"))
}

/// Completes every relation of a panel.
pub fn complete_panel(panel: &ExpertPanel<IncompleteFpr>) -> Result<ExpertPanel<CompleteFpr>> {
    panel.try_map(complete)
}

/// Whether a relation with the given known-cell mask (row-major, `n * n`)
/// can be completed. Mirrors the round structure of [`complete`] on the mask.
pub fn is_completable(n: usize, known: &[bool]) -> bool {
    assert_eq!(known.len(), n * n);
    let mut cells: Vec<Option<f64>> =
        known.iter().map(|&k| if k { Some(INDIFFERENCE) } else { None }).collect();
    for i in 0..n {
        cells[i * n + i] = Some(INDIFFERENCE);
    }
    let mut mask = IncompleteFpr::from_cells(n, cells);
    loop {
        let missing = mask.missing_pairs();
        if missing.is_empty() {
            return true;
        }
        let reachable: Vec<_> =
            missing.into_iter().filter(|&(i, k)| !collect_estimates(&mask, i, k).is_empty()).collect();
        if reachable.is_empty() {
            return false;
        }
        for (i, k) in reachable {
            mask.set(i, k, INDIFFERENCE);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpr::is_additively_consistent;

    const X: Option<f64> = None;

    fn p(v: f64) -> Option<f64> {
        Some(v)
    }

    fn p1() -> IncompleteFpr {
        IncompleteFpr::validate(&[
            vec![X, p(0.33), p(0.7), p(0.6)],
            vec![X, X, X, X],
            vec![X, X, X, X],
            vec![X, X, X, X],
        ])
        .unwrap()
    }

    fn p2() -> IncompleteFpr {
        IncompleteFpr::validate(&[
            vec![X, X, p(0.7), p(0.3)],
            vec![p(0.6), X, X, p(0.7)],
            vec![p(0.3), X, X, X],
            vec![X, p(0.47), X, X],
        ])
        .unwrap()
    }

    #[test]
    fn bundle_for_sparse_pair() {
        // (2,3) in one-based terms.
        let b = candidate_estimates(&p2(), 1, 2).unwrap();
        let values: Vec<(u8, usize, f64)> =
            b.estimates.iter().map(|e| (e.family.number(), e.intermediary, e.value)).collect();
        assert_eq!(values.len(), 2);
        assert_eq!(values[0].0, 1);
        assert_eq!(values[0].1, 0);
        assert!((values[0].2 - 0.8).abs() < 1e-12);
        assert_eq!(values[1].0, 3);
        assert!((values[1].2 - 0.8).abs() < 1e-12);
        assert!((b.mean().unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn bundle_uses_only_known_sources() {
        // (3,4) in one-based terms: only family 2 through x1.
        let b = candidate_estimates(&p1(), 2, 3).unwrap();
        assert_eq!(b.len(), 1);
        let e = b.estimates[0];
        assert_eq!((e.family, e.intermediary), (EstimatorFamily::ViaPredecessor, 0));
        assert!((e.value - 0.4).abs() < 1e-12);
    }

    #[test]
    fn full_relation_gives_all_estimates() {
        let full = IncompleteFpr::from(&CompleteFpr::indifferent(4).unwrap());
        for (i, k) in crate::fpr::off_diagonal_pairs(4) {
            assert_eq!(candidate_estimates(&full, i, k).unwrap().len(), 6);
        }
    }

    #[test]
    fn bundle_errors() {
        assert_eq!(candidate_estimates(&p1(), 2, 2), Err(Error::DiagonalPair(2)));
        assert!(matches!(candidate_estimates(&p1(), 0, 4), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn completes_sparse_first_row() {
        let cp = complete(&p1()).unwrap();
        let expected =
            [[0.5, 0.33, 0.7, 0.6], [0.67, 0.5, 0.87, 0.77], [0.3, 0.13, 0.5, 0.4], [0.4, 0.23, 0.6, 0.5]];
        for (i, row) in expected.iter().enumerate() {
            for (k, want) in row.iter().enumerate() {
                assert!((cp.get(i, k) - want).abs() < 1e-9, "({i},{k})");
            }
        }
        assert!(is_additively_consistent(&cp, 1e-9));
    }

    #[test]
    fn three_by_three_hand_case() {
        let fpr = IncompleteFpr::validate(&[vec![X, p(0.7), X], vec![p(0.3), X, p(0.6)], vec![X, p(0.4), X]])
            .unwrap();
        for family in EstimatorFamily::ALL {
            let v = family.evaluate(|a, b| fpr.get(a, b), 0, 1, 2).unwrap();
            assert!((v - 0.8).abs() < 1e-12, "{family:?}");
            let v = family.evaluate(|a, b| fpr.get(a, b), 2, 1, 0).unwrap();
            assert!((v - 0.2).abs() < 1e-12, "{family:?}");
        }
        let cp = complete(&fpr).unwrap();
        assert!((cp.get(0, 2) - 0.8).abs() < 1e-12);
        assert!((cp.get(2, 0) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn complete_input_is_returned_unchanged() {
        let rows = vec![
            vec![0.5, 0.31, 0.72, 0.6],
            vec![0.69, 0.5, 0.1, 0.77],
            vec![0.3, 0.13, 0.5, 0.4],
            vec![0.45, 0.23, 0.6, 0.5],
        ];
        let c = CompleteFpr::from_rows(&rows).unwrap();
        let out = complete(&IncompleteFpr::from(&c)).unwrap();
        assert_eq!(out, c);
    }

    #[test]
    fn estimates_are_clamped() {
        // p12 + p23 - 0.5 = 1.3 for pair (1,3).
        let fpr = IncompleteFpr::validate(&[vec![X, p(0.9), X], vec![p(0.1), X, p(0.9)], vec![X, p(0.1), X]])
            .unwrap();
        let cp = complete(&fpr).unwrap();
        assert_eq!(cp.get(0, 2), 1.0);
        assert_eq!(cp.get(2, 0), 0.0);
    }

    #[test]
    fn disconnected_information_is_unestimable() {
        // Only p12 known: no estimator for any other cell.
        let fpr = IncompleteFpr::validate(&[vec![X, p(0.6), X], vec![X, X, X], vec![X, X, X]]).unwrap();
        match complete(&fpr) {
            Err(Error::Unestimable { cells }) => assert_eq!(cells.len(), 5),
            other => panic!("expected Unestimable, got {other:?}"),
        }
        assert!(!is_completable(3, &fpr.known_mask()));
        assert!(is_completable(4, &p1().known_mask()));
    }
}

//! Preference relation types: single-expert relations (complete or with
//! missing cells), expert panels, and the weights that blend consistency
//! with consensus.

use std::fmt;

use crate::error::{Error, Result};

/// Indifference degree, always stored on the diagonal.
pub const INDIFFERENCE: f64 = 0.5;

/// Smallest panel dimension accepted; every estimator divides by `n - 2`.
pub const MIN_ALTERNATIVES: usize = 3;

/// Smallest number of experts for which consensus is defined.
pub const MIN_EXPERTS: usize = 2;

/// Preference intensity of one alternative over another, in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PreferenceDegree(f64);

impl PreferenceDegree {
    pub fn new(value: f64) -> Option<Self> {
        (0.0..=1.0).contains(&value).then_some(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<PreferenceDegree> for f64 {
    fn from(p: PreferenceDegree) -> f64 {
        p.0
    }
}

/// Row-major `n x n` matrix of reals.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn filled(n: usize, value: f64) -> Self {
        Self { n, data: vec![value; n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for k in 0..n {
                data.push(f(i, k));
            }
        }
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.data[i * self.n + k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, k: usize, value: f64) {
        self.data[i * self.n + k] = value;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n.max(1))
    }

    /// Rows with the diagonal replaced by `None`, the shape used in reports.
    pub fn off_diagonal_rows(&self) -> Vec<Vec<Option<f64>>> {
        (0..self.n).map(|i| (0..self.n).map(|k| (i != k).then(|| self.get(i, k))).collect()).collect()
    }
}

/// Iterator over ordered off-diagonal index pairs `(i, k)`, row-major.
pub fn off_diagonal_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (0..n).filter(move |&k| k != i).map(move |k| (i, k)))
}

/// Anything with an alternative count.
pub trait Relation {
    fn n(&self) -> usize;
}

/// Preference relation in which some off-diagonal cells may be unknown.
#[derive(Debug, Clone, PartialEq)]
pub struct IncompleteFpr {
    n: usize,
    cells: Vec<Option<f64>>,
}

impl IncompleteFpr {
    /// Validates a raw square grid. Missing diagonal cells are filled with 0.5.
    pub fn validate(raw: &[Vec<Option<f64>>]) -> Result<Self> {
        let n = raw.len();
        for (row, cells) in raw.iter().enumerate() {
            if cells.len() != n {
                return Err(Error::NonSquareGrid { row, len: cells.len(), expected: n });
            }
        }
        if n < MIN_ALTERNATIVES {
            return Err(Error::TooFewAlternatives(n));
        }

        let mut cells = Vec::with_capacity(n * n);
        for (i, row) in raw.iter().enumerate() {
            for (k, &cell) in row.iter().enumerate() {
                if let Some(value) = cell {
                    if !(0.0..=1.0).contains(&value) {
                        return Err(Error::OutOfRangeValue { row: i, col: k, value });
                    }
                    if i == k && value != INDIFFERENCE {
                        return Err(Error::DiagonalConflict { index: i, value });
                    }
                }
                cells.push(if i == k { Some(INDIFFERENCE) } else { cell });
            }
        }

        let fpr = Self { n, cells };
        if fpr.known_count() == 0 {
            return Err(Error::EmptyRelation);
        }
        Ok(fpr)
    }

    /// Unchecked construction used by the completion rounds, which may hold
    /// raw estimates before the relation is finalised.
    pub(crate) fn from_cells(n: usize, cells: Vec<Option<f64>>) -> Self {
        debug_assert_eq!(cells.len(), n * n);
        Self { n, cells }
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize) -> Option<f64> {
        self.cells[i * self.n + k]
    }

    pub(crate) fn set(&mut self, i: usize, k: usize, value: f64) {
        self.cells[i * self.n + k] = Some(value);
    }

    pub fn is_known(&self, i: usize, k: usize) -> bool {
        self.get(i, k).is_some()
    }

    pub fn known_mask(&self) -> Vec<bool> {
        self.cells.iter().map(Option::is_some).collect()
    }

    /// Number of known off-diagonal cells.
    pub fn known_count(&self) -> usize {
        off_diagonal_pairs(self.n).filter(|&(i, k)| self.is_known(i, k)).count()
    }

    pub fn missing_pairs(&self) -> Vec<(usize, usize)> {
        off_diagonal_pairs(self.n).filter(|&(i, k)| !self.is_known(i, k)).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.cells.iter().all(Option::is_some)
    }

    pub fn to_rows(&self) -> Vec<Vec<Option<f64>>> {
        self.cells.chunks(self.n).map(<[_]>::to_vec).collect()
    }

    /// Converts to a complete relation when every cell is known.
    pub fn try_complete(&self) -> Option<CompleteFpr> {
        let data = self.cells.iter().copied().collect::<Option<Vec<f64>>>()?;
        Some(CompleteFpr { matrix: SquareMatrix { n: self.n, data } })
    }
}

impl Relation for IncompleteFpr {
    fn n(&self) -> usize {
        self.n
    }
}

impl From<&CompleteFpr> for IncompleteFpr {
    fn from(c: &CompleteFpr) -> Self {
        Self { n: c.n(), cells: c.matrix.data.iter().copied().map(Some).collect() }
    }
}

/// Fully specified preference relation with a 0.5 diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CompleteFpr {
    matrix: SquareMatrix,
}

impl CompleteFpr {
    /// Builds a complete relation from rows. The diagonal must be 0.5.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let raw: Vec<Vec<Option<f64>>> = rows.iter().map(|r| r.iter().copied().map(Some).collect()).collect();
        let fpr = IncompleteFpr::validate(&raw)?;
        Ok(fpr.try_complete().expect("all cells supplied"))
    }

    /// Builds from a closure over off-diagonal pairs; the diagonal is forced to 0.5.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let rows: Vec<Vec<f64>> =
            (0..n).map(|i| (0..n).map(|k| if i == k { INDIFFERENCE } else { f(i, k) }).collect()).collect();
        Self::from_rows(&rows)
    }

    /// Relation with every cell at indifference.
    pub fn indifferent(n: usize) -> Result<Self> {
        Self::from_fn(n, |_, _| INDIFFERENCE)
    }

    pub fn n(&self) -> usize {
        self.matrix.n
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.matrix.get(i, k)
    }

    pub fn degree(&self, i: usize, k: usize) -> PreferenceDegree {
        PreferenceDegree(self.get(i, k))
    }

    /// Returns a copy with one off-diagonal cell replaced.
    pub fn with_cell(&self, i: usize, k: usize, value: PreferenceDegree) -> Result<Self> {
        let n = self.n();
        if i >= n || k >= n {
            return Err(Error::IndexOutOfRange { i, k, n });
        }
        if i == k {
            return Err(Error::DiagonalPair(i));
        }
        let mut out = self.clone();
        out.matrix.set(i, k, value.0);
        Ok(out)
    }

    pub(crate) fn set_unchecked(&mut self, i: usize, k: usize, value: f64) {
        debug_assert!(i != k && (0.0..=1.0).contains(&value));
        self.matrix.set(i, k, value);
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.matrix
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.matrix.rows().map(<[_]>::to_vec).collect()
    }

    /// Returns the relation with alternatives relabelled: cell `(i, k)` of the
    /// result is cell `(perm[i], perm[k])` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self { matrix: SquareMatrix::from_fn(self.n(), |i, k| self.get(perm[i], perm[k])) }
    }

    /// Whether `p_ij + p_ji = 1` holds for every pair within `tol`.
    pub fn is_reciprocal(&self, tol: f64) -> bool {
        off_diagonal_pairs(self.n()).all(|(i, k)| (self.get(i, k) + self.get(k, i) - 1.0).abs() <= tol)
    }
}

impl Relation for CompleteFpr {
    fn n(&self) -> usize {
        self.matrix.n
    }
}

/// Checks additive transitivity `p_ik = p_ij + p_jk - 0.5` over every ordered
/// triple of distinct alternatives.
pub fn is_additively_consistent(fpr: &CompleteFpr, tol: f64) -> bool {
    let n = fpr.n();
    for i in 0..n {
        for j in 0..n {
            if j == i {
                continue;
            }
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let implied = fpr.get(i, j) + fpr.get(j, k) - INDIFFERENCE;
                if (fpr.get(i, k) - implied).abs() > tol {
                    return false;
                }
            }
        }
    }
    true
}

/// Ordered collection of expert relations over the same alternatives.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpertPanel<R> {
    alternatives: Vec<String>,
    experts: Vec<String>,
    relations: Vec<R>,
}

impl<R: Relation> ExpertPanel<R> {
    pub fn new(alternatives: Vec<String>, experts: Vec<String>, relations: Vec<R>) -> Result<Self> {
        if relations.len() < MIN_EXPERTS {
            return Err(Error::TooFewExperts(relations.len()));
        }
        if experts.len() != relations.len() {
            return Err(Error::InvalidDocument(format!(
                "{} expert ids for {} relations",
                experts.len(),
                relations.len()
            )));
        }
        let n = alternatives.len();
        if n < MIN_ALTERNATIVES {
            return Err(Error::TooFewAlternatives(n));
        }
        if let Some(r) = relations.iter().find(|r| r.n() != n) {
            return Err(Error::DimensionMismatch { left: n, right: r.n() });
        }
        Ok(Self { alternatives, experts, relations })
    }

    /// Panel with default labels `x1..xn` and `e1..em`.
    pub fn from_relations(relations: Vec<R>) -> Result<Self> {
        let n = relations.first().map_or(0, Relation::n);
        let alternatives = (1..=n).map(|i| format!("x{i}")).collect();
        let experts = (1..=relations.len()).map(|h| format!("e{h}")).collect();
        Self::new(alternatives, experts, relations)
    }

    pub fn n(&self) -> usize {
        self.alternatives.len()
    }

    pub fn m(&self) -> usize {
        self.relations.len()
    }

    pub fn alternatives(&self) -> &[String] {
        &self.alternatives
    }

    pub fn experts(&self) -> &[String] {
        &self.experts
    }

    pub fn relations(&self) -> &[R] {
        &self.relations
    }

    pub fn relation(&self, h: usize) -> &R {
        &self.relations[h]
    }

    pub(crate) fn relation_mut(&mut self, h: usize) -> &mut R {
        &mut self.relations[h]
    }

    /// Maps every relation, keeping labels.
    pub fn try_map<S: Relation>(&self, f: impl FnMut(&R) -> Result<S>) -> Result<ExpertPanel<S>> {
        let relations = self.relations.iter().map(f).collect::<Result<Vec<_>>>()?;
        ExpertPanel::new(self.alternatives.clone(), self.experts.clone(), relations)
    }

    /// Same shape (expert count and alternative count).
    pub fn same_shape<S: Relation>(&self, other: &ExpertPanel<S>) -> bool {
        self.m() == other.m() && self.n() == other.n()
    }
}

/// Consensus weight `delta` and acceptance threshold `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightConfig {
    delta: f64,
    gamma: f64,
}

impl WeightConfig {
    pub const DEFAULT_DELTA: f64 = 0.65;
    pub const DEFAULT_GAMMA: f64 = 0.89;

    pub fn new(delta: f64, gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::InvalidWeight { name: "delta", value: delta });
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidWeight { name: "gamma", value: gamma });
        }
        Ok(Self { delta, gamma })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

impl Default for WeightConfig {
    fn default() -> Self {
        Self { delta: Self::DEFAULT_DELTA, gamma: Self::DEFAULT_GAMMA }
    }
}

impl fmt::Display for CompleteFpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.matrix.rows().enumerate() {
            for (k, v) in row.iter().enumerate() {
                if k > 0 {
                    f.write_str(" ")?;
                }
                if i == k {
                    f.write_str("  -  ")?;
                } else {
                    write!(f, "{v:.3}")?;
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

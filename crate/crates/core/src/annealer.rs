//! Simulated annealing over expert panels.
//!
//! The search state is a complete panel; its cost is `1 - CCL`. A move nudges
//! a single off-diagonal cell of a single expert. The temperature schedule
//! cools fast while the acceptance ratio of a stage stays at or above `tcent`
//! and slowly otherwise; the search freezes after `frzlim` consecutive stages
//! whose acceptance ratio falls below `minpercent`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fpr::{CompleteFpr, ExpertPanel, WeightConfig};
use crate::metrics::{ccl, cl_and_cr};

/// Moves sampled from the initial panel to calibrate an adaptive start temperature.
pub const ADAPTIVE_SAMPLES: usize = 100;
/// Target uphill acceptance probability at the adaptive start temperature.
pub const ADAPTIVE_ACCEPTANCE: f64 = 0.4;
/// Start temperature when no sampled move is uphill.
pub const ADAPTIVE_FALLBACK_TEMP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialTemperature {
    Adaptive,
    Fixed(f64),
}

impl Serialize for InitialTemperature {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            InitialTemperature::Adaptive => s.serialize_str("adaptive"),
            InitialTemperature::Fixed(t) => s.serialize_f64(*t),
        }
    }
}

impl<'de> Deserialize<'de> for InitialTemperature {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Fixed(f64),
            Named(String),
        }
        match Repr::deserialize(d)? {
            Repr::Fixed(t) => Ok(InitialTemperature::Fixed(t)),
            Repr::Named(s) if s == "adaptive" => Ok(InitialTemperature::Adaptive),
            Repr::Named(s) => {
                Err(serde::de::Error::custom(format!("temp0 must be a number or \"adaptive\", got {s:?}")))
            }
        }
    }
}

impl std::str::FromStr for InitialTemperature {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "adaptive" {
            return Ok(InitialTemperature::Adaptive);
        }
        s.parse::<f64>()
            .map(InitialTemperature::Fixed)
            .map_err(|_| format!("expected a number or \"adaptive\", got {s:?}"))
    }
}

/// Annealing schedule and move parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SaParams {
    pub temp0: InitialTemperature,
    /// Cooling factor applied after a high-acceptance stage.
    pub fastfactor: f64,
    /// Cooling factor applied after a low-acceptance stage.
    pub tempfactor: f64,
    /// Consecutive frozen stages that stop the search.
    pub frzlim: u32,
    /// Stage length as a multiple of the number of mutable cells.
    pub sizefactor: u32,
    /// Acceptance ratio below which a stage counts as frozen.
    pub minpercent: f64,
    /// Acceptance ratio at or above which cooling is fast.
    pub tcent: f64,
    /// Half-width of the uniform perturbation.
    pub move_width: f64,
    /// Quantization step for moved cells; 0 keeps values continuous.
    pub value_grid: f64,
    pub seed: u64,
    /// Hard cap on the total number of trials.
    pub max_trials: u64,
    /// Co-update `(k, i)` to `1 - (i, k)` on every move.
    pub enforce_reciprocity: bool,
}

impl Default for SaParams {
    fn default() -> Self {
        Self {
            temp0: InitialTemperature::Adaptive,
            fastfactor: 0.8,
            tempfactor: 0.95,
            frzlim: 5,
            sizefactor: 16,
            minpercent: 0.02,
            tcent: 0.5,
            move_width: 0.2,
            value_grid: 0.01,
            seed: 7,
            max_trials: 1_000_000,
            enforce_reciprocity: false,
        }
    }
}

fn open_unit(x: f64) -> bool {
    x > 0.0 && x < 1.0
}

impl SaParams {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParams(msg));
        if let InitialTemperature::Fixed(t) = self.temp0 {
            if !(t.is_finite() && t > 0.0) {
                return fail(format!("temp0 must be positive, got {t}"));
            }
        }
        if !open_unit(self.fastfactor) || !open_unit(self.tempfactor) {
            return fail("fastfactor and tempfactor must lie in (0, 1)".into());
        }
        if self.fastfactor >= self.tempfactor {
            return fail(format!(
                "fastfactor ({}) must be below tempfactor ({})",
                self.fastfactor, self.tempfactor
            ));
        }
        if self.frzlim == 0 || self.sizefactor == 0 {
            return fail("frzlim and sizefactor must be positive".into());
        }
        if !open_unit(self.minpercent) || !open_unit(self.tcent) {
            return fail("minpercent and tcent must lie in (0, 1)".into());
        }
        if self.minpercent >= self.tcent {
            return fail(format!("minpercent ({}) must be below tcent ({})", self.minpercent, self.tcent));
        }
        if !(self.move_width > 0.0 && self.move_width <= 1.0) {
            return fail(format!("move_width must lie in (0, 1], got {}", self.move_width));
        }
        if !(self.value_grid >= 0.0 && self.value_grid < 1.0) {
            return fail(format!("value_grid must lie in [0, 1), got {}", self.value_grid));
        }
        if self.max_trials == 0 {
            return fail("max_trials must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    ThresholdReached,
    Frozen,
    TrialCapHit,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::ThresholdReached => "ThresholdReached",
            Termination::Frozen => "Frozen",
            Termination::TrialCapHit => "TrialCapHit",
        }
    }
}

/// Snapshot recorded at the start, after every temperature stage, and at exit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub trial: u64,
    pub temperature: f64,
    pub current_cost: f64,
    pub best_cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub best_panel: ExpertPanel<CompleteFpr>,
    pub best_ccl: f64,
    pub best_cost: f64,
    pub initial_cost: f64,
    pub initial_temperature: f64,
    pub trace: Vec<TraceEntry>,
    pub termination: Termination,
    pub trials_used: u64,
    pub seed: u64,
}

/// `1 - CCL` of a complete panel.
pub fn cost(panel: &ExpertPanel<CompleteFpr>, weights: &WeightConfig) -> Result<f64> {
    relations_ccl(panel.relations(), weights).map(|c| 1.0 - c)
}

fn relations_ccl(relations: &[CompleteFpr], weights: &WeightConfig) -> Result<f64> {
    let (cl, cr) = cl_and_cr(relations)?;
    Ok(ccl(cl, cr, weights))
}

/// Applies a perturbation `u` to `old`: clamp to `[0, 1]`, then snap to the
/// nearest multiple of `grid` when `grid > 0`.
pub fn perturb(old: f64, u: f64, grid: f64) -> f64 {
    let v = (old + u).clamp(0.0, 1.0);
    if grid > 0.0 {
        ((v / grid).round() * grid).clamp(0.0, 1.0)
    } else {
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Move {
    expert: usize,
    i: usize,
    k: usize,
    value: f64,
}

fn propose<R: Rng>(relations: &[CompleteFpr], rng: &mut R, params: &SaParams) -> Move {
    let m = relations.len();
    let n = relations[0].n();
    let expert = rng.gen_range(0..m);
    let i = rng.gen_range(0..n);
    let mut k = rng.gen_range(0..n - 1);
    if k >= i {
        k += 1;
    }
    let u = rng.gen_range(-params.move_width..=params.move_width);
    let value = perturb(relations[expert].get(i, k), u, params.value_grid);
    Move { expert, i, k, value }
}

fn apply(relations: &mut [CompleteFpr], mv: Move, reciprocal: bool) {
    let r = &mut relations[mv.expert];
    r.set_unchecked(mv.i, mv.k, mv.value);
    if reciprocal {
        r.set_unchecked(mv.k, mv.i, 1.0 - mv.value);
    }
}

/// Returns a random neighbour of `panel`: one off-diagonal cell of one expert
/// perturbed (plus its mirror cell when reciprocity is enforced).
pub fn neighbor<R: Rng>(
    panel: &ExpertPanel<CompleteFpr>,
    rng: &mut R,
    params: &SaParams,
) -> ExpertPanel<CompleteFpr> {
    let mv = propose(panel.relations(), rng, params);
    let mut out = panel.clone();
    let r = out.relation_mut(mv.expert);
    r.set_unchecked(mv.i, mv.k, mv.value);
    if params.enforce_reciprocity {
        r.set_unchecked(mv.k, mv.i, 1.0 - mv.value);
    }
    out
}

fn adaptive_temperature<R: Rng>(
    relations: &[CompleteFpr],
    start_cost: f64,
    weights: &WeightConfig,
    params: &SaParams,
    rng: &mut R,
) -> Result<f64> {
    let mut scratch = relations.to_vec();
    let mut uphill = Vec::new();
    for _ in 0..ADAPTIVE_SAMPLES {
        let mv = propose(relations, rng, params);
        apply(&mut scratch, mv, params.enforce_reciprocity);
        let delta = 1.0 - relations_ccl(&scratch, weights)? - start_cost;
        if delta > 0.0 {
            uphill.push(delta);
        }
        scratch[mv.expert] = relations[mv.expert].clone();
    }
    if uphill.is_empty() {
        return Ok(ADAPTIVE_FALLBACK_TEMP);
    }
    let mean = uphill.iter().sum::<f64>() / uphill.len() as f64;
    Ok(mean / (1.0 / ADAPTIVE_ACCEPTANCE).ln())
}

/// Runs one annealing search from `panel0`.
pub fn anneal(
    panel0: &ExpertPanel<CompleteFpr>,
    weights: &WeightConfig,
    params: &SaParams,
) -> Result<OptimizationResult> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut current = panel0.relations().to_vec();
    let start_ccl = relations_ccl(&current, weights)?;
    let initial_cost = 1.0 - start_ccl;
    let mut cost_now = initial_cost;
    let mut best = current.clone();
    let mut best_ccl = start_ccl;

    let mut temp = match params.temp0 {
        InitialTemperature::Fixed(t) => t,
        InitialTemperature::Adaptive => {
            adaptive_temperature(&current, initial_cost, weights, params, &mut rng)?
        }
    };
    let initial_temperature = temp;

    let mut trace =
        vec![TraceEntry { trial: 0, temperature: temp, current_cost: cost_now, best_cost: 1.0 - best_ccl }];

    let finish = |best: Vec<CompleteFpr>,
                  best_ccl: f64,
                  trace: Vec<TraceEntry>,
                  termination: Termination,
                  trials_used: u64|
     -> Result<OptimizationResult> {
        Ok(OptimizationResult {
            best_panel: ExpertPanel::new(panel0.alternatives().to_vec(), panel0.experts().to_vec(), best)?,
            best_ccl,
            best_cost: 1.0 - best_ccl,
            initial_cost,
            initial_temperature,
            trace,
            termination,
            trials_used,
            seed: params.seed,
        })
    };

    if best_ccl >= weights.gamma() {
        return finish(best, best_ccl, trace, Termination::ThresholdReached, 0);
    }

    let m = panel0.m();
    let n = panel0.n();
    let stage_len = u64::from(params.sizefactor) * (m * n * (n - 1)) as u64;
    let mut total: u64 = 0;
    let mut freezecount = 0u32;

    while freezecount < params.frzlim {
        let mut changes: u64 = 0;
        let mut trials: u64 = 0;
        while trials < stage_len {
            if total >= params.max_trials {
                trace.push(TraceEntry {
                    trial: total,
                    temperature: temp,
                    current_cost: cost_now,
                    best_cost: 1.0 - best_ccl,
                });
                return finish(best, best_ccl, trace, Termination::TrialCapHit, total);
            }
            trials += 1;
            total += 1;

            let mv = propose(&current, &mut rng, params);
            let previous = current[mv.expert].clone();
            apply(&mut current, mv, params.enforce_reciprocity);
            let candidate_ccl = relations_ccl(&current, weights)?;
            let candidate_cost = 1.0 - candidate_ccl;
            let delta = candidate_cost - cost_now;

            if candidate_ccl > best_ccl {
                best.clone_from(&current);
                best_ccl = candidate_ccl;
                if best_ccl >= weights.gamma() {
                    trace.push(TraceEntry {
                        trial: total,
                        temperature: temp,
                        current_cost: candidate_cost,
                        best_cost: 1.0 - best_ccl,
                    });
                    return finish(best, best_ccl, trace, Termination::ThresholdReached, total);
                }
            }

            let accept = delta <= 0.0 || rng.gen::<f64>() <= (-delta / temp).exp();
            if accept {
                changes += 1;
                cost_now = candidate_cost;
            } else {
                current[mv.expert] = previous;
            }
        }

        let ratio = changes as f64 / trials as f64;
        temp *= if ratio >= params.tcent { params.fastfactor } else { params.tempfactor };
        if ratio < params.minpercent {
            freezecount += 1;
        } else {
            freezecount = 0;
        }
        trace.push(TraceEntry {
            trial: total,
            temperature: temp,
            current_cost: cost_now,
            best_cost: 1.0 - best_ccl,
        });
    }

    finish(best, best_ccl, trace, Termination::Frozen, total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartSummary {
    pub seed: u64,
    pub termination: Termination,
    pub best_ccl: f64,
    pub trials_used: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiRestartResult {
    /// Lowest-cost run; ties go to the lower seed.
    pub best: OptimizationResult,
    pub runs: Vec<RestartSummary>,
}

/// Runs `restarts` independent searches with seeds `seed, seed + 1, ...`
/// concurrently and keeps the lowest-cost result.
pub fn anneal_restarts(
    panel0: &ExpertPanel<CompleteFpr>,
    weights: &WeightConfig,
    params: &SaParams,
    restarts: u32,
) -> Result<MultiRestartResult> {
    if restarts == 0 {
        return Err(Error::InvalidParams("restarts must be positive".into()));
    }
    params.validate()?;
    let results: Vec<Result<OptimizationResult>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..u64::from(restarts))
            .map(|r| {
                let run_params = SaParams { seed: params.seed.wrapping_add(r), ..*params };
                scope.spawn(move || anneal(panel0, weights, &run_params))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("annealing thread panicked")).collect()
    });
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    let runs = results
        .iter()
        .map(|r| RestartSummary {
            seed: r.seed,
            termination: r.termination,
            best_ccl: r.best_ccl,
            trials_used: r.trials_used,
        })
        .collect();
    let best = results
        .into_iter()
        .reduce(|a, b| if b.best_cost < a.best_cost { b } else { a })
        .expect("at least one restart");
    Ok(MultiRestartResult { best, runs })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuggestedChange {
    pub expert: usize,
    pub cell: (usize, usize),
    pub original: f64,
    pub suggested: f64,
}

impl SuggestedChange {
    pub fn magnitude(&self) -> f64 {
        (self.suggested - self.original).abs()
    }
}

/// Cells whose value moved by more than `threshold`, grouped by expert and
/// sorted by decreasing magnitude within each expert.
pub fn suggest_changes(
    original: &ExpertPanel<CompleteFpr>,
    optimized: &ExpertPanel<CompleteFpr>,
    threshold: f64,
) -> Result<Vec<SuggestedChange>> {
    if !original.same_shape(optimized) {
        return Err(Error::ShapeMismatch);
    }
    let n = original.n();
    let mut out = Vec::new();
    for (h, (a, b)) in original.relations().iter().zip(optimized.relations()).enumerate() {
        let mut expert_changes: Vec<SuggestedChange> = crate::fpr::off_diagonal_pairs(n)
            .map(|(i, k)| SuggestedChange {
                expert: h,
                cell: (i, k),
                original: a.get(i, k),
                suggested: b.get(i, k),
            })
            .filter(|c| c.magnitude() > threshold)
            .collect();
        expert_changes.sort_by(|x, y| y.magnitude().total_cmp(&x.magnitude()));
        out.extend(expert_changes);
    }
    Ok(out)
}

/// Experts (by index) with no entry in `changes`.
pub fn unchanged_experts(changes: &[SuggestedChange], m: usize) -> Vec<usize> {
    (0..m).filter(|h| !changes.iter().any(|c| c.expert == *h)).collect()
}

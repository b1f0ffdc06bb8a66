//! Enumerative learners: a minimum-size consistent formula (exact) and a
//! maximum-accuracy formula, both by bottom-up enumeration over increasing
//! size with observational-equivalence pruning.
//!
//! Two candidates are observationally equivalent when they take the same
//! truth value at every step of every training trace; only the first
//! (smallest) one of each class is kept and combined further.

mod sig;

use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::Dataset;
use crate::ltl::{satisfies, Formula};
use sig::{Sig, Table};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BaselineError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("trace of length {0} exceeds the enumerative learners' limit of 64 steps")]
    TraceTooLong(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchBudget {
    /// Largest formula size explored.
    pub max_size: usize,
    pub time_limit: Option<Duration>,
    /// Largest number of distinct candidate behaviors kept in memory.
    pub max_candidates: usize,
    /// Exclude next-step operators.
    pub qualitative: bool,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_size: 8,
            time_limit: Some(Duration::from_secs(120)),
            max_candidates: 150_000,
            qualitative: true,
        }
    }
}

/// Result of [`exact_learner`].
#[derive(Debug, Clone, PartialEq)]
pub enum ExactOutcome {
    /// A consistent formula of minimum size.
    Found(Formula),
    /// Time or memory ran out while exploring formulas of size `size`.
    Timeout { size: usize },
    /// No consistent formula up to the size cap.
    SizeCapReached,
    /// The same trace carries both labels, so no formula is consistent.
    Contradictory,
}

impl ExactOutcome {
    pub fn formula(&self) -> Option<&Formula> {
        match self {
            ExactOutcome::Found(f) => Some(f),
            _ => None,
        }
    }
}

/// Result of [`max_accuracy_learner`].
#[derive(Debug, Clone, PartialEq)]
pub struct MaxAccuracy {
    pub formula: Formula,
    /// Training accuracy of `formula`.
    pub accuracy: f64,
    /// Largest size fully explored.
    pub explored_size: usize,
    /// The search stopped on time or memory before the size cap.
    pub truncated: bool,
}

/// Every NNF formula of exactly `size` over `n_props` propositions that
/// contains a temporal operator (for `size >= 2`), with commutative operands
/// in ascending order. Next-step operators are included unless
/// `qualitative`. The order is deterministic.
pub fn enumerate_formulas(size: usize, n_props: usize, qualitative: bool) -> Vec<Formula> {
    let mut by_size: Vec<Vec<Formula>> = vec![Vec::new()];
    for s in 1..=size {
        let mut level = Vec::new();
        if s == 1 {
            for j in 0..n_props {
                level.push(Formula::prop(j));
                level.push(Formula::not(Formula::prop(j)));
            }
        } else {
            for g in &by_size[s - 1] {
                level.extend(unary(g, qualitative));
            }
            for left in 1..s - 1 {
                let right = s - 1 - left;
                for a in &by_size[left] {
                    for b in &by_size[right] {
                        level.extend(binary(a, b));
                    }
                }
            }
        }
        by_size.push(level);
    }
    let mut out = by_size.pop().unwrap_or_default();
    if size >= 2 {
        out.retain(Formula::has_temporal);
    }
    let mut seen = std::collections::HashSet::new();
    out.retain(|f| seen.insert(f.clone()));
    out
}

fn unary(g: &Formula, qualitative: bool) -> Vec<Formula> {
    let mut v = vec![Formula::eventually(g.clone()), Formula::globally(g.clone())];
    if !qualitative {
        v.push(Formula::next(g.clone()));
        v.push(Formula::weak_next(g.clone()));
    }
    v
}

fn binary(a: &Formula, b: &Formula) -> Vec<Formula> {
    let mut v = Vec::with_capacity(5);
    if a <= b {
        v.push(Formula::and(a.clone(), b.clone()));
        v.push(Formula::or(a.clone(), b.clone()));
    }
    v.push(Formula::until(a.clone(), b.clone()));
    v.push(Formula::weak_until(a.clone(), b.clone()));
    v.push(Formula::release(a.clone(), b.clone()));
    v
}

/// Stop condition shared by the learners.
struct Limits {
    start: Instant,
    time: Option<Duration>,
    max_candidates: usize,
}

impl Limits {
    fn exceeded(&self, stored: usize) -> bool {
        stored >= self.max_candidates || self.time.is_some_and(|t| self.start.elapsed() >= t)
    }
}

/// Bottom-up enumeration state: per size, the first formula of each
/// behavior class.
struct Search<'a> {
    table: Table<'a>,
    levels: Vec<Vec<(Formula, Sig)>>,
    seen: HashSet<Sig>,
    qualitative: bool,
}

/// The search hit its time or memory limit.
struct Stopped;

impl<'a> Search<'a> {
    fn new(data: &'a Dataset, qualitative: bool) -> Result<Self, BaselineError> {
        Ok(Search { table: Table::new(data)?, levels: vec![Vec::new()], seen: HashSet::new(), qualitative })
    }

    /// Generates the next size, calling `visit` on each new behavior class in
    /// enumeration order. `visit` returning true ends the level early.
    fn grow(&mut self, limits: &Limits, mut visit: impl FnMut(&Formula, &Sig) -> bool) -> Result<(), Stopped> {
        let s = self.levels.len();
        let Search { table, levels, seen, qualitative } = self;
        let mut level: Vec<(Formula, Sig)> = Vec::new();
        let mut counter = 0usize;
        let mut stopped = false;
        let mut offer = |f: Formula, sig: Sig, level: &mut Vec<(Formula, Sig)>| -> bool {
            counter += 1;
            if counter.is_multiple_of(256) && limits.exceeded(seen.len()) {
                stopped = true;
                return true;
            }
            if seen.contains(&sig) {
                return false;
            }
            seen.insert(sig.clone());
            let end = visit(&f, &sig);
            level.push((f, sig));
            end
        };
        'gen: {
            if s == 1 {
                for j in 0..table.n_props() {
                    let p = table.prop(j);
                    let n = table.not(&p);
                    if offer(Formula::prop(j), p, &mut level) || offer(Formula::not(Formula::prop(j)), n, &mut level) {
                        break 'gen;
                    }
                }
                break 'gen;
            }
            for (g, gs) in &levels[s - 1] {
                let mut ops = vec![
                    (Formula::eventually(g.clone()), table.eventually(gs)),
                    (Formula::globally(g.clone()), table.globally(gs)),
                ];
                if !*qualitative {
                    ops.push((Formula::next(g.clone()), table.next(gs, false)));
                    ops.push((Formula::weak_next(g.clone()), table.next(gs, true)));
                }
                for (f, sig) in ops {
                    if offer(f, sig, &mut level) {
                        break 'gen;
                    }
                }
            }
            for left in 1..s - 1 {
                let right = s - 1 - left;
                for (a, asig) in &levels[left] {
                    for (b, bsig) in &levels[right] {
                        let mut ops = Vec::with_capacity(5);
                        if a <= b {
                            ops.push((Formula::and(a.clone(), b.clone()), table.and(asig, bsig)));
                            ops.push((Formula::or(a.clone(), b.clone()), table.or(asig, bsig)));
                        }
                        ops.push((Formula::until(a.clone(), b.clone()), table.until(asig, bsig, false)));
                        ops.push((Formula::weak_until(a.clone(), b.clone()), table.until(asig, bsig, true)));
                        ops.push((Formula::release(a.clone(), b.clone()), table.release(asig, bsig)));
                        for (f, sig) in ops {
                            if offer(f, sig, &mut level) {
                                break 'gen;
                            }
                        }
                    }
                }
            }
        }
        levels.push(level);
        if stopped {
            Err(Stopped)
        } else {
            Ok(())
        }
    }
}

/// Whether some trace occurs with both labels.
fn contradictory(data: &Dataset) -> bool {
    let mut labels: HashMap<&crate::data::Trace, bool> = HashMap::new();
    data.traces.iter().any(|lt| *labels.entry(&lt.trace).or_insert(lt.label) != lt.label)
}

/// A minimum-size formula consistent with every label, searching sizes
/// `0, 1, 2, ...` up to the budget. Size 0 covers the constants.
pub fn exact_learner(data: &Dataset, budget: &SearchBudget) -> Result<ExactOutcome, BaselineError> {
    if data.is_empty() {
        return Err(BaselineError::EmptyDataset);
    }
    if contradictory(data) {
        return Ok(ExactOutcome::Contradictory);
    }
    if data.positives() == 0 {
        return Ok(ExactOutcome::Found(Formula::False));
    }
    if data.negatives() == 0 {
        return Ok(ExactOutcome::Found(Formula::True));
    }
    let limits = Limits { start: Instant::now(), time: budget.time_limit, max_candidates: budget.max_candidates };
    let mut search = Search::new(data, budget.qualitative)?;
    let labels = search.table.labels();
    for size in 1..=budget.max_size {
        let mut found = None;
        let r = search.grow(&limits, |f, sig| {
            if search_consistent(sig, &labels) {
                found = Some(f.clone());
                true
            } else {
                false
            }
        });
        if let Some(f) = found {
            return Ok(ExactOutcome::Found(f));
        }
        if r.is_err() {
            return Ok(ExactOutcome::Timeout { size });
        }
    }
    Ok(ExactOutcome::SizeCapReached)
}

fn search_consistent(sig: &Sig, labels: &[bool]) -> bool {
    sig.iter().zip(labels).all(|(&w, &l)| (w & 1 == 1) == l)
}

/// A formula of highest training accuracy among `True`, `False` and all
/// formulas up to the size cap, preferring smaller sizes and then the
/// canonical formula order.
pub fn max_accuracy_learner(data: &Dataset, budget: &SearchBudget) -> Result<MaxAccuracy, BaselineError> {
    if data.is_empty() {
        return Err(BaselineError::EmptyDataset);
    }
    let n = data.len();
    let (pos, neg) = (data.positives(), data.negatives());
    let mut best = if pos >= neg { (Formula::True, pos, 0) } else { (Formula::False, neg, 0) };
    let limits = Limits { start: Instant::now(), time: budget.time_limit, max_candidates: budget.max_candidates };
    let mut search = Search::new(data, budget.qualitative)?;
    let labels = search.table.labels();
    let mut explored = 0;
    let mut truncated = false;
    for size in 1..=budget.max_size {
        if best.1 == n {
            break;
        }
        let r = search.grow(&limits, |f, sig| {
            let right = sig.iter().zip(&labels).filter(|(&w, &l)| (w & 1 == 1) == l).count();
            if right > best.1 || (right == best.1 && size == best.2 && f < &best.0) {
                best = (f.clone(), right, size);
            }
            right == n
        });
        if r.is_err() {
            truncated = true;
            break;
        }
        explored = size;
    }
    let accuracy = best.1 as f64 / n as f64;
    debug_assert_eq!(accuracy, training_accuracy(&best.0, data));
    Ok(MaxAccuracy { formula: best.0, accuracy, explored_size: explored, truncated })
}

/// Fraction of traces whose label matches `satisfies`.
pub fn training_accuracy(f: &Formula, data: &Dataset) -> f64 {
    let right = data.traces.iter().filter(|lt| satisfies(f, &lt.trace) == lt.label).count();
    right as f64 / data.len().max(1) as f64
}

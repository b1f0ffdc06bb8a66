//! The sweep over random target formulas: datasets, learners, per-run rows
//! and per-size summaries with 95% confidence intervals.

use std::io::Write;
use std::time::{Duration, Instant};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{formula_accuracy, run_learn, LearnConfig};
use crate::automata::{characteristic_sample, formula_to_dfa, Dfa};
use crate::baseline::{exact_learner, max_accuracy_learner, ExactOutcome, SearchBudget};
use crate::data::{build_dataset, inject_noise, Dataset, DatasetSpec};
use crate::ltl::{random_formula, satisfies, Formula, PropSet};
use crate::neural::TrainConfig;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Neural,
    Exact,
    MaxAccuracy,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Neural => "neural",
            Method::Exact => "exact",
            Method::MaxAccuracy => "max_accuracy",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub min_size: usize,
    pub max_size: usize,
    pub formulas_per_size: usize,
    pub n_props: usize,
    pub trace_length: usize,
    pub n_train: usize,
    pub n_test: usize,
    /// Fraction of training labels flipped.
    pub noise: f64,
    /// Wall-clock budget per target formula and method, in seconds.
    pub budget_secs: f64,
    pub architectures: Vec<Vec<usize>>,
    pub restarts: usize,
    pub train: TrainConfig,
    pub size_threshold: usize,
    pub methods: Vec<Method>,
    /// Size cap for the enumerative learners.
    pub baseline_max_size: usize,
    pub baseline_max_candidates: usize,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let learn = LearnConfig::default();
        ExperimentConfig {
            min_size: 2,
            max_size: 6,
            formulas_per_size: 10,
            n_props: 3,
            trace_length: 15,
            n_train: 200,
            n_test: 200,
            noise: 0.0,
            budget_secs: 120.0,
            architectures: learn.architectures,
            restarts: learn.restarts,
            train: learn.train,
            size_threshold: learn.size_threshold,
            methods: vec![Method::Neural, Method::Exact, Method::MaxAccuracy],
            baseline_max_size: 8,
            baseline_max_candidates: 150_000,
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> crate::Result<()> {
        let bad = |m: &str| Err(crate::Error::Config(m.into()));
        if self.min_size < 2 || self.max_size < self.min_size {
            return bad("sizes must satisfy 2 <= min_size <= max_size");
        }
        if self.formulas_per_size == 0 || self.n_props == 0 || self.trace_length == 0 {
            return bad("counts must be positive");
        }
        if self.n_train < 2 || self.n_test < 2 {
            return bad("datasets need at least one trace per class");
        }
        if !(0.0..=1.0).contains(&self.noise) {
            return bad("noise must lie in [0, 1]");
        }
        if self.budget_secs.is_nan() || self.budget_secs <= 0.0 {
            return bad("budget must be positive");
        }
        if self.methods.is_empty() {
            return bad("no methods selected");
        }
        self.learn_config().validate()
    }

    pub fn budget(&self) -> Duration {
        Duration::from_secs_f64(self.budget_secs)
    }

    pub fn learn_config(&self) -> LearnConfig {
        LearnConfig {
            architectures: self.architectures.clone(),
            restarts: self.restarts,
            train: self.train.clone(),
            size_threshold: self.size_threshold,
            budget: Some(self.budget()),
            qualitative: true,
        }
    }

    pub fn search_budget(&self) -> SearchBudget {
        SearchBudget {
            max_size: self.baseline_max_size,
            time_limit: Some(self.budget()),
            max_candidates: self.baseline_max_candidates,
            qualitative: true,
        }
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> crate::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// One method on one target. Accuracy, precision and recall are on the test
/// set; `error` is non-empty when the run failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub target_size: usize,
    pub index: usize,
    pub seed: u64,
    pub target: String,
    pub method: Method,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub train_accuracy: f64,
    pub formula: String,
    pub formula_size: usize,
    pub runtime_secs: f64,
    pub timeout: bool,
    pub fallback: bool,
    pub raw_size: String,
    pub minimized_size: String,
    pub char_fraction: f64,
    pub error: String,
}

/// Column order of the results CSV.
pub const RESULT_COLUMNS: [&str; 18] = [
    "target_size",
    "index",
    "seed",
    "target",
    "method",
    "accuracy",
    "precision",
    "recall",
    "train_accuracy",
    "formula",
    "formula_size",
    "runtime_secs",
    "timeout",
    "fallback",
    "raw_size",
    "minimized_size",
    "char_fraction",
    "error",
];

/// Mean test accuracy, its 95% normal-approximation half-width, and other
/// means for one method and target size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: Method,
    pub target_size: usize,
    pub runs: usize,
    pub mean_accuracy: f64,
    pub ci95: f64,
    pub perfect_fraction: f64,
    pub mean_formula_size: f64,
    pub mean_runtime_secs: f64,
    pub timeouts: usize,
}

pub const SUMMARY_COLUMNS: [&str; 9] = [
    "method",
    "target_size",
    "runs",
    "mean_accuracy",
    "ci95",
    "perfect_fraction",
    "mean_formula_size",
    "mean_runtime_secs",
    "timeouts",
];

#[derive(Debug, Clone)]
pub struct ExperimentResults {
    pub rows: Vec<ResultRow>,
    pub summary: Vec<SummaryRow>,
}

struct Scores {
    accuracy: f64,
    precision: f64,
    recall: f64,
}

fn score(f: &Formula, test: &Dataset) -> Scores {
    let (mut tp, mut fp, mut fneg, mut right) = (0usize, 0usize, 0usize, 0usize);
    for lt in &test.traces {
        let p = satisfies(f, &lt.trace);
        right += (p == lt.label) as usize;
        tp += (p && lt.label) as usize;
        fp += (p && !lt.label) as usize;
        fneg += (!p && lt.label) as usize;
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    Scores { accuracy: ratio(right, test.len()), precision: ratio(tp, tp + fp), recall: ratio(tp, tp + fneg) }
}

/// Target formula and datasets of one sweep cell.
pub(crate) struct Cell {
    pub target: Formula,
    pub train: Dataset,
    pub test: Dataset,
}

/// Attempts at drawing a target with both classes inhabited.
const TARGET_DRAWS: u64 = 1000;

/// A random target, with its minimal DFA, that has both satisfying and
/// violating traces of `length` steps. Other targets admit no balanced dataset.
pub fn draw_target(size: usize, props: &PropSet, length: usize, cell_seed: u64) -> crate::Result<(Formula, Dfa)> {
    for attempt in 0..TARGET_DRAWS {
        let mut rng = seed::rng(seed::derive(cell_seed, &[0, attempt]));
        let target = random_formula(size, props, true, &mut rng)?;
        let dfa = formula_to_dfa(&target, props.len())?;
        let p = dfa.acceptance_probability(length);
        if p > 0.0 && p < 1.0 {
            return Ok((target, dfa));
        }
    }
    Err(crate::Error::Config(format!("no target of size {size} with both classes in {TARGET_DRAWS} draws")))
}

pub(crate) fn make_cell(cfg: &ExperimentConfig, props: &PropSet, size: usize, cell_seed: u64) -> crate::Result<Cell> {
    let (target, dfa) = draw_target(size, props, cfg.trace_length, cell_seed)?;
    let sample = characteristic_sample(&dfa);
    let spec = |n: usize, s: u64| DatasetSpec { n_pos: n / 2, n_neg: n - n / 2, length: cfg.trace_length, seed: s };
    let clean = build_dataset(&target, props, &sample, spec(cfg.n_train, seed::derive(cell_seed, &[1])))?;
    let test = build_dataset(&target, props, &sample, spec(cfg.n_test, seed::derive(cell_seed, &[2])))?;
    let train = if cfg.noise > 0.0 { inject_noise(&clean, cfg.noise, seed::derive(cell_seed, &[3]))? } else { clean };
    Ok(Cell { target, train, test })
}

fn run_method(cfg: &ExperimentConfig, cell: &Cell, method: Method, cell_seed: u64) -> crate::Result<ResultRow> {
    let props = &cell.train.props;
    let start = Instant::now();
    let (formula, timeout, fallback, raw, minimized) = match method {
        Method::Neural => {
            let r = run_learn(&cell.train, &cfg.learn_config(), seed::derive(cell_seed, &[4]))?;
            let chosen = r.candidates.iter().find(|c| c.formula == r.formula_text && c.size == r.size);
            let (raw, min) = chosen
                .map(|c| (c.extraction.raw_size.to_string(), c.extraction.minimized_size.to_string()))
                .unwrap_or_default();
            (r.formula().clone(), false, r.fallback, raw, min)
        }
        Method::Exact => match exact_learner(&cell.train, &cfg.search_budget())? {
            ExactOutcome::Found(f) => (f, false, false, String::new(), String::new()),
            // No consistent formula in time: default to `true`.
            _ => (Formula::True, true, false, String::new(), String::new()),
        },
        Method::MaxAccuracy => {
            let r = max_accuracy_learner(&cell.train, &cfg.search_budget())?;
            (r.formula, r.truncated, false, String::new(), String::new())
        }
    };
    let runtime_secs = start.elapsed().as_secs_f64();
    let s = score(&formula, &cell.test);
    Ok(ResultRow {
        target_size: cell.target.size(),
        index: 0,
        seed: cell_seed,
        target: cell.target.to_text(props),
        method,
        accuracy: s.accuracy,
        precision: s.precision,
        recall: s.recall,
        train_accuracy: formula_accuracy(&formula, &cell.train),
        formula: formula.to_text(props),
        formula_size: formula.size(),
        runtime_secs,
        timeout,
        fallback,
        raw_size: raw,
        minimized_size: minimized,
        char_fraction: cell.train.char_fraction(),
        error: String::new(),
    })
}

fn failed_row(size: usize, index: usize, seed: u64, method: Method, err: &crate::Error) -> ResultRow {
    ResultRow {
        target_size: size,
        index,
        seed,
        target: String::new(),
        method,
        accuracy: f64::NAN,
        precision: f64::NAN,
        recall: f64::NAN,
        train_accuracy: f64::NAN,
        formula: String::new(),
        formula_size: 0,
        runtime_secs: 0.0,
        timeout: false,
        fallback: false,
        raw_size: String::new(),
        minimized_size: String::new(),
        char_fraction: 0.0,
        error: err.to_string(),
    }
}

/// Runs every method on `formulas_per_size` random targets of each size.
/// Cells run in parallel; each derives all randomness from the master seed,
/// the target size and its index, and failures become rows with `error` set.
pub fn run_experiment(cfg: &ExperimentConfig) -> crate::Result<ExperimentResults> {
    cfg.validate()?;
    let props = PropSet::alphabetic(cfg.n_props);
    let cells: Vec<(usize, usize)> =
        (cfg.min_size..=cfg.max_size).flat_map(|s| (0..cfg.formulas_per_size).map(move |k| (s, k))).collect();
    let rows: Vec<Vec<ResultRow>> = cells
        .par_iter()
        .map(|&(size, index)| {
            let cell_seed = seed::derive(cfg.seed, &[size as u64, index as u64]);
            let cell = match make_cell(cfg, &props, size, cell_seed) {
                Ok(c) => c,
                Err(e) => {
                    warn!("size {size} #{index}: {e}");
                    return cfg.methods.iter().map(|&m| failed_row(size, index, cell_seed, m, &e)).collect();
                }
            };
            cfg.methods
                .iter()
                .map(|&m| match run_method(cfg, &cell, m, cell_seed) {
                    Ok(mut row) => {
                        row.index = index;
                        info!("size {size} #{index} {}: acc {:.3} {}", m.name(), row.accuracy, row.formula);
                        row
                    }
                    Err(e) => failed_row(size, index, cell_seed, m, &e),
                })
                .collect()
        })
        .collect();
    let rows: Vec<ResultRow> = rows.into_iter().flatten().collect();
    let summary = summarize(&rows);
    Ok(ExperimentResults { rows, summary })
}

/// Per (method, target size) means over successful rows.
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(Method, usize)> = rows.iter().map(|r| (r.method, r.target_size)).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .filter_map(|(method, size)| {
            let group: Vec<&ResultRow> =
                rows.iter().filter(|r| r.method == method && r.target_size == size && r.error.is_empty()).collect();
            if group.is_empty() {
                return None;
            }
            let n = group.len() as f64;
            let mean = |f: &dyn Fn(&ResultRow) -> f64| group.iter().map(|r| f(r)).sum::<f64>() / n;
            let acc = mean(&|r| r.accuracy);
            let var = if group.len() > 1 {
                group.iter().map(|r| (r.accuracy - acc).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            Some(SummaryRow {
                method,
                target_size: size,
                runs: group.len(),
                mean_accuracy: acc,
                ci95: 1.96 * (var / n).sqrt(),
                perfect_fraction: mean(&|r| (r.accuracy == 1.0) as u8 as f64),
                mean_formula_size: mean(&|r| r.formula_size as f64),
                mean_runtime_secs: mean(&|r| r.runtime_secs),
                timeouts: group.iter().filter(|r| r.timeout).count(),
            })
        })
        .collect()
}

pub fn write_rows(rows: &[ResultRow], out: impl Write) -> crate::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary(rows: &[SummaryRow], out: impl Write) -> crate::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            min_size: 2,
            max_size: 3,
            formulas_per_size: 2,
            n_props: 2,
            trace_length: 8,
            n_train: 40,
            n_test: 40,
            budget_secs: 5.0,
            architectures: vec![vec![1]],
            train: TrainConfig { max_epochs: 100, ..TrainConfig::default() },
            baseline_max_size: 3,
            seed: 11,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn rows_cover_every_cell_and_method() {
        let cfg = small();
        let res = run_experiment(&cfg).unwrap();
        assert_eq!(res.rows.len(), 2 * 2 * 3);
        let mut bytes = Vec::new();
        write_rows(&res.rows, &mut bytes).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert_eq!(text.lines().next().unwrap(), RESULT_COLUMNS.join(","));
        let mut bytes = Vec::new();
        write_summary(&res.summary, &mut bytes).unwrap();
        assert_eq!(String::from_utf8(bytes).unwrap().lines().next().unwrap(), SUMMARY_COLUMNS.join(","));
    }

    #[test]
    fn accuracies_recompute_from_stored_formulas() {
        let cfg = small();
        let res = run_experiment(&cfg).unwrap();
        let props = PropSet::alphabetic(cfg.n_props);
        for row in &res.rows {
            assert!(row.error.is_empty(), "{}", row.error);
            let size = row.target_size;
            let cell = make_cell(&cfg, &props, size, row.seed).unwrap();
            let f = crate::ltl::parse(&row.formula, &props).unwrap();
            assert_eq!(score(&f, &cell.test).accuracy, row.accuracy);
        }
    }

    #[test]
    fn exact_timeout_defaults_to_true() {
        let cfg = ExperimentConfig { methods: vec![Method::Exact], noise: 0.1, baseline_max_size: 2, ..small() };
        let res = run_experiment(&cfg).unwrap();
        for row in res.rows.iter().filter(|r| r.timeout) {
            assert_eq!(row.formula, "true");
            assert_eq!(row.accuracy, 0.5);
        }
    }

    #[test]
    fn same_seed_same_baseline_rows() {
        let cfg = ExperimentConfig { methods: vec![Method::Exact, Method::MaxAccuracy], ..small() };
        let strip = |rows: Vec<ResultRow>| -> Vec<ResultRow> {
            rows.into_iter().map(|r| ResultRow { runtime_secs: 0.0, ..r }).collect()
        };
        let a = strip(run_experiment(&cfg).unwrap().rows);
        let b = strip(run_experiment(&cfg).unwrap().rows);
        assert_eq!(a, b);
    }

    #[test]
    fn confidence_interval() {
        let row = |acc: f64| ResultRow {
            accuracy: acc,
            ..failed_row(2, 0, 0, Method::Neural, &crate::Error::Config(String::new()))
        };
        let rows: Vec<ResultRow> =
            [0.5, 1.0, 0.75].iter().map(|&a| ResultRow { error: String::new(), ..row(a) }).collect();
        let s = summarize(&rows);
        assert_eq!(s.len(), 1);
        assert!((s[0].mean_accuracy - 0.75).abs() < 1e-12);
        let sd = (0.0625f64).sqrt();
        assert!((s[0].ci95 - 1.96 * sd / 3f64.sqrt()).abs() < 1e-12);
    }
}

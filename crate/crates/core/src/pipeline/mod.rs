//! End-to-end learning: train several networks, extract a formula from
//! each, and select one; plus the experiment sweep over random targets.

mod experiment;

use std::time::{Duration, Instant};

use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::extract::{network_to_formula, ExtractionReport};
use crate::ltl::{satisfies, Formula};
use crate::neural::{train, Network, StopReason, TrainConfig};
use crate::seed;

pub use experiment::{
    draw_target, run_experiment, summarize, write_rows, write_summary, ExperimentConfig, ExperimentResults, Method,
    ResultRow, SummaryRow, RESULT_COLUMNS, SUMMARY_COLUMNS,
};

/// Settings for [`run_learn`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LearnConfig {
    /// Filters per layer for each architecture tried.
    pub architectures: Vec<Vec<usize>>,
    /// Training runs per architecture.
    pub restarts: usize,
    pub train: TrainConfig,
    /// Extracted formulas larger than this are discarded.
    pub size_threshold: usize,
    /// Wall-clock budget shared by all runs.
    pub budget: Option<Duration>,
    /// Hold metric weights at zero.
    pub qualitative: bool,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            architectures: vec![vec![1], vec![3, 1], vec![5, 5, 1]],
            restarts: 1,
            train: TrainConfig::default(),
            size_threshold: 25,
            budget: Some(Duration::from_secs(120)),
            qualitative: true,
        }
    }
}

impl LearnConfig {
    pub fn validate(&self) -> crate::Result<()> {
        if self.architectures.is_empty() || self.restarts == 0 {
            return Err(crate::Error::Config("need at least one architecture and one restart".into()));
        }
        if let Some(a) = self.architectures.iter().find(|a| a.last() != Some(&1) || a.contains(&0)) {
            return Err(crate::Error::Config(format!("architecture {a:?} must end in a single filter")));
        }
        self.train.validate()?;
        Ok(())
    }
}

/// One trained network and the formula extracted from it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Candidate {
    pub architecture: Vec<usize>,
    pub restart: usize,
    pub seed: u64,
    pub stop: StopReason,
    pub epochs: usize,
    /// Hard-mode training accuracy of the network.
    pub network_accuracy: f64,
    /// Training accuracy of the extracted formula.
    pub formula_accuracy: f64,
    pub formula: String,
    pub size: usize,
    pub extraction: ExtractionReport,
    #[serde(skip)]
    pub network: Option<Network>,
    #[serde(skip)]
    pub parsed: Option<Formula>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LearnReport {
    #[serde(skip)]
    pub formula: Option<Formula>,
    pub formula_text: String,
    pub size: usize,
    pub train_accuracy: f64,
    /// No candidate met the size threshold; the smallest one was taken.
    pub fallback: bool,
    pub candidates: Vec<Candidate>,
    /// Runs whose extraction failed, with the error.
    pub failures: Vec<String>,
    pub elapsed_secs: f64,
}

impl LearnReport {
    pub fn formula(&self) -> &Formula {
        self.formula.as_ref().expect("set by run_learn")
    }
}

/// Fraction of traces in `data` whose label matches `satisfies(f, ·)`.
pub fn formula_accuracy(f: &Formula, data: &Dataset) -> f64 {
    let right = data.traces.iter().filter(|lt| satisfies(f, &lt.trace) == lt.label).count();
    right as f64 / data.len().max(1) as f64
}

/// Trains every architecture and restart, extracts a formula from each
/// network, and selects the most accurate formula on the training data
/// among those within the size threshold, breaking ties by size and then
/// text. The time budget is divided evenly among the runs still to go.
pub fn run_learn(data: &Dataset, cfg: &LearnConfig, master_seed: u64) -> crate::Result<LearnReport> {
    cfg.validate()?;
    let start = Instant::now();
    let runs: Vec<(usize, usize)> =
        (0..cfg.architectures.len()).flat_map(|a| (0..cfg.restarts).map(move |r| (a, r))).collect();
    let mut candidates = Vec::new();
    let mut failures = Vec::new();
    for (k, &(a, r)) in runs.iter().enumerate() {
        let arch = &cfg.architectures[a];
        let run_seed = seed::derive(master_seed, &[a as u64, r as u64]);
        let budget = cfg.budget.map(|b| b.saturating_sub(start.elapsed()) / (runs.len() - k) as u32);
        let net = Network::random(data.width(), arch, cfg.qualitative, &mut seed::rng(seed::derive(run_seed, &[0])))?;
        let tc = TrainConfig { seed: seed::derive(run_seed, &[1]), budget, ..cfg.train.clone() };
        let out = train(net, data, &tc)?;
        let extraction = match network_to_formula(&out.network, &data.props) {
            Ok(e) => e,
            Err(e) => {
                warn!("extraction failed for {arch:?} restart {r}: {e}");
                failures.push(format!("{arch:?}/{r}: {e}"));
                continue;
            }
        };
        let f = extraction.formula;
        info!("{arch:?}/{r}: {} epochs, net acc {:.3}, formula size {}", out.log.len(), out.best_accuracy, f.size());
        candidates.push(Candidate {
            architecture: arch.clone(),
            restart: r,
            seed: run_seed,
            stop: out.stop,
            epochs: out.log.len(),
            network_accuracy: out.best_accuracy,
            formula_accuracy: formula_accuracy(&f, data),
            formula: extraction.report.formula.clone(),
            size: f.size(),
            extraction: extraction.report,
            network: Some(out.network),
            parsed: Some(f),
        });
    }
    let better = |a: &&Candidate, b: &&Candidate| {
        b.formula_accuracy.total_cmp(&a.formula_accuracy).then(a.size.cmp(&b.size)).then(a.formula.cmp(&b.formula))
    };
    let within: Vec<&Candidate> = candidates.iter().filter(|c| c.size <= cfg.size_threshold).collect();
    let (chosen, fallback) = match within.iter().min_by(|a, b| better(a, b)) {
        Some(c) => (*c, false),
        None => {
            let c = candidates
                .iter()
                .min_by(|a, b| a.size.cmp(&b.size).then(better(a, b)))
                .ok_or_else(|| crate::Error::Config(format!("every run failed: {}", failures.join("; "))))?;
            warn!("no formula within size {}; using the smallest ({})", cfg.size_threshold, c.size);
            (c, true)
        }
    };
    Ok(LearnReport {
        formula: chosen.parsed.clone(),
        formula_text: chosen.formula.clone(),
        size: chosen.size,
        train_accuracy: chosen.formula_accuracy,
        fallback,
        failures,
        elapsed_secs: start.elapsed().as_secs_f64(),
        candidates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{dfa_equivalent, formula_to_dfa};
    use crate::data::{build_dataset, DatasetSpec};
    use crate::ltl::{parse, PropSet};

    fn eventually_data(seed_value: u64) -> Dataset {
        let props = PropSet::alphabetic(2);
        let f = parse("F a", &props).unwrap();
        build_dataset(&f, &props, &[], DatasetSpec { n_pos: 50, n_neg: 50, length: 8, seed: seed_value }).unwrap()
    }

    #[test]
    fn learns_eventually() {
        let props = PropSet::alphabetic(2);
        let want = formula_to_dfa(&parse("F a", &props).unwrap(), 2).unwrap();
        let mut hits = 0;
        for s in 0..3 {
            let d = eventually_data(s);
            let cfg = LearnConfig { architectures: vec![vec![1], vec![3, 1]], ..LearnConfig::default() };
            let r = run_learn(&d, &cfg, s).unwrap();
            assert!(!r.fallback);
            assert_eq!(r.train_accuracy, formula_accuracy(r.formula(), &d));
            if dfa_equivalent(&formula_to_dfa(r.formula(), 2).unwrap(), &want).unwrap().is_equal() {
                hits += 1;
            }
        }
        assert!(hits >= 2, "{hits}/3");
    }

    #[test]
    fn zero_threshold_falls_back() {
        let d = eventually_data(7);
        let cfg = LearnConfig {
            architectures: vec![vec![1]],
            size_threshold: 0,
            train: TrainConfig { max_epochs: 50, ..TrainConfig::default() },
            ..LearnConfig::default()
        };
        let r = run_learn(&d, &cfg, 1).unwrap();
        assert!(r.fallback || r.size == 0);
    }

    #[test]
    fn deterministic() {
        let d = eventually_data(8);
        let cfg = LearnConfig {
            architectures: vec![vec![1], vec![2, 1]],
            budget: None,
            train: TrainConfig { max_epochs: 40, early_stop: false, ..TrainConfig::default() },
            ..LearnConfig::default()
        };
        let (a, b) = (run_learn(&d, &cfg, 3).unwrap(), run_learn(&d, &cfg, 3).unwrap());
        assert_eq!(a.formula_text, b.formula_text);
        assert_eq!(a.candidates.len(), b.candidates.len());
        for (x, y) in a.candidates.iter().zip(&b.candidates) {
            assert_eq!(x.network, y.network);
        }
    }

    #[test]
    fn rejects_bad_architecture() {
        let d = eventually_data(9);
        let cfg = LearnConfig { architectures: vec![vec![2]], ..LearnConfig::default() };
        assert!(run_learn(&d, &cfg, 0).is_err());
    }
}

//! Mini-batch Adam training with sigmoid and rectifier annealing.

use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use log::debug;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{grad, hard_metrics, Mode, Network, NeuralError};
use crate::data::{Dataset, LabeledTrace};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub beta0: f64,
    pub beta_step: f64,
    pub alpha0: f64,
    pub alpha_step: f64,
    /// Seed for mini-batch shuffling.
    pub seed: u64,
    /// Stop once hard-mode training accuracy reaches 100%.
    pub early_stop: bool,
    /// Checked after each epoch.
    pub budget: Option<Duration>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.005,
            batch_size: 100,
            max_epochs: 3000,
            beta0: 1.0,
            beta_step: 0.01,
            alpha0: 0.21,
            alpha_step: -7e-5,
            seed: 0,
            early_stop: true,
            budget: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), NeuralError> {
        if self.learning_rate.is_nan() || self.learning_rate <= 0.0 {
            return Err(NeuralError::BadConfig("learning rate must be positive".into()));
        }
        if self.batch_size == 0 {
            return Err(NeuralError::BadConfig("batch size must be at least 1".into()));
        }
        Ok(())
    }
}

/// Adam with the usual bias correction.
#[derive(Debug, Clone)]
pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    t: i32,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    pub fn new(n: usize, lr: f64) -> Self {
        Adam { lr, beta1: 0.9, beta2: 0.999, eps: 1e-7, t: 0, m: vec![0.0; n], v: vec![0.0; n] }
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for k in 0..params.len() {
            let g = grads[k];
            self.m[k] = self.beta1 * self.m[k] + (1.0 - self.beta1) * g;
            self.v[k] = self.beta2 * self.v[k] + (1.0 - self.beta2) * g * g;
            params[k] -= self.lr * (self.m[k] / c1) / ((self.v[k] / c2).sqrt() + self.eps);
        }
    }
}

/// One row of the training log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    pub soft_acc: f64,
    pub hard_acc: f64,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    /// Hard-mode training accuracy reached 100%.
    Converged,
    MaxEpochs,
    BudgetExhausted,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Parameters from the epoch with the best hard-mode training accuracy
    /// (earliest on ties).
    pub network: Network,
    pub best_epoch: usize,
    pub best_accuracy: f64,
    pub log: Vec<EpochRecord>,
    pub stop: StopReason,
}

impl TrainOutcome {
    /// Writes the log as CSV with a header row.
    pub fn write_log(&self, out: impl Write) -> Result<(), crate::Error> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.log {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn soft_accuracy(net: &Network, traces: &[LabeledTrace]) -> f64 {
    let mut buf = Vec::new();
    let right = traces
        .iter()
        .filter(|lt| {
            net.forward_into(&lt.trace, Mode::Soft, &mut buf);
            (buf.last().expect("layers")[0] >= 0.5) == lt.label
        })
        .count();
    right as f64 / traces.len() as f64
}

/// Trains `net` on `data`, starting from `cfg.beta0` and `cfg.alpha0`.
pub fn train(mut net: Network, data: &Dataset, cfg: &TrainConfig) -> Result<TrainOutcome, NeuralError> {
    cfg.validate()?;
    net.validate()?;
    if data.is_empty() {
        return Err(NeuralError::EmptyDataset);
    }
    if data.width() != net.n_props {
        return Err(NeuralError::WidthMismatch { expected: net.n_props, found: data.width() });
    }
    let start = Instant::now();
    let mut rng = seed::rng(cfg.seed);
    net.beta = cfg.beta0;
    net.alpha = cfg.alpha0.max(0.0);
    let mut params = net.params();
    let mut adam = Adam::new(params.len(), cfg.learning_rate);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut log = Vec::new();
    let mut best = (net.clone(), 0, -1.0);
    let mut stop = StopReason::MaxEpochs;

    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<&LabeledTrace> = chunk.iter().map(|&k| &data.traces[k]).collect();
            let (loss, grads) = grad::gradients(&net, &batch);
            loss_sum += loss * batch.len() as f64;
            adam.step(&mut params, &grads);
            net.set_params(&params);
        }
        let soft_acc = soft_accuracy(&net, &data.traces);
        let hard_acc = hard_metrics(&net, &data.traces)?.accuracy;
        if hard_acc > best.2 {
            best = (net.clone(), epoch, hard_acc);
        }
        net.alpha = (net.alpha + cfg.alpha_step).max(0.0);
        net.beta += cfg.beta_step;
        let record = EpochRecord {
            epoch,
            loss: loss_sum / data.len() as f64,
            soft_acc,
            hard_acc,
            alpha: net.alpha,
            beta: net.beta,
        };
        debug!("epoch {epoch}: loss {:.5} soft {:.3} hard {:.3}", record.loss, soft_acc, hard_acc);
        log.push(record);
        if cfg.early_stop && hard_acc >= 1.0 {
            stop = StopReason::Converged;
            break;
        }
        if cfg.budget.is_some_and(|b| start.elapsed() >= b) {
            stop = StopReason::BudgetExhausted;
            break;
        }
    }
    let (network, best_epoch, best_accuracy) = best;
    Ok(TrainOutcome { network, best_epoch, best_accuracy, log, stop })
}

/// Saved network state. The JSON holds the architecture, every parameter,
/// the annealing state, the epoch and the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub epoch: usize,
    pub seed: u64,
    pub architecture: Vec<usize>,
    pub network: Network,
}

impl Checkpoint {
    pub const VERSION: u32 = 1;

    pub fn new(network: Network, epoch: usize, seed: u64) -> Self {
        Checkpoint { version: Self::VERSION, epoch, seed, architecture: network.architecture(), network }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), crate::Error> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, crate::Error> {
        let file = std::fs::File::open(path)?;
        let c: Checkpoint = serde_json::from_reader(std::io::BufReader::new(file))?;
        if c.version != Self::VERSION {
            return Err(NeuralError::Checkpoint(format!("unsupported version {}", c.version)).into());
        }
        if c.architecture != c.network.architecture() {
            return Err(NeuralError::Checkpoint("architecture does not match the parameters".into()).into());
        }
        c.network.validate()?;
        Ok(c)
    }
}

//! Layered temporal filters. Each filter produces a sequence over timesteps
//! `0..=T`; position `T` holds a learned base value and earlier positions
//! follow the backward recurrence
//!
//! ```text
//! out[t] = σ( Σ_j prop[j]·in_j[t] + Σ_j metric[j]·in_j[t+1] + δ(qual)·out[t+1] + bias )
//! ```
//!
//! Soft mode uses a sigmoid of steepness `beta` and a leaky rectifier of
//! slope `alpha`; hard mode uses the unit step and `max(0, ·)`.

mod grad;
mod teacher;
mod train;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{Dataset, LabeledTrace, Trace};

pub use grad::{gradients, loss};
pub use teacher::teacher_network;
pub use train::{train, Adam, Checkpoint, EpochRecord, StopReason, TrainConfig, TrainOutcome};

#[derive(Debug, Error, PartialEq)]
pub enum NeuralError {
    #[error("trace has {found} propositions but the network expects {expected}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("invalid architecture: {0}")]
    BadArchitecture(String),
    #[error("invalid training configuration: {0}")]
    BadConfig(String),
    #[error("no teacher network for {0}")]
    Unsupported(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Soft,
    Hard,
}

/// Parameters of one filter. `prop` and `metric` have one entry per input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterWeights {
    pub prop: Vec<f64>,
    pub metric: Vec<f64>,
    pub qual: f64,
    pub bias: f64,
    /// Pre-activation of the filter's value at position `T`.
    pub out_base: f64,
}

impl FilterWeights {
    pub fn zeros(width: usize) -> Self {
        FilterWeights { prop: vec![0.0; width], metric: vec![0.0; width], qual: 0.0, bias: 0.0, out_base: 0.0 }
    }

    pub fn width(&self) -> usize {
        self.prop.len()
    }
}

/// One layer of filters. `input_base` holds the base pre-activations of the
/// raw proposition inputs and is only used by the first layer; deeper layers
/// read the `out_base` of the filters that produce their inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub filters: Vec<FilterWeights>,
    #[serde(default)]
    pub input_base: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub n_props: usize,
    pub layers: Vec<Layer>,
    /// Sigmoid steepness.
    pub beta: f64,
    /// Negative-side slope of the leaky rectifier.
    pub alpha: f64,
    /// Metric weights are held at zero.
    pub qualitative: bool,
}

/// Per-layer filter outputs, `[layer][filter][t]` with `t` in `0..=T`.
#[derive(Debug, Clone, PartialEq)]
pub struct Activations {
    pub layers: Vec<Vec<Vec<f64>>>,
}

impl Activations {
    /// The network's prediction: the final filter at the first timestep.
    pub fn prediction(&self) -> f64 {
        self.layers.last().expect("at least one layer")[0][0]
    }
}

/// Accuracy of hard-mode predictions together with precision and recall on
/// the positive class. Undefined ratios are reported as 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
}

pub(crate) fn sigma(x: f64, beta: f64, mode: Mode) -> f64 {
    match mode {
        Mode::Soft => 1.0 / (1.0 + (-beta * x).exp()),
        Mode::Hard => step(x),
    }
}

pub(crate) fn step(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        0.0
    }
}

pub(crate) fn rectify(w: f64, alpha: f64, mode: Mode) -> f64 {
    match mode {
        Mode::Soft => w.max(alpha * w),
        Mode::Hard => w.max(0.0),
    }
}

impl Network {
    /// A network with `arch[l]` filters in layer `l`, weights drawn uniformly
    /// from `[-1, 1]`.
    pub fn random(n_props: usize, arch: &[usize], qualitative: bool, rng: &mut impl Rng) -> Result<Self, NeuralError> {
        check_arch(n_props, arch)?;
        let mut u = || rng.gen_range(-1.0..=1.0);
        let mut layers = Vec::with_capacity(arch.len());
        let mut width = n_props;
        for (l, &n) in arch.iter().enumerate() {
            let input_base = if l == 0 { (0..n_props).map(|_| u()).collect() } else { Vec::new() };
            let filters = (0..n)
                .map(|_| FilterWeights {
                    prop: (0..width).map(|_| u()).collect(),
                    metric: (0..width).map(|_| if qualitative { 0.0 } else { u() }).collect(),
                    qual: u(),
                    bias: u(),
                    out_base: u(),
                })
                .collect();
            layers.push(Layer { filters, input_base });
            width = n;
        }
        Ok(Network { n_props, layers, beta: 1.0, alpha: 0.21, qualitative })
    }

    /// Checks layer widths and the single-output invariant.
    pub fn validate(&self) -> Result<(), NeuralError> {
        check_arch(self.n_props, &self.architecture())?;
        let mut width = self.n_props;
        for (l, layer) in self.layers.iter().enumerate() {
            let base_len = if l == 0 { self.n_props } else { 0 };
            if layer.input_base.len() != base_len {
                return Err(NeuralError::BadArchitecture(format!(
                    "layer {l} has {} input bases",
                    layer.input_base.len()
                )));
            }
            if layer.filters.iter().any(|f| f.prop.len() != width || f.metric.len() != width) {
                return Err(NeuralError::BadArchitecture(format!("layer {l} filters must have width {width}")));
            }
            width = layer.filters.len();
        }
        Ok(())
    }

    /// Filters per layer.
    pub fn architecture(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.filters.len()).collect()
    }

    pub fn param_count(&self) -> usize {
        self.n_props + self.layers.iter().flat_map(|l| &l.filters).map(|f| 2 * f.width() + 3).sum::<usize>()
    }

    /// All parameters in declared order: the first layer's input bases, then
    /// for each filter `prop`, `metric`, `qual`, `bias`, `out_base`.
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for layer in &self.layers {
            out.extend(&layer.input_base);
            for f in &layer.filters {
                out.extend(&f.prop);
                out.extend(&f.metric);
                out.extend([f.qual, f.bias, f.out_base]);
            }
        }
        out
    }

    pub fn set_params(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.param_count(), "parameter vector length");
        let mut it = p.iter().copied();
        let mut take = |dst: &mut f64| *dst = it.next().expect("length checked");
        for layer in &mut self.layers {
            layer.input_base.iter_mut().for_each(&mut take);
            for f in &mut layer.filters {
                f.prop.iter_mut().for_each(&mut take);
                f.metric.iter_mut().for_each(&mut take);
                take(&mut f.qual);
                take(&mut f.bias);
                take(&mut f.out_base);
            }
        }
    }

    fn check_width(&self, trace: &Trace) -> Result<(), NeuralError> {
        if trace.width() != self.n_props {
            return Err(NeuralError::WidthMismatch { expected: self.n_props, found: trace.width() });
        }
        Ok(())
    }

    /// Runs every filter over the trace.
    pub fn forward(&self, trace: &Trace, mode: Mode) -> Result<Activations, NeuralError> {
        self.check_width(trace)?;
        let mut buf = Vec::new();
        self.forward_into(trace, mode, &mut buf);
        let len = trace.len() + 1;
        let layers = buf[1..].iter().map(|flat| flat.chunks(len).map(<[f64]>::to_vec).collect()).collect();
        Ok(Activations { layers })
    }

    pub fn predict(&self, trace: &Trace, mode: Mode) -> Result<f64, NeuralError> {
        self.check_width(trace)?;
        let mut buf = Vec::new();
        self.forward_into(trace, mode, &mut buf);
        Ok(buf.last().expect("at least one layer")[0])
    }

    /// Sequence buffers: `buf[0]` holds the inputs, `buf[l + 1]` the outputs
    /// of layer `l`, each as `width` consecutive runs of `T + 1` values.
    pub(crate) fn forward_into(&self, trace: &Trace, mode: Mode, buf: &mut Vec<Vec<f64>>) {
        let t_end = trace.len();
        let len = t_end + 1;
        buf.resize_with(self.layers.len() + 1, Vec::new);
        let inputs = &mut buf[0];
        inputs.clear();
        for j in 0..self.n_props {
            inputs.extend((0..t_end).map(|t| if trace.holds(t, j) { 1.0 } else { 0.0 }));
            inputs.push(sigma(self.layers[0].input_base[j], self.beta, mode));
        }
        for (l, layer) in self.layers.iter().enumerate() {
            let (lower, upper) = buf.split_at_mut(l + 1);
            let input = &lower[l];
            let out = &mut upper[0];
            out.clear();
            out.resize(layer.filters.len() * len, 0.0);
            for (i, f) in layer.filters.iter().enumerate() {
                let seq = &mut out[i * len..(i + 1) * len];
                seq[t_end] = sigma(f.out_base, self.beta, mode);
                let q = rectify(f.qual, self.alpha, mode);
                for t in (0..t_end).rev() {
                    let mut z = f.bias + q * seq[t + 1];
                    for j in 0..f.width() {
                        let x = &input[j * len..(j + 1) * len];
                        z += f.prop[j] * x[t] + f.metric[j] * x[t + 1];
                    }
                    seq[t] = sigma(z, self.beta, mode);
                }
            }
        }
    }

    /// Hard-mode classification metrics on a dataset.
    pub fn hard_accuracy(&self, data: &Dataset) -> Result<Metrics, NeuralError> {
        hard_metrics(self, &data.traces)
    }
}

pub(crate) fn hard_metrics(net: &Network, traces: &[LabeledTrace]) -> Result<Metrics, NeuralError> {
    if traces.is_empty() {
        return Err(NeuralError::EmptyDataset);
    }
    let (mut tp, mut fp, mut tn, mut fneg) = (0usize, 0usize, 0usize, 0usize);
    let mut buf = Vec::new();
    for lt in traces {
        net.check_width(&lt.trace)?;
        net.forward_into(&lt.trace, Mode::Hard, &mut buf);
        let predicted = buf.last().expect("layers")[0] >= 0.5;
        match (predicted, lt.label) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fneg += 1,
        }
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    Ok(Metrics { accuracy: ratio(tp + tn, traces.len()), precision: ratio(tp, tp + fp), recall: ratio(tp, tp + fneg) })
}

/// Free-function form of [`Network::hard_accuracy`].
pub fn hard_accuracy(net: &Network, data: &Dataset) -> Result<Metrics, NeuralError> {
    net.hard_accuracy(data)
}

fn check_arch(n_props: usize, arch: &[usize]) -> Result<(), NeuralError> {
    if n_props == 0 {
        return Err(NeuralError::BadArchitecture("no input propositions".into()));
    }
    match arch.last() {
        None => Err(NeuralError::BadArchitecture("no layers".into())),
        Some(&n) if n != 1 => Err(NeuralError::BadArchitecture("the final layer must have one filter".into())),
        _ if arch.contains(&0) => Err(NeuralError::BadArchitecture("empty layer".into())),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Provenance;
    use crate::ltl::PropSet;
    use crate::seed;

    fn single(f: FilterWeights, n_props: usize, input_base: Vec<f64>) -> Network {
        Network {
            n_props,
            layers: vec![Layer { filters: vec![f], input_base }],
            beta: 1.0,
            alpha: 0.21,
            qualitative: false,
        }
    }

    #[test]
    fn zero_filter_predicts_false() {
        let mut f = FilterWeights::zeros(2);
        f.bias = -1.0;
        let net = single(f, 2, vec![0.0, 0.0]);
        for t in Trace::enumerate_up_to(2, 3) {
            assert_eq!(net.predict(&t, Mode::Hard).unwrap(), 0.0);
        }
    }

    #[test]
    fn globally_filter_on_all_true_trace() {
        let f = FilterWeights { prop: vec![1.0], metric: vec![0.0], qual: 1.0, bias: -1.5, out_base: 0.5 };
        let net = single(f, 1, vec![-0.5]);
        let t = Trace::new(1, vec![1; 5]).unwrap();
        assert_eq!(net.predict(&t, Mode::Hard).unwrap(), 1.0);
        let t = Trace::new(1, vec![1, 1, 0, 1]).unwrap();
        assert_eq!(net.predict(&t, Mode::Hard).unwrap(), 0.0);
    }

    #[test]
    fn params_round_trip() {
        let mut rng = seed::rng(3);
        let net = Network::random(3, &[3, 2, 1], false, &mut rng).unwrap();
        let p = net.params();
        assert_eq!(p.len(), net.param_count());
        let mut other = Network::random(3, &[3, 2, 1], false, &mut rng).unwrap();
        other.set_params(&p);
        assert_eq!(other, net);
        assert!(net.validate().is_ok());
    }

    #[test]
    fn bad_architectures() {
        let mut rng = seed::rng(0);
        assert!(Network::random(2, &[2], false, &mut rng).is_err());
        assert!(Network::random(2, &[], false, &mut rng).is_err());
        assert!(Network::random(2, &[0, 1], false, &mut rng).is_err());
    }

    #[test]
    fn width_mismatch() {
        let net = Network::random(2, &[1], false, &mut seed::rng(0)).unwrap();
        let t = Trace::new(3, vec![0]).unwrap();
        assert_eq!(net.predict(&t, Mode::Hard), Err(NeuralError::WidthMismatch { expected: 2, found: 3 }));
    }

    #[test]
    fn constant_true_metrics() {
        let mut f = FilterWeights::zeros(1);
        f.bias = 1.0;
        let net = single(f, 1, vec![0.0]);
        let traces = vec![
            LabeledTrace { trace: Trace::new(1, vec![0]).unwrap(), label: true },
            LabeledTrace { trace: Trace::new(1, vec![1]).unwrap(), label: false },
        ];
        let d = Dataset::new(PropSet::alphabetic(1), traces, Provenance::default()).unwrap();
        let m = net.hard_accuracy(&d).unwrap();
        assert_eq!((m.accuracy, m.precision, m.recall), (0.5, 0.5, 1.0));
        let mut inverted = net.clone();
        inverted.layers[0].filters[0].bias = -1.0;
        let flipped: Vec<_> = d.traces.iter().map(|lt| LabeledTrace { trace: lt.trace.clone(), label: true }).collect();
        let d2 = Dataset::new(PropSet::alphabetic(1), flipped, Provenance::default()).unwrap();
        assert_eq!(inverted.hard_accuracy(&d2).unwrap().accuracy, 0.0);
    }

    #[test]
    fn leaky_rectifier_converges_to_relu() {
        for x in [-2.0, -0.1, 0.0, 0.3] {
            assert!((rectify(x, 1e-9, Mode::Soft) - rectify(x, 0.0, Mode::Hard)).abs() < 1e-8);
        }
        assert_eq!(rectify(-1.0, 0.21, Mode::Soft), -0.21);
    }
}

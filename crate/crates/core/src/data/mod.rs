//! Traces, labeled datasets, and the dataset construction protocol.

mod io;
mod trace;

use log::warn;
use rand::seq::index::sample;
use thiserror::Error;

use crate::automata::formula_to_dfa;
use crate::ltl::{satisfies, Formula, PropSet};

pub use io::{read_dataset, write_dataset};
pub use trace::{random_trace, random_trace_seeded, Trace, MAX_WIDTH};

/// Draws allowed per missing class before rejection sampling gives up.
pub const DRAWS_PER_CLASS: usize = 1_000_000;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DataError {
    #[error("traces must have at least one step")]
    EmptyTrace,
    #[error("{width} propositions exceeds the supported maximum of {max}")]
    TooManyPropositions { width: usize, max: usize },
    #[error("assignment {assignment:#b} has bits beyond width {width}")]
    AssignmentWidth { assignment: u32, width: usize },
    #[error("step {t} has {found} entries, expected {expected}")]
    RaggedStep { t: usize, expected: usize, found: usize },
    #[error("trace of length {len} is longer than the target length {target}")]
    TraceTooLong { len: usize, target: usize },
    #[error("dataset traces must be qualitative-labeled; target is not qualitative")]
    NotQualitative,
    #[error("characteristic sample trace {index} is labeled {label} but the target says {actual}")]
    MislabeledSample { index: usize, label: bool, actual: bool },
    #[error("could not draw {missing} more {class} traces within {draws} draws")]
    UnbalancedClasses { class: &'static str, missing: usize, draws: usize },
    #[error("noise rate {0} outside [0, 1]")]
    BadNoiseRate(f64),
    #[error("trace width {found} does not match the {expected} dataset propositions")]
    WidthMismatch { expected: usize, found: usize },
    #[error("traces in a dataset must share one length ({expected} vs {found})")]
    LengthMismatch { expected: usize, found: usize },
    #[error("malformed dataset file at line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("i/o: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabeledTrace {
    pub trace: Trace,
    pub label: bool,
}

/// Where a dataset came from.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Provenance {
    /// Target formula text, when the labels came from a formula.
    pub target: Option<String>,
    pub seed: u64,
    pub noise: f64,
    /// How many leading traces came from the characteristic sample.
    pub char_count: usize,
    /// Indices whose labels were flipped by noise injection.
    pub flipped: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub props: PropSet,
    pub traces: Vec<LabeledTrace>,
    pub provenance: Provenance,
}

impl Dataset {
    /// Checks that every trace matches the proposition count and that all
    /// traces share one length.
    pub fn new(props: PropSet, traces: Vec<LabeledTrace>, provenance: Provenance) -> Result<Self, DataError> {
        let mut len = None;
        for lt in &traces {
            if lt.trace.width() != props.len() {
                return Err(DataError::WidthMismatch { expected: props.len(), found: lt.trace.width() });
            }
            match len {
                None => len = Some(lt.trace.len()),
                Some(l) if l != lt.trace.len() => {
                    return Err(DataError::LengthMismatch { expected: l, found: lt.trace.len() })
                }
                _ => {}
            }
        }
        Ok(Dataset { props, traces, provenance })
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn width(&self) -> usize {
        self.props.len()
    }

    /// Common trace length, `None` for an empty dataset.
    pub fn trace_len(&self) -> Option<usize> {
        self.traces.first().map(|t| t.trace.len())
    }

    pub fn positives(&self) -> usize {
        self.traces.iter().filter(|t| t.label).count()
    }

    pub fn negatives(&self) -> usize {
        self.len() - self.positives()
    }

    /// Fraction of traces that came from the characteristic sample.
    pub fn char_fraction(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.provenance.char_count as f64 / self.len() as f64
        }
    }
}

/// Parameters of [`build_dataset`].
#[derive(Debug, Clone, Copy)]
pub struct DatasetSpec {
    pub n_pos: usize,
    pub n_neg: usize,
    pub length: usize,
    pub seed: u64,
}

/// Builds a dataset for a qualitative target: the characteristic sample,
/// stutter-padded to `length`, followed by random traces labeled by the
/// target until exactly `n_pos` positives and `n_neg` negatives exist.
///
/// Sample traces longer than `length` are dropped, and sample traces that do
/// not fit the class budget are truncated in sample order; both emit a
/// warning.
pub fn build_dataset(
    target: &Formula,
    props: &PropSet,
    char_sample: &[(Trace, bool)],
    spec: DatasetSpec,
) -> Result<Dataset, DataError> {
    if !target.is_qualitative() {
        return Err(DataError::NotQualitative);
    }
    if spec.length == 0 {
        return Err(DataError::EmptyTrace);
    }
    let mut traces = Vec::with_capacity(spec.n_pos + spec.n_neg);
    let (mut pos, mut neg) = (0, 0);
    let (mut too_long, mut over_budget) = (0, 0);
    for (index, (trace, label)) in char_sample.iter().enumerate() {
        let actual = satisfies(target, trace);
        if actual != *label {
            return Err(DataError::MislabeledSample { index, label: *label, actual });
        }
        if trace.width() != props.len() {
            return Err(DataError::WidthMismatch { expected: props.len(), found: trace.width() });
        }
        let Ok(padded) = trace.pad_stutter(spec.length) else {
            too_long += 1;
            continue;
        };
        let slot = if *label { &mut pos } else { &mut neg };
        if *slot >= if *label { spec.n_pos } else { spec.n_neg } {
            over_budget += 1;
            continue;
        }
        *slot += 1;
        traces.push(LabeledTrace { trace: padded, label: *label });
    }
    if too_long > 0 {
        warn!("dropped {too_long} characteristic-sample traces longer than {}", spec.length);
    }
    if over_budget > 0 {
        warn!("dropped {over_budget} characteristic-sample traces beyond the class budget");
    }
    let char_count = traces.len();

    let mut rng = crate::seed::rng(spec.seed);
    let budget = DRAWS_PER_CLASS * 2;
    let mut draws = 0;
    while pos < spec.n_pos || neg < spec.n_neg {
        if draws >= budget {
            fill_from_automaton(target, props, spec, (&mut pos, &mut neg), &mut traces, &mut rng, draws)?;
            break;
        }
        draws += 1;
        let trace = random_trace(props.len(), spec.length, &mut rng)?;
        let label = satisfies(target, &trace);
        if label && pos < spec.n_pos {
            pos += 1;
        } else if !label && neg < spec.n_neg {
            neg += 1;
        } else {
            continue;
        }
        traces.push(LabeledTrace { trace, label });
    }

    let provenance = Provenance {
        target: Some(target.to_text(props)),
        seed: spec.seed,
        noise: 0.0,
        char_count,
        flipped: Vec::new(),
    };
    Dataset::new(props.clone(), traces, provenance)
}

/// Completes the rarer class after rejection sampling ran out of draws by
/// sampling uniformly among that class's traces, which is the distribution
/// rejection sampling would have produced.
fn fill_from_automaton(
    target: &Formula,
    props: &PropSet,
    spec: DatasetSpec,
    (pos, neg): (&mut usize, &mut usize),
    traces: &mut Vec<LabeledTrace>,
    rng: &mut rand_chacha::ChaCha8Rng,
    draws: usize,
) -> Result<(), DataError> {
    let (class, missing, label) =
        if *pos < spec.n_pos { ("positive", spec.n_pos - *pos, true) } else { ("negative", spec.n_neg - *neg, false) };
    let unbalanced = DataError::UnbalancedClasses { class, missing, draws };
    let Ok(dfa) = formula_to_dfa(target, props.len()) else {
        return Err(unbalanced);
    };
    warn!("rejection sampling exhausted; drawing {missing} {class} traces from the target automaton");
    for _ in 0..missing {
        let steps = dfa.sample_word(spec.length, label, rng).ok_or_else(|| unbalanced.clone())?;
        traces.push(LabeledTrace { trace: Trace::new(props.len(), steps)?, label });
    }
    *pos = spec.n_pos;
    *neg = spec.n_neg;
    Ok(())
}

/// Flips the labels of `floor(rate * |d|)` distinct, uniformly chosen traces.
pub fn inject_noise(d: &Dataset, rate: f64, seed: u64) -> Result<Dataset, DataError> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(DataError::BadNoiseRate(rate));
    }
    let n = d.len();
    // The epsilon keeps products like 0.29 * 100 from flooring to 28.
    let k = ((rate * n as f64) + 1e-9).floor() as usize;
    let mut out = d.clone();
    let mut chosen = sample(&mut crate::seed::rng(seed), n, k.min(n)).into_vec();
    chosen.sort_unstable();
    for &i in &chosen {
        out.traces[i].label = !out.traces[i].label;
    }
    let mut flipped: Vec<usize> = d.provenance.flipped.clone();
    for i in chosen {
        match flipped.binary_search(&i) {
            Ok(at) => {
                flipped.remove(at);
            }
            Err(at) => flipped.insert(at, i),
        }
    }
    out.provenance.flipped = flipped;
    out.provenance.noise = rate;
    Ok(out)
}

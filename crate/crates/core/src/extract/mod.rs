//! Discretizing trained filters into temporal truth tables and turning the
//! tables into formulas.
//!
//! A table row is indexed by `k = x | m << n | τ << 2n`: `x` holds the
//! filter's inputs at the current step, `m` the inputs at the next step (the
//! metric bits) and `τ` the filter's own value at the next step.

mod compose;
mod tnf;

use thiserror::Error;

use crate::logicmin::MinimizeError;
use crate::ltl::FormulaError;
use crate::neural::{step, Network};

pub use compose::{network_to_formula, Extraction, ExtractionReport};
pub use tnf::{table_to_formula, Literal, TnfFormula};

/// Widest table accepted, in row-index bits.
pub const MAX_TABLE_BITS: usize = 24;

#[derive(Debug, Error, PartialEq)]
pub enum ExtractError {
    #[error("a filter with {0} inputs needs more than {MAX_TABLE_BITS} table bits")]
    TableTooWide(usize),
    #[error("no filter {filter} in layer {layer}")]
    NoSuchFilter { layer: usize, filter: usize },
    #[error("invalid temporal truth table at x={x:#b}, m={m:#b}: true without the next value but false with it")]
    InvalidTable { x: u32, m: u32 },
    #[error("qualitative table depends on its metric bits")]
    MetricDependence,
    #[error(transparent)]
    Minimize(#[from] MinimizeError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

/// The discretized behavior of one filter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemporalTruthTable {
    /// Number of inputs.
    pub n: usize,
    /// Output for every row.
    pub f: Vec<bool>,
    /// The filter's own value at the end of the trace.
    pub end: bool,
    /// Each input's value at the end of the trace.
    pub input_end: Vec<bool>,
    /// Metric bits are don't-cares and contribute no literals.
    pub qualitative: bool,
}

/// Outcome of [`validate_table`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableVerdict {
    Valid,
    /// A row pattern with `f(τ=0) = 1` but `f(τ=1) = 0`.
    Invalid {
        x: u32,
        m: u32,
    },
}

impl TemporalTruthTable {
    pub fn rows(&self) -> usize {
        self.f.len()
    }

    pub fn row(&self, x: u32, m: u32, tau: bool) -> usize {
        (x | m << self.n | (tau as u32) << (2 * self.n)) as usize
    }

    pub fn get(&self, x: u32, m: u32, tau: bool) -> bool {
        self.f[self.row(x, m, tau)]
    }
}

fn check_width(n: usize) -> Result<(), ExtractError> {
    if 2 * n + 1 > MAX_TABLE_BITS {
        return Err(ExtractError::TableTooWide(n));
    }
    Ok(())
}

/// Probes filter `filter` of layer `layer` (both zero-based) on every row.
pub fn filter_to_table(net: &Network, layer: usize, filter: usize) -> Result<TemporalTruthTable, ExtractError> {
    let w = net
        .layers
        .get(layer)
        .and_then(|l| l.filters.get(filter))
        .ok_or(ExtractError::NoSuchFilter { layer, filter })?;
    let n = w.width();
    check_width(n)?;
    let q = w.qual.max(0.0);
    let f = (0..1u32 << (2 * n + 1))
        .map(|k| {
            let bit = |b: usize| if k >> b & 1 == 1 { 1.0 } else { 0.0 };
            let mut z = w.bias + q * bit(2 * n);
            for j in 0..n {
                z += w.prop[j] * bit(j) + w.metric[j] * bit(n + j);
            }
            step(z) == 1.0
        })
        .collect();
    let input_end = if layer == 0 {
        net.layers[0].input_base.iter().map(|&b| step(b) == 1.0).collect()
    } else {
        net.layers[layer - 1].filters.iter().map(|p| step(p.out_base) == 1.0).collect()
    };
    Ok(TemporalTruthTable { n, f, end: step(w.out_base) == 1.0, input_end, qualitative: net.qualitative })
}

/// Checks that no row pattern is true with `τ = 0` but false with `τ = 1`.
pub fn validate_table(t: &TemporalTruthTable) -> TableVerdict {
    let width = 1u32 << t.n;
    for m in 0..width {
        for x in 0..width {
            if t.get(x, m, false) && !t.get(x, m, true) {
                return TableVerdict::Invalid { x, m };
            }
        }
    }
    TableVerdict::Valid
}

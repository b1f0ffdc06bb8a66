//! DFAs over the assignment alphabet `2^P`: compilation from formulas,
//! minimization, equivalence, and characteristic samples.
//!
//! Languages are over nonempty strings only, matching the convention that
//! traces have at least one step. The acceptance flag of the initial state
//! matters only if the initial state can be re-entered.

mod build;
mod equiv;
mod minimize;
mod sample;

use std::fmt;

use thiserror::Error;

use crate::data::Trace;

pub use build::formula_to_dfa;
pub use equiv::{dfa_equivalent, Equivalence};
pub use sample::characteristic_sample;

/// Alphabet guard: `2^8` assignments per state is the largest supported.
pub const MAX_PROPS: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DfaError {
    #[error("{0} propositions exceeds the DFA limit of {MAX_PROPS}")]
    TooManyPropositions(usize),
    #[error("formula mentions proposition {index} but only {n_props} exist")]
    PropositionOutOfRange { index: usize, n_props: usize },
    #[error("alphabet mismatch: {0} vs {1} propositions")]
    AlphabetMismatch(usize, usize),
    #[error("malformed transition table: {0}")]
    Malformed(String),
}

/// A complete DFA. State `s` on assignment `a` moves to
/// `trans[s * 2^n_props + a]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dfa {
    n_props: usize,
    initial: usize,
    trans: Vec<usize>,
    accepting: Vec<bool>,
}

impl Dfa {
    pub fn new(n_props: usize, initial: usize, trans: Vec<usize>, accepting: Vec<bool>) -> Result<Self, DfaError> {
        if n_props > MAX_PROPS {
            return Err(DfaError::TooManyPropositions(n_props));
        }
        let n = accepting.len();
        let sigma = 1usize << n_props;
        if n == 0 || initial >= n {
            return Err(DfaError::Malformed(format!("initial state {initial} of {n}")));
        }
        if trans.len() != n * sigma {
            return Err(DfaError::Malformed(format!("{} transitions for {n} states x {sigma} symbols", trans.len())));
        }
        if let Some(&bad) = trans.iter().find(|&&t| t >= n) {
            return Err(DfaError::Malformed(format!("target {bad} out of range")));
        }
        Ok(Dfa { n_props, initial, trans, accepting })
    }

    pub fn n_props(&self) -> usize {
        self.n_props
    }

    pub fn alphabet_size(&self) -> usize {
        1 << self.n_props
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, s: usize) -> bool {
        self.accepting[s]
    }

    pub fn next(&self, s: usize, symbol: u32) -> usize {
        self.trans[s * self.alphabet_size() + symbol as usize]
    }

    /// State reached after reading `steps` from the initial state.
    pub fn run(&self, steps: &[u32]) -> usize {
        steps.iter().fold(self.initial, |s, &a| self.next(s, a))
    }

    /// Whether the DFA accepts the (nonempty) trace.
    pub fn accepts(&self, trace: &Trace) -> Result<bool, DfaError> {
        if trace.width() != self.n_props {
            return Err(DfaError::AlphabetMismatch(self.n_props, trace.width()));
        }
        Ok(self.accepting[self.run(trace.steps())])
    }

    /// Probability that a uniformly random trace of `len` steps is accepted.
    pub fn acceptance_probability(&self, len: usize) -> f64 {
        let sigma = self.alphabet_size();
        let mut dist = vec![0.0; self.num_states()];
        dist[self.initial] = 1.0;
        for _ in 0..len {
            let mut next = vec![0.0; dist.len()];
            for (s, &p) in dist.iter().enumerate() {
                if p > 0.0 {
                    for a in 0..sigma {
                        next[self.next(s, a as u32)] += p / sigma as f64;
                    }
                }
            }
            dist = next;
        }
        dist.iter().zip(&self.accepting).filter(|(_, &acc)| acc).map(|(p, _)| p).sum()
    }

    /// A uniformly random word of `len` steps among those with the given
    /// acceptance, or `None` when there is no such word.
    pub fn sample_word<R: rand::Rng + ?Sized>(&self, len: usize, accepted: bool, rng: &mut R) -> Option<Vec<u32>> {
        let sigma = self.alphabet_size();
        // counts[k][s]: words of k steps leading from s to the wanted acceptance.
        let mut counts =
            vec![self.accepting.iter().map(|&a| if a == accepted { 1.0 } else { 0.0 }).collect::<Vec<f64>>()];
        for k in 1..=len {
            let prev = &counts[k - 1];
            let row = (0..self.num_states()).map(|s| (0..sigma).map(|a| prev[self.next(s, a as u32)]).sum()).collect();
            counts.push(row);
        }
        let mut s = self.initial;
        if counts[len][s] == 0.0 {
            return None;
        }
        let mut word = Vec::with_capacity(len);
        for k in (1..=len).rev() {
            let mut pick = rng.gen::<f64>() * counts[k][s];
            let mut chosen = None;
            for a in 0..sigma as u32 {
                let w = counts[k - 1][self.next(s, a)];
                if w > 0.0 {
                    chosen = Some(a);
                    if pick < w {
                        break;
                    }
                    pick -= w;
                }
            }
            let a = chosen.expect("positive count has a positive successor");
            word.push(a);
            s = self.next(s, a);
        }
        Some(word)
    }

    /// Language-equivalent DFA with the fewest states, numbered in BFS order.
    pub fn minimize(&self) -> Dfa {
        minimize::minimize(self)
    }

    /// Text table for golden tests: a header line, then one line per state
    /// with its acceptance flag and successors in assignment order.
    pub fn dump(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Dfa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# props={} states={} initial={}", self.n_props, self.num_states(), self.initial)?;
        for s in 0..self.num_states() {
            write!(f, "{s} {}", self.accepting[s] as u8)?;
            for a in 0..self.alphabet_size() {
                write!(f, " {}", self.next(s, a as u32))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// `accepts(formula_to_dfa(f), trace)` as a one-shot call.
pub fn accepts(d: &Dfa, trace: &Trace) -> Result<bool, DfaError> {
    d.accepts(trace)
}

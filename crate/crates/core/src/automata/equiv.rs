use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use super::{Dfa, DfaError};
use crate::data::Trace;

/// Outcome of a language comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    Equal,
    /// A shortest trace accepted by exactly one of the two automata.
    Counterexample(Trace),
}

impl Equivalence {
    pub fn is_equal(&self) -> bool {
        matches!(self, Equivalence::Equal)
    }
}

type Pair = (usize, usize);

/// Compares the languages of two DFAs over nonempty traces by a breadth-first
/// walk of the product automaton.
pub fn dfa_equivalent(a: &Dfa, b: &Dfa) -> Result<Equivalence, DfaError> {
    if a.n_props != b.n_props {
        return Err(DfaError::AlphabetMismatch(a.n_props, b.n_props));
    }
    let sigma = a.alphabet_size() as u32;
    let start = (a.initial, b.initial);
    // Each visited pair maps to its predecessor and the symbol read from it.
    let mut parent: HashMap<Pair, Option<(Pair, u32)>> = HashMap::from([(start, None)]);
    let mut queue = VecDeque::from([start]);
    while let Some(pair) = queue.pop_front() {
        for sym in 0..sigma {
            let next = (a.next(pair.0, sym), b.next(pair.1, sym));
            if a.accepting[next.0] != b.accepting[next.1] {
                let mut steps = vec![sym];
                let mut cur = pair;
                while let Some(Some((prev, s))) = parent.get(&cur) {
                    steps.push(*s);
                    cur = *prev;
                }
                steps.reverse();
                let trace = Trace::new(a.n_props, steps).expect("symbols are within the alphabet");
                return Ok(Equivalence::Counterexample(trace));
            }
            if let Entry::Vacant(e) = parent.entry(next) {
                e.insert(Some((pair, sym)));
                queue.push_back(next);
            }
        }
    }
    Ok(Equivalence::Equal)
}

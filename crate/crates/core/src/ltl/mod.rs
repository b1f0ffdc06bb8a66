//! LTLf syntax, semantics and formula manipulation.

mod eval;
mod parse;
mod print;
mod random;
mod simplify;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

pub use eval::{evaluate, satisfies, truth_vector};
pub use parse::{parse, ParseError};
pub use random::{count_formulas, random_formula};
pub use simplify::{canonicalize, simplify, Rule, RULES};

/// A named proposition and its position in the proposition set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Proposition {
    pub name: String,
    pub index: usize,
}

/// An ordered set of uniquely named propositions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropSet {
    names: Vec<String>,
    lookup: HashMap<String, usize>,
}

impl PropSet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, FormulaError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut lookup = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if !parse::is_identifier(n) {
                return Err(FormulaError::BadPropositionName(n.clone()));
            }
            if lookup.insert(n.clone(), i).is_some() {
                return Err(FormulaError::DuplicateProposition(n.clone()));
            }
        }
        Ok(PropSet { names, lookup })
    }

    /// `a, b, c, ...` for the first 26 propositions, `p26, p27, ...` after that.
    pub fn alphabetic(n: usize) -> Self {
        PropSet::new((0..n).map(default_name)).expect("default names are valid")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.lookup.get(name).copied()
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn iter(&self) -> impl Iterator<Item = Proposition> + '_ {
        self.names.iter().enumerate().map(|(index, name)| Proposition { name: name.clone(), index })
    }
}

pub(crate) fn default_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("p{i}")
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("proposition name {0:?} is not a valid identifier")]
    BadPropositionName(String),
    #[error("duplicate proposition {0:?}")]
    DuplicateProposition(String),
    #[error("timestep {t} out of range for trace of length {len}")]
    TimestepOutOfRange { t: usize, len: usize },
    #[error("proposition index {index} out of range for trace over {width} propositions")]
    PropositionOutOfRange { index: usize, width: usize },
    #[error("formula uses next/weak-next; only qualitative formulas can be simplified")]
    NotQualitative,
    #[error("no formula of size {size} contains a temporal operator")]
    InfeasibleSize { size: usize },
    #[error("formula count for size {size} overflows")]
    CountOverflow { size: usize },
}

/// LTLf abstract syntax. Propositions are indices into a [`PropSet`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Prop(usize),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    WeakNext(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    WeakUntil(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
    Eventually(Box<Formula>),
    Globally(Box<Formula>),
}

use Formula::*;

impl Formula {
    pub fn prop(i: usize) -> Self {
        Prop(i)
    }
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Not(Box::new(f))
    }
    pub fn and(a: Formula, b: Formula) -> Self {
        And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Self {
        Or(Box::new(a), Box::new(b))
    }
    pub fn next(f: Formula) -> Self {
        Next(Box::new(f))
    }
    pub fn weak_next(f: Formula) -> Self {
        WeakNext(Box::new(f))
    }
    pub fn until(a: Formula, b: Formula) -> Self {
        Until(Box::new(a), Box::new(b))
    }
    pub fn weak_until(a: Formula, b: Formula) -> Self {
        WeakUntil(Box::new(a), Box::new(b))
    }
    pub fn release(a: Formula, b: Formula) -> Self {
        Release(Box::new(a), Box::new(b))
    }
    pub fn eventually(f: Formula) -> Self {
        Eventually(Box::new(f))
    }
    pub fn globally(f: Formula) -> Self {
        Globally(Box::new(f))
    }

    /// Left-associated conjunction; `True` for an empty iterator.
    pub fn and_all(items: impl IntoIterator<Item = Formula>) -> Self {
        items.into_iter().reduce(Formula::and).unwrap_or(True)
    }

    /// Left-associated disjunction; `False` for an empty iterator.
    pub fn or_all(items: impl IntoIterator<Item = Formula>) -> Self {
        items.into_iter().reduce(Formula::or).unwrap_or(False)
    }

    /// Number of temporal operators, binary logical operators and proposition
    /// occurrences. Negations and constants are free.
    pub fn size(&self) -> usize {
        match self {
            True | False => 0,
            Prop(_) => 1,
            Not(a) => a.size(),
            Next(a) | WeakNext(a) | Eventually(a) | Globally(a) => 1 + a.size(),
            And(a, b) | Or(a, b) | Until(a, b) | WeakUntil(a, b) | Release(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Total number of AST nodes, constants and negations included.
    pub fn node_count(&self) -> usize {
        match self {
            True | False | Prop(_) => 1,
            Not(a) | Next(a) | WeakNext(a) | Eventually(a) | Globally(a) => 1 + a.node_count(),
            And(a, b) | Or(a, b) | Until(a, b) | WeakUntil(a, b) | Release(a, b) => 1 + a.node_count() + b.node_count(),
        }
    }

    /// True iff the formula contains no next or weak-next operator.
    pub fn is_qualitative(&self) -> bool {
        match self {
            True | False | Prop(_) => true,
            Next(_) | WeakNext(_) => false,
            Not(a) | Eventually(a) | Globally(a) => a.is_qualitative(),
            And(a, b) | Or(a, b) | Until(a, b) | WeakUntil(a, b) | Release(a, b) => {
                a.is_qualitative() && b.is_qualitative()
            }
        }
    }

    pub fn is_temporal(&self) -> bool {
        matches!(self, Next(_) | WeakNext(_) | Until(..) | WeakUntil(..) | Release(..) | Eventually(_) | Globally(_))
    }

    pub fn has_temporal(&self) -> bool {
        self.is_temporal()
            || match self {
                True | False | Prop(_) => false,
                Not(a) => a.has_temporal(),
                And(a, b) | Or(a, b) => a.has_temporal() || b.has_temporal(),
                _ => unreachable!(),
            }
    }

    pub fn is_nnf(&self) -> bool {
        match self {
            True | False | Prop(_) => true,
            Not(a) => matches!(**a, Prop(_)),
            Next(a) | WeakNext(a) | Eventually(a) | Globally(a) => a.is_nnf(),
            And(a, b) | Or(a, b) | Until(a, b) | WeakUntil(a, b) | Release(a, b) => a.is_nnf() && b.is_nnf(),
        }
    }

    /// Largest proposition index used, if any.
    pub fn max_prop(&self) -> Option<usize> {
        match self {
            True | False => None,
            Prop(i) => Some(*i),
            Not(a) | Next(a) | WeakNext(a) | Eventually(a) | Globally(a) => a.max_prop(),
            And(a, b) | Or(a, b) | Until(a, b) | WeakUntil(a, b) | Release(a, b) => a.max_prop().max(b.max_prop()),
        }
    }

    /// Negation normal form, using the finite-trace duals of each operator.
    pub fn to_nnf(&self) -> Formula {
        match self {
            True | False | Prop(_) => self.clone(),
            Not(a) => a.negated_nnf(),
            And(a, b) => Formula::and(a.to_nnf(), b.to_nnf()),
            Or(a, b) => Formula::or(a.to_nnf(), b.to_nnf()),
            Next(a) => Formula::next(a.to_nnf()),
            WeakNext(a) => Formula::weak_next(a.to_nnf()),
            Until(a, b) => Formula::until(a.to_nnf(), b.to_nnf()),
            WeakUntil(a, b) => Formula::weak_until(a.to_nnf(), b.to_nnf()),
            Release(a, b) => Formula::release(a.to_nnf(), b.to_nnf()),
            Eventually(a) => Formula::eventually(a.to_nnf()),
            Globally(a) => Formula::globally(a.to_nnf()),
        }
    }

    fn negated_nnf(&self) -> Formula {
        match self {
            True => False,
            False => True,
            Prop(_) => Formula::not(self.clone()),
            Not(a) => a.to_nnf(),
            And(a, b) => Formula::or(a.negated_nnf(), b.negated_nnf()),
            Or(a, b) => Formula::and(a.negated_nnf(), b.negated_nnf()),
            Next(a) => Formula::weak_next(a.negated_nnf()),
            WeakNext(a) => Formula::next(a.negated_nnf()),
            Until(a, b) => Formula::release(a.negated_nnf(), b.negated_nnf()),
            Release(a, b) => Formula::until(a.negated_nnf(), b.negated_nnf()),
            // !(a W b) == !b U (!a & !b)
            WeakUntil(a, b) => {
                let nb = b.negated_nnf();
                Formula::until(nb.clone(), Formula::and(a.negated_nnf(), nb))
            }
            Eventually(a) => Formula::globally(a.negated_nnf()),
            Globally(a) => Formula::eventually(a.negated_nnf()),
        }
    }

    /// Replaces every `Prop(j)` by `f(j)`.
    pub fn substitute(&self, f: &impl Fn(usize) -> Formula) -> Formula {
        let s = |x: &Formula| x.substitute(f);
        match self {
            True => True,
            False => False,
            Prop(j) => f(*j),
            Not(a) => Formula::not(s(a)),
            And(a, b) => Formula::and(s(a), s(b)),
            Or(a, b) => Formula::or(s(a), s(b)),
            Next(a) => Formula::next(s(a)),
            WeakNext(a) => Formula::weak_next(s(a)),
            Until(a, b) => Formula::until(s(a), s(b)),
            WeakUntil(a, b) => Formula::weak_until(s(a), s(b)),
            Release(a, b) => Formula::release(s(a), s(b)),
            Eventually(a) => Formula::eventually(s(a)),
            Globally(a) => Formula::globally(s(a)),
        }
    }

    /// Renders the formula with the names from `props`.
    pub fn display<'a>(&'a self, props: &'a PropSet) -> impl fmt::Display + 'a {
        print::Printer { formula: self, names: Some(props) }
    }

    pub fn to_text(&self, props: &PropSet) -> String {
        self.display(props).to_string()
    }
}

/// Prints with alphabetic default names (`a`, `b`, ...).
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&print::Printer { formula: self, names: None }, f)
    }
}

//! Formula to DFA by progression. A state is a canonical DNF over
//! obligations on the rest of the trace: `S(ψ)` requires a next step that
//! satisfies `ψ`, `W(ψ)` requires it only if a next step exists.

use std::collections::{HashMap, VecDeque};

use super::{Dfa, DfaError, MAX_PROPS};
use crate::ltl::Formula;

/// Hard cap on progression states before minimization.
const MAX_STATES: usize = 200_000;

type Atom = u32;
type Clause = Vec<Atom>;
type Dnf = Vec<Clause>;

fn strong(id: u32) -> Atom {
    id << 1
}

fn weak(id: u32) -> Atom {
    (id << 1) | 1
}

fn is_weak(a: Atom) -> bool {
    a & 1 == 1
}

#[derive(Clone, Copy)]
enum Node {
    True,
    False,
    Lit(usize, bool),
    And(u32, u32),
    Or(u32, u32),
    Next(u32),
    WeakNext(u32),
    Until(u32, u32),
    WeakUntil(u32, u32),
    Release(u32, u32),
    Eventually(u32),
    Globally(u32),
}

struct Progression {
    nodes: Vec<Node>,
    ids: HashMap<Formula, u32>,
    steps: HashMap<(u32, u32), Dnf>,
}

impl Progression {
    fn intern(&mut self, f: &Formula) -> u32 {
        if let Some(&id) = self.ids.get(f) {
            return id;
        }
        let node = match f {
            Formula::True => Node::True,
            Formula::False => Node::False,
            Formula::Prop(i) => Node::Lit(*i, true),
            Formula::Not(g) => match g.as_ref() {
                Formula::Prop(i) => Node::Lit(*i, false),
                _ => unreachable!("input is in negation normal form"),
            },
            Formula::And(a, b) => Node::And(self.intern(a), self.intern(b)),
            Formula::Or(a, b) => Node::Or(self.intern(a), self.intern(b)),
            Formula::Next(a) => Node::Next(self.intern(a)),
            Formula::WeakNext(a) => Node::WeakNext(self.intern(a)),
            Formula::Until(a, b) => Node::Until(self.intern(a), self.intern(b)),
            Formula::WeakUntil(a, b) => Node::WeakUntil(self.intern(a), self.intern(b)),
            Formula::Release(a, b) => Node::Release(self.intern(a), self.intern(b)),
            Formula::Eventually(a) => Node::Eventually(self.intern(a)),
            Formula::Globally(a) => Node::Globally(self.intern(a)),
        };
        let id = self.nodes.len() as u32;
        self.nodes.push(node);
        self.ids.insert(f.clone(), id);
        id
    }

    /// Obligations left after reading `symbol` at a position where `id` must hold.
    fn step(&mut self, id: u32, symbol: u32) -> Dnf {
        if let Some(d) = self.steps.get(&(id, symbol)) {
            return d.clone();
        }
        let d = match self.nodes[id as usize] {
            Node::True => truth(),
            Node::False => falsity(),
            Node::Lit(j, positive) => {
                if ((symbol >> j) & 1 == 1) == positive {
                    truth()
                } else {
                    falsity()
                }
            }
            Node::And(a, b) => {
                let (x, y) = (self.step(a, symbol), self.step(b, symbol));
                and(&x, &y)
            }
            Node::Or(a, b) => {
                let (x, y) = (self.step(a, symbol), self.step(b, symbol));
                or(&x, &y)
            }
            Node::Next(a) => vec![vec![strong(a)]],
            Node::WeakNext(a) => vec![vec![weak(a)]],
            Node::Until(a, b) => {
                let (x, y) = (self.step(a, symbol), self.step(b, symbol));
                or(&y, &and(&x, &vec![vec![strong(id)]]))
            }
            Node::WeakUntil(a, b) => {
                let (x, y) = (self.step(a, symbol), self.step(b, symbol));
                or(&y, &and(&x, &vec![vec![weak(id)]]))
            }
            Node::Release(a, b) => {
                let (x, y) = (self.step(a, symbol), self.step(b, symbol));
                and(&y, &or(&x, &vec![vec![weak(id)]]))
            }
            Node::Eventually(a) => {
                let x = self.step(a, symbol);
                or(&x, &vec![vec![strong(id)]])
            }
            Node::Globally(a) => {
                let x = self.step(a, symbol);
                and(&x, &vec![vec![weak(id)]])
            }
        };
        self.steps.insert((id, symbol), d.clone());
        d
    }

    fn transition(&mut self, state: &Dnf, symbol: u32) -> Dnf {
        let mut out = falsity();
        for clause in state {
            let mut acc = truth();
            for &atom in clause {
                let s = self.step(atom >> 1, symbol);
                acc = and(&acc, &s);
                if acc.is_empty() {
                    break;
                }
            }
            out = or(&out, &acc);
        }
        out
    }
}

fn truth() -> Dnf {
    vec![Vec::new()]
}

fn falsity() -> Dnf {
    Vec::new()
}

/// Whether every obligation in `small` is implied by some obligation in `big`.
fn implied_by(small: &Clause, big: &Clause) -> bool {
    small.iter().all(|&a| big.binary_search(&a).is_ok() || (is_weak(a) && big.binary_search(&(a & !1)).is_ok()))
}

fn normalize_clause(mut c: Clause) -> Clause {
    c.sort_unstable();
    c.dedup();
    // S(x) sorts directly before W(x) and implies it.
    let mut out: Clause = Vec::with_capacity(c.len());
    for a in c {
        if is_weak(a) && out.last() == Some(&(a & !1)) {
            continue;
        }
        out.push(a);
    }
    out
}

fn reduce(clauses: Vec<Clause>) -> Dnf {
    let mut cs: Vec<Clause> = clauses.into_iter().map(normalize_clause).collect();
    cs.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    cs.dedup();
    let mut kept: Dnf = Vec::new();
    for c in cs {
        if !kept.iter().any(|k| implied_by(k, &c)) {
            kept.push(c);
        }
    }
    kept.sort();
    kept
}

fn or(x: &Dnf, y: &Dnf) -> Dnf {
    reduce(x.iter().chain(y).cloned().collect())
}

fn and(x: &Dnf, y: &Dnf) -> Dnf {
    let mut out = Vec::with_capacity(x.len() * y.len());
    for a in x {
        for b in y {
            out.push(a.iter().chain(b).copied().collect());
        }
    }
    reduce(out)
}

fn accepting(state: &Dnf) -> bool {
    state.iter().any(|c| c.iter().all(|&a| is_weak(a)))
}

/// Minimal DFA accepting exactly the nonempty traces over `n_props`
/// propositions that satisfy `f`.
pub fn formula_to_dfa(f: &Formula, n_props: usize) -> Result<Dfa, DfaError> {
    if n_props > MAX_PROPS {
        return Err(DfaError::TooManyPropositions(n_props));
    }
    if let Some(index) = f.max_prop().filter(|&i| i >= n_props) {
        return Err(DfaError::PropositionOutOfRange { index, n_props });
    }
    let mut prog = Progression { nodes: Vec::new(), ids: HashMap::new(), steps: HashMap::new() };
    let root = prog.intern(&f.to_nnf());
    let sigma = 1u32 << n_props;

    let init: Dnf = vec![vec![strong(root)]];
    let mut index: HashMap<Dnf, usize> = HashMap::from([(init.clone(), 0)]);
    let mut states = vec![init];
    let mut trans = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        let state = states[s].clone();
        for a in 0..sigma {
            let next = prog.transition(&state, a);
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    let id = states.len();
                    if id >= MAX_STATES {
                        return Err(DfaError::Malformed(format!("progression exceeded {MAX_STATES} states")));
                    }
                    index.insert(next.clone(), id);
                    states.push(next);
                    queue.push_back(id);
                    id
                }
            };
            debug_assert_eq!(trans.len(), s * sigma as usize + a as usize);
            trans.push(id);
        }
    }
    let acc = states.iter().map(accepting).collect();
    Ok(Dfa::new(n_props, 0, trans, acc)?.minimize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Trace;
    use crate::ltl::{parse, satisfies, PropSet};

    fn dfa(text: &str, n: usize) -> Dfa {
        let props = PropSet::alphabetic(n);
        formula_to_dfa(&parse(text, &props).unwrap(), n).unwrap()
    }

    #[test]
    fn constants_give_one_state() {
        let t = dfa("true", 1);
        assert_eq!(t.num_states(), 1);
        assert!(t.is_accepting(0));
        let f = dfa("false", 1);
        assert_eq!(f.num_states(), 1);
        assert!(!f.is_accepting(0));
    }

    #[test]
    fn eventually_a_has_two_states() {
        let d = dfa("F a", 1);
        assert_eq!(d.num_states(), 2);
        assert_eq!(d.dump(), "# props=1 states=2 initial=0\n0 0 0 1\n1 1 1 1\n");
    }

    #[test]
    fn agrees_with_semantics_exhaustively() {
        let props = PropSet::alphabetic(2);
        for text in [
            "a U b",
            "a W b",
            "a R b",
            "X a",
            "WX a",
            "G (!a | F b)",
            "F G a",
            "!(a U b) | X X b",
            "WX (a W !b)",
            "G (a | X b)",
        ] {
            let f = parse(text, &props).unwrap();
            let d = formula_to_dfa(&f, 2).unwrap();
            for t in Trace::enumerate_up_to(2, 5) {
                assert_eq!(d.accepts(&t).unwrap(), satisfies(&f, &t), "{text} on {:?}", t.steps());
            }
        }
    }

    #[test]
    fn guards() {
        assert_eq!(formula_to_dfa(&Formula::True, 9), Err(DfaError::TooManyPropositions(9)));
        assert_eq!(formula_to_dfa(&Formula::prop(2), 2), Err(DfaError::PropositionOutOfRange { index: 2, n_props: 2 }));
    }
}

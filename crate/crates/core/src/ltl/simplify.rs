//! Pattern-based rewriting to a fixpoint.
//!
//! Rules are written in the ordinary formula syntax; `p`, `q` and `r` are
//! metavariables. A metavariable that occurs twice must match equal
//! subterms. Conjunction and disjunction are matched modulo associativity and
//! commutativity: chains are flattened and sorted, a binary pattern matches
//! any two elements of a chain, and a nested binary pattern may split a chain
//! into one element and the rest.
//!
//! Every rule is an LTLf equivalence over qualitative formulas, is
//! size-non-increasing, and never builds a negation above anything but a
//! metavariable, so rewriting terminates.

use std::collections::HashMap;
use std::sync::OnceLock;

use super::{parse, Formula, FormulaError, PropSet};
use Formula::*;

/// A rewrite rule `lhs -> rhs` over metavariables `p`, `q`, `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rule {
    pub name: &'static str,
    pub lhs: &'static str,
    pub rhs: &'static str,
    /// Boolean rules are sound for every LTLf formula, metric ones included.
    pub boolean: bool,
}

const fn b(name: &'static str, lhs: &'static str, rhs: &'static str) -> Rule {
    Rule { name, lhs, rhs, boolean: true }
}

const fn t(name: &'static str, lhs: &'static str, rhs: &'static str) -> Rule {
    Rule { name, lhs, rhs, boolean: false }
}

pub const RULES: &[Rule] = &[
    // constants and negation
    b("not-true", "!true", "false"),
    b("not-false", "!false", "true"),
    b("double-negation", "!!p", "p"),
    b("and-true", "p & true", "p"),
    b("and-false", "p & false", "false"),
    b("or-true", "p | true", "true"),
    b("or-false", "p | false", "p"),
    b("and-idempotent", "p & p", "p"),
    b("or-idempotent", "p | p", "p"),
    b("and-complement", "p & !p", "false"),
    b("or-complement", "p | !p", "true"),
    b("and-absorb", "p & (p | q)", "p"),
    b("or-absorb", "p | (p & q)", "p"),
    b("or-reduce", "p | (!p & q)", "p | q"),
    b("or-reduce-neg", "!p | (p & q)", "!p | q"),
    b("and-reduce", "p & (!p | q)", "p & q"),
    b("and-reduce-neg", "!p & (p | q)", "!p & q"),
    b("or-factor", "(p & q) | (p & r)", "p & (q | r)"),
    b("and-factor", "(p | q) & (p | r)", "p | (q & r)"),
    b("de-morgan-and", "!(p & q)", "!p | !q"),
    b("de-morgan-or", "!(p | q)", "!p & !q"),
    // negated temporal operators
    t("not-eventually", "!F p", "G !p"),
    t("not-globally", "!G p", "F !p"),
    t("not-until", "!(p U q)", "!p R !q"),
    t("not-release", "!(p R q)", "!p U !q"),
    // eventually / globally
    t("eventually-idempotent", "F F p", "F p"),
    t("globally-idempotent", "G G p", "G p"),
    t("eventually-true", "F true", "true"),
    t("eventually-false", "F false", "false"),
    t("globally-true", "G true", "true"),
    t("globally-false", "G false", "false"),
    t("eventually-or", "F p | F q", "F (p | q)"),
    t("globally-and", "G p & G q", "G (p & q)"),
    t("or-eventually", "p | F p", "F p"),
    t("and-globally", "p & G p", "G p"),
    t("and-eventually", "p & F p", "p"),
    t("or-globally", "p | G p", "p"),
    t("eventually-globally-eventually", "F G F p", "G F p"),
    t("globally-eventually-globally", "G F G p", "F G p"),
    t("eventually-until", "F (p U q)", "F q"),
    t("globally-release", "G (p R q)", "G q"),
    t("until-eventually", "p U F q", "F q"),
    t("release-globally", "p R G q", "G q"),
    // until
    t("true-until", "true U p", "F p"),
    t("until-false", "p U false", "false"),
    t("until-true", "p U true", "true"),
    t("false-until", "false U p", "p"),
    t("until-idempotent", "p U p", "p"),
    t("until-redundant-left", "(p | q) U q", "p U q"),
    t("until-nested-right", "p U (p U q)", "p U q"),
    t("until-nested-left", "(p U q) U q", "p U q"),
    t("or-until", "q | (p U q)", "p U q"),
    t("and-until", "q & (p U q)", "q"),
    // weak until
    t("weak-until-true", "p W true", "true"),
    t("weak-until-false", "p W false", "G p"),
    t("false-weak-until", "false W p", "p"),
    t("true-weak-until", "true W p", "true"),
    t("weak-until-idempotent", "p W p", "p"),
    t("weak-until-intro", "(p U q) | G p", "p W q"),
    t("weak-until-redundant-left", "(p | q) W q", "p W q"),
    t("or-weak-until", "q | (p W q)", "p W q"),
    t("and-weak-until", "q & (p W q)", "q"),
    t("release-intro", "q W (p & q)", "p R q"),
    // release
    t("release-true", "p R true", "true"),
    t("release-false", "p R false", "false"),
    t("false-release", "false R p", "G p"),
    t("true-release", "true R p", "p"),
    t("release-idempotent", "p R p", "p"),
    t("release-redundant-left", "(p & q) R q", "p R q"),
    t("and-release", "q & (p R q)", "p R q"),
    t("or-release", "q | (p R q)", "q"),
];

const METAVARS: usize = 3;
type Binds = [Option<Formula>; METAVARS];

struct Compiled {
    lhs: Formula,
    rhs: Formula,
    boolean: bool,
}

fn compiled() -> &'static [Compiled] {
    static CELL: OnceLock<Vec<Compiled>> = OnceLock::new();
    CELL.get_or_init(|| {
        let meta = PropSet::new(["p", "q", "r"]).expect("metavariable names");
        RULES
            .iter()
            .map(|r| Compiled {
                lhs: parse(r.lhs, &meta).unwrap_or_else(|e| panic!("rule {}: {e}", r.name)),
                rhs: parse(r.rhs, &meta).unwrap_or_else(|e| panic!("rule {}: {e}", r.name)),
                boolean: r.boolean,
            })
            .collect()
    })
}

/// Simplifies a qualitative formula with the full rule set.
pub fn simplify(f: &Formula) -> Result<Formula, FormulaError> {
    if !f.is_qualitative() {
        return Err(FormulaError::NotQualitative);
    }
    Ok(Engine::new(false).normalize(f))
}

/// Boolean-only simplification plus canonical operand order. Sound for
/// every formula, including ones with next operators.
pub fn canonicalize(f: &Formula) -> Formula {
    Engine::new(true).normalize(f)
}

struct Engine {
    rules: Vec<&'static Compiled>,
    memo: HashMap<Formula, Formula>,
}

impl Engine {
    fn new(boolean_only: bool) -> Self {
        let rules = compiled().iter().filter(|r| r.boolean || !boolean_only).collect();
        Engine { rules, memo: HashMap::new() }
    }

    fn normalize(&mut self, f: &Formula) -> Formula {
        if let Some(done) = self.memo.get(f) {
            return done.clone();
        }
        let mut n = |x: &Formula| self.normalize(x);
        let node = match f {
            True | False | Prop(_) => f.clone(),
            Not(a) => Formula::not(n(a)),
            And(a, b) => sorted_chain(true, vec![n(a), n(b)]),
            Or(a, b) => sorted_chain(false, vec![n(a), n(b)]),
            Next(a) => Formula::next(n(a)),
            WeakNext(a) => Formula::weak_next(n(a)),
            Until(a, b) => Formula::until(n(a), n(b)),
            WeakUntil(a, b) => Formula::weak_until(n(a), n(b)),
            Release(a, b) => Formula::release(n(a), n(b)),
            Eventually(a) => Formula::eventually(n(a)),
            Globally(a) => Formula::globally(n(a)),
        };
        let out = match self.rewrite_root(&node) {
            Some(next) => self.normalize(&next),
            None => node,
        };
        self.memo.insert(f.clone(), out.clone());
        out
    }

    fn rewrite_root(&self, node: &Formula) -> Option<Formula> {
        let chain_op = match node {
            And(..) => Some(true),
            Or(..) => Some(false),
            _ => None,
        };
        for rule in &self.rules {
            if std::mem::discriminant(&rule.lhs) != std::mem::discriminant(node) {
                continue;
            }
            if let Some(is_and) = chain_op {
                let elems = flatten(node, is_and);
                if elems.len() > 2 {
                    for i in 0..elems.len() {
                        for j in i + 1..elems.len() {
                            let pair = join(is_and, elems[i].clone(), elems[j].clone());
                            if let Some(binds) = matches(&rule.lhs, &pair, &Default::default()).into_iter().next() {
                                let mut rest: Vec<Formula> = elems
                                    .iter()
                                    .enumerate()
                                    .filter(|&(k, _)| k != i && k != j)
                                    .map(|(_, e)| e.clone())
                                    .collect();
                                rest.push(instantiate(&rule.rhs, &binds));
                                return Some(chain(is_and, rest));
                            }
                        }
                    }
                    continue;
                }
            }
            if let Some(binds) = matches(&rule.lhs, node, &Default::default()).into_iter().next() {
                return Some(instantiate(&rule.rhs, &binds));
            }
        }
        None
    }
}

fn join(is_and: bool, a: Formula, b: Formula) -> Formula {
    if is_and {
        Formula::and(a, b)
    } else {
        Formula::or(a, b)
    }
}

fn flatten(f: &Formula, is_and: bool) -> Vec<Formula> {
    fn go(f: &Formula, is_and: bool, out: &mut Vec<Formula>) {
        match (f, is_and) {
            (And(a, b), true) | (Or(a, b), false) => {
                go(a, is_and, out);
                go(b, is_and, out);
            }
            _ => out.push(f.clone()),
        }
    }
    let mut out = Vec::new();
    go(f, is_and, &mut out);
    out
}

fn chain(is_and: bool, elems: Vec<Formula>) -> Formula {
    elems.into_iter().reduce(|a, b| join(is_and, a, b)).unwrap_or(if is_and { True } else { False })
}

/// Flattens nested chains of the same operator, sorts, and drops duplicates.
fn sorted_chain(is_and: bool, parts: Vec<Formula>) -> Formula {
    let mut elems: Vec<Formula> = parts.iter().flat_map(|p| flatten(p, is_and)).collect();
    elems.sort();
    elems.dedup();
    chain(is_and, elems)
}

fn matches(pat: &Formula, subj: &Formula, binds: &Binds) -> Vec<Binds> {
    match (pat, subj) {
        (Prop(v), _) => match &binds[*v] {
            Some(bound) if bound == subj => vec![binds.clone()],
            Some(_) => vec![],
            None => {
                let mut nb = binds.clone();
                nb[*v] = Some(subj.clone());
                vec![nb]
            }
        },
        (True, True) | (False, False) => vec![binds.clone()],
        (Not(p), Not(s))
        | (Next(p), Next(s))
        | (WeakNext(p), WeakNext(s))
        | (Eventually(p), Eventually(s))
        | (Globally(p), Globally(s)) => matches(p, s, binds),
        (Until(p1, p2), Until(s1, s2))
        | (WeakUntil(p1, p2), WeakUntil(s1, s2))
        | (Release(p1, p2), Release(s1, s2)) => {
            // Right operand first: left patterns such as `(p | q)` in
            // `(p | q) U q` need `q` bound to split a chain.
            matches(p2, s2, binds).iter().flat_map(|b2| matches(p1, s1, b2)).collect()
        }
        (And(p1, p2), And(..)) => match_chain(true, p1, p2, subj, binds),
        (Or(p1, p2), Or(..)) => match_chain(false, p1, p2, subj, binds),
        _ => vec![],
    }
}

fn match_chain(is_and: bool, p1: &Formula, p2: &Formula, subj: &Formula, binds: &Binds) -> Vec<Binds> {
    let elems = flatten(subj, is_and);
    let mut out = Vec::new();
    for (one, rest_pat) in [(p1, p2), (p2, p1)] {
        // A metavariable already bound to a chain takes several elements.
        if let Prop(v) = one {
            if let Some(bound) = &binds[*v] {
                let wanted = flatten(bound, is_and);
                if let Some(rest) = remove_all(&elems, &wanted) {
                    out.extend(matches(rest_pat, &chain(is_and, rest), binds));
                }
                continue;
            }
        }
        for i in 0..elems.len() {
            for b1 in matches(one, &elems[i], binds) {
                let rest: Vec<Formula> =
                    elems.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, e)| e.clone()).collect();
                out.extend(matches(rest_pat, &chain(is_and, rest), &b1));
            }
        }
    }
    out
}

/// `elems` minus the multiset `wanted`, if that leaves a nonempty remainder.
fn remove_all(elems: &[Formula], wanted: &[Formula]) -> Option<Vec<Formula>> {
    let mut rest = elems.to_vec();
    for w in wanted {
        let at = rest.iter().position(|e| e == w)?;
        rest.remove(at);
    }
    (!rest.is_empty()).then_some(rest)
}

fn instantiate(rhs: &Formula, binds: &Binds) -> Formula {
    rhs.substitute(&|v| binds[v].clone().expect("rhs metavariables are bound by the lhs"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps() -> PropSet {
        PropSet::alphabetic(4)
    }

    fn p(s: &str) -> Formula {
        parse(s, &ps()).unwrap()
    }

    fn simp(s: &str) -> String {
        simplify(&p(s)).unwrap().to_text(&ps())
    }

    #[test]
    fn worked_rewrites() {
        assert_eq!(simp("F F a"), "F a");
        assert_eq!(simp("true U a"), "F a");
        assert_eq!(simp("(a U b) | G a"), "a W b");
        assert_eq!(simp("G a | (a U b)"), "a W b");
        assert_eq!(simp("c | (a U b) | G a"), "c | (a W b)");
        assert_eq!(simp("(a | b) U b"), "a U b");
        assert_eq!(simp("(a | b | c) U (b | c)"), "a U (b | c)");
        assert_eq!(simp("a W false"), "G a");
        assert_eq!(simp("b W (a & b)"), "a R b");
        assert_eq!(simp("(a & b) | (a & c) | d"), simp("d | a & (b | c)"));
        assert_eq!(simp("!F !a"), "G a");
        assert_eq!(simp("!(a U b)"), "!a R !b");
        assert_eq!(simp("false U (a & true)"), "a");
    }

    #[test]
    fn operands_are_sorted_and_deduplicated() {
        assert_eq!(simplify(&p("b | a | b")).unwrap(), simplify(&p("a | b")).unwrap());
        assert_eq!(canonicalize(&p("X b & (X a & X b)")), canonicalize(&p("X a & X b")));
    }

    #[test]
    fn metric_formulas_are_rejected_but_canonicalizable() {
        assert_eq!(simplify(&p("X a")), Err(FormulaError::NotQualitative));
        assert_eq!(canonicalize(&p("X a | !!false")), p("X a"));
    }

    #[test]
    fn rules_are_size_non_increasing_and_well_formed() {
        let meta = PropSet::new(["p", "q", "r"]).unwrap();
        for r in RULES {
            let (l, rhs) = (parse(r.lhs, &meta).unwrap(), parse(r.rhs, &meta).unwrap());
            assert!(rhs.size() <= l.size(), "{} grows", r.name);
            assert!(rhs.max_prop() <= l.max_prop(), "{} has an unbound metavariable", r.name);
            assert!(l.is_qualitative() && rhs.is_qualitative());
            if r.boolean {
                assert!(!l.has_temporal() && !rhs.has_temporal(), "{} is not boolean", r.name);
            }
        }
    }

    #[test]
    fn simplification_never_grows() {
        for s in ["(a | b) & (a | c) & G (a | b)", "!(a & !(b | F c)) U (a R !G b)", "((a U b) | G a) & F F (a | !a)"] {
            let f = p(s);
            assert!(simplify(&f).unwrap().size() <= f.size(), "{s}");
        }
    }
}

//! Finite-trace semantics.
//!
//! Every subformula is evaluated at all timesteps at once by a single
//! backward sweep, which is what the temporal operators need anyway.

use super::{Formula, FormulaError};
use crate::data::Trace;
use Formula::*;

/// Truth value of `f` at every timestep of `trace`.
///
/// Panics if `f` mentions a proposition beyond the trace width; use
/// [`evaluate`] for a checked call.
pub fn truth_vector(f: &Formula, trace: &Trace) -> Vec<bool> {
    let n = trace.len();
    match f {
        True => vec![true; n],
        False => vec![false; n],
        Prop(j) => {
            assert!(*j < trace.width(), "proposition {j} outside trace width {}", trace.width());
            (0..n).map(|t| trace.holds(t, *j)).collect()
        }
        Not(a) => truth_vector(a, trace).into_iter().map(|v| !v).collect(),
        And(a, b) => zip(truth_vector(a, trace), truth_vector(b, trace), |x, y| x && y),
        Or(a, b) => zip(truth_vector(a, trace), truth_vector(b, trace), |x, y| x || y),
        Next(a) => {
            let v = truth_vector(a, trace);
            (0..n).map(|t| t + 1 < n && v[t + 1]).collect()
        }
        WeakNext(a) => {
            let v = truth_vector(a, trace);
            (0..n).map(|t| t + 1 >= n || v[t + 1]).collect()
        }
        // Binary temporal operators share one recurrence:
        // out[t] = now(l[t], r[t], out[t+1]) with out[n] = base.
        Until(a, b) => sweep(truth_vector(a, trace), truth_vector(b, trace), false, |l, r, nx| r || (l && nx)),
        WeakUntil(a, b) => sweep(truth_vector(a, trace), truth_vector(b, trace), true, |l, r, nx| r || (l && nx)),
        Release(a, b) => sweep(truth_vector(a, trace), truth_vector(b, trace), true, |l, r, nx| r && (l || nx)),
        Eventually(a) => {
            let v = truth_vector(a, trace);
            sweep(v.clone(), v, false, |_, x, nx| x || nx)
        }
        Globally(a) => {
            let v = truth_vector(a, trace);
            sweep(v.clone(), v, true, |_, x, nx| x && nx)
        }
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

fn sweep(l: Vec<bool>, r: Vec<bool>, base: bool, step: impl Fn(bool, bool, bool) -> bool) -> Vec<bool> {
    let mut out = vec![false; l.len()];
    let mut next = base;
    for t in (0..l.len()).rev() {
        next = step(l[t], r[t], next);
        out[t] = next;
    }
    out
}

/// `trace, t |= f`.
pub fn evaluate(f: &Formula, trace: &Trace, t: usize) -> Result<bool, FormulaError> {
    if t >= trace.len() {
        return Err(FormulaError::TimestepOutOfRange { t, len: trace.len() });
    }
    if let Some(index) = f.max_prop().filter(|&i| i >= trace.width()) {
        return Err(FormulaError::PropositionOutOfRange { index, width: trace.width() });
    }
    Ok(truth_vector(f, trace)[t])
}

/// `trace, 0 |= f`. Traces are never empty, so this always has an answer.
pub fn satisfies(f: &Formula, trace: &Trace) -> bool {
    truth_vector(f, trace)[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::{parse, PropSet};

    fn tr(steps: &[&[bool]]) -> Trace {
        Trace::from_bools(steps.iter().map(|s| s.to_vec()).collect()).unwrap()
    }

    /// Direct quantifier expansion of the until definition.
    fn until_by_definition(phi: &[bool], psi: &[bool], t: usize) -> bool {
        (t..phi.len()).any(|k| psi[k] && (t..k).all(|m| phi[m]))
    }

    #[test]
    fn until_example() {
        let pi = tr(&[&[true, false], &[true, false], &[false, true]]);
        let f = parse("a U b", &PropSet::alphabetic(2)).unwrap();
        let phi = [true, true, false];
        let psi = [false, false, true];
        for t in 0..3 {
            assert_eq!(evaluate(&f, &pi, t).unwrap(), until_by_definition(&phi, &psi, t));
        }
        assert!(evaluate(&f, &pi, 0).unwrap());
        assert!(satisfies(&f, &pi));
    }

    #[test]
    fn next_at_end_of_trace() {
        let ps = PropSet::alphabetic(1);
        let pi = tr(&[&[true]]);
        assert!(!satisfies(&parse("X a", &ps).unwrap(), &pi));
        assert!(satisfies(&parse("WX a", &ps).unwrap(), &pi));
        assert!(satisfies(&parse("G true", &ps).unwrap(), &pi));
        assert!(satisfies(&Formula::True, &pi));
        assert!(!satisfies(&Formula::False, &pi));
    }

    #[test]
    fn out_of_range_is_an_error() {
        let pi = tr(&[&[true]]);
        assert!(matches!(evaluate(&Formula::True, &pi, 1), Err(FormulaError::TimestepOutOfRange { .. })));
        assert!(matches!(
            evaluate(&Formula::Prop(3), &pi, 0),
            Err(FormulaError::PropositionOutOfRange { index: 3, width: 1 })
        ));
    }

    #[test]
    fn derived_operators_agree_with_definitions_exhaustively() {
        let ps = PropSet::alphabetic(2);
        let pairs = [
            ("F a", "true U a"),
            ("G a", "!F !a"),
            ("a W b", "(a U b) | G a"),
            ("a R b", "!(!a U !b)"),
            ("F (a & X b)", "true U (a & X b)"),
            ("G (a | WX b)", "!F !(a | WX b)"),
        ];
        for len in 1..=4 {
            for pi in Trace::enumerate(2, len) {
                for (l, r) in pairs {
                    let (l, r) = (parse(l, &ps).unwrap(), parse(r, &ps).unwrap());
                    assert_eq!(truth_vector(&l, &pi), truth_vector(&r, &pi));
                }
            }
        }
    }
}

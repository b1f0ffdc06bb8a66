//! Temporal normal form: `hold U goal` or `hold W goal`, with `hold` and
//! `goal` in disjunctive normal form over current-step and next-step
//! literals.

use std::fmt;

use super::{validate_table, ExtractError, TableVerdict, TemporalTruthTable};
use crate::logicmin::{minimize_cover, Cover};
use crate::ltl::Formula;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Literal {
    /// Input `var` at the current step.
    Now { var: usize, positive: bool },
    /// Input `var` at the next step, under `X` or, if `weak`, `WX`.
    Next { var: usize, positive: bool, weak: bool },
}

impl Literal {
    /// Literal for metric bit `var` taking `value`, given the input's
    /// end-of-trace value. The literal must evaluate to `value == end` at the
    /// last step, where the filter reads the end value in place of a next
    /// step.
    pub fn metric(var: usize, value: bool, end: bool) -> Self {
        Literal::Next { var, positive: value, weak: value == end }
    }

    fn to_formula(self, atoms: &[Formula]) -> Formula {
        let lit = |var: usize, positive: bool| {
            if positive {
                atoms[var].clone()
            } else {
                Formula::not(atoms[var].clone())
            }
        };
        match self {
            Literal::Now { var, positive } => lit(var, positive),
            Literal::Next { var, positive, weak: false } => Formula::next(lit(var, positive)),
            Literal::Next { var, positive, weak: true } => Formula::weak_next(lit(var, positive)),
        }
    }

    fn size(self, atom_sizes: &[u128]) -> u128 {
        match self {
            Literal::Now { var, .. } => atom_sizes[var],
            Literal::Next { var, .. } => 1 + atom_sizes[var],
        }
    }

    /// Truth on a table row with current inputs `x` and next inputs `m`.
    fn holds(self, x: u32, m: u32) -> bool {
        match self {
            Literal::Now { var, positive } => (x >> var & 1 == 1) == positive,
            Literal::Next { var, positive, .. } => (m >> var & 1 == 1) == positive,
        }
    }
}

pub type Clause = Vec<Literal>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TnfFormula {
    /// Number of inputs.
    pub n: usize,
    pub hold: Vec<Clause>,
    pub goal: Vec<Clause>,
    /// `W` rather than `U`.
    pub weak: bool,
}

fn dnf_formula(dnf: &[Clause], atoms: &[Formula]) -> Formula {
    Formula::or_all(dnf.iter().map(|c| Formula::and_all(c.iter().map(|l| l.to_formula(atoms)))))
}

fn dnf_size(dnf: &[Clause], atom_sizes: &[u128]) -> u128 {
    let clause = |c: &Clause| c.iter().map(|l| l.size(atom_sizes)).sum::<u128>() + c.len().saturating_sub(1) as u128;
    dnf.iter().map(clause).sum::<u128>() + dnf.len().saturating_sub(1) as u128
}

impl TnfFormula {
    /// The unminimized form: a full clause for every row pattern true at
    /// `τ = 1` on the hold side and for every one true at `τ = 0` on the goal
    /// side.
    pub fn raw(t: &TemporalTruthTable) -> Result<Self, ExtractError> {
        let (vars, patterns) = patterns(t)?;
        let full = |p: u32| cube_clause(t, vars, (1u32 << vars) - 1, p);
        let hold = patterns.iter().filter(|(_, _, f1)| *f1).map(|&(p, _, _)| full(p)).collect();
        let goal = patterns.iter().filter(|(_, f0, _)| *f0).map(|&(p, _, _)| full(p)).collect();
        Ok(TnfFormula { n: t.n, hold, goal, weak: t.end })
    }

    /// The formula with input `j` replaced by `atoms[j]`.
    pub fn to_formula(&self, atoms: &[Formula]) -> Formula {
        let (hold, goal) = (dnf_formula(&self.hold, atoms), dnf_formula(&self.goal, atoms));
        if self.weak {
            Formula::weak_until(hold, goal)
        } else {
            Formula::until(hold, goal)
        }
    }

    /// Size of [`Self::to_formula`] given the size of each atom, computed
    /// without building the formula.
    pub fn size_with(&self, atom_sizes: &[u128]) -> u128 {
        dnf_size(&self.hold, atom_sizes) + dnf_size(&self.goal, atom_sizes) + 1
    }

    pub fn is_qualitative(&self) -> bool {
        self.hold.iter().chain(&self.goal).flatten().all(|l| matches!(l, Literal::Now { .. }))
    }

    /// The truth table this formula denotes, with end-of-trace input values
    /// `input_end`.
    pub fn table(&self, input_end: &[bool], qualitative: bool) -> TemporalTruthTable {
        let n = self.n;
        let eval = |dnf: &[Clause], x: u32, m: u32| dnf.iter().any(|c| c.iter().all(|l| l.holds(x, m)));
        let f = (0..1u32 << (2 * n + 1))
            .map(|k| {
                let (x, m, tau) = (k & ((1 << n) - 1), (k >> n) & ((1 << n) - 1), k >> (2 * n) == 1);
                eval(&self.goal, x, m) || (tau && eval(&self.hold, x, m))
            })
            .collect();
        TemporalTruthTable { n, f, end: self.weak, input_end: input_end.to_vec(), qualitative }
    }
}

impl fmt::Display for TnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atoms: Vec<Formula> = (0..self.n).map(Formula::prop).collect();
        write!(f, "{}", self.to_formula(&atoms))
    }
}

/// A row pattern with the table's outputs at `τ = 0` and `τ = 1`.
type Pattern = (u32, bool, bool);

/// Variable count and row patterns. Qualitative tables use the `x` bits only.
fn patterns(t: &TemporalTruthTable) -> Result<(usize, Vec<Pattern>), ExtractError> {
    if let TableVerdict::Invalid { x, m } = validate_table(t) {
        return Err(ExtractError::InvalidTable { x, m });
    }
    let width = 1u32 << t.n;
    if t.qualitative {
        for x in 0..width {
            for m in 1..width {
                for tau in [false, true] {
                    if t.get(x, m, tau) != t.get(x, 0, tau) {
                        return Err(ExtractError::MetricDependence);
                    }
                }
            }
        }
        Ok((t.n, (0..width).map(|x| (x, t.get(x, 0, false), t.get(x, 0, true))).collect()))
    } else {
        let all = (0..width * width).map(|p| {
            let (x, m) = (p & (width - 1), p >> t.n);
            (p, t.get(x, m, false), t.get(x, m, true))
        });
        Ok((2 * t.n, all.collect()))
    }
}

fn cube_clause(t: &TemporalTruthTable, vars: usize, mask: u32, value: u32) -> Clause {
    (0..vars)
        .filter(|v| mask >> v & 1 == 1)
        .map(|v| {
            let bit = value >> v & 1 == 1;
            if v < t.n {
                Literal::Now { var: v, positive: bit }
            } else {
                Literal::metric(v - t.n, bit, t.input_end[v - t.n])
            }
        })
        .collect()
}

fn cover_dnf(t: &TemporalTruthTable, vars: usize, cover: &Cover) -> Vec<Clause> {
    cover.cubes.iter().map(|c| cube_clause(t, vars, c.mask, c.value)).collect()
}

/// Minimized TNF for a valid table. The goal side covers the rows true at
/// `τ = 0`; the hold side covers the rows true only at `τ = 1`, using the
/// goal rows as don't-cares.
pub fn table_to_formula(t: &TemporalTruthTable) -> Result<TnfFormula, ExtractError> {
    let (vars, patterns) = patterns(t)?;
    let goal_on: Vec<u32> = patterns.iter().filter(|p| p.1).map(|p| p.0).collect();
    let hold_on: Vec<u32> = patterns.iter().filter(|p| p.2 && !p.1).map(|p| p.0).collect();
    let goal = minimize_cover(vars, &goal_on, &[])?;
    let hold = minimize_cover(vars, &hold_on, &goal_on)?;
    Ok(TnfFormula { n: t.n, hold: cover_dnf(t, vars, &hold), goal: cover_dnf(t, vars, &goal), weak: t.end })
}

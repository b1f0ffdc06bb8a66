//! Uniform sampling of NNF formulas of an exact size.
//!
//! Literals (`p`, `!p`) have size 1; each operator adds 1. Counting the
//! derivations of every size lets a production be chosen with probability
//! proportional to the number of formulas it leads to, which makes the
//! result uniform over all formulas of the requested size. Formulas without
//! a temporal operator are rejected and redrawn.

use rand::Rng;

use super::{Formula, FormulaError, PropSet};

type Unary = fn(Formula) -> Formula;
type Binary = fn(Formula, Formula) -> Formula;

fn unary_ops(qualitative: bool) -> &'static [Unary] {
    if qualitative {
        &[Formula::eventually, Formula::globally]
    } else {
        &[Formula::eventually, Formula::globally, Formula::next, Formula::weak_next]
    }
}

const BINARY_OPS: &[Binary] = &[Formula::and, Formula::or, Formula::until, Formula::weak_until, Formula::release];

/// Number of NNF formulas (ordered trees) of each size `0..=max`, with and
/// without the temporal-operator requirement.
pub fn count_formulas(max: usize, n_props: usize, qualitative: bool) -> Result<Vec<u128>, FormulaError> {
    let u = unary_ops(qualitative).len() as u128;
    let b = BINARY_OPS.len() as u128;
    let mut n = vec![0u128; max + 1];
    for s in 1..=max {
        n[s] = if s == 1 {
            2 * n_props as u128
        } else {
            let mut total = u.checked_mul(n[s - 1]).ok_or(FormulaError::CountOverflow { size: s })?;
            for left in 1..s - 1 {
                let prod = n[left]
                    .checked_mul(n[s - 1 - left])
                    .and_then(|x| x.checked_mul(b))
                    .ok_or(FormulaError::CountOverflow { size: s })?;
                total = total.checked_add(prod).ok_or(FormulaError::CountOverflow { size: s })?;
            }
            total
        };
    }
    Ok(n)
}

fn sample(size: usize, counts: &[u128], n_props: usize, qualitative: bool, rng: &mut impl Rng) -> Formula {
    if size == 1 {
        let lit = rng.gen_range(0..2 * n_props);
        let p = Formula::Prop(lit / 2);
        return if lit % 2 == 1 { Formula::not(p) } else { p };
    }
    let unary = unary_ops(qualitative);
    let mut pick = rng.gen_range(0..counts[size]);
    let unary_total = unary.len() as u128 * counts[size - 1];
    if pick < unary_total {
        let op = unary[(pick / counts[size - 1]) as usize];
        return op(sample(size - 1, counts, n_props, qualitative, rng));
    }
    pick -= unary_total;
    for left in 1..size - 1 {
        let per_op = counts[left] * counts[size - 1 - left];
        let block = per_op * BINARY_OPS.len() as u128;
        if pick < block {
            let op = BINARY_OPS[(pick / per_op) as usize];
            let l = sample(left, counts, n_props, qualitative, rng);
            let r = sample(size - 1 - left, counts, n_props, qualitative, rng);
            return op(l, r);
        }
        pick -= block;
    }
    unreachable!("pick exceeds formula count")
}

/// A uniformly random NNF formula of exactly `size` containing at least one
/// temporal operator.
pub fn random_formula(
    size: usize,
    props: &PropSet,
    qualitative: bool,
    rng: &mut impl Rng,
) -> Result<Formula, FormulaError> {
    if size < 2 || props.is_empty() {
        return Err(FormulaError::InfeasibleSize { size });
    }
    let counts = count_formulas(size, props.len(), qualitative)?;
    loop {
        let f = sample(size, &counts, props.len(), qualitative, rng);
        if f.has_temporal() {
            return Ok(f);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn size_one_is_infeasible() {
        let ps = PropSet::alphabetic(3);
        assert_eq!(
            random_formula(1, &ps, true, &mut crate::seed::rng(0)),
            Err(FormulaError::InfeasibleSize { size: 1 })
        );
    }

    #[test]
    fn counts_match_hand_enumeration() {
        // size 2: {F, G} x 6 literals; size 3: 2*12 unary + 5 * 6 * 6 binary.
        let c = count_formulas(3, 3, true).unwrap();
        assert_eq!(&c[1..], &[6, 12, 24 + 180]);
        assert!(count_formulas(60, 3, true).is_err());
    }

    #[test]
    fn size_two_is_uniform_over_twelve_formulas() {
        let ps = PropSet::alphabetic(3);
        let mut rng = crate::seed::rng(11);
        let mut seen: HashMap<Formula, usize> = HashMap::new();
        for _ in 0..12_000 {
            let f = random_formula(2, &ps, true, &mut rng).unwrap();
            assert!(matches!(f, Formula::Eventually(_) | Formula::Globally(_)));
            *seen.entry(f).or_default() += 1;
        }
        assert_eq!(seen.len(), 12);
        assert!(seen.values().all(|&c| (800..1200).contains(&c)), "{seen:?}");
    }

    #[test]
    fn exact_size_qualitative_and_deterministic() {
        let ps = PropSet::alphabetic(3);
        for size in 2..=15 {
            let f = random_formula(size, &ps, true, &mut crate::seed::rng(size as u64)).unwrap();
            assert_eq!(f.size(), size);
            assert!(f.is_qualitative() && f.is_nnf() && f.has_temporal());
            assert_eq!(f, random_formula(size, &ps, true, &mut crate::seed::rng(size as u64)).unwrap());
        }
        let g = random_formula(9, &ps, false, &mut crate::seed::rng(3)).unwrap();
        assert_eq!(g.size(), 9);
    }
}

//! Two-level minimization of Boolean functions given as onset and
//! don't-care minterm lists: prime implicants by Quine-McCluskey, then
//! essential primes, dominance reduction and Petrick's method.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

/// Variable guard for prime generation.
pub const MAX_VARS: usize = 24;
/// Largest residual prime chart solved exactly.
const PETRICK_LIMIT: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MinimizeError {
    #[error("{0} variables exceeds the minimizer limit of {MAX_VARS}")]
    TooManyVariables(usize),
    #[error("minterm {minterm} does not fit in {n_vars} variables")]
    MintermOutOfRange { minterm: u32, n_vars: usize },
}

/// A product term. Bit `i` of `mask` says variable `i` appears; bit `i` of
/// `value` gives its polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cube {
    pub mask: u32,
    pub value: u32,
}

impl Cube {
    pub fn minterm(m: u32, n_vars: usize) -> Self {
        let mask = full_mask(n_vars);
        Cube { mask, value: m & mask }
    }

    pub fn covers(&self, m: u32) -> bool {
        m & self.mask == self.value
    }

    pub fn literals(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// Literal list as `(variable, positive)` pairs in variable order.
    pub fn literal_list(&self, n_vars: usize) -> Vec<(usize, bool)> {
        (0..n_vars).filter(|i| self.mask >> i & 1 == 1).map(|i| (i, self.value >> i & 1 == 1)).collect()
    }

    /// Minterms covered by this cube.
    pub fn minterms(&self, n_vars: usize) -> impl Iterator<Item = u32> + '_ {
        let free = full_mask(n_vars) & !self.mask;
        // Enumerate all submasks of `free`.
        let mut sub = Some(free);
        std::iter::from_fn(move || {
            let s = sub?;
            sub = if s == 0 { None } else { Some((s - 1) & free) };
            Some(self.value | s)
        })
    }

    fn pla(&self, n_vars: usize) -> String {
        (0..n_vars)
            .map(|i| match (self.mask >> i & 1, self.value >> i & 1) {
                (0, _) => '-',
                (_, 1) => '1',
                _ => '0',
            })
            .collect()
    }
}

/// A sum of cubes over `n_vars` variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    pub n_vars: usize,
    pub cubes: Vec<Cube>,
}

impl Cover {
    pub fn evaluate(&self, m: u32) -> bool {
        self.cubes.iter().any(|c| c.covers(m))
    }

    pub fn literals(&self) -> usize {
        self.cubes.iter().map(Cube::literals).sum()
    }

    /// Berkeley PLA text with a single output.
    pub fn to_pla(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Cover {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, ".i {}\n.o 1\n.p {}", self.n_vars, self.cubes.len())?;
        for c in &self.cubes {
            writeln!(f, "{} 1", c.pla(self.n_vars))?;
        }
        writeln!(f, ".e")
    }
}

fn full_mask(n_vars: usize) -> u32 {
    if n_vars >= 32 {
        u32::MAX
    } else {
        (1u32 << n_vars) - 1
    }
}

fn check(n_vars: usize, terms: &[u32]) -> Result<(), MinimizeError> {
    if n_vars > MAX_VARS {
        return Err(MinimizeError::TooManyVariables(n_vars));
    }
    match terms.iter().find(|&&m| m & !full_mask(n_vars) != 0) {
        Some(&minterm) => Err(MinimizeError::MintermOutOfRange { minterm, n_vars }),
        None => Ok(()),
    }
}

/// All prime implicants of `onset ∪ dcset`.
fn primes(n_vars: usize, terms: &BTreeSet<u32>) -> Vec<Cube> {
    let mut level: BTreeSet<Cube> = terms.iter().map(|&m| Cube::minterm(m, n_vars)).collect();
    let mut primes = Vec::new();
    while !level.is_empty() {
        let mut next = BTreeSet::new();
        let mut merged: HashSet<Cube> = HashSet::new();
        for c in &level {
            for i in 0..n_vars {
                let bit = 1u32 << i;
                if c.mask & bit == 0 || c.value & bit != 0 {
                    continue;
                }
                let partner = Cube { mask: c.mask, value: c.value | bit };
                if level.contains(&partner) {
                    merged.insert(*c);
                    merged.insert(partner);
                    next.insert(Cube { mask: c.mask & !bit, value: c.value });
                }
            }
        }
        primes.extend(level.iter().filter(|c| !merged.contains(c)));
        level = next;
    }
    primes.sort();
    primes
}

/// A minimum-cardinality cover of `onset` by primes of `onset ∪ dcset`,
/// with fewer literals breaking ties. Exact when the chart left after
/// essential primes and dominance has at most 16 primes, greedy otherwise.
pub fn minimize_cover(n_vars: usize, onset: &[u32], dcset: &[u32]) -> Result<Cover, MinimizeError> {
    check(n_vars, onset)?;
    check(n_vars, dcset)?;
    let on: BTreeSet<u32> = onset.iter().copied().collect();
    if on.is_empty() {
        return Ok(Cover { n_vars, cubes: Vec::new() });
    }
    let all: BTreeSet<u32> = on.iter().chain(dcset).copied().collect();
    let primes = primes(n_vars, &all);

    let mut rows: Vec<u32> = on.into_iter().collect();
    let mut cols: Vec<usize> = (0..primes.len()).collect();
    let mut chosen: Vec<usize> = Vec::new();
    loop {
        let before = (rows.len(), cols.len());
        // Essential primes.
        for &m in &rows.clone() {
            let covering: Vec<usize> = cols.iter().copied().filter(|&p| primes[p].covers(m)).collect();
            if covering.len() == 1 && !chosen.contains(&covering[0]) {
                chosen.push(covering[0]);
            }
        }
        rows.retain(|&m| !chosen.iter().any(|&p| primes[p].covers(m)));
        cols.retain(|p| !chosen.contains(p));
        // Row dominance: a row whose primes include another row's is redundant.
        let sets: Vec<BTreeSet<usize>> =
            rows.iter().map(|&m| cols.iter().copied().filter(|&p| primes[p].covers(m)).collect()).collect();
        let mut keep = vec![true; rows.len()];
        for i in 0..rows.len() {
            for j in 0..rows.len() {
                if i != j && keep[j] && sets[j].is_subset(&sets[i]) && (sets[j] != sets[i] || j < i) {
                    keep[i] = false;
                    break;
                }
            }
        }
        let mut k = keep.iter();
        rows.retain(|_| *k.next().expect("same length"));
        // Column dominance: drop a prime covering a subset of another's rows
        // unless it is strictly cheaper.
        let cover_of = |p: usize| -> BTreeSet<u32> { rows.iter().copied().filter(|&m| primes[p].covers(m)).collect() };
        let csets: Vec<BTreeSet<u32>> = cols.iter().map(|&p| cover_of(p)).collect();
        let mut keep = vec![true; cols.len()];
        for i in 0..cols.len() {
            if csets[i].is_empty() {
                keep[i] = false;
                continue;
            }
            for j in 0..cols.len() {
                if i == j || !keep[j] || !csets[i].is_subset(&csets[j]) {
                    continue;
                }
                let (li, lj) = (primes[cols[i]].literals(), primes[cols[j]].literals());
                if lj < li || (lj == li && (csets[i] != csets[j] || j < i)) {
                    keep[i] = false;
                    break;
                }
            }
        }
        let mut k = keep.iter();
        cols.retain(|_| *k.next().expect("same length"));
        if rows.is_empty() || (rows.len(), cols.len()) == before {
            break;
        }
    }

    if !rows.is_empty() {
        let extra =
            if cols.len() <= PETRICK_LIMIT { petrick(&primes, &rows, &cols) } else { greedy(&primes, &rows, &cols) };
        chosen.extend(extra);
    }
    let mut cubes: Vec<Cube> = chosen.into_iter().map(|p| primes[p]).collect();
    cubes.sort();
    Ok(Cover { n_vars, cubes })
}

fn petrick(primes: &[Cube], rows: &[u32], cols: &[usize]) -> Vec<usize> {
    let mut products: BTreeSet<u32> = BTreeSet::from([0]);
    for &m in rows {
        let sum: Vec<u32> = (0..cols.len()).filter(|&i| primes[cols[i]].covers(m)).map(|i| 1u32 << i).collect();
        let mut next: BTreeSet<u32> = BTreeSet::new();
        for &p in &products {
            for &s in &sum {
                next.insert(p | s);
            }
        }
        // Absorption: drop products that contain another product.
        let v: Vec<u32> = next.into_iter().collect();
        products = v.iter().copied().filter(|&a| !v.iter().any(|&b| b != a && a & b == b)).collect();
    }
    let cost = |mask: u32| -> (u32, usize, u32) {
        let lits = (0..cols.len()).filter(|i| mask >> i & 1 == 1).map(|i| primes[cols[i]].literals()).sum();
        (mask.count_ones(), lits, mask)
    };
    let best = products.into_iter().min_by_key(|&m| cost(m)).expect("a cover exists");
    (0..cols.len()).filter(|i| best >> i & 1 == 1).map(|i| cols[i]).collect()
}

fn greedy(primes: &[Cube], rows: &[u32], cols: &[usize]) -> Vec<usize> {
    let mut left: Vec<u32> = rows.to_vec();
    let mut picked = Vec::new();
    while !left.is_empty() {
        let &p = cols
            .iter()
            .max_by_key(|&&p| {
                let hits = left.iter().filter(|&&m| primes[p].covers(m)).count();
                (hits, std::cmp::Reverse(primes[p].literals()), std::cmp::Reverse(p))
            })
            .expect("a cover exists");
        left.retain(|&m| !primes[p].covers(m));
        picked.push(p);
    }
    picked
}

/// Whether `cover` includes every onset minterm and nothing outside
/// `onset ∪ dcset`.
pub fn verify_cover(cover: &Cover, onset: &[u32], dcset: &[u32]) -> bool {
    let allowed: HashSet<u32> = onset.iter().chain(dcset).copied().collect();
    onset.iter().all(|&m| cover.evaluate(m))
        && cover.cubes.iter().all(|c| c.minterms(cover.n_vars).all(|m| allowed.contains(&m)))
}

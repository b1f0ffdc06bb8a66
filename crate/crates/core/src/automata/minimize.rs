use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use super::Dfa;

pub(super) fn minimize(d: &Dfa) -> Dfa {
    let d = reachable(d);
    let reentrant = d.trans.contains(&d.initial);
    if reentrant {
        return canonical(&quotient(&d));
    }
    // The initial flag only affects the empty string, which is outside the
    // language domain, so pick whichever setting yields fewer states.
    let mut best: Option<Dfa> = None;
    for flag in [false, true] {
        let mut v = d.clone();
        v.accepting[v.initial] = flag;
        let m = canonical(&quotient(&v));
        if best.as_ref().is_none_or(|b| m.num_states() < b.num_states()) {
            best = Some(m);
        }
    }
    best.expect("two candidates")
}

/// Restriction to states reachable from the initial one, in BFS order.
fn reachable(d: &Dfa) -> Dfa {
    let sigma = d.alphabet_size();
    let mut order = vec![d.initial];
    let mut id: HashMap<usize, usize> = HashMap::from([(d.initial, 0)]);
    let mut queue = VecDeque::from([d.initial]);
    while let Some(s) = queue.pop_front() {
        for a in 0..sigma {
            let t = d.trans[s * sigma + a];
            if let Entry::Vacant(e) = id.entry(t) {
                e.insert(order.len());
                order.push(t);
                queue.push_back(t);
            }
        }
    }
    let trans =
        order.iter().flat_map(|&s| (0..sigma).map(move |a| (s, a))).map(|(s, a)| id[&d.trans[s * sigma + a]]).collect();
    let accepting = order.iter().map(|&s| d.accepting[s]).collect();
    Dfa { n_props: d.n_props, initial: 0, trans, accepting }
}

/// Moore partition refinement.
fn quotient(d: &Dfa) -> Dfa {
    let n = d.num_states();
    let sigma = d.alphabet_size();
    let mut class: Vec<usize> = d.accepting.iter().map(|&a| a as usize).collect();
    let mut count = 0;
    loop {
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let next: Vec<usize> = (0..n)
            .map(|s| {
                let mut sig = Vec::with_capacity(sigma + 1);
                sig.push(class[s]);
                sig.extend((0..sigma).map(|a| class[d.trans[s * sigma + a]]));
                let k = ids.len();
                *ids.entry(sig).or_insert(k)
            })
            .collect();
        let new_count = ids.len();
        class = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }
    let mut trans = vec![0; count * sigma];
    let mut accepting = vec![false; count];
    for s in 0..n {
        accepting[class[s]] = d.accepting[s];
        for a in 0..sigma {
            trans[class[s] * sigma + a] = class[d.trans[s * sigma + a]];
        }
    }
    Dfa { n_props: d.n_props, initial: class[d.initial], trans, accepting }
}

fn canonical(d: &Dfa) -> Dfa {
    reachable(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_equivalent_states() {
        // States 1 and 2 both accept everything; 3 is unreachable.
        let d = Dfa::new(1, 0, vec![1, 2, 1, 1, 2, 2, 3, 3], vec![false, true, true, false]).unwrap();
        let m = d.minimize();
        assert_eq!(m.num_states(), 1);
        assert!(m.is_accepting(0));
    }

    #[test]
    fn keeps_reentrant_initial_flag() {
        // Even number of steps: the initial state is re-entered.
        let d = Dfa::new(1, 0, vec![1, 1, 0, 0], vec![true, false]).unwrap();
        assert_eq!(d.minimize(), d);
    }

    #[test]
    fn renumbering_is_canonical() {
        let a = Dfa::new(1, 0, vec![0, 1, 1, 1], vec![false, true]).unwrap();
        let b = Dfa::new(1, 1, vec![0, 0, 1, 0], vec![true, false]).unwrap();
        assert_eq!(a.minimize(), b.minimize());
    }
}

use std::collections::VecDeque;

use super::Dfa;
use crate::data::Trace;

/// Shortest access string for every state, ties broken by symbol order.
fn access_strings(d: &Dfa) -> Vec<Vec<u32>> {
    let mut access: Vec<Option<Vec<u32>>> = vec![None; d.num_states()];
    access[d.initial] = Some(Vec::new());
    let mut queue = VecDeque::from([d.initial]);
    while let Some(s) = queue.pop_front() {
        for a in 0..d.alphabet_size() as u32 {
            let t = d.next(s, a);
            if access[t].is_none() {
                let mut w = access[s].clone().expect("visited");
                w.push(a);
                access[t] = Some(w);
                queue.push_back(t);
            }
        }
    }
    access.into_iter().map(|w| w.expect("minimal DFAs are reachable")).collect()
}

/// Shortest suffix separating each pair of states, by backward layers over
/// state pairs. The initial flag does not separate anything when the initial
/// state cannot be re-entered, since the empty trace is outside the domain.
fn separating_suffixes(d: &Dfa) -> Vec<Vec<Option<Vec<u32>>>> {
    let n = d.num_states();
    let free_initial = !d.trans.contains(&d.initial);
    let mut sep: Vec<Vec<Option<Vec<u32>>>> = vec![vec![None; n]; n];
    for (p, row) in sep.iter_mut().enumerate() {
        for (q, cell) in row.iter_mut().enumerate() {
            let skip = free_initial && (p == d.initial || q == d.initial);
            if !skip && d.accepting[p] != d.accepting[q] {
                *cell = Some(Vec::new());
            }
        }
    }
    loop {
        let mut found = Vec::new();
        for p in 0..n {
            for q in 0..n {
                if sep[p][q].is_some() {
                    continue;
                }
                for a in 0..d.alphabet_size() as u32 {
                    if let Some(w) = &sep[d.next(p, a)][d.next(q, a)] {
                        let mut v = vec![a];
                        v.extend(w);
                        found.push((p, q, v));
                        break;
                    }
                }
            }
        }
        if found.is_empty() {
            return sep;
        }
        for (p, q, w) in found {
            sep[p][q] = Some(w);
        }
    }
}

/// A labeled sample from which a state-merging learner recovers the minimal
/// DFA. It contains every access string, every one-symbol extension of an
/// access string, and for each pair of those reaching different states both
/// strings extended by their shortest separating suffix. Empty strings are
/// dropped; order is deterministic and duplicates are removed.
pub fn characteristic_sample(d: &Dfa) -> Vec<(Trace, bool)> {
    let d = d.minimize();
    let access = access_strings(&d);
    let sep = separating_suffixes(&d);
    let mut kernel: Vec<Vec<u32>> = access.clone();
    for u in &access {
        for a in 0..d.alphabet_size() as u32 {
            let mut v = u.clone();
            v.push(a);
            kernel.push(v);
        }
    }
    let mut words: Vec<Vec<u32>> = kernel.clone();
    for u in &access {
        let p = d.run(u);
        for v in &kernel {
            let q = d.run(v);
            if let Some(w) = sep[p][q].as_ref().filter(|w| !w.is_empty()) {
                words.push(u.iter().chain(w).copied().collect());
                words.push(v.iter().chain(w).copied().collect());
            }
        }
    }
    let mut seen = std::collections::HashSet::new();
    words
        .into_iter()
        .filter(|w| !w.is_empty() && seen.insert(w.clone()))
        .map(|w| {
            let label = d.accepting[d.run(&w)];
            (Trace::new(d.n_props, w).expect("symbols are within the alphabet"), label)
        })
        .collect()
}

#[cfg(test)]
mod rpni {
    //! Red-blue state merging over a prefix tree with unknown labels allowed.

    use super::*;

    #[derive(Clone)]
    struct Node {
        label: Option<bool>,
        children: Vec<Option<usize>>,
    }

    #[derive(Clone)]
    struct Tree {
        nodes: Vec<Node>,
    }

    impl Tree {
        fn new(sigma: usize, sample: &[(Trace, bool)]) -> Self {
            let mut t = Tree { nodes: vec![Node { label: None, children: vec![None; sigma] }] };
            for (trace, label) in sample {
                let mut s = 0;
                for &a in trace.steps() {
                    s = match t.nodes[s].children[a as usize] {
                        Some(c) => c,
                        None => {
                            let c = t.nodes.len();
                            t.nodes.push(Node { label: None, children: vec![None; sigma] });
                            t.nodes[s].children[a as usize] = Some(c);
                            c
                        }
                    };
                }
                t.nodes[s].label = Some(*label);
            }
            t
        }

        fn fold(&mut self, r: usize, b: usize) -> bool {
            match (self.nodes[r].label, self.nodes[b].label) {
                (Some(x), Some(y)) if x != y => return false,
                (None, y) => self.nodes[r].label = y,
                _ => {}
            }
            for a in 0..self.nodes[b].children.len() {
                if let Some(bc) = self.nodes[b].children[a] {
                    match self.nodes[r].children[a] {
                        Some(rc) => {
                            if !self.fold(rc, bc) {
                                return false;
                            }
                        }
                        None => self.nodes[r].children[a] = Some(bc),
                    }
                }
            }
            true
        }
    }

    pub(crate) fn learn(n_props: usize, sample: &[(Trace, bool)]) -> Dfa {
        let sigma = 1usize << n_props;
        let mut tree = Tree::new(sigma, sample);
        let mut red = vec![0usize];
        loop {
            // Blue edges: (red parent, symbol, child) for children outside red.
            let blue = red
                .iter()
                .flat_map(|&r| (0..sigma).map(move |a| (r, a)))
                .find_map(|(r, a)| tree.nodes[r].children[a].filter(|c| !red.contains(c)).map(|c| (r, a, c)));
            let Some((parent, a, b)) = blue else { break };
            let mut merged = false;
            for &r in &red {
                let mut trial = tree.clone();
                trial.nodes[parent].children[a] = Some(r);
                if trial.fold(r, b) {
                    tree = trial;
                    merged = true;
                    break;
                }
            }
            if !merged {
                red.push(b);
            }
        }
        let sink = red.len();
        let index = |s: usize| red.iter().position(|&r| r == s).expect("closed under transitions");
        let mut trans = Vec::new();
        for &r in &red {
            for a in 0..sigma {
                trans.push(tree.nodes[r].children[a].map_or(sink, index));
            }
        }
        trans.extend(std::iter::repeat_n(sink, sigma));
        let mut accepting: Vec<bool> = red.iter().map(|&r| tree.nodes[r].label.unwrap_or(false)).collect();
        accepting.push(false);
        Dfa::new(n_props, 0, trans, accepting).expect("well formed").minimize()
    }
}

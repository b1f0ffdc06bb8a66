//! Hand-set networks that compute a given formula exactly in hard mode.
//! Every operator node becomes one filter; a node at depth `d` sits in layer
//! `d`, and shallower operands reach it through pass-through filters.

use std::collections::HashMap;

use super::{FilterWeights, Layer, Network, NeuralError};
use crate::ltl::Formula;

/// Base pre-activations. The step maps them to 0 and 1 with a margin.
const LOW: f64 = -0.5;
const HIGH: f64 = 0.5;

/// A signal: `(layer, index)`, layer 0 being the raw propositions.
type Signal = (usize, usize);

/// An operand of a filter: a signal, possibly negated, or a constant.
#[derive(Clone, Copy)]
enum Operand {
    Sig(Signal, bool),
    Const(bool),
}

impl Operand {
    fn negate(self) -> Self {
        match self {
            Operand::Sig(s, n) => Operand::Sig(s, !n),
            Operand::Const(c) => Operand::Const(!c),
        }
    }

    fn layer(self) -> usize {
        match self {
            Operand::Sig((l, _), _) => l,
            Operand::Const(_) => 0,
        }
    }
}

struct Spec {
    /// `(input index in the layer below, propositional, metric)`.
    inputs: Vec<(usize, f64, f64)>,
    qual: f64,
    bias: f64,
    base: bool,
}

struct Builder {
    /// `layers[l - 1]` holds the filters of layer `l`.
    layers: Vec<Vec<Spec>>,
    /// Base value of every signal.
    bases: HashMap<Signal, bool>,
    lifted: HashMap<(Signal, usize), usize>,
    memo: HashMap<Formula, Operand>,
}

impl Builder {
    fn push(&mut self, layer: usize, spec: Spec) -> Signal {
        while self.layers.len() < layer {
            self.layers.push(Vec::new());
        }
        let base = spec.base;
        let slot = &mut self.layers[layer - 1];
        slot.push(spec);
        let sig = (layer, slot.len() - 1);
        self.bases.insert(sig, base);
        sig
    }

    /// The same signal, carried up to `layer` by pass-through filters.
    fn lift(&mut self, sig: Signal, layer: usize) -> usize {
        if sig.0 == layer {
            return sig.1;
        }
        if let Some(&i) = self.lifted.get(&(sig, layer)) {
            return i;
        }
        let below = self.lift(sig, layer - 1);
        let base = self.bases[&(layer - 1, below)];
        let (_, i) = self.push(layer, Spec { inputs: vec![(below, 1.0, 0.0)], qual: 0.0, bias: -0.5, base });
        self.lifted.insert((sig, layer), i);
        i
    }

    /// Adds `w · operand` to a weighted sum over the inputs of `layer`.
    /// A negated input contributes `w · (1 - x)`.
    fn feed(&mut self, layer: usize, op: Operand, w: f64, metric: bool, spec: &mut Spec) {
        match op {
            Operand::Const(c) => spec.bias += if c { w } else { 0.0 },
            Operand::Sig(sig, negated) => {
                let i = self.lift(sig, layer - 1);
                let w = if negated {
                    spec.bias += w;
                    -w
                } else {
                    w
                };
                match spec.inputs.iter_mut().find(|(j, _, _)| *j == i) {
                    Some(entry) if metric => entry.2 += w,
                    Some(entry) => entry.1 += w,
                    None if metric => spec.inputs.push((i, 0.0, w)),
                    None => spec.inputs.push((i, w, 0.0)),
                }
            }
        }
    }

    /// A filter over weighted operands, placed one layer above the deepest.
    fn node(&mut self, ops: &[(Operand, f64)], qual: f64, bias: f64, base: bool) -> Operand {
        let layer = 1 + ops.iter().map(|(o, _)| o.layer()).max().unwrap_or(0);
        let mut spec = Spec { inputs: Vec::new(), qual, bias, base };
        for &(op, w) in ops {
            self.feed(layer, op, w, false, &mut spec);
        }
        Operand::Sig(self.push(layer, spec), false)
    }

    /// `X ψ` or `WX ψ`: a private copy of the operand whose base is the
    /// end-of-trace value of the next-step operator, read through a metric
    /// weight.
    fn next(&mut self, operand: Operand, weak: bool) -> Operand {
        let copy = self.node(&[(operand, 1.0)], 0.0, -0.5, weak);
        let layer = copy.layer() + 1;
        let mut spec = Spec { inputs: Vec::new(), qual: 0.0, bias: -0.5, base: false };
        self.feed(layer, copy, 1.0, true, &mut spec);
        Operand::Sig(self.push(layer, spec), false)
    }

    fn build(&mut self, f: &Formula) -> Operand {
        if let Some(&op) = self.memo.get(f) {
            return op;
        }
        let op = match f {
            Formula::True => Operand::Const(true),
            Formula::False => Operand::Const(false),
            Formula::Prop(j) => Operand::Sig((0, *j), false),
            Formula::Not(g) => self.build(g).negate(),
            Formula::And(a, b) => {
                let (a, b) = (self.build(a), self.build(b));
                self.node(&[(a, 1.0), (b, 1.0)], 0.0, -1.5, false)
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.build(a), self.build(b));
                self.node(&[(a, 1.0), (b, 1.0)], 0.0, -0.5, false)
            }
            Formula::Until(a, b) => {
                let (a, b) = (self.build(a), self.build(b));
                self.node(&[(a, 1.0), (b, 2.0)], 1.0, -1.5, false)
            }
            Formula::WeakUntil(a, b) => {
                let (a, b) = (self.build(a), self.build(b));
                self.node(&[(a, 1.0), (b, 2.0)], 1.0, -1.5, true)
            }
            Formula::Release(a, b) => {
                let (a, b) = (self.build(a), self.build(b));
                self.node(&[(a, 1.0), (b, 2.0)], 1.0, -2.5, true)
            }
            Formula::Eventually(a) => {
                let a = self.build(a);
                self.node(&[(a, 1.0)], 1.0, -0.5, false)
            }
            Formula::Globally(a) => {
                let a = self.build(a);
                self.node(&[(a, 1.0)], 1.0, -1.5, true)
            }
            Formula::Next(a) => {
                let a = self.build(a);
                self.next(a, false)
            }
            Formula::WeakNext(a) => {
                let a = self.build(a);
                self.next(a, true)
            }
        };
        self.memo.insert(f.clone(), op);
        op
    }
}

/// A network whose hard-mode output at every timestep equals the truth
/// value of `f` there. Propositions index the network inputs.
pub fn teacher_network(f: &Formula, n_props: usize) -> Result<Network, NeuralError> {
    if n_props == 0 {
        return Err(NeuralError::BadArchitecture("no input propositions".into()));
    }
    if let Some(j) = f.max_prop().filter(|&j| j >= n_props) {
        return Err(NeuralError::Unsupported(format!("proposition {j} with {n_props} inputs")));
    }
    let mut b = Builder { layers: Vec::new(), bases: HashMap::new(), lifted: HashMap::new(), memo: HashMap::new() };
    for j in 0..n_props {
        b.bases.insert((0, j), false);
    }
    let root = b.build(f);
    // The output must be a fresh, non-negated filter alone in the top layer.
    let root = match root {
        Operand::Sig(sig, false) if sig.0 > 0 && b.layers[sig.0 - 1].len() == 1 && sig.0 == b.layers.len() => sig,
        op => match b.node(&[(op, 1.0)], 0.0, -0.5, false) {
            Operand::Sig(sig, _) => sig,
            Operand::Const(_) => unreachable!("node always yields a signal"),
        },
    };
    debug_assert_eq!(root.0, b.layers.len());

    let mut layers = Vec::with_capacity(b.layers.len());
    let mut width = n_props;
    for (l, specs) in b.layers.iter().enumerate() {
        let filters = specs
            .iter()
            .map(|s| {
                let mut w = FilterWeights::zeros(width);
                for &(i, p, m) in &s.inputs {
                    w.prop[i] += p;
                    w.metric[i] += m;
                }
                w.qual = s.qual;
                w.bias = s.bias;
                w.out_base = if s.base { HIGH } else { LOW };
                w
            })
            .collect();
        let input_base = if l == 0 { vec![LOW; n_props] } else { Vec::new() };
        layers.push(Layer { filters, input_base });
        width = specs.len();
    }
    let net = Network { n_props, layers, beta: 1.0, alpha: 0.0, qualitative: f.is_qualitative() };
    net.validate()?;
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Trace;
    use crate::ltl::{parse, truth_vector, PropSet};
    use crate::neural::Mode;

    fn check(text: &str, n: usize, max_len: usize) {
        let props = PropSet::alphabetic(n);
        let f = parse(text, &props).unwrap();
        let net = teacher_network(&f, n).unwrap();
        for t in Trace::enumerate_up_to(n, max_len) {
            let acts = net.forward(&t, Mode::Hard).unwrap();
            let out = &acts.layers.last().unwrap()[0];
            let want = truth_vector(&f, &t);
            for k in 0..t.len() {
                assert_eq!(out[k] == 1.0, want[k], "{text} at {k} on {:?}", t.steps());
            }
        }
    }

    #[test]
    fn single_operator_rows() {
        let props = PropSet::alphabetic(2);
        let until = teacher_network(&parse("a U b", &props).unwrap(), 2).unwrap();
        let f = &until.layers[0].filters[0];
        assert_eq!((f.prop.clone(), f.qual, f.bias, f.out_base), (vec![1.0, 2.0], 1.0, -1.5, LOW));
        let g = teacher_network(&parse("G a", &props).unwrap(), 2).unwrap();
        let f = &g.layers[0].filters[0];
        assert_eq!((f.prop[0], f.qual, f.bias, f.out_base), (1.0, 1.0, -1.5, HIGH));
        let ev = teacher_network(&parse("F a", &props).unwrap(), 2).unwrap();
        let f = &ev.layers[0].filters[0];
        assert_eq!((f.prop[0], f.qual, f.bias, f.out_base), (1.0, 1.0, -0.5, LOW));
    }

    #[test]
    fn exhaustive_fidelity() {
        for text in [
            "a U b",
            "a W b",
            "X a",
            "WX a",
            "F a",
            "G a",
            "a R b",
            "!a",
            "a",
            "true",
            "false",
            "a & !b",
            "(a U b) & F a",
            "X !a",
            "WX (a U b)",
            "G (a | X b)",
            "!(a U b)",
            "a U a",
            "a U !a",
            "F (b & X X a)",
            "WX WX b",
            "(G a) U (X b)",
        ] {
            check(text, 2, 4);
        }
    }

    #[test]
    fn figure_structure() {
        check("(a U b) & F c", 3, 3);
    }
}

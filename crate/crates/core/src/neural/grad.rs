//! Mean binary cross-entropy and its gradient by backpropagation through
//! time, in soft mode.

use super::{rectify, Mode, Network};
use crate::data::LabeledTrace;

/// Probability clamp for the log terms.
pub const EPSILON: f64 = 1e-7;

fn bce(p: f64, label: bool) -> f64 {
    let p = p.clamp(EPSILON, 1.0 - EPSILON);
    if label {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

/// Derivative of [`bce`] in `p`; zero where the clamp is active.
fn bce_slope(p: f64, label: bool) -> f64 {
    if !(EPSILON..=1.0 - EPSILON).contains(&p) {
        return 0.0;
    }
    if label {
        -1.0 / p
    } else {
        1.0 / (1.0 - p)
    }
}

/// Mean soft-mode loss over `batch`.
pub fn loss(net: &Network, batch: &[LabeledTrace]) -> f64 {
    let mut buf = Vec::new();
    let total: f64 = batch
        .iter()
        .map(|lt| {
            net.forward_into(&lt.trace, Mode::Soft, &mut buf);
            bce(buf.last().expect("layers")[0], lt.label)
        })
        .sum();
    total / batch.len().max(1) as f64
}

/// Mean loss over `batch` and its gradient, in [`Network::params`] order.
/// Metric-weight gradients are zero for qualitative networks.
pub fn gradients(net: &Network, batch: &[&LabeledTrace]) -> (f64, Vec<f64>) {
    let mut grads = vec![0.0; net.param_count()];
    let mut total = 0.0;
    let mut buf = Vec::new();
    let mut gbuf: Vec<Vec<f64>> = Vec::new();
    let scale = 1.0 / batch.len().max(1) as f64;
    let offsets = filter_offsets(net);
    for lt in batch {
        net.forward_into(&lt.trace, Mode::Soft, &mut buf);
        let p = buf.last().expect("layers")[0];
        total += bce(p, lt.label);
        let g = bce_slope(p, lt.label) * scale;
        if g != 0.0 {
            backward(net, &buf, &mut gbuf, g, lt.trace.len(), &offsets, &mut grads);
        }
    }
    (total * scale, grads)
}

/// Offset of each filter's first parameter, `[layer][filter]`.
fn filter_offsets(net: &Network) -> Vec<Vec<usize>> {
    let mut at = 0;
    net.layers
        .iter()
        .map(|layer| {
            at += layer.input_base.len();
            layer
                .filters
                .iter()
                .map(|f| {
                    let o = at;
                    at += 2 * f.width() + 3;
                    o
                })
                .collect()
        })
        .collect()
}

fn backward(
    net: &Network,
    buf: &[Vec<f64>],
    gbuf: &mut Vec<Vec<f64>>,
    g_out: f64,
    t_end: usize,
    offsets: &[Vec<usize>],
    grads: &mut [f64],
) {
    let len = t_end + 1;
    let beta = net.beta;
    gbuf.resize_with(buf.len(), Vec::new);
    for (g, b) in gbuf.iter_mut().zip(buf) {
        g.clear();
        g.resize(b.len(), 0.0);
    }
    *gbuf.last_mut().expect("layers").first_mut().expect("one filter") = g_out;

    for (l, layer) in net.layers.iter().enumerate().rev() {
        let input = &buf[l];
        let output = &buf[l + 1];
        let (lower, upper) = gbuf.split_at_mut(l + 1);
        let g_in = &mut lower[l];
        let g_seq_all = &mut upper[0];
        for (i, f) in layer.filters.iter().enumerate() {
            let width = f.width();
            let o = offsets[l][i];
            let (o_prop, o_metric) = (o, o + width);
            let (o_qual, o_bias, o_base) = (o + 2 * width, o + 2 * width + 1, o + 2 * width + 2);
            let q = rectify(f.qual, net.alpha, Mode::Soft);
            let dq = if f.qual >= 0.0 { 1.0 } else { net.alpha };
            let out = &output[i * len..(i + 1) * len];
            let g_seq = &mut g_seq_all[i * len..(i + 1) * len];
            for t in 0..t_end {
                let g = g_seq[t];
                if g == 0.0 {
                    continue;
                }
                let s = out[t];
                let gz = g * beta * s * (1.0 - s);
                grads[o_bias] += gz;
                grads[o_qual] += gz * dq * out[t + 1];
                g_seq[t + 1] += gz * q;
                for j in 0..width {
                    let x = &input[j * len..(j + 1) * len];
                    grads[o_prop + j] += gz * x[t];
                    g_in[j * len + t] += gz * f.prop[j];
                    if !net.qualitative {
                        grads[o_metric + j] += gz * x[t + 1];
                        g_in[j * len + t + 1] += gz * f.metric[j];
                    }
                }
            }
            let s = out[t_end];
            grads[o_base] += g_seq[t_end] * beta * s * (1.0 - s);
        }
    }
    // Raw-input base values live at the front of the parameter vector.
    for j in 0..net.n_props {
        let s = buf[0][j * len + t_end];
        grads[j] += gbuf[0][j * len + t_end] * beta * s * (1.0 - s);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{random_trace, Trace};
    use crate::seed;
    use rand::Rng;

    fn batch(n_props: usize, seed_value: u64) -> Vec<LabeledTrace> {
        let mut rng = seed::rng(seed_value);
        (0..6)
            .map(|_| {
                let len = rng.gen_range(1..=6);
                LabeledTrace { trace: random_trace(n_props, len, &mut rng).unwrap(), label: rng.gen() }
            })
            .collect()
    }

    /// Central differences on the loss.
    fn numeric(net: &Network, data: &[LabeledTrace], h: f64) -> Vec<f64> {
        let p = net.params();
        (0..p.len())
            .map(|k| {
                let mut probe = net.clone();
                let mut q = p.clone();
                q[k] = p[k] + h;
                probe.set_params(&q);
                let up = loss(&probe, data);
                q[k] = p[k] - h;
                probe.set_params(&q);
                let down = loss(&probe, data);
                (up - down) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn matches_finite_differences() {
        for s in 0..6u64 {
            let mut rng = seed::rng(100 + s);
            let arch: &[usize] = match s % 3 {
                0 => &[1],
                1 => &[3, 1],
                _ => &[2, 3, 1],
            };
            let mut net = Network::random(2, arch, false, &mut rng).unwrap();
            net.beta = rng.gen_range(0.5..3.0);
            let data = batch(2, s);
            let refs: Vec<&LabeledTrace> = data.iter().collect();
            let (l, g) = gradients(&net, &refs);
            assert!((l - loss(&net, &data)).abs() < 1e-12);
            let n = numeric(&net, &data, 1e-4);
            for (k, (a, b)) in g.iter().zip(&n).enumerate() {
                let rel = (a - b).abs() / a.abs().max(b.abs()).max(1e-7);
                assert!(rel < 1e-4, "param {k}: analytic {a} numeric {b}");
            }
        }
    }

    #[test]
    fn half_probability_gives_ln2() {
        let mut net = Network::random(1, &[1], false, &mut seed::rng(0)).unwrap();
        let f = &mut net.layers[0].filters[0];
        f.prop = vec![0.0];
        f.metric = vec![0.0];
        f.qual = 0.0;
        f.bias = 0.0;
        let data = vec![LabeledTrace { trace: Trace::new(1, vec![1, 0]).unwrap(), label: true }];
        assert!((loss(&net, &data) - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn symmetric_inputs_get_equal_gradients() {
        let mut net = Network::random(2, &[1], false, &mut seed::rng(0)).unwrap();
        net.set_params(&vec![0.0; net.param_count()]);
        // Every trace appears with its two propositions swapped.
        let swap = |s: u32| ((s & 1) << 1) | ((s >> 1) & 1);
        let mut data = Vec::new();
        for lt in batch(2, 9) {
            let swapped = Trace::new(2, lt.trace.steps().iter().map(|&s| swap(s)).collect()).unwrap();
            data.push(LabeledTrace { trace: swapped, label: lt.label });
            data.push(lt);
        }
        let refs: Vec<&LabeledTrace> = data.iter().collect();
        let (_, g) = gradients(&net, &refs);
        // Layout: input bases [0, 1], then prop [2, 3].
        assert!((g[2] - g[3]).abs() < 1e-12);
    }

    #[test]
    fn qualitative_networks_have_no_metric_gradient() {
        let net = Network::random(2, &[2, 1], true, &mut seed::rng(4)).unwrap();
        let data = batch(2, 4);
        let refs: Vec<&LabeledTrace> = data.iter().collect();
        let (_, g) = gradients(&net, &refs);
        let offsets = filter_offsets(&net);
        for (l, layer) in net.layers.iter().enumerate() {
            for (i, f) in layer.filters.iter().enumerate() {
                let o = offsets[l][i] + f.width();
                assert!(g[o..o + f.width()].iter().all(|&x| x == 0.0));
            }
        }
    }
}

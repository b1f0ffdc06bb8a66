//! Candidate behaviors as bit vectors: one word per trace, bit `t` set when
//! the candidate holds at step `t`.

use std::rc::Rc;

use super::BaselineError;
use crate::data::Dataset;

pub(super) type Sig = Rc<[u64]>;

pub(super) struct Table<'a> {
    data: &'a Dataset,
    lens: Vec<usize>,
    masks: Vec<u64>,
}

impl<'a> Table<'a> {
    pub(super) fn new(data: &'a Dataset) -> Result<Self, BaselineError> {
        let lens: Vec<usize> = data.traces.iter().map(|lt| lt.trace.len()).collect();
        if let Some(&len) = lens.iter().find(|&&l| l > 64) {
            return Err(BaselineError::TraceTooLong(len));
        }
        let masks = lens.iter().map(|&l| if l == 64 { u64::MAX } else { (1u64 << l) - 1 }).collect();
        Ok(Table { data, lens, masks })
    }

    pub(super) fn n_props(&self) -> usize {
        self.data.width()
    }

    pub(super) fn labels(&self) -> Vec<bool> {
        self.data.traces.iter().map(|lt| lt.label).collect()
    }

    pub(super) fn prop(&self, j: usize) -> Sig {
        self.data
            .traces
            .iter()
            .map(|lt| (0..lt.trace.len()).filter(|&t| lt.trace.holds(t, j)).fold(0u64, |w, t| w | 1 << t))
            .collect()
    }

    fn map(&self, x: &Sig, f: impl Fn(u64, usize, u64) -> u64) -> Sig {
        x.iter().enumerate().map(|(k, &w)| f(w, self.lens[k], self.masks[k])).collect()
    }

    fn zip(&self, x: &Sig, y: &Sig, f: impl Fn(u64, u64, usize, u64) -> u64) -> Sig {
        x.iter().zip(y.iter()).enumerate().map(|(k, (&a, &b))| f(a, b, self.lens[k], self.masks[k])).collect()
    }

    pub(super) fn not(&self, x: &Sig) -> Sig {
        self.map(x, |w, _, mask| !w & mask)
    }

    pub(super) fn and(&self, x: &Sig, y: &Sig) -> Sig {
        self.zip(x, y, |a, b, _, _| a & b)
    }

    pub(super) fn or(&self, x: &Sig, y: &Sig) -> Sig {
        self.zip(x, y, |a, b, _, _| a | b)
    }

    pub(super) fn next(&self, x: &Sig, weak: bool) -> Sig {
        self.map(x, |w, len, _| (w >> 1) | if weak { 1 << (len - 1) } else { 0 })
    }

    pub(super) fn eventually(&self, x: &Sig) -> Sig {
        self.map(x, |mut w, _, mask| {
            for shift in [1, 2, 4, 8, 16, 32] {
                w |= w >> shift;
            }
            w & mask
        })
    }

    pub(super) fn globally(&self, x: &Sig) -> Sig {
        self.map(x, |w, _, mask| {
            let mut v = !w & mask;
            for shift in [1, 2, 4, 8, 16, 32] {
                v |= v >> shift;
            }
            !v & mask
        })
    }

    pub(super) fn until(&self, x: &Sig, y: &Sig, weak: bool) -> Sig {
        self.zip(x, y, |a, b, len, _| {
            let mut carry = weak;
            let mut out = 0u64;
            for t in (0..len).rev() {
                carry = (b >> t & 1 == 1) || (a >> t & 1 == 1 && carry);
                out |= (carry as u64) << t;
            }
            out
        })
    }

    pub(super) fn release(&self, x: &Sig, y: &Sig) -> Sig {
        self.zip(x, y, |a, b, len, _| {
            let mut carry = true;
            let mut out = 0u64;
            for t in (0..len).rev() {
                carry = (b >> t & 1 == 1) && (a >> t & 1 == 1 || carry);
                out |= (carry as u64) << t;
            }
            out
        })
    }
}

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::DataError;

/// Largest supported proposition count; assignments are stored as bitmasks.
pub const MAX_WIDTH: usize = 16;

/// A nonempty finite sequence of truth assignments. Bit `j` of a step is the
/// value of proposition `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Trace {
    width: usize,
    steps: Vec<u32>,
}

impl Trace {
    pub fn new(width: usize, steps: Vec<u32>) -> Result<Self, DataError> {
        if steps.is_empty() {
            return Err(DataError::EmptyTrace);
        }
        if width > MAX_WIDTH {
            return Err(DataError::TooManyPropositions { width, max: MAX_WIDTH });
        }
        if let Some(&bad) = steps.iter().find(|&&s| (s as u64) >> width != 0) {
            return Err(DataError::AssignmentWidth { assignment: bad, width });
        }
        Ok(Trace { width, steps })
    }

    pub fn from_bools(steps: Vec<Vec<bool>>) -> Result<Self, DataError> {
        let width = steps.first().map_or(0, Vec::len);
        let mut packed = Vec::with_capacity(steps.len());
        for (t, s) in steps.iter().enumerate() {
            if s.len() != width {
                return Err(DataError::RaggedStep { t, expected: width, found: s.len() });
            }
            packed.push(s.iter().enumerate().fold(0u32, |acc, (j, &b)| acc | ((b as u32) << j)));
        }
        Trace::new(width, packed)
    }

    pub fn to_bools(&self) -> Vec<Vec<bool>> {
        (0..self.len()).map(|t| (0..self.width).map(|j| self.holds(t, j)).collect()).collect()
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    /// Always false for constructed traces; present for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn steps(&self) -> &[u32] {
        &self.steps
    }

    pub fn step(&self, t: usize) -> u32 {
        self.steps[t]
    }

    pub fn holds(&self, t: usize, j: usize) -> bool {
        self.steps[t] >> j & 1 == 1
    }

    /// Repeats the last assignment until the trace has `target` steps.
    pub fn pad_stutter(&self, target: usize) -> Result<Trace, DataError> {
        if self.len() > target {
            return Err(DataError::TraceTooLong { len: self.len(), target });
        }
        let mut steps = self.steps.clone();
        steps.resize(target, *self.steps.last().expect("traces are nonempty"));
        Ok(Trace { width: self.width, steps })
    }

    /// Every trace of exactly `len` steps over `width` propositions.
    pub fn enumerate(width: usize, len: usize) -> impl Iterator<Item = Trace> {
        let alphabet = 1u64 << width;
        let total = alphabet.checked_pow(len as u32).expect("enumeration too large");
        (0..total).map(move |mut code| {
            let steps = (0..len)
                .map(|_| {
                    let s = (code % alphabet) as u32;
                    code /= alphabet;
                    s
                })
                .collect();
            Trace { width, steps }
        })
    }

    /// Every trace with between 1 and `max_len` steps.
    pub fn enumerate_up_to(width: usize, max_len: usize) -> impl Iterator<Item = Trace> {
        (1..=max_len).flat_map(move |len| Trace::enumerate(width, len))
    }
}

/// A trace whose bits are independent fair coin flips.
pub fn random_trace(width: usize, len: usize, rng: &mut impl Rng) -> Result<Trace, DataError> {
    if len == 0 {
        return Err(DataError::EmptyTrace);
    }
    let mask = ((1u64 << width) - 1) as u32;
    Trace::new(width, (0..len).map(|_| rng.gen::<u32>() & mask).collect())
}

/// [`random_trace`] driven by its own seeded RNG.
pub fn random_trace_seeded(width: usize, len: usize, seed: u64) -> Result<Trace, DataError> {
    random_trace(width, len, &mut crate::seed::rng(seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_malformed_traces() {
        assert_eq!(Trace::new(2, vec![]), Err(DataError::EmptyTrace));
        assert!(matches!(Trace::new(1, vec![2]), Err(DataError::AssignmentWidth { .. })));
        assert!(matches!(
            Trace::from_bools(vec![vec![true], vec![true, false]]),
            Err(DataError::RaggedStep { t: 1, .. })
        ));
        assert_eq!(random_trace_seeded(3, 0, 1), Err(DataError::EmptyTrace));
    }

    #[test]
    fn stutter_padding() {
        let t = Trace::from_bools(vec![vec![true]]).unwrap();
        assert_eq!(t.pad_stutter(3).unwrap().to_bools(), vec![vec![true]; 3]);
        let u = Trace::new(2, vec![1, 2, 3]).unwrap();
        assert_eq!(u.pad_stutter(3).unwrap(), u);
        assert_eq!(u.pad_stutter(2), Err(DataError::TraceTooLong { len: 3, target: 2 }));
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(Trace::enumerate(2, 3).count(), 64);
        assert_eq!(Trace::enumerate_up_to(2, 4).count(), 4 + 16 + 64 + 256);
    }

    #[test]
    fn random_traces_are_reproducible_and_fair() {
        assert_eq!(random_trace_seeded(3, 15, 9), random_trace_seeded(3, 15, 9));
        let mut rng = crate::seed::rng(42);
        let mut ones = 0u64;
        let mut counts = [0u32; 8];
        let draws = 100_000;
        for _ in 0..draws {
            let t = random_trace(3, 1, &mut rng).unwrap();
            ones += t.step(0).count_ones() as u64;
            counts[t.step(0) as usize] += 1;
        }
        let freq = ones as f64 / (3 * draws) as f64;
        assert!((freq - 0.5).abs() < 0.01, "bit frequency {freq}");
        assert!(counts.iter().all(|&c| (c as f64 / draws as f64 - 0.125).abs() < 0.01));
    }
}

// SPDX-License-Identifier: Apache-2.0

//! Simulation-based equivalence checks between combinational functions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Anything that maps 64 input patterns to 64 output patterns per call.
pub trait WordEval {
    fn num_inputs(&self) -> usize;
    fn eval_comb(&self, inputs: &[u64]) -> Vec<u64>;
}

impl WordEval for crate::netlist::Simulator {
    fn num_inputs(&self) -> usize {
        crate::netlist::Simulator::num_inputs(self)
    }

    fn eval_comb(&self, inputs: &[u64]) -> Vec<u64> {
        self.eval_words(inputs, &[]).0
    }
}

/// Input words for the 64 consecutive patterns starting at `base`; input `j`
/// takes bit `j` of the pattern index.
pub fn pattern_words(n_inputs: usize, base: u64) -> Vec<u64> {
    (0..n_inputs)
        .map(|j| {
            let mut w = 0u64;
            for lane in 0..64u64 {
                w |= ((base + lane) >> j & 1) << lane;
            }
            w
        })
        .collect()
}

/// Bits of pattern `index` in input order.
pub fn pattern_bits(n_inputs: usize, index: u64) -> Vec<bool> {
    (0..n_inputs).map(|j| index >> j & 1 == 1).collect()
}

fn lane_bits(words: &[u64], lane: u32) -> Vec<bool> {
    words.iter().map(|w| w >> lane & 1 == 1).collect()
}

fn first_mismatch(words: &[u64], a: &[u64], b: &[u64], valid: u64) -> Option<Vec<bool>> {
    let diff = a.iter().zip(b).fold(0u64, |acc, (x, y)| acc | (x ^ y)) & valid;
    (diff != 0).then(|| lane_bits(words, diff.trailing_zeros()))
}

/// Exhaustive comparison over all `2^n` input patterns; returns a
/// distinguishing input when the functions differ.
pub fn exhaustive_mismatch<A: WordEval, B: WordEval>(a: &A, b: &B) -> Option<Vec<bool>> {
    let n = a.num_inputs();
    assert_eq!(n, b.num_inputs(), "input counts differ");
    assert!(n <= 30, "exhaustive check over {n} inputs");
    let total = 1u64 << n;
    let mut base = 0u64;
    while base < total {
        let words = pattern_words(n, base);
        let valid = if total - base >= 64 {
            !0
        } else {
            (1u64 << (total - base)) - 1
        };
        if let Some(x) = first_mismatch(&words, &a.eval_comb(&words), &b.eval_comb(&words), valid) {
            return Some(x);
        }
        base += 64;
    }
    None
}

/// Random-sample comparison; `samples` is rounded up to a multiple of 64.
pub fn sampled_mismatch<A: WordEval, B: WordEval>(a: &A, b: &B, samples: usize, seed: u64) -> Option<Vec<bool>> {
    let n = a.num_inputs();
    assert_eq!(n, b.num_inputs(), "input counts differ");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples.div_ceil(64) {
        let words: Vec<u64> = (0..n).map(|_| rng.gen()).collect();
        if let Some(x) = first_mismatch(&words, &a.eval_comb(&words), &b.eval_comb(&words), !0) {
            return Some(x);
        }
    }
    None
}

/// Exhaustive when the input count is at most `exhaustive_limit`, otherwise
/// `samples` random patterns.
pub fn find_mismatch<A: WordEval, B: WordEval>(
    a: &A,
    b: &B,
    exhaustive_limit: usize,
    samples: usize,
    seed: u64,
) -> Option<Vec<bool>> {
    if a.num_inputs() <= exhaustive_limit {
        exhaustive_mismatch(a, b)
    } else {
        sampled_mismatch(a, b, samples, seed)
    }
}

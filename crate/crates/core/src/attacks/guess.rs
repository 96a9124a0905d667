// SPDX-License-Identifier: Apache-2.0

//! Key-guessing baselines.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{bits_matched, key_to_string, AttackError, AttackId, AttackRecord, AttackStatus, Oracle};
use crate::cnf::tseitin_size;
use crate::equiv::WordEval;
use crate::fabric::LockedNetlist;

/// Oracle samples scored by the hill climber.
pub const HILLCLIMB_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuessMode {
    /// Best of `trials` uniform random keys.
    Random,
    /// Greedy single-bit flips scored against oracle samples.
    HillClimb,
}

#[derive(Debug, Clone)]
pub struct GuessOutcome {
    pub record: AttackRecord,
    pub key: Vec<bool>,
    /// Bit agreement of every random trial, or of the final key.
    pub scores: Vec<usize>,
    /// Sampled output disagreement after the start and every accepted flip.
    pub trace: Vec<u32>,
}

fn disagreement(locked: &LockedNetlist, key: &[bool], inputs: &[Vec<u64>], want: &[Vec<u64>]) -> u32 {
    let keyed = locked.keyed(key);
    inputs
        .iter()
        .zip(want)
        .enumerate()
        .map(|(chunk, (words, want))| {
            let lanes = (HILLCLIMB_SAMPLES - chunk * 64).min(64);
            let valid = if lanes == 64 { !0 } else { (1u64 << lanes) - 1 };
            keyed
                .eval_comb(words)
                .iter()
                .zip(want)
                .map(|(a, b)| ((a ^ b) & valid).count_ones())
                .sum::<u32>()
        })
        .sum()
}

/// Key-guess baseline scored by positional agreement with `true_key`.
/// `HillClimb` needs an oracle and is then marked as oracle assisted.
pub fn guess_attack(
    locked: &LockedNetlist,
    true_key: &[bool],
    trials: usize,
    seed: u64,
    mode: GuessMode,
    oracle: Option<&mut Oracle>,
) -> Result<GuessOutcome, AttackError> {
    if trials == 0 {
        return Err(AttackError::InvalidParam("trials must be at least 1".into()));
    }
    let len = locked.key_len();
    if true_key.len() != len {
        return Err(crate::fabric::FabricError::KeyLength {
            expected: len,
            got: true_key.len(),
        }
        .into());
    }
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_key = |rng: &mut ChaCha8Rng| -> Vec<bool> { (0..len).map(|_| rng.gen()).collect() };
    let id = match mode {
        GuessMode::Random => AttackId::Random,
        GuessMode::HillClimb => AttackId::HillClimb,
    };
    let mut record = AttackRecord::new(locked.netlist().name(), id, len);
    let (key, scores, trace) = match mode {
        GuessMode::Random => {
            let mut best: Option<(usize, Vec<bool>)> = None;
            let mut scores = Vec::with_capacity(trials);
            for _ in 0..trials {
                let k = random_key(&mut rng);
                let s = bits_matched(&k, true_key);
                scores.push(s);
                if best.as_ref().is_none_or(|(b, _)| s > *b) {
                    best = Some((s, k));
                }
            }
            (best.unwrap().1, scores, vec![])
        }
        GuessMode::HillClimb => {
            let oracle = oracle.ok_or_else(|| AttackError::InvalidParam("hill climbing needs an oracle".into()))?;
            oracle.check_ports(locked)?;
            record.oracle_assisted = true;
            let n = locked.num_data_inputs();
            let chunks = HILLCLIMB_SAMPLES.div_ceil(64);
            let inputs: Vec<Vec<u64>> = (0..chunks).map(|_| (0..n).map(|_| rng.gen()).collect()).collect();
            let want: Vec<Vec<u64>> = inputs
                .iter()
                .enumerate()
                .map(|(c, w)| oracle.query_words(w, (HILLCLIMB_SAMPLES - c * 64).min(64) as u32))
                .collect();
            record.oracle_queries = Some(HILLCLIMB_SAMPLES as u64);
            let mut key = random_key(&mut rng);
            let mut cur = disagreement(locked, &key, &inputs, &want);
            let mut trace = vec![cur];
            for _ in 0..trials {
                let b = rng.gen_range(0..len);
                key[b] = !key[b];
                let d = disagreement(locked, &key, &inputs, &want);
                if d <= cur {
                    cur = d;
                    trace.push(d);
                } else {
                    key[b] = !key[b];
                }
            }
            let s = bits_matched(&key, true_key);
            (key, vec![s], trace)
        }
    };
    let (v, c) = tseitin_size(locked.netlist());
    record.v = v;
    record.c = c;
    record.status = AttackStatus::Guess;
    record.bits_matched = Some(bits_matched(&key, true_key));
    record.recovered_key = Some(key_to_string(&key));
    record.time_s = started.elapsed().as_secs_f64();
    Ok(GuessOutcome {
        record,
        key,
        scores,
        trace,
    })
}

/// Mean positional agreement as a fraction of the key length.
pub fn mean_agreement(scores: &[usize], len: usize) -> f64 {
    scores.iter().sum::<usize>() as f64 / (scores.len() * len) as f64
}

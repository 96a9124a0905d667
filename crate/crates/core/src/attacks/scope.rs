// SPDX-License-Identifier: Apache-2.0

//! Oracle-less key-bit inference from cofactor complexity.

use std::time::Instant;

use super::simplify::{Signature, Simplifier};
use super::{AttackId, AttackRecord, AttackStatus};
use crate::cnf::tseitin_size;
use crate::fabric::LockedNetlist;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScopeOptions {
    /// Minimum relative difference between the two cofactors' gate
    /// reductions for a bit to be decided.
    pub theta: f64,
}

impl Default for ScopeOptions {
    fn default() -> Self {
        ScopeOptions { theta: 0.25 }
    }
}

#[derive(Debug, Clone)]
pub struct ScopeOutcome {
    pub record: AttackRecord,
    /// `None` for undecided bits.
    pub guesses: Vec<Option<bool>>,
    pub cope_percent: f64,
    /// Fraction of decided bits equal to the true key, when one was given
    /// and at least one bit was decided.
    pub accuracy: Option<f64>,
    pub signatures: Vec<(Signature, Signature)>,
}

fn decide(base: &Signature, s0: &Signature, s1: &Signature, theta: f64) -> Option<bool> {
    let c0 = s0.const_outputs > base.const_outputs;
    let c1 = s1.const_outputs > base.const_outputs;
    if c0 != c1 {
        // The cofactor that kills an output is the wrong one.
        return Some(c0);
    }
    let r0 = base.gates as f64 - s0.gates as f64;
    let r1 = base.gates as f64 - s1.gates as f64;
    let hi = r0.max(r1);
    if hi <= 0.0 || (hi - r0.min(r1)) / hi < theta {
        return None;
    }
    Some(r0 > r1)
}

/// For every key bit, simplifies the locked netlist under both values of the
/// bit and compares the results. A bit is decided when exactly one value
/// turns an output constant, or when one value removes markedly more logic;
/// the guess is the other value.
pub fn scope_attack(locked: &LockedNetlist, true_key: Option<&[bool]>, opts: &ScopeOptions) -> ScopeOutcome {
    let started = Instant::now();
    let net = locked.netlist();
    let simp = Simplifier::new(net);
    let base = simp.run(&vec![None; net.inputs().len()]);
    let base_sig = base.signature();
    let mut guesses = Vec::with_capacity(locked.key_len());
    let mut signatures = Vec::with_capacity(locked.key_len());
    for i in 0..locked.key_len() {
        let pos = locked.key_position(i);
        let s0 = simp.cofactor(&base, pos, false).signature();
        let s1 = simp.cofactor(&base, pos, true).signature();
        guesses.push(decide(&base_sig, &s0, &s1, opts.theta));
        signatures.push((s0, s1));
    }
    let decided: Vec<(usize, bool)> = guesses
        .iter()
        .enumerate()
        .filter_map(|(i, g)| g.map(|b| (i, b)))
        .collect();
    let k = locked.key_len();
    let cope_percent = if k == 0 {
        0.0
    } else {
        100.0 * decided.len() as f64 / k as f64
    };
    let accuracy = true_key.and_then(|t| {
        (!decided.is_empty()).then(|| decided.iter().filter(|&&(i, b)| t[i] == b).count() as f64 / decided.len() as f64)
    });
    let (v, c) = tseitin_size(net);
    let mut record = AttackRecord::new(net.name(), AttackId::Scope, k);
    record.v = v;
    record.c = c;
    record.status = AttackStatus::Guess;
    record.cope_percent = Some(cope_percent);
    record.guesses = Some(
        guesses
            .iter()
            .map(|g| match g {
                Some(true) => '1',
                Some(false) => '0',
                None => 'x',
            })
            .collect(),
    );
    if let Some(t) = true_key {
        record.bits_matched = Some(decided.iter().filter(|&&(i, b)| t[i] == b).count());
    }
    record.time_s = started.elapsed().as_secs_f64();
    ScopeOutcome {
        record,
        guesses,
        cope_percent,
        accuracy,
        signatures,
    }
}

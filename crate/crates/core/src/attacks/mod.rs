// SPDX-License-Identifier: Apache-2.0

//! Attacks on locked netlists.
//!
//! Oracle-guided attacks see the original circuit only through [`Oracle`],
//! which answers input/output queries and counts them.

mod dip;
mod guess;
mod keygates;
mod scope;
pub mod simplify;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dip::{appsat_attack, sat_attack, AppSatOptions, DipOutcome, SatAttackOptions};
pub use guess::{guess_attack, mean_agreement, GuessMode, GuessOutcome, HILLCLIMB_SAMPLES};
pub use keygates::insert_key_gates;
pub use scope::{scope_attack, ScopeOptions, ScopeOutcome};

use crate::cnf::{equivalence_miter, CnfError};
use crate::equiv::{exhaustive_mismatch, WordEval};
use crate::fabric::{FabricError, LockedNetlist};
use crate::netlist::{Netlist, Simulator};
use crate::sat::{self, Backend, Budget, SatError, Status};

/// Data-input count up to which keys are verified by exhaustive simulation.
pub const EXHAUSTIVE_LIMIT: usize = 16;

#[derive(Debug, Error)]
pub enum AttackError {
    #[error("port mismatch: {0}")]
    PortMismatch(String),
    #[error("netlist `{0}` is sequential; unroll it first")]
    Sequential(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("distinguishing input repeated at iteration {0}")]
    RepeatedDip(usize),
    #[error("candidate key failed verification: {0}")]
    Unverified(String),
    #[error("key verification ran out of budget")]
    VerifyTimeout,
    #[error(transparent)]
    Cnf(#[from] CnfError),
    #[error(transparent)]
    Sat(#[from] SatError),
    #[error(transparent)]
    Fabric(#[from] FabricError),
}

impl AttackError {
    /// True for errors that indicate a bug rather than bad input.
    pub fn is_soundness_violation(&self) -> bool {
        matches!(
            self,
            AttackError::RepeatedDip(_) | AttackError::Unverified(_) | AttackError::Sat(SatError::InvalidModel { .. })
        )
    }
}

/// Black-box access to the activated circuit.
pub struct Oracle {
    sim: Simulator,
    queries: u64,
}

impl Oracle {
    pub fn new(original: &Netlist) -> Result<Oracle, AttackError> {
        if !original.is_combinational() {
            return Err(AttackError::Sequential(original.name().to_string()));
        }
        Ok(Oracle {
            sim: Simulator::new(original),
            queries: 0,
        })
    }

    pub fn num_inputs(&self) -> usize {
        self.sim.num_inputs()
    }

    pub fn num_outputs(&self) -> usize {
        self.sim.num_outputs()
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    pub fn query(&mut self, input: &[bool]) -> Vec<bool> {
        assert_eq!(input.len(), self.num_inputs(), "oracle input width");
        self.queries += 1;
        self.sim.eval(input, &[]).0
    }

    /// Answers `lanes` queries packed one per bit lane.
    pub fn query_words(&mut self, input: &[u64], lanes: u32) -> Vec<u64> {
        assert_eq!(input.len(), self.num_inputs(), "oracle input width");
        assert!((1..=64).contains(&lanes));
        self.queries += u64::from(lanes);
        self.sim.eval_words(input, &[]).0
    }

    fn check_ports(&self, locked: &LockedNetlist) -> Result<(), AttackError> {
        check_ports(locked, self.num_inputs(), self.num_outputs())
    }
}

fn check_ports(locked: &LockedNetlist, n_in: usize, n_out: usize) -> Result<(), AttackError> {
    if !locked.netlist().is_combinational() {
        return Err(AttackError::Sequential(locked.netlist().name().to_string()));
    }
    if locked.num_data_inputs() != n_in || locked.netlist().outputs().len() != n_out {
        return Err(AttackError::PortMismatch(format!(
            "locked has {}/{} data inputs/outputs, reference has {n_in}/{n_out}",
            locked.num_data_inputs(),
            locked.netlist().outputs().len()
        )));
    }
    Ok(())
}

/// Attack identifiers. The ones without an engine here exist so that
/// externally reported results can share a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum AttackId {
    Sat,
    AppSat,
    Scope,
    Random,
    HillClimb,
    Atpg,
    Smt,
    DDip,
    Icy,
    Bbo,
}

impl AttackId {
    pub const ALL: [AttackId; 10] = [
        AttackId::Sat,
        AttackId::AppSat,
        AttackId::Scope,
        AttackId::Random,
        AttackId::HillClimb,
        AttackId::Atpg,
        AttackId::Smt,
        AttackId::DDip,
        AttackId::Icy,
        AttackId::Bbo,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AttackId::Sat => "SAT",
            AttackId::AppSat => "APP",
            AttackId::Scope => "SCOPE",
            AttackId::Random => "RANDOM",
            AttackId::HillClimb => "HILLCLIMB",
            AttackId::Atpg => "ATPG",
            AttackId::Smt => "SMT",
            AttackId::DDip => "D-DIP",
            AttackId::Icy => "ICY",
            AttackId::Bbo => "BBO",
        }
    }

    /// Whether this repository has an engine for the attack.
    pub fn is_implemented(self) -> bool {
        matches!(
            self,
            AttackId::Sat | AttackId::AppSat | AttackId::Scope | AttackId::Random | AttackId::HillClimb
        )
    }
}

impl fmt::Display for AttackId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AttackId {
    type Err = String;

    fn from_str(s: &str) -> Result<AttackId, String> {
        let norm = s.trim().to_ascii_uppercase();
        let alias = match norm.as_str() {
            "APPSAT" => "APP",
            "DDIP" => "D-DIP",
            "GUESS" => "RANDOM",
            other => other,
        };
        AttackId::ALL
            .into_iter()
            .find(|a| a.as_str() == alias)
            .ok_or_else(|| format!("unknown attack `{s}`"))
    }
}

impl TryFrom<String> for AttackId {
    type Error = String;

    fn try_from(s: String) -> Result<AttackId, String> {
        s.parse()
    }
}

impl From<AttackId> for String {
    fn from(a: AttackId) -> String {
        a.as_str().to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum AttackStatus {
    Broken,
    Timeout,
    Guess,
}

impl fmt::Display for AttackStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttackStatus::Broken => "BROKEN",
            AttackStatus::Timeout => "TIMEOUT",
            AttackStatus::Guess => "GUESS",
        })
    }
}

/// Result of one attack on one circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackRecord {
    pub circuit: String,
    pub attack: AttackId,
    #[serde(rename = "V")]
    pub v: usize,
    #[serde(rename = "C")]
    pub c: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub time_s: f64,
    pub status: AttackStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recovered_key: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bits_matched: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dip_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_queries: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_estimate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cope_percent: Option<f64>,
    /// Per-bit guesses as `0`, `1` or `x` for undecided.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guesses: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub oracle_assisted: bool,
    /// Tseitin clause count of the unlocked circuit, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline_clauses: Option<usize>,
}

impl AttackRecord {
    pub fn new(circuit: &str, attack: AttackId, k: usize) -> AttackRecord {
        AttackRecord {
            circuit: circuit.to_string(),
            attack,
            v: 0,
            c: 0,
            k,
            time_s: 0.0,
            status: AttackStatus::Guess,
            recovered_key: None,
            bits_matched: None,
            dip_count: None,
            oracle_queries: None,
            error_estimate: None,
            cope_percent: None,
            guesses: None,
            oracle_assisted: false,
            baseline_clauses: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }

    pub fn from_json(text: &str) -> Result<AttackRecord, serde_json::Error> {
        serde_json::from_str(text)
    }
}

pub fn key_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Positional agreement between two keys.
pub fn bits_matched(a: &[bool], b: &[bool]) -> usize {
    assert_eq!(a.len(), b.len(), "key lengths differ");
    a.iter().zip(b).filter(|(x, y)| x == y).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMethod {
    Exhaustive,
    Miter,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    pub equivalent: bool,
    pub method: VerifyMethod,
    /// A differing data input when not equivalent.
    pub witness: Option<Vec<bool>>,
}

/// Checks that `locked` under `key` computes the same function as `original`.
/// Exhaustive simulation up to [`EXHAUSTIVE_LIMIT`] data inputs, an
/// equivalence miter beyond.
pub fn verify_key(
    locked: &LockedNetlist,
    key: &[bool],
    original: &Netlist,
    budget: &Budget,
) -> Result<Verification, AttackError> {
    verify_key_with(&Backend::Embedded, locked, key, original, budget)
}

/// [`verify_key`] with the miter solved by `backend`.
pub fn verify_key_with(
    backend: &Backend,
    locked: &LockedNetlist,
    key: &[bool],
    original: &Netlist,
    budget: &Budget,
) -> Result<Verification, AttackError> {
    check_ports(locked, original.inputs().len(), original.outputs().len())?;
    if !original.is_combinational() {
        return Err(AttackError::Sequential(original.name().to_string()));
    }
    if key.len() != locked.key_len() {
        return Err(FabricError::KeyLength {
            expected: locked.key_len(),
            got: key.len(),
        }
        .into());
    }
    if locked.num_data_inputs() <= EXHAUSTIVE_LIMIT {
        let witness = exhaustive_mismatch(&locked.keyed(key), &Simulator::new(original));
        return Ok(Verification {
            equivalent: witness.is_none(),
            method: VerifyMethod::Exhaustive,
            witness,
        });
    }
    let keyed = locked.with_key(key)?;
    let miter = equivalence_miter(&keyed, original)?;
    let r = sat::solve_with(backend, &miter.formula, &[], budget)?;
    match r.status {
        Status::Unsat => Ok(Verification {
            equivalent: true,
            method: VerifyMethod::Miter,
            witness: None,
        }),
        Status::Sat => Ok(Verification {
            equivalent: false,
            method: VerifyMethod::Miter,
            witness: Some(miter.data_values(r.model.as_ref().expect("model"))),
        }),
        Status::Timeout => Err(AttackError::VerifyTimeout),
    }
}

/// Compares `key` against the oracle: exhaustively when the data width
/// allows, else on `samples` seeded random inputs. Returns a witness input on
/// mismatch.
pub(crate) fn oracle_mismatch(
    locked: &LockedNetlist,
    key: &[bool],
    oracle: &mut Oracle,
    samples: usize,
    seed: u64,
) -> Option<Vec<bool>> {
    let keyed = locked.keyed(key);
    let n = locked.num_data_inputs();
    let mut check = |words: &[u64], lanes: u32| -> Option<Vec<bool>> {
        let want = oracle.query_words(words, lanes);
        let got = keyed.eval_comb(words);
        let valid = if lanes == 64 { !0 } else { (1u64 << lanes) - 1 };
        let diff = want.iter().zip(&got).fold(0u64, |acc, (a, b)| acc | (a ^ b)) & valid;
        (diff != 0).then(|| {
            let lane = diff.trailing_zeros();
            words.iter().map(|w| w >> lane & 1 == 1).collect()
        })
    };
    if n <= EXHAUSTIVE_LIMIT {
        let total = 1u64 << n;
        let mut base = 0;
        while base < total {
            let lanes = (total - base).min(64) as u32;
            if let Some(w) = check(&crate::equiv::pattern_words(n, base), lanes) {
                return Some(w);
            }
            base += 64;
        }
        return None;
    }
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut left = samples;
    while left > 0 {
        let lanes = left.min(64) as u32;
        let words: Vec<u64> = (0..n).map(|_| rng.gen()).collect();
        if let Some(w) = check(&words, lanes) {
            return Some(w);
        }
        left -= lanes as usize;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn attack_ids_round_trip() {
        for a in AttackId::ALL {
            assert_eq!(a.as_str().parse::<AttackId>().unwrap(), a);
        }
        assert_eq!("Icy".parse::<AttackId>().unwrap(), AttackId::Icy);
        assert_eq!("appsat".parse::<AttackId>().unwrap(), AttackId::AppSat);
        assert!("nope".parse::<AttackId>().is_err());
    }

    #[test]
    fn record_json_field_names() {
        let mut r = AttackRecord::new("toy", AttackId::Sat, 8);
        r.status = AttackStatus::Broken;
        r.dip_count = Some(2);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for key in ["circuit", "attack", "V", "C", "K", "time_s", "status", "dip_count"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["status"], "BROKEN");
        assert_eq!(AttackRecord::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn oracle_counts_queries() {
        let net = crate::netlist::parse_bench("INPUT(a)\nOUTPUT(y)\ny = NOT(a)\n").unwrap();
        let mut o = Oracle::new(&net).unwrap();
        assert_eq!(o.query(&[true]), vec![false]);
        o.query_words(&[0b10], 2);
        assert_eq!(o.queries(), 3);
    }
}

// SPDX-License-Identifier: Apache-2.0

//! Distinguishing-input attacks: the exact SAT attack and its approximate
//! variant.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::simplify::{NodeKind, Simplified, Simplifier, Val};
use super::{bits_matched, key_to_string, oracle_mismatch, AttackError, AttackId, AttackRecord, AttackStatus, Oracle};
use crate::cnf::{build_miter, encode_gate, CnfFormula, Miter, MiterMode};
use crate::equiv::WordEval;
use crate::fabric::LockedNetlist;
use crate::netlist::GateKind;
use crate::sat::{Budget, Solver, Status};

#[derive(Debug, Clone)]
pub struct SatAttackOptions {
    pub time_limit: Option<Duration>,
    /// Random oracle samples used to check the final key when the data
    /// width is too large for exhaustive simulation.
    pub verify_samples: usize,
    pub seed: u64,
    /// Only used to fill in `bits_matched` after the attack has finished.
    pub true_key: Option<Vec<bool>>,
}

impl Default for SatAttackOptions {
    fn default() -> Self {
        SatAttackOptions {
            time_limit: None,
            verify_samples: 10_000,
            seed: 0,
            true_key: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AppSatOptions {
    pub base: SatAttackOptions,
    /// Check the candidate key every `r` distinguishing inputs.
    pub r: usize,
    /// Random samples per check.
    pub q: usize,
    /// Accepted empirical error rate.
    pub eps: f64,
}

impl Default for AppSatOptions {
    fn default() -> Self {
        AppSatOptions {
            base: SatAttackOptions::default(),
            r: 10,
            q: 50,
            eps: 0.01,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DipOutcome {
    pub record: AttackRecord,
    pub key: Option<Vec<bool>>,
    /// Distinguishing inputs in the order they were found.
    pub trace: Vec<Vec<bool>>,
}

/// Encodes a simplified copy of the locked circuit whose only free inputs are
/// key inputs, and constrains its outputs to `want`.
fn encode_constrained(f: &mut CnfFormula, simp: &Simplified, input_var: &[i32], n_in: usize, want: &[bool]) {
    let mut node_var = std::collections::HashMap::new();
    let lit = |v: Val, node_var: &std::collections::HashMap<u32, i32>| -> Option<i32> {
        match v {
            Val::Const(_) => None,
            Val::Lit(s, neg) => {
                let base = if (s as usize) < n_in {
                    input_var[s as usize]
                } else {
                    node_var[&s]
                };
                debug_assert!(base != 0, "free data input in a constrained copy");
                Some(if neg { -base } else { base })
            }
        }
    };
    for (s, node) in simp.live_nodes() {
        let y = f.new_var();
        let l: Vec<Option<i32>> = node.fanins().iter().map(|&v| lit(v, &node_var)).collect();
        match node.kind {
            NodeKind::And => encode_gate(f, GateKind::And, y, &[l[0].unwrap(), l[1].unwrap()]),
            NodeKind::Or => encode_gate(f, GateKind::Or, y, &[l[0].unwrap(), l[1].unwrap()]),
            NodeKind::Xor => encode_gate(f, GateKind::Xor, y, &[l[0].unwrap(), l[1].unwrap()]),
            NodeKind::Mux => {
                let s_lit = l[0].unwrap();
                match (node.ins[1], node.ins[2]) {
                    (Val::Const(false), _) => encode_gate(f, GateKind::And, y, &[s_lit, l[2].unwrap()]),
                    (Val::Const(true), _) => encode_gate(f, GateKind::Or, y, &[-s_lit, l[2].unwrap()]),
                    (_, Val::Const(false)) => encode_gate(f, GateKind::And, y, &[-s_lit, l[1].unwrap()]),
                    (_, Val::Const(true)) => encode_gate(f, GateKind::Or, y, &[s_lit, l[1].unwrap()]),
                    _ => encode_gate(f, GateKind::Mux2, y, &[s_lit, l[1].unwrap(), l[2].unwrap()]),
                }
            }
        }
        node_var.insert(s, y);
    }
    for (&v, &w) in simp.outputs().iter().zip(want) {
        match v {
            Val::Const(b) if b == w => {}
            Val::Const(_) => {
                let x = f.new_var();
                f.add_clause(vec![x]);
                f.add_clause(vec![-x]);
            }
            lit_val => {
                let l = lit(lit_val, &node_var).unwrap();
                f.add_clause(vec![if w { l } else { -l }]);
            }
        }
    }
}

/// Adds clauses `from..` of `f` to `solver`. Returns false if the deadline
/// passed first; the solver is then left partially fed.
fn feed(solver: &mut Solver, f: &CnfFormula, from: usize, deadline: Option<Instant>) -> bool {
    solver.reserve_vars(f.num_vars());
    for (i, c) in f.clauses()[from..].iter().enumerate() {
        if i % 4096 == 4095 && past(deadline) {
            return false;
        }
        solver.add_dimacs_clause(c);
    }
    true
}

fn past(deadline: Option<Instant>) -> bool {
    deadline.is_some_and(|d| Instant::now() >= d)
}

struct DipLoop<'a> {
    locked: &'a LockedNetlist,
    simp: Simplifier,
    miter: Miter,
    /// Miter plus constraints on both key copies.
    main: Solver,
    /// Constraints on the first key copy only.
    keys: Solver,
    input_var_a: Vec<i32>,
    input_var_b: Vec<i32>,
    deadline: Option<Instant>,
    trace: Vec<Vec<bool>>,
    seen: HashSet<Vec<bool>>,
    /// Set when feeding stopped at the deadline.
    expired: bool,
}

enum Step {
    Dip(Vec<bool>),
    Done,
    Timeout,
}

impl<'a> DipLoop<'a> {
    fn new(locked: &'a LockedNetlist, deadline: Option<Instant>) -> Result<DipLoop<'a>, AttackError> {
        let miter = build_miter(locked, MiterMode::Attack)?;
        let n_in = locked.netlist().inputs().len();
        let mut input_var_a = vec![0; n_in];
        let mut input_var_b = vec![0; n_in];
        for i in 0..locked.key_len() {
            input_var_a[locked.key_position(i)] = miter.key_a[i];
            input_var_b[locked.key_position(i)] = miter.key_b[i];
        }
        let mut main = Solver::new();
        let fed = feed(&mut main, &miter.formula, 0, deadline);

        Ok(DipLoop {
            locked,
            simp: Simplifier::new(locked.netlist()),
            miter,
            main,
            keys: Solver::new(),
            input_var_a,
            input_var_b,
            deadline,
            trace: Vec::new(),
            seen: HashSet::new(),
            expired: !fed,
        })
    }

    fn budget(&self) -> Budget {
        Budget::unlimited().with_deadline(self.deadline)
    }

    fn next(&mut self) -> Result<Step, AttackError> {
        if self.expired || past(self.deadline) {
            return Ok(Step::Timeout);
        }
        // Every data input has been observed, so any consistent key is correct.
        let n = self.locked.num_data_inputs();
        if n < usize::BITS as usize && self.trace.len() == 1 << n {
            return Ok(Step::Done);
        }
        match self.main.solve(&self.budget())? {
            Status::Timeout => Ok(Step::Timeout),
            Status::Unsat => Ok(Step::Done),
            Status::Sat => {
                let dip = self.miter.data_values(self.main.model());
                if !self.seen.insert(dip.clone()) {
                    return Err(AttackError::RepeatedDip(self.trace.len() + 1));
                }
                self.trace.push(dip.clone());
                Ok(Step::Dip(dip))
            }
        }
    }

    fn constrain(&mut self, dip: &[bool], out: &[bool]) {
        let n_in = self.locked.netlist().inputs().len();
        let mut fixed = vec![None; n_in];
        for (j, &b) in dip.iter().enumerate() {
            fixed[self.locked.data_position(j)] = Some(b);
        }
        let simp = self.simp.run(&fixed);
        let f = &mut self.miter.formula;
        let d = self.deadline;
        let start = f.num_clauses();
        encode_constrained(f, &simp, &self.input_var_a, n_in, out);
        let mut fed = feed(&mut self.main, f, start, d) && feed(&mut self.keys, f, start, d);
        let start = f.num_clauses();
        if fed {
            encode_constrained(f, &simp, &self.input_var_b, n_in, out);
            fed = feed(&mut self.main, f, start, d);
        }
        self.expired |= !fed;
    }

    /// A key consistent with every observed input/output pair.
    fn candidate(&mut self) -> Result<Option<Vec<bool>>, AttackError> {
        if self.expired {
            return Ok(None);
        }
        self.keys.reserve_vars(self.miter.formula.num_vars());
        match self.keys.solve(&self.budget())? {
            Status::Sat => Ok(Some(self.miter.key_a_values(self.keys.model()))),
            Status::Timeout => Ok(None),
            Status::Unsat => Err(AttackError::Unverified(
                "no key is consistent with the oracle responses".into(),
            )),
        }
    }
}

fn run(
    id: AttackId,
    locked: &LockedNetlist,
    oracle: &mut Oracle,
    opts: &SatAttackOptions,
    app: Option<&AppSatOptions>,
) -> Result<DipOutcome, AttackError> {
    oracle.check_ports(locked)?;
    let started = Instant::now();
    let queries_before = oracle.queries();
    let deadline = opts.time_limit.map(|t| started + t);
    let mut lp = DipLoop::new(locked, deadline)?;
    let mut record = AttackRecord::new(locked.netlist().name(), id, locked.key_len());
    record.oracle_assisted = true;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xa995);
    let mut key = None;
    let mut status = AttackStatus::Timeout;
    loop {
        match lp.next()? {
            Step::Timeout => break,
            Step::Done => {
                if let Some(k) = lp.candidate()? {
                    if let Some(w) = oracle_mismatch(locked, &k, oracle, opts.verify_samples, opts.seed) {
                        return Err(AttackError::Unverified(format!(
                            "differs from the oracle on input {}",
                            key_to_string(&w)
                        )));
                    }
                    key = Some(k);
                    status = AttackStatus::Broken;
                }
                break;
            }
            Step::Dip(dip) => {
                let out = oracle.query(&dip);
                lp.constrain(&dip, &out);
            }
        }
        let Some(app) = app else { continue };
        if lp.trace.len() % app.r != 0 {
            continue;
        }
        let Some(k) = lp.candidate()? else { break };
        let err = sampled_error(locked, &k, oracle, app.q, &mut rng);
        record.error_estimate = Some(err);
        if err > app.eps {
            continue;
        }
        if app.eps == 0.0 {
            if oracle_mismatch(locked, &k, oracle, opts.verify_samples, opts.seed).is_none() {
                key = Some(k);
                status = AttackStatus::Broken;
                break;
            }
            continue;
        }
        key = Some(k);
        status = AttackStatus::Guess;
        break;
    }
    if status == AttackStatus::Broken && app.is_some() {
        record.error_estimate = Some(0.0);
    }
    record.status = status;
    record.v = lp.miter.formula.num_vars();
    record.c = lp.miter.formula.num_clauses();
    record.time_s = started.elapsed().as_secs_f64();
    record.dip_count = Some(lp.trace.len());
    record.oracle_queries = Some(oracle.queries() - queries_before);
    if let Some(k) = &key {
        record.recovered_key = Some(key_to_string(k));
        if let Some(t) = &opts.true_key {
            record.bits_matched = Some(bits_matched(k, t));
        }
    }
    Ok(DipOutcome {
        record,
        key,
        trace: lp.trace,
    })
}

/// Fraction of `q` random data inputs on which `key` disagrees with the
/// oracle.
fn sampled_error(locked: &LockedNetlist, key: &[bool], oracle: &mut Oracle, q: usize, rng: &mut ChaCha8Rng) -> f64 {
    let keyed = locked.keyed(key);
    let n = locked.num_data_inputs();
    let mut wrong = 0u32;
    let mut left = q;
    while left > 0 {
        let lanes = left.min(64) as u32;
        let words: Vec<u64> = (0..n).map(|_| rng.gen()).collect();
        let want = oracle.query_words(&words, lanes);
        let got = keyed.eval_comb(&words);
        let valid = if lanes == 64 { !0 } else { (1u64 << lanes) - 1 };
        let diff = want.iter().zip(&got).fold(0u64, |acc, (a, b)| acc | (a ^ b)) & valid;
        wrong += diff.count_ones();
        left -= lanes as usize;
    }
    f64::from(wrong) / q as f64
}

/// Oracle-guided SAT attack. Each iteration finds an input on which two
/// keys consistent with all previous observations disagree, queries the
/// oracle there and adds the observation for both keys. When no such input
/// remains, any consistent key is correct; it is checked against the oracle
/// before being reported.
pub fn sat_attack(
    locked: &LockedNetlist,
    oracle: &mut Oracle,
    opts: &SatAttackOptions,
) -> Result<DipOutcome, AttackError> {
    run(AttackId::Sat, locked, oracle, opts, None)
}

/// Approximate SAT attack: the same DIP sequence as [`sat_attack`], with the
/// current candidate key sampled against the oracle every `r` DIPs. Stops
/// early with a guess once the sampled error is at most `eps`.
pub fn appsat_attack(
    locked: &LockedNetlist,
    oracle: &mut Oracle,
    opts: &AppSatOptions,
) -> Result<DipOutcome, AttackError> {
    if opts.r == 0 || opts.q == 0 {
        return Err(AttackError::InvalidParam("r and q must be at least 1".into()));
    }
    if !(0.0..1.0).contains(&opts.eps) {
        return Err(AttackError::InvalidParam(format!("eps {} outside [0, 1)", opts.eps)));
    }
    run(AttackId::AppSat, locked, oracle, &opts.base, Some(opts))
}

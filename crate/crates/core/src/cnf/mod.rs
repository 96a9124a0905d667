// SPDX-License-Identifier: Apache-2.0

//! CNF formulas, Tseitin encoding of netlists, miters, and DIMACS I/O.

mod dimacs;
mod miter;
mod tseitin;

use std::collections::BTreeMap;

use thiserror::Error;

pub use dimacs::{parse_dimacs, read_model, to_dimacs, write_dimacs};
pub use miter::{build_miter, equivalence_miter, Miter, MiterMode};
pub use tseitin::{encode_gate, encode_netlist, tseitin_encode, tseitin_size};

#[derive(Debug, Error)]
pub enum CnfError {
    #[error("netlist `{0}` is sequential; unroll it first")]
    Sequential(String),
    #[error("locked netlist has no key inputs")]
    NoKeyInputs,
    #[error("port mismatch: {0}")]
    PortMismatch(String),
    #[error("key has {got} bits, locked netlist expects {expected}")]
    KeyLength { expected: usize, got: usize },
    #[error("DIMACS line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Clause set over variables `1..=num_vars` in DIMACS literal convention.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Vec<i32>>,
    var_map: BTreeMap<String, BTreeMap<String, i32>>,
}

impl CnfFormula {
    pub fn new() -> CnfFormula {
        CnfFormula::default()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    /// Makes sure variables `1..=n` exist.
    pub fn reserve(&mut self, n: usize) {
        self.num_vars = self.num_vars.max(n);
    }

    pub fn new_var(&mut self) -> i32 {
        self.num_vars += 1;
        self.num_vars as i32
    }

    /// Appends a clause. Panics on an empty clause or a literal outside
    /// `1..=num_vars`.
    pub fn add_clause(&mut self, clause: Vec<i32>) {
        assert!(!clause.is_empty(), "empty clause");
        for &l in &clause {
            assert!(
                l != 0 && l.unsigned_abs() as usize <= self.num_vars,
                "literal {l} out of range 1..={}",
                self.num_vars
            );
        }
        self.clauses.push(clause);
    }

    /// Records that `signal` in copy `tag` is variable `var`.
    pub fn bind(&mut self, tag: &str, signal: &str, var: i32) {
        self.var_map
            .entry(tag.to_string())
            .or_default()
            .insert(signal.to_string(), var);
    }

    pub fn var(&self, tag: &str, signal: &str) -> Option<i32> {
        self.var_map.get(tag)?.get(signal).copied()
    }

    pub fn tags(&self) -> impl Iterator<Item = &str> {
        self.var_map.keys().map(String::as_str)
    }

    /// Signal to variable map for one copy.
    pub fn vars_of(&self, tag: &str) -> Option<&BTreeMap<String, i32>> {
        self.var_map.get(tag)
    }
}

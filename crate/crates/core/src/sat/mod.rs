// SPDX-License-Identifier: Apache-2.0

//! SAT backends: the embedded CDCL engine and an external DIMACS solver.

mod cdcl;
pub mod external;
pub mod gen;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cdcl::{Lit, RestartPolicy, Solver, Var};

use crate::cnf::CnfFormula;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Sat,
    Unsat,
    Timeout,
}

#[derive(Debug, Error)]
pub enum SatError {
    #[error("model violates clause {clause}")]
    InvalidModel { clause: usize },
    #[error("literal {lit} out of range for {num_vars} variables")]
    LiteralRange { lit: i32, num_vars: usize },
    #[error("external solver not found: {0}")]
    SolverNotFound(String),
    #[error("external solver protocol error: {0}")]
    Protocol(String),
    #[error("i/o error talking to external solver: {0}")]
    Io(#[from] std::io::Error),
}

/// Resource limit for one solve call.
#[derive(Debug, Clone, Copy, Default)]
pub struct Budget {
    pub conflicts: Option<u64>,
    pub deadline: Option<Instant>,
}

impl Budget {
    pub fn unlimited() -> Budget {
        Budget::default()
    }

    pub fn time(limit: Duration) -> Budget {
        Budget {
            conflicts: None,
            deadline: Some(Instant::now() + limit),
        }
    }

    pub fn conflicts(n: u64) -> Budget {
        Budget {
            conflicts: Some(n),
            deadline: None,
        }
    }

    pub fn with_deadline(mut self, deadline: Option<Instant>) -> Budget {
        self.deadline = match (self.deadline, deadline) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self
    }

    pub fn expired(&self) -> bool {
        matches!(self.deadline, Some(d) if Instant::now() >= d)
    }

    pub fn remaining(&self) -> Option<Duration> {
        self.deadline.map(|d| d.saturating_duration_since(Instant::now()))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub deleted_clauses: u64,
    #[serde(with = "duration_secs")]
    pub solve_time: Duration,
}

mod duration_secs {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_secs_f64(f64::deserialize(d)?.max(0.0)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: Status,
    /// One value per variable, index 0 is variable 1. Present iff `Sat`.
    pub model: Option<Vec<bool>>,
    pub stats: Stats,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        self.status == Status::Sat
    }

    /// Value of a DIMACS variable in the model.
    pub fn value(&self, var: i32) -> Option<bool> {
        self.model.as_ref().map(|m| m[var as usize - 1])
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum Backend {
    #[default]
    Embedded,
    /// Path to a DIMACS solver binary.
    External(std::path::PathBuf),
}

impl Backend {
    /// External backend if one is configured or on `PATH`.
    pub fn external_from_env() -> Option<Backend> {
        external::locate().map(Backend::External)
    }
}

/// Checks a full assignment against every clause of `f`.
pub fn check_model(f: &CnfFormula, model: &[bool]) -> Result<(), SatError> {
    for (i, c) in f.clauses().iter().enumerate() {
        let sat = c.iter().any(|&l| {
            let v = l.unsigned_abs() as usize - 1;
            model.get(v).copied().unwrap_or(false) == (l > 0)
        });
        if !sat {
            return Err(SatError::InvalidModel { clause: i });
        }
    }
    Ok(())
}

/// Solves `f` with the given assumption literals (DIMACS style) added as
/// unit clauses.
pub fn solve(f: &CnfFormula, assumptions: &[i32], budget: &Budget) -> Result<SolveResult, SatError> {
    solve_with(&Backend::Embedded, f, assumptions, budget)
}

pub fn solve_with(
    backend: &Backend,
    f: &CnfFormula,
    assumptions: &[i32],
    budget: &Budget,
) -> Result<SolveResult, SatError> {
    let n = f.num_vars();
    for &a in assumptions {
        if a == 0 || a.unsigned_abs() as usize > n {
            return Err(SatError::LiteralRange { lit: a, num_vars: n });
        }
    }
    match backend {
        Backend::Embedded => {
            let mut s = Solver::new();
            s.reserve_vars(n);
            for c in f.clauses() {
                s.add_dimacs_clause(c);
            }
            for &a in assumptions {
                s.add_dimacs_clause(&[a]);
            }
            let status = s.solve(budget)?;
            let model = (status == Status::Sat).then(|| s.model()[..n].to_vec());
            if let Some(m) = &model {
                check_model(f, m)?;
            }
            Ok(SolveResult {
                status,
                model,
                stats: s.stats().clone(),
            })
        }
        Backend::External(path) => {
            let mut g = f.clone();
            for &a in assumptions {
                g.add_clause(vec![a]);
            }
            let r = external::run(path, &g, budget)?;
            if let Some(m) = &r.model {
                check_model(&g, m)?;
            }
            Ok(r)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn formula(n: usize, clauses: &[&[i32]]) -> CnfFormula {
        let mut f = CnfFormula::new();
        f.reserve(n);
        for c in clauses {
            f.add_clause(c.to_vec());
        }
        f
    }

    #[test]
    fn unit_contradiction() {
        let f = formula(1, &[&[1], &[-1]]);
        assert_eq!(solve(&f, &[], &Budget::unlimited()).unwrap().status, Status::Unsat);
    }

    #[test]
    fn assumptions_restrict_models() {
        let f = formula(2, &[&[1, 2]]);
        let r = solve(&f, &[-1], &Budget::unlimited()).unwrap();
        assert_eq!(r.model, Some(vec![false, true]));
        let r = solve(&f, &[-1, -2], &Budget::unlimited()).unwrap();
        assert_eq!(r.status, Status::Unsat);
        assert!(r.model.is_none());
    }

    #[test]
    fn assumption_out_of_range() {
        let f = formula(2, &[&[1, 2]]);
        assert!(matches!(
            solve(&f, &[3], &Budget::unlimited()),
            Err(SatError::LiteralRange { lit: 3, .. })
        ));
    }

    #[test]
    fn pigeonhole_4_3_unsat() {
        let f = gen::pigeonhole(4, 3);
        assert_eq!(f.num_vars(), 12);
        assert_eq!(solve(&f, &[], &Budget::unlimited()).unwrap().status, Status::Unsat);
    }

    #[test]
    fn zero_conflict_budget_can_time_out() {
        let f = gen::pigeonhole(8, 7);
        let r = solve(&f, &[], &Budget::conflicts(10)).unwrap();
        assert_eq!(r.status, Status::Timeout);
        assert!(r.model.is_none());
    }
}

// SPDX-License-Identifier: Apache-2.0

//! Formula generators for tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cnf::CnfFormula;

/// Uniform random k-CNF with distinct variables per clause.
pub fn random_kcnf(seed: u64, num_vars: usize, num_clauses: usize, k: usize) -> CnfFormula {
    assert!(k >= 1 && k <= num_vars);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = CnfFormula::new();
    f.reserve(num_vars);
    for _ in 0..num_clauses {
        let mut c: Vec<i32> = Vec::with_capacity(k);
        while c.len() < k {
            let v = rng.gen_range(1..=num_vars as i32);
            if c.iter().any(|l| l.abs() == v) {
                continue;
            }
            c.push(if rng.gen() { v } else { -v });
        }
        f.add_clause(c);
    }
    f
}

/// Pigeonhole principle: `pigeons` pigeons into `holes` holes, one variable
/// per (pigeon, hole). Unsatisfiable whenever `pigeons > holes`.
pub fn pigeonhole(pigeons: usize, holes: usize) -> CnfFormula {
    let var = |p: usize, h: usize| (p * holes + h + 1) as i32;
    let mut f = CnfFormula::new();
    f.reserve(pigeons * holes);
    for p in 0..pigeons {
        f.add_clause((0..holes).map(|h| var(p, h)).collect());
    }
    for h in 0..holes {
        for p in 0..pigeons {
            for q in p + 1..pigeons {
                f.add_clause(vec![-var(p, h), -var(q, h)]);
            }
        }
    }
    f
}

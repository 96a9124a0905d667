// SPDX-License-Identifier: Apache-2.0

mod common;

use proptest::prelude::*;
use ucobf_core::circuits::random_dag;
use ucobf_core::cnf::{build_miter, parse_dimacs, to_dimacs, tseitin_encode, tseitin_size, CnfFormula, MiterMode};
use ucobf_core::fabric::{build_fabric, lower_to_gates};
use ucobf_core::sat::gen::{pigeonhole, random_kcnf};
use ucobf_core::sat::{check_model, solve, Budget, Status};

fn brute_force_sat(f: &CnfFormula) -> bool {
    let n = f.num_vars();
    (0..1u64 << n).any(|m| {
        f.clauses()
            .iter()
            .all(|c| c.iter().any(|&l| (m >> (l.unsigned_abs() - 1) & 1 == 1) == (l > 0)))
    })
}

fn clauses_per_gate(name: &str) -> usize {
    match name {
        "AND" | "OR" | "NAND" | "NOR" => 3,
        "XOR" | "XNOR" | "MUX" => 4,
        "NOT" | "BUF" => 2,
        _ => 1,
    }
}

#[test]
fn tseitin_counts_match_gate_census() {
    for seed in 0..50 {
        let net = random_dag(seed, 4, 30, 3);
        let f = tseitin_encode(&net, "c").unwrap();
        let c: usize = net.gates().iter().map(|g| clauses_per_gate(g.kind.name())).sum();
        assert_eq!((f.num_vars(), f.num_clauses()), (4 + 30, c));
        assert_eq!(tseitin_size(&net), (f.num_vars(), f.num_clauses()));
    }
}

#[test]
fn tseitin_models_are_simulations() {
    for seed in 0..30 {
        let net = random_dag(seed, 4, 20, 2);
        let f = tseitin_encode(&net, "c").unwrap();
        for x in 0..16u64 {
            let bits = common::bits(x, 4);
            let units: Vec<i32> = net
                .inputs()
                .iter()
                .zip(&bits)
                .map(|(i, &b)| {
                    let v = f.var("c", i).unwrap();
                    if b {
                        v
                    } else {
                        -v
                    }
                })
                .collect();
            let r = solve(&f, &units, &Budget::unlimited()).unwrap();
            let m = r.model.unwrap();
            let got: Vec<bool> = net
                .outputs()
                .iter()
                .map(|o| m[f.var("c", o).unwrap() as usize - 1])
                .collect();
            assert_eq!(got, common::eval(&net, &bits));
        }
    }
}

#[test]
fn attack_miter_of_toy_fabric_is_satisfiable() {
    let locked = lower_to_gates(&build_fabric(2, 1, 1, 2).unwrap()).unwrap();
    let m = build_miter(&locked, MiterMode::Attack).unwrap();
    assert_eq!(m.key_a.len(), 8);
    let r = solve(&m.formula, &[], &Budget::unlimited()).unwrap();
    assert_eq!(r.status, Status::Sat);
    let model = r.model.unwrap();
    let data = m.data_values(&model);
    let ka = m.key_a_values(&model);
    let kb: Vec<bool> = m.key_b.iter().map(|&v| model[v as usize - 1]).collect();
    assert_ne!(locked.eval(&ka, &data), locked.eval(&kb, &data));
}

#[test]
fn equiv_miter_same_key_unsat() {
    let locked = lower_to_gates(&build_fabric(3, 2, 3, 2).unwrap()).unwrap();
    let key: Vec<bool> = (0..locked.key_len()).map(|i| i % 3 == 0).collect();
    let m = build_miter(&locked, MiterMode::Equiv(key.clone(), key)).unwrap();
    assert_eq!(
        solve(&m.formula, &[], &Budget::unlimited()).unwrap().status,
        Status::Unsat
    );
}

#[test]
fn pigeonhole_unsat() {
    for n in 2..6 {
        let f = pigeonhole(n + 1, n);
        assert_eq!(solve(&f, &[], &Budget::unlimited()).unwrap().status, Status::Unsat);
    }
}

#[test]
fn timeout_on_tiny_budget() {
    let f = pigeonhole(10, 9);
    let r = solve(&f, &[], &Budget::time(std::time::Duration::from_millis(50))).unwrap();
    assert_eq!(r.status, Status::Timeout);
}

#[test]
fn dimacs_round_trip() {
    let f = random_kcnf(4, 30, 120, 3);
    let g = parse_dimacs(&to_dimacs(&f)).unwrap();
    assert_eq!(g.clauses(), f.clauses());
    assert_eq!(g.num_vars(), f.num_vars());
    assert!(parse_dimacs("p cnf 2 2\n1 2 0\n").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn solver_agrees_with_brute_force(seed in 0u64..1_000_000, n in 1usize..14, ratio in 1.0f64..7.0, k in 1usize..4) {
        let m = ((n as f64) * ratio) as usize + 1;
        let f = random_kcnf(seed, n, m, k.min(n));
        let r = solve(&f, &[], &Budget::unlimited()).unwrap();
        prop_assert_eq!(r.status == Status::Sat, brute_force_sat(&f));
        if let Some(model) = &r.model {
            prop_assert!(check_model(&f, model).is_ok());
        }
    }

    #[test]
    fn dimacs_text_round_trip(seed in 0u64..1_000_000, n in 1usize..40, m in 0usize..100) {
        let f = random_kcnf(seed, n, m, 3.min(n));
        let g = parse_dimacs(&to_dimacs(&f)).unwrap();
        prop_assert_eq!(g.clauses(), f.clauses());
    }
}

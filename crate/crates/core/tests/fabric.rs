// SPDX-License-Identifier: Apache-2.0

mod common;

use proptest::prelude::*;
use ucobf_core::circuits::{random_dag, random_small_dag, s27};
use ucobf_core::fabric::{build_fabric, lower_to_gates, program};
use ucobf_core::netlist::parse_bench;
use ucobf_core::transform::{map_to_luts, unroll};
use ucobf_core::{obfuscate, Bitstream, LockedNetlist, MapMode};

// Pole i (0-based) picks each of its k pins among the inputs and the i
// earlier poles and stores a 2^k table; outputs pick among everything.
fn expected_key_length(n_in: usize, n_out: usize, n_poles: usize, k: usize) -> usize {
    let width = |n: usize| {
        let mut w = 0;
        while (1usize << w) < n {
            w += 1;
        }
        w
    };
    let poles: usize = (0..n_poles).map(|i| k * width(n_in + i) + (1 << k)).sum();
    poles + n_out * width(n_in + n_poles)
}

fn locked_eval(locked: &LockedNetlist, key: &[bool], data: &[bool]) -> Vec<bool> {
    let mut x = vec![false; locked.netlist().inputs().len()];
    for (i, &b) in key.iter().enumerate() {
        x[locked.key_position(i)] = b;
    }
    for (j, &b) in data.iter().enumerate() {
        x[locked.data_position(j)] = b;
    }
    common::eval(locked.netlist(), &x)
}

fn canonical(locked: &LockedNetlist) -> String {
    locked.to_bench()
}

#[test]
fn key_length_formula_small_cases() {
    assert_eq!(build_fabric(2, 1, 1, 2).unwrap().key_length(), 8);
    for n_in in 1..6 {
        for n_out in 1..4 {
            for poles in 1..12 {
                for k in 2..4 {
                    let f = build_fabric(n_in, n_out, poles, k).unwrap();
                    assert_eq!(f.key_length(), expected_key_length(n_in, n_out, poles, k));
                }
            }
        }
    }
}

#[test]
fn lowered_fabric_port_layout() {
    let f = build_fabric(3, 2, 4, 2).unwrap();
    let locked = lower_to_gates(&f).unwrap();
    assert_eq!(locked.key_len(), f.key_length());
    assert_eq!(locked.num_data_inputs(), 3);
    assert_eq!(locked.netlist().outputs().len(), 2);
    let names: Vec<&str> = locked.netlist().inputs().iter().map(String::as_str).collect();
    assert_eq!(names[0], "keyinput0");
    assert!(locked
        .key_inputs()
        .enumerate()
        .all(|(i, k)| k == format!("keyinput{i}")));
}

#[test]
fn s27_single_frame_key_is_correct() {
    let u = unroll(&s27(), 1).unwrap();
    let o = obfuscate(&u, 2, 0, 7).unwrap();
    assert_eq!(o.key.len(), o.locked.key_len());
    assert_eq!(o.locked.num_data_inputs(), u.inputs().len());
    let n = u.inputs().len();
    assert!(common::same_function(
        n,
        |x| locked_eval(&o.locked, o.key.bits(), x),
        |x| common::eval(&u, x)
    ));
}

#[test]
fn bitstream_text_round_trip() {
    let b = Bitstream::random(97, 3);
    assert_eq!(Bitstream::from_text(&b.to_text()).unwrap(), b);
    assert!(Bitstream::from_text("01x").is_err());
}

#[test]
fn same_shape_same_structure() {
    let a = parse_bench(
        "INPUT(a)\nINPUT(b)\nINPUT(c)\nOUTPUT(y)\nOUTPUT(z)\n\
         p = AND(a, b)\nq = OR(b, c)\nr = XOR(p, q)\ny = NAND(r, a)\nz = NOT(q)\n",
    )
    .unwrap();
    let b = parse_bench(
        "INPUT(a)\nINPUT(b)\nINPUT(c)\nOUTPUT(y)\nOUTPUT(z)\n\
         p = XNOR(c, c)\nq = NOR(a, p)\nr = AND(q, b)\ny = BUF(c)\nz = OR(r, q)\n",
    )
    .unwrap();
    let oa = obfuscate(&a, 2, 1, 9).unwrap();
    let ob = obfuscate(&b, 2, 1, 9).unwrap();
    assert_eq!(canonical(&oa.locked), canonical(&ob.locked));
    assert_ne!(oa.key, ob.key);
}

#[test]
fn slack_poles_grow_key() {
    let net = random_dag(5, 3, 6, 2);
    let base = obfuscate(&net, 2, 0, 1).unwrap();
    let more = obfuscate(&net, 2, 3, 1).unwrap();
    assert!(more.key.len() > base.key.len());
    assert_eq!(more.fabric.n_poles(), base.fabric.n_poles() + 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn obfuscation_preserves_function(seed in 0u64..100_000, slack in 0usize..3, k in 2usize..4) {
        let net = random_small_dag(seed, 5, 8);
        let o = obfuscate(&net, k, slack, seed).unwrap();
        prop_assert_eq!(o.key.len(), expected_key_length(
            net.inputs().len(), net.outputs().len(), o.fabric.n_poles(), k));
        let n = net.inputs().len();
        prop_assert!(common::same_function(
            n,
            |x| locked_eval(&o.locked, o.key.bits(), x),
            |x| common::eval(&net, x)
        ));
    }

    #[test]
    fn programmed_fabric_matches_luts(seed in 0u64..100_000) {
        let net = random_small_dag(seed, 4, 8);
        let luts = map_to_luts(&net, 2, MapMode::OneToOne).unwrap();
        let f = build_fabric(net.inputs().len(), net.outputs().len(), luts.luts.len() + 1, 2).unwrap();
        let key = program(&f, &luts, seed).unwrap();
        let locked = lower_to_gates(&f).unwrap();
        prop_assert!(common::same_function(
            net.inputs().len(),
            |x| locked_eval(&locked, key.bits(), x),
            |x| luts.eval(x)
        ));
    }

    #[test]
    fn fabric_structure_ignores_function(a in 0u64..100_000, b in 0u64..100_000) {
        let (na, nb) = (random_dag(a, 3, 5, 2), random_dag(b, 3, 5, 2));
        let count = |n: &ucobf_core::Netlist| map_to_luts(n, 2, MapMode::OneToOne).unwrap().luts.len();
        prop_assume!(count(&na) == count(&nb));
        let oa = obfuscate(&na, 2, 0, 0).unwrap();
        let ob = obfuscate(&nb, 2, 0, 0).unwrap();
        let ra = canonical(&oa.locked).replace(&format!("rand{a}_uc"), "X");
        let rb = canonical(&ob.locked).replace(&format!("rand{b}_uc"), "X");
        prop_assert_eq!(ra, rb);
    }
}

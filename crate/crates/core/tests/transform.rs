// SPDX-License-Identifier: Apache-2.0

mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ucobf_core::circuits::{random_dag, random_sequential, s27};
use ucobf_core::netlist::{parse_bench, write_bench};
use ucobf_core::transform::{bound_fanout, map_to_luts, unroll};
use ucobf_core::MapMode;

fn unrolled_matches(net: &ucobf_core::Netlist, frames: usize, seed: u64) {
    let u = unroll(net, frames).unwrap();
    let n_in = net.inputs().len();
    let n_ff = net.flops().len();
    assert!(u.is_combinational());
    assert_eq!(u.inputs().len(), frames * n_in + n_ff);
    assert_eq!(u.outputs().len(), frames * net.outputs().len() + n_ff);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..64 {
        let x: Vec<bool> = (0..u.inputs().len()).map(|_| rng.gen()).collect();
        let per_frame: Vec<Vec<bool>> = x[..frames * n_in].chunks(n_in.max(1)).map(<[bool]>::to_vec).collect();
        let per_frame = if n_in == 0 { vec![vec![]; frames] } else { per_frame };
        let (mut want, fin) = common::run_sequential(net, &per_frame, &x[frames * n_in..]);
        want.extend(fin);
        assert_eq!(common::eval(&u, &x), want);
    }
}

#[test]
fn s27_unrolls_to_cycle_simulation() {
    for t in [1, 2, 5, 10] {
        unrolled_matches(&s27(), t, t as u64);
    }
}

#[test]
fn unrolled_s27_port_counts() {
    let u = unroll(&s27(), 10).unwrap();
    assert_eq!(u.inputs().len(), 43);
    assert_eq!(u.outputs().len(), 13);
    assert_eq!(u.inputs()[0], "G0__f1");
    assert!(u.inputs().iter().any(|i| i.ends_with("__init")));
}

#[test]
fn zero_frames_rejected() {
    assert!(unroll(&s27(), 0).is_err());
}

#[test]
fn bench_round_trip_s27() {
    let net = s27();
    let again = parse_bench(&write_bench(&net)).unwrap();
    assert_eq!(again.inputs(), net.inputs());
    assert_eq!(again.outputs(), net.outputs());
    assert_eq!(again.gates().len(), net.gates().len());
    assert_eq!(again.name(), "");
    assert_eq!(write_bench(&again.with_name("s27")), write_bench(&net));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn unroll_matches_simulation(seed in 0u64..10_000, n_in in 1usize..4, n_ff in 0usize..4, frames in 1usize..5) {
        let net = random_sequential(seed, n_in, 2, n_ff, 12);
        unrolled_matches(&net, frames, seed);
    }

    #[test]
    fn bench_round_trip(seed in 0u64..10_000, n_in in 1usize..6, n_gates in 1usize..30) {
        let net = random_dag(seed, n_in, n_gates, 2.min(n_gates));
        let again = parse_bench(&write_bench(&net)).unwrap();
        prop_assert_eq!(again.inputs(), net.inputs());
        prop_assert_eq!(again.outputs(), net.outputs());
        prop_assert!(common::same_function(n_in, |x| common::eval(&net, x), |x| common::eval(&again, x)));
    }

    #[test]
    fn bounded_fanout_preserves_function(seed in 0u64..10_000, n_in in 1usize..6, k in 2usize..4) {
        let net = random_dag(seed, n_in, 25, 3);
        let b = bound_fanout(&net, k).unwrap();
        let counts = b.fanout_counts();
        for g in b.gates() {
            for s in &g.inputs {
                prop_assert!(counts[s.as_str()] <= k, "{} drives {}", s, counts[s.as_str()]);
            }
        }
        prop_assert!(common::same_function(n_in, |x| common::eval(&net, x), |x| common::eval(&b, x)));
    }

    #[test]
    fn lut_mapping_preserves_function(seed in 0u64..10_000, n_in in 1usize..6, k in 2usize..5, greedy: bool) {
        let net = random_dag(seed, n_in, 20, 3);
        let mode = if greedy { MapMode::Greedy } else { MapMode::OneToOne };
        let luts = map_to_luts(&net, k, mode).unwrap();
        for l in &luts.luts {
            prop_assert!(l.inputs.len() <= k);
            prop_assert_eq!(l.truth_table.len(), 1 << l.inputs.len());
        }
        prop_assert!(common::same_function(n_in, |x| common::eval(&net, x), |x| luts.eval(x)));
    }
}

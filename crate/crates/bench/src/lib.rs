// SPDX-License-Identifier: Apache-2.0

//! Shared workloads for the criterion benches.

use ucobf_core::attacks::Oracle;
use ucobf_core::circuits::{random_dag, s27};
use ucobf_core::transform::unroll;
use ucobf_core::{obfuscate, Netlist, Obfuscated};

/// s27 unrolled over `frames` cycles.
pub fn s27_unrolled(frames: usize) -> Netlist {
    unroll(&s27(), frames).expect("s27 unrolls")
}

/// A locked small random circuit, cheap enough for the SAT attack to finish.
pub fn small_locked(seed: u64) -> (Obfuscated, Oracle) {
    let net = random_dag(seed, 4, 6, 2);
    let ob = obfuscate(&net, 2, 0, seed).expect("obfuscates");
    let oracle = Oracle::new(&net).expect("combinational");
    (ob, oracle)
}

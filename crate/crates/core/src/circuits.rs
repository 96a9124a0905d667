// SPDX-License-Identifier: Apache-2.0

//! Bundled benchmark circuits and seeded random circuit generators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::netlist::{parse_bench, Flop, Gate, GateKind, Netlist};

/// ISCAS'89 s27 as distributed in `.bench` form.
pub const S27_BENCH: &str = include_str!("../data/s27.bench");

pub fn s27() -> Netlist {
    parse_bench(S27_BENCH).expect("bundled s27 parses").with_name("s27")
}

const RANDOM_KINDS: [GateKind; 8] = [
    GateKind::And,
    GateKind::Or,
    GateKind::Nand,
    GateKind::Nor,
    GateKind::Xor,
    GateKind::Xnor,
    GateKind::Not,
    GateKind::Buf,
];

fn random_gate(rng: &mut ChaCha8Rng, output: String, pool: &[String]) -> Gate {
    let kind = *RANDOM_KINDS.choose(rng).unwrap();
    let inputs = (0..kind.arity()).map(|_| pool.choose(rng).unwrap().clone()).collect();
    Gate { output, kind, inputs }
}

/// Random combinational DAG with 1- and 2-input gates. Every gate reads from
/// primary inputs or earlier gates; the last `n_out` gates are the outputs.
pub fn random_dag(seed: u64, n_in: usize, n_gates: usize, n_out: usize) -> Netlist {
    assert!(n_in >= 1 && n_gates >= 1 && n_out >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs: Vec<String> = (0..n_in).map(|i| format!("x{i}")).collect();
    let mut pool = inputs.clone();
    let mut gates = Vec::with_capacity(n_gates);
    for i in 0..n_gates {
        let g = random_gate(&mut rng, format!("n{i}"), &pool);
        pool.push(g.output.clone());
        gates.push(g);
    }
    let outputs = gates[n_gates.saturating_sub(n_out)..]
        .iter()
        .map(|g| g.output.clone())
        .collect();
    Netlist::new(format!("rand{seed}"), inputs, outputs, gates, vec![]).expect("generated DAG is valid")
}

/// Random DAG with the size drawn uniformly from the given bounds.
pub fn random_small_dag(seed: u64, max_in: usize, max_gates: usize) -> Netlist {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let n_in = rng.gen_range(1..=max_in);
    let n_gates = rng.gen_range(1..=max_gates);
    let n_out = rng.gen_range(1..=n_gates.min(3));
    random_dag(seed, n_in, n_gates, n_out)
}

/// Random sequential circuit. Flop data inputs and outputs are drawn from the
/// later half of the gate list so the logic stays mostly live.
pub fn random_sequential(seed: u64, n_in: usize, n_out: usize, n_ff: usize, n_gates: usize) -> Netlist {
    assert!(n_gates >= 1 && n_out >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs: Vec<String> = (0..n_in).map(|i| format!("x{i}")).collect();
    let state: Vec<String> = (0..n_ff).map(|i| format!("q{i}")).collect();
    let mut pool: Vec<String> = inputs.iter().chain(&state).cloned().collect();
    assert!(!pool.is_empty());
    let mut gates = Vec::with_capacity(n_gates);
    for i in 0..n_gates {
        let g = random_gate(&mut rng, format!("n{i}"), &pool);
        pool.push(g.output.clone());
        gates.push(g);
    }
    let late: Vec<String> = gates[n_gates / 2..].iter().map(|g| g.output.clone()).collect();
    let flops = state
        .iter()
        .map(|q| Flop {
            output: q.clone(),
            data: late.choose(&mut rng).unwrap().clone(),
        })
        .collect();
    let mut outputs: Vec<String> = late.clone();
    outputs.shuffle(&mut rng);
    outputs.truncate(n_out);
    Netlist::new(format!("seq{seed}"), inputs, outputs, gates, flops).expect("generated sequential circuit is valid")
}

/// Synthetic stand-in with s298's interface and size: 3 inputs, 6 outputs,
/// 14 flops and 119 gates.
pub fn s298_scale(seed: u64) -> Netlist {
    random_sequential(seed, 3, 6, 14, 119).with_name("s298_scale")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s27_shape() {
        let net = s27();
        assert_eq!(net.inputs().len(), 4);
        assert_eq!(net.outputs().len(), 1);
        assert_eq!(net.flops().len(), 3);
        assert_eq!(net.gates().len(), 10);
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(random_dag(7, 4, 20, 2), random_dag(7, 4, 20, 2));
        assert_eq!(s298_scale(1), s298_scale(1));
        let s = s298_scale(1);
        assert_eq!((s.inputs().len(), s.outputs().len(), s.flops().len()), (3, 6, 14));
    }
}

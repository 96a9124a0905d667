// SPDX-License-Identifier: Apache-2.0

// Reference evaluators written against the textual gate semantics only.

#![allow(dead_code)]

use std::collections::HashMap;

use ucobf_core::Netlist;

pub fn gate(name: &str, ins: &[bool]) -> bool {
    match name {
        "AND" => ins[0] && ins[1],
        "OR" => ins[0] || ins[1],
        "NAND" => !(ins[0] && ins[1]),
        "NOR" => !(ins[0] || ins[1]),
        "XOR" => ins[0] != ins[1],
        "XNOR" => ins[0] == ins[1],
        "NOT" => !ins[0],
        "BUF" => ins[0],
        "CONST0" => false,
        "CONST1" => true,
        "MUX" => {
            if ins[0] {
                ins[2]
            } else {
                ins[1]
            }
        }
        other => panic!("unknown gate {other}"),
    }
}

/// Fixed-point evaluation that ignores gate order. `known` holds primary
/// inputs and flop outputs.
pub fn eval_signals(net: &Netlist, known: HashMap<String, bool>) -> HashMap<String, bool> {
    let mut vals = known;
    let mut left: Vec<_> = net.gates().iter().collect();
    while !left.is_empty() {
        let before = left.len();
        left.retain(|g| {
            let ins: Option<Vec<bool>> = g.inputs.iter().map(|s| vals.get(s).copied()).collect();
            match ins {
                Some(ins) => {
                    vals.insert(g.output.clone(), gate(g.kind.name(), &ins));
                    false
                }
                None => true,
            }
        });
        assert!(left.len() < before, "combinational loop or undriven signal");
    }
    vals
}

pub fn eval(net: &Netlist, inputs: &[bool]) -> Vec<bool> {
    assert_eq!(inputs.len(), net.inputs().len());
    let known = net.inputs().iter().cloned().zip(inputs.iter().copied()).collect();
    let vals = eval_signals(net, known);
    net.outputs().iter().map(|o| vals[o]).collect()
}

/// Runs `frames` clock cycles from `init` (flop order); returns every frame's
/// outputs followed by the final state.
pub fn run_sequential(net: &Netlist, frames: &[Vec<bool>], init: &[bool]) -> (Vec<bool>, Vec<bool>) {
    let mut state: Vec<bool> = init.to_vec();
    let mut outs = Vec::new();
    for pi in frames {
        let mut known: HashMap<String, bool> = net.inputs().iter().cloned().zip(pi.iter().copied()).collect();
        for (f, &v) in net.flops().iter().zip(&state) {
            known.insert(f.output.clone(), v);
        }
        let vals = eval_signals(net, known);
        outs.extend(net.outputs().iter().map(|o| vals[o]));
        state = net.flops().iter().map(|f| vals[&f.data]).collect();
    }
    (outs, state)
}

pub fn bits(index: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| index >> i & 1 == 1).collect()
}

/// Exhaustive truth-table comparison of two evaluators over `n` inputs.
pub fn same_function(n: usize, a: impl Fn(&[bool]) -> Vec<bool>, b: impl Fn(&[bool]) -> Vec<bool>) -> bool {
    (0..1u64 << n).all(|i| {
        let x = bits(i, n);
        a(&x) == b(&x)
    })
}

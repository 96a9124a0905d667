// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;

use super::{GateKind, Netlist, NetlistError};

#[derive(Debug, Clone, Copy)]
struct Op {
    kind: GateKind,
    ins: [u32; 3],
}

/// Index-compiled evaluator for one netlist. Evaluates 64 patterns per call
/// in the `*_words` entry points, one bit per lane.
#[derive(Debug, Clone)]
pub struct Simulator {
    n_in: usize,
    n_ff: usize,
    ops: Vec<Op>,
    outputs: Vec<u32>,
    flop_data: Vec<u32>,
}

impl Simulator {
    pub fn new(net: &Netlist) -> Simulator {
        let index: HashMap<&str, u32> = net.signals().enumerate().map(|(i, s)| (s, i as u32)).collect();
        let ops = net
            .gates()
            .iter()
            .map(|g| {
                let mut ins = [0u32; 3];
                for (slot, s) in ins.iter_mut().zip(&g.inputs) {
                    *slot = index[s.as_str()];
                }
                Op { kind: g.kind, ins }
            })
            .collect();
        Simulator {
            n_in: net.inputs().len(),
            n_ff: net.flops().len(),
            ops,
            outputs: net.outputs().iter().map(|s| index[s.as_str()]).collect(),
            flop_data: net.flops().iter().map(|f| index[f.data.as_str()]).collect(),
        }
    }

    pub fn num_inputs(&self) -> usize {
        self.n_in
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn num_flops(&self) -> usize {
        self.n_ff
    }

    fn run(&self, inputs: &[u64], state: &[u64]) -> Vec<u64> {
        let mut vals = Vec::with_capacity(self.n_in + self.n_ff + self.ops.len());
        vals.extend_from_slice(inputs);
        vals.extend_from_slice(state);
        for op in &self.ops {
            let ins = [
                vals[op.ins[0] as usize],
                vals[op.ins[1] as usize],
                vals[op.ins[2] as usize],
            ];
            vals.push(op.kind.eval_word(&ins));
        }
        vals
    }

    /// Combinational evaluation of 64 patterns; flops (if any) read `state`.
    pub fn eval_words(&self, inputs: &[u64], state: &[u64]) -> (Vec<u64>, Vec<u64>) {
        assert_eq!(inputs.len(), self.n_in, "input word count");
        assert_eq!(state.len(), self.n_ff, "state word count");
        let vals = self.run(inputs, state);
        (
            self.outputs.iter().map(|&i| vals[i as usize]).collect(),
            self.flop_data.iter().map(|&i| vals[i as usize]).collect(),
        )
    }

    pub fn eval(&self, inputs: &[bool], state: &[bool]) -> (Vec<bool>, Vec<bool>) {
        let w = |b: &bool| if *b { 1u64 } else { 0 };
        let ins: Vec<u64> = inputs.iter().map(w).collect();
        let st: Vec<u64> = state.iter().map(w).collect();
        let (o, n) = self.eval_words(&ins, &st);
        (
            o.into_iter().map(|x| x & 1 == 1).collect(),
            n.into_iter().map(|x| x & 1 == 1).collect(),
        )
    }

    /// One clock step with length checks; state is positional (flop order).
    pub fn step(&self, inputs: &[bool], state: &[bool]) -> Result<(Vec<bool>, Vec<bool>), NetlistError> {
        if inputs.len() != self.n_in {
            return Err(NetlistError::VectorLength {
                expected: self.n_in,
                got: inputs.len(),
            });
        }
        if state.len() != self.n_ff {
            return Err(NetlistError::VectorLength {
                expected: self.n_ff,
                got: state.len(),
            });
        }
        Ok(self.eval(inputs, state))
    }
}

/// Evaluates one clock cycle of `net`.
///
/// Returns the primary outputs and the next flop state (the values at the
/// flop data inputs).
pub fn simulate(
    net: &Netlist,
    pi: &[bool],
    state: &HashMap<String, bool>,
) -> Result<(Vec<bool>, HashMap<String, bool>), NetlistError> {
    let current = net
        .flops()
        .iter()
        .map(|f| {
            state
                .get(&f.output)
                .copied()
                .ok_or_else(|| NetlistError::MissingState(f.output.clone()))
        })
        .collect::<Result<Vec<bool>, _>>()?;
    let (out, next) = Simulator::new(net).step(pi, &current)?;
    let next = net
        .flops()
        .iter()
        .zip(next)
        .map(|(f, v)| (f.output.clone(), v))
        .collect();
    Ok((out, next))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_bench;

    #[test]
    fn buf_and_xor() {
        let buf = parse_bench("INPUT(a)\nOUTPUT(y)\ny = BUF(a)\n").unwrap();
        let (out, next) = simulate(&buf, &[true], &HashMap::new()).unwrap();
        assert_eq!(out, [true]);
        assert!(next.is_empty());

        let xor = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = XOR(a, b)\n").unwrap();
        let got: Vec<bool> = [(false, false), (false, true), (true, false), (true, true)]
            .iter()
            .map(|&(a, b)| simulate(&xor, &[a, b], &HashMap::new()).unwrap().0[0])
            .collect();
        assert_eq!(got, [false, true, true, false]);
    }

    #[test]
    fn errors() {
        let net = parse_bench("INPUT(a)\nOUTPUT(q)\nq = DFF(a)\n").unwrap();
        assert_eq!(
            simulate(&net, &[true, false], &HashMap::from([("q".into(), false)])).unwrap_err(),
            NetlistError::VectorLength { expected: 1, got: 2 }
        );
        assert_eq!(
            simulate(&net, &[true], &HashMap::new()).unwrap_err(),
            NetlistError::MissingState("q".into())
        );
        let (out, next) = simulate(&net, &[true], &HashMap::from([("q".into(), false)])).unwrap();
        assert_eq!(out, [false]);
        assert!(next["q"]);
    }
}

// SPDX-License-Identifier: Apache-2.0

//! Gate-level netlist IR.
//!
//! A [`Netlist`] is immutable once built: [`Netlist::new`] validates every
//! structural invariant and stores the gates in a stable topological order
//! (declaration order among gates that are ready at the same time).

pub(crate) mod bench;
mod sim;

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

pub use bench::{parse_bench, write_bench};
pub use sim::{simulate, Simulator};

/// Prefix reserved for names the toolkit invents (decomposition, buffers).
pub const GENERATED_PREFIX: &str = "__g";

/// Fan-in limit for the binary gate kinds.
pub const MAX_FANIN: usize = 2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetlistError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: unknown gate kind `{kind}`")]
    UnknownGate { line: usize, kind: String },
    #[error("undefined signal `{0}`")]
    UndefinedSignal(String),
    #[error("signal `{0}` is defined more than once")]
    DuplicateDefinition(String),
    #[error("output `{0}` is declared more than once")]
    DuplicateOutput(String),
    #[error("combinational cycle through {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("gate `{output}`: {kind} takes {expected} inputs, got {got}")]
    Arity {
        output: String,
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("vector has {got} bits, expected {expected}")]
    VectorLength { expected: usize, got: usize },
    #[error("no state value for flop `{0}`")]
    MissingState(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    And,
    Or,
    Nand,
    Nor,
    Xor,
    Xnor,
    Not,
    Buf,
    Const0,
    Const1,
    /// Inputs are ordered `(sel, a0, a1)`; output is `a1` when `sel` is high.
    Mux2,
}

impl GateKind {
    pub const ALL: [GateKind; 11] = [
        GateKind::And,
        GateKind::Or,
        GateKind::Nand,
        GateKind::Nor,
        GateKind::Xor,
        GateKind::Xnor,
        GateKind::Not,
        GateKind::Buf,
        GateKind::Const0,
        GateKind::Const1,
        GateKind::Mux2,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::Const0 | GateKind::Const1 => 0,
            GateKind::Not | GateKind::Buf => 1,
            GateKind::Mux2 => 3,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Or => "OR",
            GateKind::Nand => "NAND",
            GateKind::Nor => "NOR",
            GateKind::Xor => "XOR",
            GateKind::Xnor => "XNOR",
            GateKind::Not => "NOT",
            GateKind::Buf => "BUF",
            GateKind::Const0 => "CONST0",
            GateKind::Const1 => "CONST1",
            GateKind::Mux2 => "MUX",
        }
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        let kind = match name.to_ascii_uppercase().as_str() {
            "AND" => GateKind::And,
            "OR" => GateKind::Or,
            "NAND" => GateKind::Nand,
            "NOR" => GateKind::Nor,
            "XOR" => GateKind::Xor,
            "XNOR" => GateKind::Xnor,
            "NOT" | "INV" => GateKind::Not,
            "BUF" | "BUFF" => GateKind::Buf,
            "CONST0" => GateKind::Const0,
            "CONST1" => GateKind::Const1,
            "MUX" | "MUX2" => GateKind::Mux2,
            _ => return None,
        };
        Some(kind)
    }

    /// Evaluates the gate on 64 patterns at once.
    #[inline]
    pub fn eval_word(self, ins: &[u64]) -> u64 {
        match self {
            GateKind::And => ins[0] & ins[1],
            GateKind::Or => ins[0] | ins[1],
            GateKind::Nand => !(ins[0] & ins[1]),
            GateKind::Nor => !(ins[0] | ins[1]),
            GateKind::Xor => ins[0] ^ ins[1],
            GateKind::Xnor => !(ins[0] ^ ins[1]),
            GateKind::Not => !ins[0],
            GateKind::Buf => ins[0],
            GateKind::Const0 => 0,
            GateKind::Const1 => !0,
            GateKind::Mux2 => (ins[0] & ins[2]) | (!ins[0] & ins[1]),
        }
    }

    pub fn eval(self, ins: &[bool]) -> bool {
        let words: Vec<u64> = ins.iter().map(|&b| if b { !0 } else { 0 }).collect();
        self.eval_word(&words) & 1 == 1
    }

    /// Truth table over the gate's inputs, first input as the most significant
    /// index bit, row 0 (all inputs low) first.
    pub fn truth_table(self) -> Vec<bool> {
        let n = self.arity();
        (0..1usize << n)
            .map(|row| {
                let ins: Vec<bool> = (0..n).map(|j| row >> (n - 1 - j) & 1 == 1).collect();
                self.eval(&ins)
            })
            .collect()
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gate {
    pub output: String,
    pub kind: GateKind,
    pub inputs: Vec<String>,
}

impl Gate {
    pub fn new<S: Into<String>>(output: S, kind: GateKind, inputs: &[&str]) -> Gate {
        Gate {
            output: output.into(),
            kind,
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// D-type flop without enable or reset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Flop {
    pub output: String,
    pub data: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Netlist {
    name: String,
    inputs: Vec<String>,
    outputs: Vec<String>,
    gates: Vec<Gate>,
    flops: Vec<Flop>,
}

impl Netlist {
    /// Validates the parts and repairs the gate order topologically.
    pub fn new(
        name: impl Into<String>,
        inputs: Vec<String>,
        outputs: Vec<String>,
        gates: Vec<Gate>,
        flops: Vec<Flop>,
    ) -> Result<Netlist, NetlistError> {
        let mut defined = HashSet::new();
        let sources = inputs.iter().chain(flops.iter().map(|f| &f.output));
        for name in sources.chain(gates.iter().map(|g| &g.output)) {
            if !defined.insert(name.as_str()) {
                return Err(NetlistError::DuplicateDefinition(name.clone()));
            }
        }
        for g in &gates {
            if g.inputs.len() != g.kind.arity() {
                return Err(NetlistError::Arity {
                    output: g.output.clone(),
                    kind: g.kind,
                    expected: g.kind.arity(),
                    got: g.inputs.len(),
                });
            }
            if let Some(missing) = g.inputs.iter().find(|s| !defined.contains(s.as_str())) {
                return Err(NetlistError::UndefinedSignal(missing.clone()));
            }
        }
        if let Some(f) = flops.iter().find(|f| !defined.contains(f.data.as_str())) {
            return Err(NetlistError::UndefinedSignal(f.data.clone()));
        }
        let mut seen_out = HashSet::new();
        for o in &outputs {
            if !defined.contains(o.as_str()) {
                return Err(NetlistError::UndefinedSignal(o.clone()));
            }
            if !seen_out.insert(o.as_str()) {
                return Err(NetlistError::DuplicateOutput(o.clone()));
            }
        }
        let order = topo_sort(&gates)?;
        let mut slots: Vec<Option<Gate>> = gates.into_iter().map(Some).collect();
        let gates = order.into_iter().map(|i| slots[i].take().unwrap()).collect();
        Ok(Netlist {
            name: name.into(),
            inputs,
            outputs,
            gates,
            flops,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    /// Gates in topological order.
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn flops(&self) -> &[Flop] {
        &self.flops
    }

    pub fn is_combinational(&self) -> bool {
        self.flops.is_empty()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Netlist {
        self.name = name.into();
        self
    }

    /// Every signal name: inputs, flop outputs, then gate outputs.
    pub fn signals(&self) -> impl Iterator<Item = &str> {
        self.inputs
            .iter()
            .chain(self.flops.iter().map(|f| &f.output))
            .chain(self.gates.iter().map(|g| &g.output))
            .map(String::as_str)
    }

    /// Number of sinks per signal: gate pins, flop data pins and output ports.
    pub fn fanout_counts(&self) -> HashMap<&str, usize> {
        let mut counts: HashMap<&str, usize> = self.signals().map(|s| (s, 0)).collect();
        let pins = self.gates.iter().flat_map(|g| g.inputs.iter());
        let pins = pins.chain(self.flops.iter().map(|f| &f.data));
        for s in pins.chain(self.outputs.iter()) {
            *counts.get_mut(s.as_str()).unwrap() += 1;
        }
        counts
    }
}

/// Stable topological order of `gates` (indices into the slice).
///
/// Signals not produced by any gate are treated as sources. Among gates that
/// are ready at the same time the one declared first wins.
pub fn topo_sort(gates: &[Gate]) -> Result<Vec<usize>, NetlistError> {
    let producer: HashMap<&str, usize> = gates.iter().enumerate().map(|(i, g)| (g.output.as_str(), i)).collect();
    let mut pending = vec![0usize; gates.len()];
    let mut sinks: Vec<Vec<usize>> = vec![Vec::new(); gates.len()];
    for (i, g) in gates.iter().enumerate() {
        for s in &g.inputs {
            if let Some(&p) = producer.get(s.as_str()) {
                pending[i] += 1;
                sinks[p].push(i);
            }
        }
    }
    let mut ready: BinaryHeap<Reverse<usize>> = (0..gates.len()).filter(|&i| pending[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(gates.len());
    while let Some(Reverse(i)) = ready.pop() {
        order.push(i);
        for &j in &sinks[i] {
            pending[j] -= 1;
            if pending[j] == 0 {
                ready.push(Reverse(j));
            }
        }
    }
    if order.len() == gates.len() {
        return Ok(order);
    }

    // Walk backwards through unfinished gates until a gate repeats.
    let start = (0..gates.len()).find(|&i| pending[i] > 0).unwrap();
    let mut path = vec![start];
    let mut pos: HashMap<usize, usize> = HashMap::from([(start, 0)]);
    let mut cur = start;
    loop {
        let next = gates[cur]
            .inputs
            .iter()
            .filter_map(|s| producer.get(s.as_str()).copied())
            .find(|&p| pending[p] > 0)
            .expect("unfinished gate has an unfinished driver");
        if let Some(&at) = pos.get(&next) {
            let mut cycle: Vec<String> = path[at..].iter().map(|&i| gates[i].output.clone()).collect();
            cycle.reverse();
            cycle.push(cycle[0].clone());
            return Err(NetlistError::Cycle(cycle));
        }
        pos.insert(next, path.len());
        path.push(next);
        cur = next;
    }
}

/// Gates of `net` in topological order.
pub fn topo_order(net: &Netlist) -> Vec<&Gate> {
    net.gates().iter().collect()
}

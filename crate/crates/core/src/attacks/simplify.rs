// SPDX-License-Identifier: Apache-2.0

//! Constant propagation and local folding over a combinational netlist.
//!
//! Every signal is reduced to a constant or a possibly inverted reference to
//! a free input or a kept gate. Inverters and buffers never survive as nodes,
//! so double inversions disappear; NAND/NOR/XNOR become AND/OR/XOR with an
//! inverted reference. Gates that no output depends on are dead and do not
//! count.

use std::collections::HashMap;

use crate::netlist::{GateKind, Netlist};

/// Simplified value of a signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Val {
    Const(bool),
    /// Signal index and inversion flag.
    Lit(u32, bool),
}

impl Val {
    pub fn not(self) -> Val {
        match self {
            Val::Const(b) => Val::Const(!b),
            Val::Lit(s, n) => Val::Lit(s, !n),
        }
    }

    fn is_const(self) -> bool {
        matches!(self, Val::Const(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    And,
    Or,
    Xor,
    /// `(sel, a0, a1)`; at most one leg is constant.
    Mux,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Node {
    pub kind: NodeKind,
    pub ins: [Val; 3],
}

impl Node {
    pub fn fanins(&self) -> &[Val] {
        match self.kind {
            NodeKind::Mux => &self.ins,
            _ => &self.ins[..2],
        }
    }
}

/// Complexity measure used to compare cofactors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Signature {
    pub gates: usize,
    pub literals: usize,
    pub const_outputs: usize,
}

#[derive(Debug, Clone, Copy)]
struct Op {
    kind: GateKind,
    ins: [u32; 3],
}

/// Compiled form of a netlist. Signal `i < num_inputs` is input `i`; signal
/// `num_inputs + g` is gate `g` in topological order.
#[derive(Debug, Clone)]
pub struct Simplifier {
    n_in: usize,
    ops: Vec<Op>,
    outputs: Vec<u32>,
    fanout: Vec<Vec<u32>>,
}

#[derive(Debug, Clone)]
pub struct Simplified {
    vals: Vec<Val>,
    nodes: Vec<Option<Node>>,
    live: Vec<bool>,
    outputs: Vec<Val>,
}

fn and(a: Val, b: Val, me: u32) -> (Val, Option<Node>) {
    match (a, b) {
        (Val::Const(false), _) | (_, Val::Const(false)) => (Val::Const(false), None),
        (Val::Const(true), x) | (x, Val::Const(true)) => (x, None),
        _ if a == b => (a, None),
        _ if a == b.not() => (Val::Const(false), None),
        _ => (
            Val::Lit(me, false),
            Some(Node {
                kind: NodeKind::And,
                ins: [a, b, Val::Const(false)],
            }),
        ),
    }
}

fn or(a: Val, b: Val, me: u32) -> (Val, Option<Node>) {
    let (v, n) = and(a.not(), b.not(), me);
    match n {
        Some(n) => (
            Val::Lit(me, false),
            Some(Node {
                kind: NodeKind::Or,
                ins: [n.ins[0].not(), n.ins[1].not(), Val::Const(false)],
            }),
        ),
        None => (v.not(), None),
    }
}

fn xor(a: Val, b: Val, me: u32) -> (Val, Option<Node>) {
    match (a, b) {
        (Val::Const(c), x) | (x, Val::Const(c)) => (if c { x.not() } else { x }, None),
        (Val::Lit(sa, na), Val::Lit(sb, nb)) => {
            if sa == sb {
                (Val::Const(na != nb), None)
            } else {
                (
                    Val::Lit(me, na != nb),
                    Some(Node {
                        kind: NodeKind::Xor,
                        ins: [Val::Lit(sa, false), Val::Lit(sb, false), Val::Const(false)],
                    }),
                )
            }
        }
    }
}

fn mux(s: Val, a0: Val, a1: Val, me: u32) -> (Val, Option<Node>) {
    let (s, a0, a1) = match s {
        Val::Const(false) => return (a0, None),
        Val::Const(true) => return (a1, None),
        Val::Lit(x, true) => (Val::Lit(x, false), a1, a0),
        s => (s, a0, a1),
    };
    if a0 == a1 {
        return (a0, None);
    }
    match (a0, a1) {
        (Val::Const(false), Val::Const(true)) => (s, None),
        (Val::Const(true), Val::Const(false)) => (s.not(), None),
        _ => (
            Val::Lit(me, false),
            Some(Node {
                kind: NodeKind::Mux,
                ins: [s, a0, a1],
            }),
        ),
    }
}

fn fold(kind: GateKind, ins: [Val; 3], me: u32) -> (Val, Option<Node>) {
    use GateKind::*;
    match kind {
        And => and(ins[0], ins[1], me),
        Nand => {
            let (v, n) = and(ins[0], ins[1], me);
            (v.not(), n)
        }
        Or => or(ins[0], ins[1], me),
        Nor => {
            let (v, n) = or(ins[0], ins[1], me);
            (v.not(), n)
        }
        Xor => xor(ins[0], ins[1], me),
        Xnor => {
            let (v, n) = xor(ins[0], ins[1], me);
            (v.not(), n)
        }
        Not => (ins[0].not(), None),
        Buf => (ins[0], None),
        Const0 => (Val::Const(false), None),
        Const1 => (Val::Const(true), None),
        Mux2 => mux(ins[0], ins[1], ins[2], me),
    }
}

impl Simplifier {
    /// Panics if `net` is sequential.
    pub fn new(net: &Netlist) -> Simplifier {
        assert!(net.is_combinational(), "simplifier needs a combinational netlist");
        let index: HashMap<&str, u32> = net.signals().enumerate().map(|(i, s)| (s, i as u32)).collect();
        let n_in = net.inputs().len();
        let mut fanout = vec![Vec::new(); n_in + net.gates().len()];
        let ops = net
            .gates()
            .iter()
            .enumerate()
            .map(|(g, gate)| {
                let mut ins = [0u32; 3];
                for (slot, s) in ins.iter_mut().zip(&gate.inputs) {
                    *slot = index[s.as_str()];
                    fanout[*slot as usize].push((n_in + g) as u32);
                }
                Op { kind: gate.kind, ins }
            })
            .collect();
        Simplifier {
            n_in,
            ops,
            outputs: net.outputs().iter().map(|o| index[o.as_str()]).collect(),
            fanout,
        }
    }

    pub fn num_inputs(&self) -> usize {
        self.n_in
    }

    fn eval_op(&self, g: usize, vals: &[Val]) -> (Val, Option<Node>) {
        let op = self.ops[g];
        let mut ins = [Val::Const(false); 3];
        for (slot, &i) in ins.iter_mut().zip(&op.ins[..op.kind.arity()]) {
            *slot = vals[i as usize];
        }
        fold(op.kind, ins, (self.n_in + g) as u32)
    }

    fn finish(&self, vals: Vec<Val>, nodes: Vec<Option<Node>>) -> Simplified {
        let outputs: Vec<Val> = self.outputs.iter().map(|&o| vals[o as usize]).collect();
        let mut live = vec![false; vals.len()];
        let mut stack: Vec<u32> = outputs
            .iter()
            .filter_map(|v| match v {
                Val::Lit(s, _) => Some(*s),
                Val::Const(_) => None,
            })
            .collect();
        while let Some(s) = stack.pop() {
            if std::mem::replace(&mut live[s as usize], true) {
                continue;
            }
            if let Some(n) = &nodes[s as usize] {
                for v in n.fanins() {
                    if let Val::Lit(t, _) = v {
                        if !live[*t as usize] {
                            stack.push(*t);
                        }
                    }
                }
            }
        }
        Simplified {
            vals,
            nodes,
            live,
            outputs,
        }
    }

    /// Simplifies with the given inputs tied to constants.
    pub fn run(&self, fixed: &[Option<bool>]) -> Simplified {
        assert_eq!(fixed.len(), self.n_in, "one entry per input");
        let mut vals: Vec<Val> = fixed
            .iter()
            .enumerate()
            .map(|(i, f)| match f {
                Some(b) => Val::Const(*b),
                None => Val::Lit(i as u32, false),
            })
            .collect();
        let mut nodes = vec![None; self.n_in + self.ops.len()];
        for g in 0..self.ops.len() {
            let (v, n) = self.eval_op(g, &vals);
            vals.push(v);
            nodes[self.n_in + g] = n;
        }
        self.finish(vals, nodes)
    }

    /// Re-simplifies `base` with one more input tied to `value`, revisiting
    /// only the gates whose inputs changed.
    pub fn cofactor(&self, base: &Simplified, input: usize, value: bool) -> Simplified {
        let mut vals = base.vals.clone();
        let mut nodes = base.nodes.clone();
        let mut changed = vec![false; vals.len()];
        if vals[input] != Val::Const(value) {
            vals[input] = Val::Const(value);
            changed[input] = true;
        }
        let mut work: std::collections::BinaryHeap<std::cmp::Reverse<u32>> =
            self.fanout[input].iter().map(|&s| std::cmp::Reverse(s)).collect();
        let mut queued = vec![false; vals.len()];
        while let Some(std::cmp::Reverse(s)) = work.pop() {
            let s = s as usize;
            // Gates pop in topological order, so every fanin is final here.
            if std::mem::replace(&mut queued[s], true) || !changed_any(&self.ops[s - self.n_in], &changed) {
                continue;
            }
            let (v, n) = self.eval_op(s - self.n_in, &vals);
            nodes[s] = n;
            if v != vals[s] {
                vals[s] = v;
                changed[s] = true;
                work.extend(
                    self.fanout[s]
                        .iter()
                        .filter(|&&t| !queued[t as usize])
                        .map(|&t| std::cmp::Reverse(t)),
                );
            }
        }
        self.finish(vals, nodes)
    }
}

fn changed_any(op: &Op, changed: &[bool]) -> bool {
    op.ins[..op.kind.arity()].iter().any(|&i| changed[i as usize])
}

impl Simplified {
    pub fn outputs(&self) -> &[Val] {
        &self.outputs
    }

    pub fn value(&self, signal: usize) -> Val {
        self.vals[signal]
    }

    /// Live kept gates in topological order as `(signal, node)`.
    pub fn live_nodes(&self) -> impl Iterator<Item = (u32, &Node)> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(s, _)| self.live[*s])
            .filter_map(|(s, n)| n.as_ref().map(|n| (s as u32, n)))
    }

    pub fn signature(&self) -> Signature {
        let mut sig = Signature {
            const_outputs: self.outputs.iter().filter(|v| v.is_const()).count(),
            ..Signature::default()
        };
        for (_, n) in self.live_nodes() {
            sig.gates += 1;
            sig.literals += n.fanins().iter().filter(|v| !v.is_const()).count();
        }
        sig
    }
}

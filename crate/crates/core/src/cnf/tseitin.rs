// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;

use super::{CnfError, CnfFormula};
use crate::netlist::{GateKind, Netlist};

/// Appends the defining clauses of `y = kind(ins)`. Inputs may be negative
/// literals.
pub fn encode_gate(f: &mut CnfFormula, kind: GateKind, y: i32, ins: &[i32]) {
    use GateKind::*;
    match kind {
        And | Nand => {
            let y = if kind == Nand { -y } else { y };
            let (a, b) = (ins[0], ins[1]);
            f.add_clause(vec![-y, a]);
            f.add_clause(vec![-y, b]);
            f.add_clause(vec![y, -a, -b]);
        }
        Or | Nor => {
            let y = if kind == Nor { -y } else { y };
            let (a, b) = (ins[0], ins[1]);
            f.add_clause(vec![y, -a]);
            f.add_clause(vec![y, -b]);
            f.add_clause(vec![-y, a, b]);
        }
        Xor | Xnor => {
            let y = if kind == Xnor { -y } else { y };
            let (a, b) = (ins[0], ins[1]);
            f.add_clause(vec![-y, a, b]);
            f.add_clause(vec![-y, -a, -b]);
            f.add_clause(vec![y, -a, b]);
            f.add_clause(vec![y, a, -b]);
        }
        Not | Buf => {
            let y = if kind == Not { -y } else { y };
            f.add_clause(vec![-y, ins[0]]);
            f.add_clause(vec![y, -ins[0]]);
        }
        Const0 => f.add_clause(vec![-y]),
        Const1 => f.add_clause(vec![y]),
        Mux2 => {
            let (s, a0, a1) = (ins[0], ins[1], ins[2]);
            f.add_clause(vec![-s, -a1, y]);
            f.add_clause(vec![-s, a1, -y]);
            f.add_clause(vec![s, -a0, y]);
            f.add_clause(vec![s, a0, -y]);
        }
    }
}

fn clause_count(kind: GateKind) -> usize {
    use GateKind::*;
    match kind {
        And | Or | Nand | Nor => 3,
        Xor | Xnor | Mux2 => 4,
        Not | Buf => 2,
        Const0 | Const1 => 1,
    }
}

/// `(V, C)` of [`tseitin_encode`] without building the clauses.
pub fn tseitin_size(net: &Netlist) -> (usize, usize) {
    let v = net.inputs().len() + net.gates().len();
    let c = net.gates().iter().map(|g| clause_count(g.kind)).sum();
    (v, c)
}

/// Encodes a combinational netlist into `f` under copy `tag`. Inputs found in
/// `bound` reuse the given variables; every other signal gets a fresh one.
/// Returns the output variables in port order.
pub fn encode_netlist(
    f: &mut CnfFormula,
    net: &Netlist,
    tag: &str,
    bound: &HashMap<String, i32>,
) -> Result<Vec<i32>, CnfError> {
    if !net.is_combinational() {
        return Err(CnfError::Sequential(net.name().to_string()));
    }
    let mut vars: HashMap<&str, i32> = HashMap::with_capacity(net.inputs().len() + net.gates().len());
    for i in net.inputs() {
        let v = match bound.get(i) {
            Some(&v) => v,
            None => f.new_var(),
        };
        vars.insert(i, v);
        f.bind(tag, i, v);
    }
    let mut ins = Vec::with_capacity(3);
    for g in net.gates() {
        let y = f.new_var();
        ins.clear();
        ins.extend(g.inputs.iter().map(|s| vars[s.as_str()]));
        encode_gate(f, g.kind, y, &ins);
        vars.insert(&g.output, y);
        f.bind(tag, &g.output, y);
    }
    Ok(net.outputs().iter().map(|o| vars[o.as_str()]).collect())
}

/// One variable per signal, inputs first, then gates in topological order.
pub fn tseitin_encode(net: &Netlist, tag: &str) -> Result<CnfFormula, CnfError> {
    let mut f = CnfFormula::new();
    encode_netlist(&mut f, net, tag, &HashMap::new())?;
    Ok(f)
}

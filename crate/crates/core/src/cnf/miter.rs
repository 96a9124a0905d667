// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;

use super::{encode_gate, encode_netlist, CnfError, CnfFormula};
use crate::fabric::LockedNetlist;
use crate::netlist::{GateKind, Netlist};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MiterMode {
    /// Free keys in both copies.
    Attack,
    /// Copy A keyed with the first key, copy B with the second.
    Equiv(Vec<bool>, Vec<bool>),
}

/// Two copies of a circuit sharing data inputs, constrained to differ on at
/// least one output.
#[derive(Debug, Clone)]
pub struct Miter {
    pub formula: CnfFormula,
    /// Shared data-input variables in data-port order.
    pub data: Vec<i32>,
    pub key_a: Vec<i32>,
    pub key_b: Vec<i32>,
    pub out_a: Vec<i32>,
    pub out_b: Vec<i32>,
    /// `diff[j]` is true iff output `j` differs between the copies.
    pub diff: Vec<i32>,
}

impl Miter {
    /// Data-input values from a model.
    pub fn data_values(&self, model: &[bool]) -> Vec<bool> {
        self.data.iter().map(|&v| model[v as usize - 1]).collect()
    }

    pub fn key_a_values(&self, model: &[bool]) -> Vec<bool> {
        self.key_a.iter().map(|&v| model[v as usize - 1]).collect()
    }
}

fn add_difference(f: &mut CnfFormula, out_a: &[i32], out_b: &[i32]) -> Vec<i32> {
    let diff: Vec<i32> = out_a
        .iter()
        .zip(out_b)
        .map(|(&a, &b)| {
            let d = f.new_var();
            encode_gate(f, GateKind::Xor, d, &[a, b]);
            d
        })
        .collect();
    f.add_clause(diff.clone());
    diff
}

pub fn build_miter(locked: &LockedNetlist, mode: MiterMode) -> Result<Miter, CnfError> {
    if locked.key_len() == 0 {
        return Err(CnfError::NoKeyInputs);
    }
    let net = locked.netlist();
    if net.outputs().is_empty() {
        return Err(CnfError::PortMismatch("locked netlist has no outputs".into()));
    }
    let mut f = CnfFormula::new();
    let mut bound = HashMap::new();
    let data: Vec<i32> = locked
        .data_inputs()
        .map(|name| {
            let v = f.new_var();
            bound.insert(name.to_string(), v);
            f.bind("data", name, v);
            v
        })
        .collect();
    let out_a = encode_netlist(&mut f, net, "A", &bound)?;
    let out_b = encode_netlist(&mut f, net, "B", &bound)?;
    let keys = |f: &CnfFormula, tag: &str| -> Vec<i32> {
        locked
            .key_inputs()
            .map(|k| f.var(tag, k).expect("key input encoded"))
            .collect()
    };
    let key_a = keys(&f, "A");
    let key_b = keys(&f, "B");
    if let MiterMode::Equiv(ka, kb) = &mode {
        for k in [ka, kb] {
            if k.len() != locked.key_len() {
                return Err(CnfError::KeyLength {
                    expected: locked.key_len(),
                    got: k.len(),
                });
            }
        }
        for (vars, bits) in [(&key_a, ka), (&key_b, kb)] {
            for (&v, &b) in vars.iter().zip(bits) {
                f.add_clause(vec![if b { v } else { -v }]);
            }
        }
    }
    let diff = add_difference(&mut f, &out_a, &out_b);
    Ok(Miter {
        formula: f,
        data,
        key_a,
        key_b,
        out_a,
        out_b,
        diff,
    })
}

/// Miter of two plain netlists with positionally matched ports. UNSAT iff
/// they compute the same function.
pub fn equivalence_miter(a: &Netlist, b: &Netlist) -> Result<Miter, CnfError> {
    if a.inputs().len() != b.inputs().len() || a.outputs().len() != b.outputs().len() {
        return Err(CnfError::PortMismatch(format!(
            "{}/{} vs {}/{} inputs/outputs",
            a.inputs().len(),
            a.outputs().len(),
            b.inputs().len(),
            b.outputs().len()
        )));
    }
    if a.outputs().is_empty() {
        return Err(CnfError::PortMismatch("no outputs".into()));
    }
    let mut f = CnfFormula::new();
    let data: Vec<i32> = a.inputs().iter().map(|_| f.new_var()).collect();
    let bind =
        |net: &Netlist| -> HashMap<String, i32> { net.inputs().iter().cloned().zip(data.iter().copied()).collect() };
    let out_a = encode_netlist(&mut f, a, "A", &bind(a))?;
    let out_b = encode_netlist(&mut f, b, "B", &bind(b))?;
    let diff = add_difference(&mut f, &out_a, &out_b);
    Ok(Miter {
        formula: f,
        data,
        key_a: vec![],
        key_b: vec![],
        out_a,
        out_b,
        diff,
    })
}

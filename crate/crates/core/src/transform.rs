// SPDX-License-Identifier: Apache-2.0

//! Circuit preparation passes: sequential unrolling, fan-out bounding and
//! LUT mapping.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equiv::WordEval;
use crate::netlist::bench::FreshNames;
use crate::netlist::{Flop, Gate, GateKind, Netlist, NetlistError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("unroll needs at least one frame")]
    ZeroFrames,
    #[error("fan-out limit must be at least 2, got {0}")]
    FanoutLimit(usize),
    #[error("LUT size must be at least 2, got {0}")]
    LutSize(usize),
    #[error("netlist `{0}` is sequential; unroll it first")]
    Sequential(String),
    #[error("cannot materialize a constant LUT without a primary input")]
    NoInputs,
    #[error("LUT `{output}` has {got} inputs, above the limit {k}")]
    LutFanin { output: String, got: usize, k: usize },
    #[error("LUT `{output}` truth table has {got} rows, expected {expected}")]
    TableLength {
        output: String,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

/// Replaces `T` clock cycles by `T` chained combinational copies.
///
/// Signal `s` of frame `t` (1-based) is named `s__f<t>`. Flop outputs of
/// frame 1 become primary inputs `<flop>__init`; frame-`T` flop data become
/// primary outputs `<flop>__final`. Inputs are ordered frame-major followed
/// by the `__init` ports; outputs likewise with the `__final` ports.
pub fn unroll(net: &Netlist, frames: usize) -> Result<Netlist, TransformError> {
    if frames == 0 {
        return Err(TransformError::ZeroFrames);
    }
    let flop_data: HashMap<&str, &str> = net
        .flops()
        .iter()
        .map(|f| (f.output.as_str(), f.data.as_str()))
        .collect();
    // Name of signal `sig` as seen in frame `t`.
    let name_of = |sig: &str, t: usize| -> String {
        let (mut sig, mut t) = (sig, t);
        while let Some(&d) = flop_data.get(sig) {
            if t == 1 {
                return format!("{sig}__init");
            }
            sig = d;
            t -= 1;
        }
        format!("{sig}__f{t}")
    };

    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    let mut gates = Vec::new();
    for t in 1..=frames {
        inputs.extend(net.inputs().iter().map(|pi| format!("{pi}__f{t}")));
        for g in net.gates() {
            gates.push(Gate {
                output: format!("{}__f{t}", g.output),
                kind: g.kind,
                inputs: g.inputs.iter().map(|s| name_of(s, t)).collect(),
            });
        }
        for po in net.outputs() {
            let port = format!("{po}__f{t}");
            let src = name_of(po, t);
            if src != port {
                gates.push(Gate {
                    output: port.clone(),
                    kind: GateKind::Buf,
                    inputs: vec![src],
                });
            }
            outputs.push(port);
        }
    }
    for f in net.flops() {
        inputs.push(format!("{}__init", f.output));
        let port = format!("{}__final", f.output);
        gates.push(Gate {
            output: port.clone(),
            kind: GateKind::Buf,
            inputs: vec![name_of(&f.data, frames)],
        });
        outputs.push(port);
    }
    let name = format!("{}_x{frames}", net.name());
    Ok(Netlist::new(name, inputs, outputs, gates, vec![])?)
}

#[derive(Debug, Clone, Copy)]
enum Sink {
    Pin(usize, usize),
    FlopData(usize),
}

/// Inserts balanced BUF trees so that no signal drives more than `k` sinks.
///
/// Sinks are gate pins, flop data pins and output ports; output ports stay on
/// the original signal.
pub fn bound_fanout(net: &Netlist, k: usize) -> Result<Netlist, TransformError> {
    if k < 2 {
        return Err(TransformError::FanoutLimit(k));
    }
    let mut sinks: HashMap<&str, Vec<Sink>> = HashMap::new();
    for (gi, g) in net.gates().iter().enumerate() {
        for (pi, s) in g.inputs.iter().enumerate() {
            sinks.entry(s.as_str()).or_default().push(Sink::Pin(gi, pi));
        }
    }
    for (fi, f) in net.flops().iter().enumerate() {
        sinks.entry(f.data.as_str()).or_default().push(Sink::FlopData(fi));
    }
    let is_output: HashSet<&str> = net.outputs().iter().map(String::as_str).collect();

    let mut gates: Vec<Gate> = net.gates().to_vec();
    let mut flops: Vec<Flop> = net.flops().to_vec();
    let mut fresh = FreshNames::new(net.signals().map(str::to_string).collect());
    let mut buffers = Vec::new();

    for sig in net.signals() {
        let Some(list) = sinks.get(sig) else { continue };
        let fixed = usize::from(is_output.contains(sig));
        if list.len() + fixed <= k {
            continue;
        }
        let mut rewire = |sink: Sink, driver: &str| match sink {
            Sink::Pin(g, p) => gates[g].inputs[p] = driver.to_string(),
            Sink::FlopData(f) => flops[f].data = driver.to_string(),
        };
        distribute(sig, list, k - fixed, k, &mut fresh, &mut buffers, &mut rewire);
    }
    gates.extend(buffers);
    Ok(Netlist::new(
        net.name(),
        net.inputs().to_vec(),
        net.outputs().to_vec(),
        gates,
        flops,
    )?)
}

fn distribute(
    driver: &str,
    sinks: &[Sink],
    capacity: usize,
    k: usize,
    fresh: &mut FreshNames,
    buffers: &mut Vec<Gate>,
    rewire: &mut impl FnMut(Sink, &str),
) {
    if sinks.len() <= capacity {
        for &s in sinks {
            rewire(s, driver);
        }
        return;
    }
    let (q, r) = (sinks.len() / capacity, sinks.len() % capacity);
    let mut start = 0;
    for i in 0..capacity {
        let len = q + usize::from(i < r);
        let group = &sinks[start..start + len];
        start += len;
        if group.len() == 1 {
            rewire(group[0], driver);
        } else {
            let buf = fresh.next();
            buffers.push(Gate {
                output: buf.clone(),
                kind: GateKind::Buf,
                inputs: vec![driver.to_string()],
            });
            distribute(&buf, group, k, k, fresh, buffers, rewire);
        }
    }
}

/// One lookup table. Row `r` of `truth_table` is the output when input `j`
/// equals bit `(m-1-j)` of `r` (first input is the most significant index
/// bit, row 0 is the all-zero row).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lut {
    pub output: String,
    pub inputs: Vec<String>,
    #[serde(with = "bit_string")]
    pub truth_table: Vec<bool>,
}

impl Lut {
    pub fn row(&self, ins: &[bool]) -> bool {
        let idx = ins.iter().fold(0usize, |acc, &b| acc << 1 | usize::from(b));
        self.truth_table[idx]
    }
}

/// LUT-level circuit with LUTs stored in topological order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LutNetlist {
    pub name: String,
    pub k: usize,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub luts: Vec<Lut>,
}

impl LutNetlist {
    /// Checks table sizes and fan-in and sorts the LUTs topologically.
    pub fn new(
        name: impl Into<String>,
        k: usize,
        inputs: Vec<String>,
        outputs: Vec<String>,
        luts: Vec<Lut>,
    ) -> Result<LutNetlist, TransformError> {
        for l in &luts {
            if l.inputs.len() > k {
                return Err(TransformError::LutFanin {
                    output: l.output.clone(),
                    got: l.inputs.len(),
                    k,
                });
            }
            if l.truth_table.len() != 1 << l.inputs.len() {
                return Err(TransformError::TableLength {
                    output: l.output.clone(),
                    expected: 1 << l.inputs.len(),
                    got: l.truth_table.len(),
                });
            }
        }
        // Only names and edges matter for ordering.
        let shadow: Vec<Gate> = luts
            .iter()
            .map(|l| Gate {
                output: l.output.clone(),
                kind: GateKind::Buf,
                inputs: l.inputs.clone(),
            })
            .collect();
        let order = crate::netlist::topo_sort(&shadow)?;
        let mut defined: HashSet<&str> = inputs.iter().map(String::as_str).collect();
        for l in &luts {
            if !defined.insert(&l.output) {
                return Err(NetlistError::DuplicateDefinition(l.output.clone()).into());
            }
        }
        for s in luts.iter().flat_map(|l| &l.inputs).chain(&outputs) {
            if !defined.contains(s.as_str()) {
                return Err(NetlistError::UndefinedSignal(s.clone()).into());
            }
        }
        let mut slots: Vec<Option<Lut>> = luts.into_iter().map(Some).collect();
        let luts = order.into_iter().map(|i| slots[i].take().unwrap()).collect();
        Ok(LutNetlist {
            name: name.into(),
            k,
            inputs,
            outputs,
            luts,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("LutNetlist serializes")
    }

    pub fn from_json(text: &str) -> Result<LutNetlist, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Evaluates the LUT network on one input vector.
    pub fn eval(&self, inputs: &[bool]) -> Vec<bool> {
        let mut vals: HashMap<&str, bool> = self
            .inputs
            .iter()
            .map(String::as_str)
            .zip(inputs.iter().copied())
            .collect();
        for l in &self.luts {
            let ins: Vec<bool> = l.inputs.iter().map(|s| vals[s.as_str()]).collect();
            vals.insert(&l.output, l.row(&ins));
        }
        self.outputs.iter().map(|o| vals[o.as_str()]).collect()
    }
}

impl WordEval for LutNetlist {
    fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    fn eval_comb(&self, inputs: &[u64]) -> Vec<u64> {
        let mut vals: HashMap<&str, u64> = self
            .inputs
            .iter()
            .map(String::as_str)
            .zip(inputs.iter().copied())
            .collect();
        for l in &self.luts {
            let ins: Vec<u64> = l.inputs.iter().map(|s| vals[s.as_str()]).collect();
            let m = ins.len();
            let mut out = 0u64;
            for (row, &bit) in l.truth_table.iter().enumerate() {
                if bit {
                    out |= (0..m).fold(!0u64, |acc, j| {
                        let w = ins[j];
                        acc & if row >> (m - 1 - j) & 1 == 1 { w } else { !w }
                    });
                }
            }
            vals.insert(&l.output, out);
        }
        self.outputs.iter().map(|o| vals[o.as_str()]).collect()
    }
}

mod bit_string {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bits: &[bool], s: S) -> Result<S::Ok, S::Error> {
        let text: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        s.serialize_str(&text)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
        let text = String::deserialize(d)?;
        text.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(D::Error::custom(format!("bad truth-table bit `{other}`"))),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MapMode {
    /// One LUT per gate.
    #[default]
    OneToOne,
    /// One LUT per gate, then single-fan-out drivers are merged into their
    /// sink while the merged support fits in `k` inputs.
    Greedy,
}

/// Maps a combinational netlist onto LUTs of at most `k` inputs.
pub fn map_to_luts(net: &Netlist, k: usize, mode: MapMode) -> Result<LutNetlist, TransformError> {
    if k < 2 {
        return Err(TransformError::LutSize(k));
    }
    if !net.is_combinational() {
        return Err(TransformError::Sequential(net.name().to_string()));
    }
    let mut fresh = FreshNames::new(net.signals().map(str::to_string).collect());
    let mut luts = Vec::with_capacity(net.gates().len());
    for g in net.gates() {
        match g.kind {
            GateKind::Const0 | GateKind::Const1 => {
                let anchor = net.inputs().first().ok_or(TransformError::NoInputs)?;
                let c = g.kind == GateKind::Const1;
                luts.push(Lut {
                    output: g.output.clone(),
                    inputs: vec![anchor.clone()],
                    truth_table: vec![c, c],
                });
            }
            GateKind::Mux2 if k < 3 => {
                // (sel, a0, a1) -> (!sel & a0) | (sel & a1)
                let (sel, a0, a1) = (&g.inputs[0], &g.inputs[1], &g.inputs[2]);
                let lo = fresh.next();
                let hi = fresh.next();
                luts.push(Lut {
                    output: lo.clone(),
                    inputs: vec![sel.clone(), a0.clone()],
                    truth_table: vec![false, true, false, false],
                });
                luts.push(Lut {
                    output: hi.clone(),
                    inputs: vec![sel.clone(), a1.clone()],
                    truth_table: vec![false, false, false, true],
                });
                luts.push(Lut {
                    output: g.output.clone(),
                    inputs: vec![lo, hi],
                    truth_table: GateKind::Or.truth_table(),
                });
            }
            kind => luts.push(Lut {
                output: g.output.clone(),
                inputs: g.inputs.clone(),
                truth_table: kind.truth_table(),
            }),
        }
    }
    if mode == MapMode::Greedy {
        luts = merge_single_fanout(luts, net.outputs(), k);
    }
    LutNetlist::new(net.name(), k, net.inputs().to_vec(), net.outputs().to_vec(), luts)
}

fn merge_single_fanout(mut luts: Vec<Lut>, outputs: &[String], k: usize) -> Vec<Lut> {
    loop {
        let mut fanout: HashMap<String, usize> = HashMap::new();
        for s in luts.iter().flat_map(|l| &l.inputs).chain(outputs) {
            *fanout.entry(s.clone()).or_default() += 1;
        }
        let position: HashMap<String, usize> = luts.iter().enumerate().map(|(i, l)| (l.output.clone(), i)).collect();
        let mut merged = None;
        'search: for (si, sink) in luts.iter().enumerate() {
            for s in &sink.inputs {
                let Some(&di) = position.get(s) else { continue };
                if fanout[s] != 1 {
                    continue;
                }
                let driver = &luts[di];
                let mut support: Vec<String> = sink.inputs.iter().filter(|x| *x != s).cloned().collect();
                for x in &driver.inputs {
                    if !support.contains(x) {
                        support.push(x.clone());
                    }
                }
                if support.len() <= k {
                    merged = Some((si, di, compose(sink, driver, support)));
                    break 'search;
                }
            }
        }
        let Some((si, di, lut)) = merged else {
            return luts;
        };
        luts[si] = lut;
        luts.remove(di);
    }
}

fn compose(sink: &Lut, driver: &Lut, support: Vec<String>) -> Lut {
    let m = support.len();
    let table = (0..1usize << m)
        .map(|row| {
            let val = |name: &str| {
                let j = support.iter().position(|x| x == name).unwrap();
                row >> (m - 1 - j) & 1 == 1
            };
            let d: Vec<bool> = driver.inputs.iter().map(|x| val(x)).collect();
            let dv = driver.row(&d);
            let s: Vec<bool> = sink
                .inputs
                .iter()
                .map(|x| if *x == driver.output { dv } else { val(x) })
                .collect();
            sink.row(&s)
        })
        .collect();
    Lut {
        output: sink.output.clone(),
        inputs: support,
        truth_table: table,
    }
}

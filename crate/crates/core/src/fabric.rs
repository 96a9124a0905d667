// SPDX-License-Identifier: Apache-2.0

//! The universal-circuit fabric.
//!
//! A fabric is an ordered crossbar of `n_poles` poles. Pole `i` (1-based)
//! holds a `k`-input LUT whose pins each select one source among the primary
//! inputs and poles `1..i`; every output selects among all inputs and poles.
//! Any LUT circuit with at most `n_poles` LUTs embeds by placing its LUTs on
//! the poles in topological order, so the configuration bits alone decide
//! which circuit the fabric computes.
//!
//! Bitstream layout, for `i = 1..n_poles`: the `k` pin selects of pole `i`
//! (`w_i` bits each, MSB first), then its `2^k` truth-table bits `t_0..`;
//! then the output selects (`w_out` bits each, MSB first).

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equiv::WordEval;
use crate::netlist::{Gate, GateKind, Netlist, NetlistError, Simulator};
use crate::transform::{map_to_luts, LutNetlist, MapMode, TransformError};

pub const KEY_PREFIX: &str = "keyinput";
const INTERNAL_PREFIX: &str = "__uc_";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FabricError {
    #[error("fabric parameter `{0}` must be at least 1")]
    ZeroSized(&'static str),
    #[error("pole size k must be at least 2, got {0}")]
    PoleSize(usize),
    #[error("circuit has {luts} LUTs but the fabric has {poles} poles")]
    TooManyLuts { luts: usize, poles: usize },
    #[error("LUT `{lut}` has {fanin} inputs, fabric poles take {k}")]
    FaninExceeded { lut: String, fanin: usize, k: usize },
    #[error("{what}: fabric has {expected}, circuit has {got}")]
    PortMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("bitstream has {got} bits, fabric needs {expected}")]
    KeyLength { expected: usize, got: usize },
    #[error("bad bitstream character `{0}`")]
    BadBit(char),
    #[error("netlist has no `{KEY_PREFIX}*` inputs")]
    NoKeyInputs,
    #[error("key inputs are not numbered 0..{0}")]
    KeyNumbering(usize),
    #[error("fabric descriptor: {0}")]
    Descriptor(String),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

/// `ceil(log2(n))`, with 0 for `n <= 1`.
pub fn select_width(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fabric {
    n_in: usize,
    n_out: usize,
    n_poles: usize,
    k: usize,
}

impl Fabric {
    pub fn new(n_in: usize, n_out: usize, n_poles: usize, k: usize) -> Result<Fabric, FabricError> {
        for (v, name) in [(n_in, "n_in"), (n_out, "n_out"), (n_poles, "n_poles")] {
            if v == 0 {
                return Err(FabricError::ZeroSized(name));
            }
        }
        if k < 2 {
            return Err(FabricError::PoleSize(k));
        }
        Ok(Fabric {
            n_in,
            n_out,
            n_poles,
            k,
        })
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn n_poles(&self) -> usize {
        self.n_poles
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Sources visible to pole `i` (1-based).
    pub fn pole_sources(&self, i: usize) -> usize {
        self.n_in + i - 1
    }

    pub fn pole_width(&self, i: usize) -> usize {
        select_width(self.pole_sources(i))
    }

    pub fn pole_widths(&self) -> Vec<usize> {
        (1..=self.n_poles).map(|i| self.pole_width(i)).collect()
    }

    pub fn output_sources(&self) -> usize {
        self.n_in + self.n_poles
    }

    pub fn output_width(&self) -> usize {
        select_width(self.output_sources())
    }

    fn pole_bits(&self, i: usize) -> usize {
        self.k * self.pole_width(i) + (1 << self.k)
    }

    pub fn key_length(&self) -> usize {
        (1..=self.n_poles).map(|i| self.pole_bits(i)).sum::<usize>() + self.n_out * self.output_width()
    }

    /// Bit offset of pole `i`'s first pin select.
    pub fn pole_offset(&self, i: usize) -> usize {
        (1..i).map(|p| self.pole_bits(p)).sum()
    }

    /// Bit offset of output `j`'s (0-based) select field.
    pub fn output_offset(&self, j: usize) -> usize {
        self.pole_offset(self.n_poles + 1) + j * self.output_width()
    }

    /// Number of programmable source-selection edges: one per (pin, source)
    /// and per (output, source) pair. Quadratic in `n_in + n_poles`.
    pub fn edge_capacity(&self) -> usize {
        (1..=self.n_poles).map(|i| self.k * self.pole_sources(i)).sum::<usize>() + self.n_out * self.output_sources()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&FabricDescriptor::from(self)).expect("descriptor serializes")
    }

    pub fn from_json(text: &str) -> Result<Fabric, FabricError> {
        let d: FabricDescriptor = serde_json::from_str(text).map_err(|e| FabricError::Descriptor(e.to_string()))?;
        let f = Fabric::new(d.n_in, d.n_out, d.n_poles, d.k)?;
        if FabricDescriptor::from(&f) != d {
            return Err(FabricError::Descriptor(
                "derived widths or key length disagree with the parameters".into(),
            ));
        }
        Ok(f)
    }
}

/// JSON form of a fabric. Widths and key length are derived but written out
/// for readers; they are checked on load.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FabricDescriptor {
    pub n_in: usize,
    pub n_out: usize,
    pub n_poles: usize,
    pub k: usize,
    pub pole_widths: Vec<usize>,
    pub output_width: usize,
    pub key_length: usize,
}

impl From<&Fabric> for FabricDescriptor {
    fn from(f: &Fabric) -> Self {
        FabricDescriptor {
            n_in: f.n_in,
            n_out: f.n_out,
            n_poles: f.n_poles,
            k: f.k,
            pole_widths: f.pole_widths(),
            output_width: f.output_width(),
            key_length: f.key_length(),
        }
    }
}

pub fn build_fabric(n_in: usize, n_out: usize, n_poles: usize, k: usize) -> Result<Fabric, FabricError> {
    Fabric::new(n_in, n_out, n_poles, k)
}

pub fn key_length(f: &Fabric) -> usize {
    f.key_length()
}

/// Configuration bits of a fabric; the secret key.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bitstream(Vec<bool>);

impl Bitstream {
    pub fn new(bits: Vec<bool>) -> Bitstream {
        Bitstream(bits)
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn random(len: usize, seed: u64) -> Bitstream {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Bitstream((0..len).map(|_| rng.gen()).collect())
    }

    pub fn flipped(&self, bit: usize) -> Bitstream {
        let mut bits = self.0.clone();
        bits[bit] = !bits[bit];
        Bitstream(bits)
    }

    /// One line of `0`/`1` characters.
    pub fn to_text(&self) -> String {
        let mut s: String = self.0.iter().map(|&b| if b { '1' } else { '0' }).collect();
        s.push('\n');
        s
    }

    pub fn from_text(text: &str) -> Result<Bitstream, FabricError> {
        text.trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(FabricError::BadBit(other)),
            })
            .collect::<Result<_, _>>()
            .map(Bitstream)
    }
}

impl From<Vec<bool>> for Bitstream {
    fn from(bits: Vec<bool>) -> Self {
        Bitstream(bits)
    }
}

fn push_value(bits: &mut Vec<bool>, value: usize, width: usize) {
    for b in (0..width).rev() {
        bits.push(value >> b & 1 == 1);
    }
}

/// Configures `f` to compute `c`.
///
/// Pole `i` hosts the `i`-th LUT of `c` (topological order). A LUT with
/// fewer than `k` inputs uses the leading pins; the spare pins repeat pin 1's
/// source and the table ignores them. Poles past the last LUT get random
/// bits from `seed`.
pub fn program(f: &Fabric, c: &LutNetlist, seed: u64) -> Result<Bitstream, FabricError> {
    if c.inputs.len() != f.n_in {
        return Err(FabricError::PortMismatch {
            what: "primary inputs",
            expected: f.n_in,
            got: c.inputs.len(),
        });
    }
    if c.outputs.len() != f.n_out {
        return Err(FabricError::PortMismatch {
            what: "primary outputs",
            expected: f.n_out,
            got: c.outputs.len(),
        });
    }
    if c.luts.len() > f.n_poles {
        return Err(FabricError::TooManyLuts {
            luts: c.luts.len(),
            poles: f.n_poles,
        });
    }
    if let Some(l) = c.luts.iter().find(|l| l.inputs.len() > f.k) {
        return Err(FabricError::FaninExceeded {
            lut: l.output.clone(),
            fanin: l.inputs.len(),
            k: f.k,
        });
    }

    let mut source: HashMap<&str, usize> = c.inputs.iter().enumerate().map(|(j, s)| (s.as_str(), j)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bits = Vec::with_capacity(f.key_length());
    for i in 1..=f.n_poles {
        let w = f.pole_width(i);
        let Some(lut) = c.luts.get(i - 1) else {
            bits.extend((0..f.pole_bits(i)).map(|_| rng.gen::<bool>()));
            continue;
        };
        let m = lut.inputs.len();
        let first = lut.inputs.first().map_or(0, |s| source[s.as_str()]);
        for pin in 0..f.k {
            let src = lut.inputs.get(pin).map_or(first, |s| source[s.as_str()]);
            push_value(&mut bits, src, w);
        }
        bits.extend((0..1usize << f.k).map(|idx| lut.truth_table[idx >> (f.k - m)]));
        source.insert(&lut.output, f.n_in + i - 1);
    }
    for o in &c.outputs {
        push_value(&mut bits, source[o.as_str()], f.output_width());
    }
    debug_assert_eq!(bits.len(), f.key_length());
    Ok(Bitstream(bits))
}

/// Gate netlist with key inputs `keyinput0..` plus the original data inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LockedNetlist {
    netlist: Netlist,
    key_pos: Vec<usize>,
    data_pos: Vec<usize>,
}

impl LockedNetlist {
    /// Splits the inputs into `keyinput<i>` ports and data ports. The key
    /// indices must cover `0..L` exactly.
    pub fn from_netlist(netlist: Netlist) -> Result<LockedNetlist, FabricError> {
        let mut keyed: Vec<(usize, usize)> = Vec::new();
        let mut data_pos = Vec::new();
        for (pos, name) in netlist.inputs().iter().enumerate() {
            match name.strip_prefix(KEY_PREFIX).and_then(|s| s.parse::<usize>().ok()) {
                Some(idx) => keyed.push((idx, pos)),
                None => data_pos.push(pos),
            }
        }
        if keyed.is_empty() {
            return Err(FabricError::NoKeyInputs);
        }
        keyed.sort_unstable();
        if keyed.iter().enumerate().any(|(i, &(idx, _))| i != idx) {
            return Err(FabricError::KeyNumbering(keyed.len()));
        }
        Ok(LockedNetlist {
            key_pos: keyed.into_iter().map(|(_, p)| p).collect(),
            data_pos,
            netlist,
        })
    }

    pub fn netlist(&self) -> &Netlist {
        &self.netlist
    }

    pub fn key_len(&self) -> usize {
        self.key_pos.len()
    }

    pub fn num_data_inputs(&self) -> usize {
        self.data_pos.len()
    }

    pub fn key_inputs(&self) -> impl Iterator<Item = &str> {
        self.key_pos.iter().map(|&p| self.netlist.inputs()[p].as_str())
    }

    pub fn data_inputs(&self) -> impl Iterator<Item = &str> {
        self.data_pos.iter().map(|&p| self.netlist.inputs()[p].as_str())
    }

    /// Input position of key bit `i` within the underlying netlist.
    pub fn key_position(&self, i: usize) -> usize {
        self.key_pos[i]
    }

    pub fn data_position(&self, j: usize) -> usize {
        self.data_pos[j]
    }

    pub fn to_bench(&self) -> String {
        crate::netlist::write_bench(&self.netlist)
    }

    /// Evaluator over the data inputs with the key fixed.
    pub fn keyed(&self, key: &[bool]) -> KeyedEval {
        assert_eq!(key.len(), self.key_len(), "key length");
        let mut fixed = vec![0u64; self.netlist.inputs().len()];
        for (&p, &b) in self.key_pos.iter().zip(key) {
            fixed[p] = if b { !0 } else { 0 };
        }
        KeyedEval {
            sim: Simulator::new(&self.netlist),
            fixed,
            data_pos: self.data_pos.clone(),
        }
    }

    pub fn eval(&self, key: &[bool], data: &[bool]) -> Vec<bool> {
        let words: Vec<u64> = data.iter().map(|&b| u64::from(b)).collect();
        self.keyed(key)
            .eval_comb(&words)
            .into_iter()
            .map(|w| w & 1 == 1)
            .collect()
    }

    /// Plain netlist over the data inputs with every key input tied to a
    /// constant.
    pub fn with_key(&self, key: &[bool]) -> Result<Netlist, FabricError> {
        if key.len() != self.key_len() {
            return Err(FabricError::KeyLength {
                expected: self.key_len(),
                got: key.len(),
            });
        }
        let mut gates: Vec<Gate> = self
            .key_pos
            .iter()
            .zip(key)
            .map(|(&p, &b)| Gate {
                output: self.netlist.inputs()[p].clone(),
                kind: if b { GateKind::Const1 } else { GateKind::Const0 },
                inputs: vec![],
            })
            .collect();
        gates.extend(self.netlist.gates().iter().cloned());
        Ok(Netlist::new(
            self.netlist.name(),
            self.data_inputs().map(str::to_string).collect(),
            self.netlist.outputs().to_vec(),
            gates,
            vec![],
        )?)
    }
}

/// A locked netlist with its key fixed, evaluated over data inputs only.
pub struct KeyedEval {
    sim: Simulator,
    fixed: Vec<u64>,
    data_pos: Vec<usize>,
}

impl WordEval for KeyedEval {
    fn num_inputs(&self) -> usize {
        self.data_pos.len()
    }

    fn eval_comb(&self, inputs: &[u64]) -> Vec<u64> {
        let mut words = self.fixed.clone();
        for (&p, &w) in self.data_pos.iter().zip(inputs) {
            words[p] = w;
        }
        self.sim.eval_words(&words, &[]).0
    }
}

struct Lowering {
    gates: Vec<Gate>,
    counter: usize,
}

impl Lowering {
    fn fresh(&mut self, scope: &str) -> String {
        self.counter += 1;
        format!("{INTERNAL_PREFIX}{scope}_{}", self.counter)
    }

    /// MUX2 tree over `legs` (index order) steered by `selects`, MSB first.
    fn mux_tree(&mut self, scope: &str, legs: &[String], selects: &[String], root: Option<&str>) -> String {
        debug_assert_eq!(legs.len(), 1 << selects.len());
        let out = if selects.is_empty() {
            legs[0].clone()
        } else {
            let half = legs.len() / 2;
            let a0 = self.mux_tree(scope, &legs[..half], &selects[1..], None);
            let a1 = self.mux_tree(scope, &legs[half..], &selects[1..], None);
            if a0 == a1 {
                a0
            } else {
                let out = match root {
                    Some(r) => r.to_string(),
                    None => self.fresh(scope),
                };
                self.gates.push(Gate {
                    output: out.clone(),
                    kind: GateKind::Mux2,
                    inputs: vec![selects[0].clone(), a0, a1],
                });
                return out;
            }
        };
        match root {
            Some(r) => {
                self.gates.push(Gate {
                    output: r.to_string(),
                    kind: GateKind::Buf,
                    inputs: vec![out],
                });
                r.to_string()
            }
            None => out,
        }
    }
}

/// Lowers `f` with generic port names `x<j>` and `y<j>`.
pub fn lower_to_gates(f: &Fabric) -> Result<LockedNetlist, FabricError> {
    let data: Vec<String> = (0..f.n_in).map(|j| format!("x{j}")).collect();
    let outs: Vec<String> = (0..f.n_out).map(|j| format!("y{j}")).collect();
    lower_to_gates_with_ports(f, &data, &outs)
}

/// Lowers `f` to MUX2 gates.
///
/// Select fields decode modulo the number of sources: value `v` picks source
/// `v mod n`, so every key of the right length is a valid configuration.
/// Each pole's LUT is a `2^k`-leg mux tree over its table bits, steered by
/// the pin signals with pin 1 as the most significant select.
pub fn lower_to_gates_with_ports(
    f: &Fabric,
    data_inputs: &[String],
    outputs: &[String],
) -> Result<LockedNetlist, FabricError> {
    if data_inputs.len() != f.n_in {
        return Err(FabricError::PortMismatch {
            what: "data inputs",
            expected: f.n_in,
            got: data_inputs.len(),
        });
    }
    if outputs.len() != f.n_out {
        return Err(FabricError::PortMismatch {
            what: "outputs",
            expected: f.n_out,
            got: outputs.len(),
        });
    }
    let key: Vec<String> = (0..f.key_length()).map(|i| format!("{KEY_PREFIX}{i}")).collect();
    let mut low = Lowering {
        gates: Vec::new(),
        counter: 0,
    };
    let mut sources: Vec<String> = data_inputs.to_vec();
    let mut cursor = 0;
    for i in 1..=f.n_poles {
        let n = f.pole_sources(i);
        let w = f.pole_width(i);
        let legs: Vec<String> = (0..1usize << w).map(|v| sources[v % n].clone()).collect();
        let mut pins = Vec::with_capacity(f.k);
        for pin in 1..=f.k {
            let selects = &key[cursor..cursor + w];
            cursor += w;
            let name = format!("{INTERNAL_PREFIX}p{i}_pin{pin}");
            pins.push(low.mux_tree(&format!("p{i}s{pin}"), &legs, selects, Some(&name)));
        }
        let table = &key[cursor..cursor + (1 << f.k)];
        cursor += 1 << f.k;
        let pole = format!("{INTERNAL_PREFIX}p{i}");
        low.mux_tree(&format!("p{i}t"), table, &pins, Some(&pole));
        sources.push(pole);
    }
    let w = f.output_width();
    let n = f.output_sources();
    let legs: Vec<String> = (0..1usize << w).map(|v| sources[v % n].clone()).collect();
    for (j, name) in outputs.iter().enumerate() {
        let selects = &key[cursor..cursor + w];
        cursor += w;
        low.mux_tree(&format!("o{j}"), &legs, selects, Some(name));
    }
    debug_assert_eq!(cursor, key.len());

    let inputs: Vec<String> = key.into_iter().chain(data_inputs.iter().cloned()).collect();
    let net = Netlist::new("uc", inputs, outputs.to_vec(), low.gates, vec![])?;
    LockedNetlist::from_netlist(net)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ObfuscationConfig {
    pub k: usize,
    pub pole_slack: usize,
    pub seed: u64,
    pub map_mode: MapMode,
}

impl Default for ObfuscationConfig {
    fn default() -> Self {
        ObfuscationConfig {
            k: 2,
            pole_slack: 0,
            seed: 0,
            map_mode: MapMode::OneToOne,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Obfuscated {
    pub locked: LockedNetlist,
    pub key: Bitstream,
    pub fabric: Fabric,
    pub luts: LutNetlist,
}

/// LUT-maps `net`, sizes a fabric with `pole_slack` spare poles, programs it
/// and lowers it. `net` must be combinational.
pub fn obfuscate(net: &Netlist, k: usize, pole_slack: usize, seed: u64) -> Result<Obfuscated, FabricError> {
    obfuscate_with(
        net,
        &ObfuscationConfig {
            k,
            pole_slack,
            seed,
            ..ObfuscationConfig::default()
        },
    )
}

pub fn obfuscate_with(net: &Netlist, cfg: &ObfuscationConfig) -> Result<Obfuscated, FabricError> {
    let luts = map_to_luts(net, cfg.k, cfg.map_mode)?;
    let fabric = Fabric::new(
        net.inputs().len(),
        net.outputs().len(),
        luts.luts.len() + cfg.pole_slack,
        cfg.k,
    )?;
    let key = program(&fabric, &luts, cfg.seed)?;
    // An output that is also a data input needs its own driver signal.
    let outputs: Vec<String> = net
        .outputs()
        .iter()
        .map(|o| {
            if net.inputs().contains(o) {
                format!("{o}__out")
            } else {
                o.clone()
            }
        })
        .collect();
    let locked = lower_to_gates_with_ports(&fabric, net.inputs(), &outputs)?;
    let locked = LockedNetlist::from_netlist(locked.netlist.with_name(format!("{}_uc", net.name())))?;
    Ok(Obfuscated {
        locked,
        key,
        fabric,
        luts,
    })
}

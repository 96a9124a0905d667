// SPDX-License-Identifier: Apache-2.0

//! ISCAS'89 `.bench` reader and writer.

use std::collections::HashSet;
use std::fmt::Write as _;

use super::{Flop, Gate, GateKind, Netlist, NetlistError, GENERATED_PREFIX};

enum Item {
    Input(String),
    Output(String),
    Assign {
        line: usize,
        lhs: String,
        kind: String,
        args: Vec<String>,
    },
}

struct Cursor<'a> {
    line_no: usize,
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, message: impl Into<String>) -> NetlistError {
        NetlistError::Syntax {
            line: self.line_no,
            column: self.text[..self.pos].chars().count() + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.text.len()
    }

    fn ident(&mut self) -> Result<String, NetlistError> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let len = rest
            .find(|c: char| c.is_whitespace() || "(),=".contains(c))
            .unwrap_or(rest.len());
        if len == 0 {
            return Err(self.err("expected a name"));
        }
        self.pos += len;
        Ok(rest[..len].to_string())
    }

    fn expect(&mut self, ch: char) -> Result<(), NetlistError> {
        self.skip_ws();
        if self.text[self.pos..].starts_with(ch) {
            self.pos += ch.len_utf8();
            Ok(())
        } else {
            Err(self.err(format!("expected `{ch}`")))
        }
    }

    fn peek(&mut self, ch: char) -> bool {
        self.skip_ws();
        self.text[self.pos..].starts_with(ch)
    }

    fn args(&mut self) -> Result<Vec<String>, NetlistError> {
        self.expect('(')?;
        let mut args = Vec::new();
        if self.peek(')') {
            self.pos += 1;
            return Ok(args);
        }
        loop {
            args.push(self.ident()?);
            if self.peek(',') {
                self.pos += 1;
            } else {
                self.expect(')')?;
                return Ok(args);
            }
        }
    }
}

fn parse_line(line_no: usize, text: &str) -> Result<Option<Item>, NetlistError> {
    let text = text.split('#').next().unwrap_or("");
    let mut cur = Cursor { line_no, text, pos: 0 };
    if cur.at_end() {
        return Ok(None);
    }
    let head = cur.ident()?;
    let item = if cur.peek('=') {
        cur.pos += 1;
        let kind = cur.ident()?;
        let args = cur.args()?;
        Item::Assign {
            line: line_no,
            lhs: head,
            kind,
            args,
        }
    } else {
        let args = cur.args()?;
        if args.len() != 1 {
            return Err(cur.err(format!("{head} takes exactly one signal")));
        }
        let name = args.into_iter().next().unwrap();
        match head.to_ascii_uppercase().as_str() {
            "INPUT" => Item::Input(name),
            "OUTPUT" => Item::Output(name),
            _ => {
                return Err(NetlistError::Syntax {
                    line: line_no,
                    column: 1,
                    message: format!("expected INPUT, OUTPUT or an assignment, found `{head}`"),
                })
            }
        }
    };
    if !cur.at_end() {
        return Err(cur.err("trailing characters"));
    }
    Ok(Some(item))
}

/// Parses `.bench` text. LF and CRLF line endings are accepted.
///
/// AND/OR/NAND/NOR/XOR/XNOR gates wider than two inputs are rebuilt as
/// balanced 2-input trees whose root carries the original kind; the
/// intermediate signals get fresh `__g<n>` names.
pub fn parse_bench(text: &str) -> Result<Netlist, NetlistError> {
    let mut items = Vec::new();
    for (i, line) in text.split('\n').enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if let Some(item) = parse_line(i + 1, line)? {
            items.push(item);
        }
    }

    let taken: HashSet<String> = items
        .iter()
        .filter_map(|it| match it {
            Item::Input(n) => Some(n.clone()),
            Item::Assign { lhs, .. } => Some(lhs.clone()),
            Item::Output(_) => None,
        })
        .collect();
    let mut fresh = FreshNames::new(taken);

    let (mut inputs, mut outputs, mut gates, mut flops) = (vec![], vec![], vec![], vec![]);
    for item in items {
        match item {
            Item::Input(n) => inputs.push(n),
            Item::Output(n) => outputs.push(n),
            Item::Assign { line, lhs, kind, args } => {
                if kind.eq_ignore_ascii_case("DFF") {
                    if args.len() != 1 {
                        return Err(NetlistError::Syntax {
                            line,
                            column: 1,
                            message: "DFF takes exactly one data input".into(),
                        });
                    }
                    flops.push(Flop {
                        output: lhs,
                        data: args.into_iter().next().unwrap(),
                    });
                    continue;
                }
                let kind = GateKind::from_name(&kind).ok_or(NetlistError::UnknownGate { line, kind })?;
                push_gate(&mut gates, &mut fresh, lhs, kind, args);
            }
        }
    }
    Netlist::new("", inputs, outputs, gates, flops)
}

pub(crate) struct FreshNames {
    taken: HashSet<String>,
    next: usize,
}

impl FreshNames {
    pub(crate) fn new(taken: HashSet<String>) -> FreshNames {
        FreshNames { taken, next: 0 }
    }

    pub(crate) fn next(&mut self) -> String {
        loop {
            let name = format!("{GENERATED_PREFIX}{}", self.next);
            self.next += 1;
            if self.taken.insert(name.clone()) {
                return name;
            }
        }
    }
}

fn push_gate(gates: &mut Vec<Gate>, fresh: &mut FreshNames, output: String, kind: GateKind, args: Vec<String>) {
    let base = match kind {
        GateKind::And | GateKind::Nand => GateKind::And,
        GateKind::Or | GateKind::Nor => GateKind::Or,
        GateKind::Xor | GateKind::Xnor => GateKind::Xor,
        _ => {
            gates.push(Gate {
                output,
                kind,
                inputs: args,
            });
            return;
        }
    };
    if args.len() <= 2 {
        gates.push(Gate {
            output,
            kind,
            inputs: args,
        });
        return;
    }
    fn tree(gates: &mut Vec<Gate>, fresh: &mut FreshNames, base: GateKind, args: &[String]) -> String {
        if args.len() == 1 {
            return args[0].clone();
        }
        let mid = args.len().div_ceil(2);
        let l = tree(gates, fresh, base, &args[..mid]);
        let r = tree(gates, fresh, base, &args[mid..]);
        let out = fresh.next();
        gates.push(Gate {
            output: out.clone(),
            kind: base,
            inputs: vec![l, r],
        });
        out
    }
    let mid = args.len().div_ceil(2);
    let l = tree(gates, fresh, base, &args[..mid]);
    let r = tree(gates, fresh, base, &args[mid..]);
    gates.push(Gate {
        output,
        kind,
        inputs: vec![l, r],
    });
}

/// Serializes to `.bench` with LF line endings.
pub fn write_bench(net: &Netlist) -> String {
    let mut out = String::new();
    if !net.name().is_empty() {
        let _ = writeln!(out, "# {}", net.name());
    }
    for i in net.inputs() {
        let _ = writeln!(out, "INPUT({i})");
    }
    for o in net.outputs() {
        let _ = writeln!(out, "OUTPUT({o})");
    }
    for f in net.flops() {
        let _ = writeln!(out, "{} = DFF({})", f.output, f.data);
    }
    for g in net.gates() {
        let _ = writeln!(out, "{} = {}({})", g.output, g.kind.name(), g.inputs.join(", "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::simulate;
    use std::collections::HashMap;

    #[test]
    fn identity_circuit() {
        let net = parse_bench("INPUT(a)\nOUTPUT(y)\ny = BUF(a)\n").unwrap();
        assert_eq!(net.inputs(), ["a"]);
        assert_eq!(net.outputs(), ["y"]);
        assert_eq!(net.gates().len(), 1);
        assert!(net.flops().is_empty());
    }

    #[test]
    fn wide_and_is_decomposed() {
        let net = parse_bench("INPUT(a)\nINPUT(b)\nINPUT(c)\nOUTPUT(y)\ny = AND(a,b,c)\n").unwrap();
        assert_eq!(net.gates().len(), 2);
        assert!(net.gates().iter().all(|g| g.inputs.len() == 2));
        assert!(net.gates()[0].output.starts_with(GENERATED_PREFIX));
        for row in 0..8u32 {
            let pi: Vec<bool> = (0..3).map(|j| row >> j & 1 == 1).collect();
            let (out, _) = simulate(&net, &pi, &HashMap::new()).unwrap();
            assert_eq!(out[0], pi.iter().all(|&b| b), "row {row}");
        }
    }

    #[test]
    fn wide_nor_inverts_once() {
        let text = "INPUT(a)\nINPUT(b)\nINPUT(c)\nINPUT(d)\nINPUT(e)\nOUTPUT(y)\ny = NOR(a,b,c,d,e)\n";
        let net = parse_bench(text).unwrap();
        for row in 0..32u32 {
            let pi: Vec<bool> = (0..5).map(|j| row >> j & 1 == 1).collect();
            let (out, _) = simulate(&net, &pi, &HashMap::new()).unwrap();
            assert_eq!(out[0], !pi.iter().any(|&b| b));
        }
    }

    #[test]
    fn generated_names_avoid_collisions() {
        let text = "INPUT(a)\nINPUT(b)\nINPUT(__g0)\nOUTPUT(y)\ny = OR(a,b,__g0)\n";
        let net = parse_bench(text).unwrap();
        assert_eq!(net.gates()[0].output, "__g1");
    }

    #[test]
    fn comments_crlf_and_case() {
        let text = "# header\r\ninput(a)  # trailing\r\nOUTPUT(y)\r\n\r\ny = not(a)\r\n";
        let net = parse_bench(text).unwrap();
        assert_eq!(net.gates()[0].kind, GateKind::Not);
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_bench("INPUT(a)\nOUTPUT(y)\ny = AND(a b)\n").unwrap_err();
        assert_eq!(
            err,
            NetlistError::Syntax {
                line: 3,
                column: 11,
                message: "expected `)`".into()
            }
        );
        let err = parse_bench("INPUT(a)\nOUTPUT(y)\ny = FOO(a)\n").unwrap_err();
        assert_eq!(
            err,
            NetlistError::UnknownGate {
                line: 3,
                kind: "FOO".into()
            }
        );
        assert!(matches!(
            parse_bench("INPUT(a)\nOUTPUT(y)\ny = AND(a, z)\n").unwrap_err(),
            NetlistError::UndefinedSignal(s) if s == "z"
        ));
        assert!(matches!(
            parse_bench("INPUT(a)\nOUTPUT(a)\na = NOT(a)\n").unwrap_err(),
            NetlistError::DuplicateDefinition(_)
        ));
        assert!(matches!(
            parse_bench("INPUT(a)\nOUTPUT(y)\ny = AND(a, x)\nx = OR(a, y)\n").unwrap_err(),
            NetlistError::Cycle(_)
        ));
    }

    #[test]
    fn writer_format() {
        let text = "INPUT(a)\nINPUT(b)\nOUTPUT(y)\nq = DFF(y)\ny = AND(a, q)\nz = CONST1()\n";
        let net = parse_bench(text).unwrap();
        assert_eq!(write_bench(&net), text);
    }
}

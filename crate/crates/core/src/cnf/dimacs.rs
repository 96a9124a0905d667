// SPDX-License-Identifier: Apache-2.0

use std::io::{self, Write};

use super::{CnfError, CnfFormula};
use crate::sat::{SatError, SolveResult, Stats, Status};

pub fn write_dimacs<W: Write>(f: &CnfFormula, w: &mut W) -> io::Result<()> {
    writeln!(w, "p cnf {} {}", f.num_vars(), f.num_clauses())?;
    for c in f.clauses() {
        for l in c {
            write!(w, "{l} ")?;
        }
        writeln!(w, "0")?;
    }
    Ok(())
}

pub fn to_dimacs(f: &CnfFormula) -> String {
    let mut buf = Vec::new();
    write_dimacs(f, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii")
}

fn parse_err(line: usize, message: impl Into<String>) -> CnfError {
    CnfError::Parse {
        line,
        message: message.into(),
    }
}

/// Parses a DIMACS CNF file. Clauses may span lines; `c` lines are comments.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, CnfError> {
    let mut f = CnfFormula::new();
    let mut header: Option<(usize, usize)> = None;
    let mut current: Vec<i32> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if header.is_some() {
                return Err(parse_err(n, "duplicate header"));
            }
            match parts.as_slice() {
                ["p", "cnf", v, c] => {
                    let v = v.parse().map_err(|_| parse_err(n, "bad variable count"))?;
                    let c = c.parse().map_err(|_| parse_err(n, "bad clause count"))?;
                    f.reserve(v);
                    header = Some((v, c));
                }
                _ => return Err(parse_err(n, "expected `p cnf <vars> <clauses>`")),
            }
            continue;
        }
        let (v, _) = header.ok_or_else(|| parse_err(n, "clause before header"))?;
        for tok in line.split_whitespace() {
            let l: i32 = tok.parse().map_err(|_| parse_err(n, format!("bad literal `{tok}`")))?;
            if l == 0 {
                if current.is_empty() {
                    return Err(parse_err(n, "empty clause"));
                }
                f.add_clause(std::mem::take(&mut current));
            } else if l.unsigned_abs() as usize > v {
                return Err(parse_err(n, format!("literal {l} exceeds {v} variables")));
            } else {
                current.push(l);
            }
        }
    }
    if !current.is_empty() {
        f.add_clause(current);
    }
    match header {
        None => Err(parse_err(0, "missing header")),
        Some((_, c)) if c != f.num_clauses() => Err(parse_err(
            0,
            format!("header declares {c} clauses, found {}", f.num_clauses()),
        )),
        Some(_) => Ok(f),
    }
}

/// Parses competition-format solver output. Variables absent from the `v`
/// lines default to false.
pub fn read_model(output: &str, num_vars: usize) -> Result<SolveResult, SatError> {
    let mut status = None;
    let mut model = vec![false; num_vars];
    let mut saw_values = false;
    for line in output.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("s ") {
            status = Some(match rest.trim() {
                "SATISFIABLE" => Status::Sat,
                "UNSATISFIABLE" => Status::Unsat,
                "UNKNOWN" => Status::Timeout,
                other => return Err(SatError::Protocol(format!("unknown status `{other}`"))),
            });
        } else if let Some(rest) = line.strip_prefix("v ") {
            saw_values = true;
            for tok in rest.split_whitespace() {
                let l: i32 = tok
                    .parse()
                    .map_err(|_| SatError::Protocol(format!("bad literal `{tok}`")))?;
                if l == 0 {
                    continue;
                }
                let v = l.unsigned_abs() as usize;
                if v > num_vars {
                    return Err(SatError::LiteralRange { lit: l, num_vars });
                }
                model[v - 1] = l > 0;
            }
        }
    }
    let status = status.ok_or_else(|| SatError::Protocol("no `s` line".into()))?;
    if status == Status::Sat && !saw_values && num_vars > 0 {
        return Err(SatError::Protocol("SATISFIABLE without `v` lines".into()));
    }
    Ok(SolveResult {
        status,
        model: (status == Status::Sat).then_some(model),
        stats: Stats::default(),
    })
}

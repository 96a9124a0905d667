// SPDX-License-Identifier: Apache-2.0

//! Attack-trace metrics over sets of attack records, and report files.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attacks::{AttackId, AttackRecord, AttackStatus};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("variable count is zero")]
    ZeroVars,
    #[error("baseline clause count is zero")]
    ZeroBase,
    #[error("duplicate record for circuit {circuit:?}, attack {attack}")]
    Duplicate { circuit: String, attack: AttackId },
    #[error("attack table line {line}: {message}")]
    Table { line: usize, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Clauses per variable.
pub fn ctvr(c: usize, v: usize) -> Result<f64, MetricsError> {
    if v == 0 {
        return Err(MetricsError::ZeroVars);
    }
    Ok(c as f64 / v as f64)
}

/// Clause growth of the locked circuit over its unlocked baseline.
pub fn cgf(c_obf: usize, c_base: usize) -> Result<f64, MetricsError> {
    if c_base == 0 {
        return Err(MetricsError::ZeroBase);
    }
    Ok(c_obf as f64 / c_base as f64)
}

/// Key bits per variable.
pub fn kcr(k: usize, v: usize) -> Result<f64, MetricsError> {
    if v == 0 {
        return Err(MetricsError::ZeroVars);
    }
    Ok(k as f64 / v as f64)
}

pub fn permille(x: f64) -> f64 {
    x * 1000.0
}

/// `|C - V| / V`.
pub fn rr(c: usize, v: usize) -> Result<f64, MetricsError> {
    if v == 0 {
        return Err(MetricsError::ZeroVars);
    }
    Ok(c.abs_diff(v) as f64 / v as f64)
}

/// Min-max normalization. A group whose values are all equal maps to zeros
/// and is flagged by the second return value.
pub fn minmax_normalize(values: &[f64]) -> (Vec<f64>, bool) {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if values.is_empty() || min == max {
        return (vec![0.0; values.len()], !values.is_empty());
    }
    let span = max - min;
    let out = values
        .iter()
        .map(|&x| {
            if x == max {
                1.0
            } else {
                ((x - min) / span).clamp(0.0, 1.0)
            }
        })
        .collect();
    (out, false)
}

/// One report row. Field order is the column order of the CSV and JSON
/// reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub circuit: String,
    pub attack: AttackId,
    #[serde(rename = "V")]
    pub v: usize,
    #[serde(rename = "C")]
    pub c: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub time_s: f64,
    pub status: AttackStatus,
    pub bits_matched: Option<usize>,
    pub ctvr: f64,
    pub ctvr_norm: f64,
    pub cgf: Option<f64>,
    pub kcr: f64,
    pub kcr_permille: f64,
    pub rr: f64,
    pub drr_norm: f64,
    pub cope_percent: Option<f64>,
}

pub const COLUMNS: [&str; 16] = [
    "circuit",
    "attack",
    "V",
    "C",
    "K",
    "time_s",
    "status",
    "bits_matched",
    "ctvr",
    "ctvr_norm",
    "cgf",
    "kcr",
    "kcr_permille",
    "rr",
    "drr_norm",
    "cope_percent",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricsReport {
    /// Sorted by circuit, then attack.
    pub rows: Vec<MetricsRow>,
    pub warnings: Vec<String>,
}

/// Computes metric rows. `ctvr_norm` is normalized per attack across
/// circuits, `drr_norm` per circuit across attacks. The `cgf` baseline is
/// the record's own `baseline_clauses`, else the entry for its circuit in
/// `baselines`; without either the row has no `cgf`.
pub fn compute(records: &[AttackRecord], baselines: &HashMap<String, usize>) -> Result<MetricsReport, MetricsError> {
    let mut by_key: BTreeMap<(String, AttackId), &AttackRecord> = BTreeMap::new();
    for r in records {
        if by_key.insert((r.circuit.clone(), r.attack), r).is_some() {
            return Err(MetricsError::Duplicate {
                circuit: r.circuit.clone(),
                attack: r.attack,
            });
        }
    }
    let mut rows = Vec::with_capacity(by_key.len());
    for r in by_key.values() {
        let kcr = kcr(r.k, r.v)?;
        rows.push(MetricsRow {
            circuit: r.circuit.clone(),
            attack: r.attack,
            v: r.v,
            c: r.c,
            k: r.k,
            time_s: r.time_s,
            status: r.status,
            bits_matched: r.bits_matched,
            ctvr: ctvr(r.c, r.v)?,
            ctvr_norm: 0.0,
            cgf: r
                .baseline_clauses
                .or_else(|| baselines.get(&r.circuit).copied())
                .map(|b| cgf(r.c, b))
                .transpose()?,
            kcr,
            kcr_permille: permille(kcr),
            rr: rr(r.c, r.v)?,
            drr_norm: 0.0,
            cope_percent: r.cope_percent,
        });
    }
    let mut warnings = Vec::new();
    let attacks: BTreeSet<AttackId> = rows.iter().map(|r| r.attack).collect();
    for a in attacks {
        let idx: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].attack == a).collect();
        let (norm, flat) = minmax_normalize(&idx.iter().map(|&i| rows[i].ctvr).collect::<Vec<_>>());
        if flat {
            warnings.push(format!(
                "ctvr_norm: all {} values for attack {a} are equal, set to 0",
                idx.len()
            ));
        }
        for (&i, x) in idx.iter().zip(norm) {
            rows[i].ctvr_norm = x;
        }
    }
    let circuits: BTreeSet<String> = rows.iter().map(|r| r.circuit.clone()).collect();
    for c in circuits {
        let idx: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].circuit == c).collect();
        let (norm, flat) = minmax_normalize(&idx.iter().map(|&i| rows[i].rr).collect::<Vec<_>>());
        if flat {
            warnings.push(format!(
                "drr_norm: all {} values for circuit {c} are equal, set to 0",
                idx.len()
            ));
        }
        for (&i, x) in idx.iter().zip(norm) {
            rows[i].drr_norm = x;
        }
    }
    Ok(MetricsReport { rows, warnings })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

/// Writes rows as CSV or as a JSON array.
pub fn emit_report<W: Write>(rows: &[MetricsRow], sink: W, format: ReportFormat) -> Result<(), MetricsError> {
    match format {
        ReportFormat::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(sink);
            w.write_record(COLUMNS)?;
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        ReportFormat::Json => {
            let mut sink = sink;
            serde_json::to_writer_pretty(&mut sink, rows)?;
            sink.write_all(b"\n")?;
        }
    }
    Ok(())
}

pub fn report_string(rows: &[MetricsRow], format: ReportFormat) -> Result<String, MetricsError> {
    let mut buf = Vec::new();
    emit_report(rows, &mut buf, format)?;
    Ok(String::from_utf8(buf).expect("reports are utf-8"))
}

pub fn read_json_report<R: Read>(src: R) -> Result<Vec<MetricsRow>, MetricsError> {
    Ok(serde_json::from_reader(src)?)
}

pub fn read_csv_report<R: Read>(src: R) -> Result<Vec<MetricsRow>, MetricsError> {
    let mut r = csv::Reader::from_reader(src);
    r.deserialize().map(|row| row.map_err(MetricsError::from)).collect()
}

#[derive(Debug, Deserialize)]
struct TableRow {
    circuit: String,
    attack: String,
    #[serde(rename = "V")]
    v: usize,
    #[serde(rename = "C")]
    c: usize,
    #[serde(rename = "K")]
    k: usize,
    time_h: String,
    bits_found: Option<usize>,
    bits_total: Option<usize>,
}

/// Time limit applied to rows whose time is `TO`.
pub const TABLE_TIMEOUT_H: f64 = 48.0;

/// Reads an externally transcribed attack table with columns `circuit,
/// attack, V, C, K, time_h, bits_found, bits_total`. `time_h` is a number
/// of hours for a finished run or `TO` for a timeout. A finished run whose
/// key is only partly correct is a guess.
pub fn ingest_table<R: Read>(src: R) -> Result<Vec<AttackRecord>, MetricsError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(src);
    let mut out = Vec::new();
    for (i, row) in reader.deserialize::<TableRow>().enumerate() {
        let line = i + 2;
        let row = row?;
        let bad = |message: String| MetricsError::Table { line, message };
        let attack: AttackId = row.attack.parse().map_err(|e: String| bad(e))?;
        let mut rec = AttackRecord::new(&row.circuit, attack, row.k);
        rec.v = row.v;
        rec.c = row.c;
        if row.time_h.eq_ignore_ascii_case("TO") {
            rec.status = AttackStatus::Timeout;
            rec.time_s = TABLE_TIMEOUT_H * 3600.0;
        } else {
            let h: f64 = row
                .time_h
                .parse()
                .map_err(|_| bad(format!("bad time {:?}", row.time_h)))?;
            rec.status = AttackStatus::Broken;
            rec.time_s = h * 3600.0;
        }
        if let (Some(f), Some(t)) = (row.bits_found, row.bits_total) {
            if f > t {
                return Err(bad(format!("{f} of {t} bits found")));
            }
            if f < t && rec.status == AttackStatus::Broken {
                rec.status = AttackStatus::Guess;
            }
        }
        rec.bits_matched = row.bits_found;
        out.push(rec);
    }
    Ok(out)
}

/// The transcribed attack table bundled with the crate: SAT-family attacks
/// on nine benchmarks.
pub const BUNDLED_TABLE: &str = include_str!("../data/attack_table.csv");

pub fn bundled_records() -> Vec<AttackRecord> {
    ingest_table(BUNDLED_TABLE.as_bytes()).expect("bundled table parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_denominators() {
        assert!(matches!(ctvr(1, 0), Err(MetricsError::ZeroVars)));
        assert!(matches!(kcr(1, 0), Err(MetricsError::ZeroVars)));
        assert!(matches!(rr(1, 0), Err(MetricsError::ZeroVars)));
        assert!(matches!(cgf(1, 0), Err(MetricsError::ZeroBase)));
    }

    #[test]
    fn identities() {
        assert_eq!(ctvr(17, 17).unwrap(), 1.0);
        assert_eq!(cgf(9, 9).unwrap(), 1.0);
        assert_eq!(cgf(200, 100).unwrap(), 2.0);
        assert_eq!(kcr(0, 5).unwrap(), 0.0);
        assert_eq!(rr(5, 5).unwrap(), 0.0);
    }

    #[test]
    fn normalize_small_groups() {
        assert_eq!(minmax_normalize(&[3.0, 4.0]), (vec![0.0, 1.0], false));
        let (n, flat) = minmax_normalize(&[0.3, 0.5, 0.7]);
        assert!(!flat);
        assert_eq!(n[0], 0.0);
        assert!((n[1] - 0.5).abs() < 1e-12);
        assert_eq!(n[2], 1.0);
        assert_eq!(minmax_normalize(&[2.0, 2.0]), (vec![0.0, 0.0], true));
        assert_eq!(minmax_normalize(&[]), (vec![], false));
    }

    #[test]
    fn duplicate_rejected() {
        let r = AttackRecord {
            v: 10,
            c: 20,
            ..AttackRecord::new("c", AttackId::Sat, 1)
        };
        assert!(matches!(
            compute(&[r.clone(), r], &HashMap::new()),
            Err(MetricsError::Duplicate { .. })
        ));
    }

    #[test]
    fn empty_reports() {
        assert_eq!(report_string(&[], ReportFormat::Csv).unwrap(), COLUMNS.join(",") + "\n");
        assert_eq!(report_string(&[], ReportFormat::Json).unwrap(), "[]\n");
    }

    #[test]
    fn table_time_parsing() {
        let t = "circuit,attack,V,C,K,time_h,bits_found,bits_total\nx,SAT,4,6,2,0.5,,\ny,ICY,4,6,2,TO,1,2\n";
        let recs = ingest_table(t.as_bytes()).unwrap();
        assert_eq!(recs[0].status, AttackStatus::Broken);
        assert_eq!(recs[0].time_s, 1800.0);
        assert_eq!(recs[1].status, AttackStatus::Timeout);
        assert_eq!(recs[1].bits_matched, Some(1));
        let bad = "circuit,attack,V,C,K,time_h,bits_found,bits_total\nx,SAT,4,6,2,soon,,\n";
        assert!(matches!(
            ingest_table(bad.as_bytes()),
            Err(MetricsError::Table { line: 2, .. })
        ));
    }
}

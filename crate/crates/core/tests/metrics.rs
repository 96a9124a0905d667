// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;

use proptest::prelude::*;
use ucobf_core::attacks::{AttackId, AttackRecord, AttackStatus};
use ucobf_core::metrics::*;

fn row<'a>(rows: &'a [MetricsRow], circuit: &str, attack: AttackId) -> &'a MetricsRow {
    rows.iter()
        .find(|r| r.circuit == circuit && r.attack == attack)
        .unwrap()
}

fn record(circuit: &str, attack: AttackId, v: usize, c: usize, k: usize) -> AttackRecord {
    AttackRecord {
        v,
        c,
        ..AttackRecord::new(circuit, attack, k)
    }
}

#[test]
fn s27_sat_row_values() {
    assert!((ctvr(48008, 71217).unwrap() - 0.674109).abs() < 1e-6);
    assert!((permille(kcr(244, 71217).unwrap()) - 3.4261).abs() < 1e-3);
    assert!((permille(kcr(244, 4289).unwrap()) - 56.8765).abs() < 0.05);
    assert!((rr(48008, 71217).unwrap() - 0.325891).abs() < 1e-6);
    assert!((ctvr(218572, 285315).unwrap() - 0.766072).abs() < 1e-6);
}

#[test]
fn bundled_table_shape() {
    let recs = bundled_records();
    assert_eq!(recs.len(), 54);
    let circuits: std::collections::BTreeSet<_> = recs.iter().map(|r| r.circuit.as_str()).collect();
    assert_eq!(circuits.len(), 9);
    for r in &recs {
        let broken = r.circuit == "s27" && r.attack != AttackId::Icy;
        assert_eq!(r.status == AttackStatus::Broken, broken, "{} {}", r.circuit, r.attack);
    }
}

#[test]
fn sat_normalization_over_bundled_table() {
    let report = compute(&bundled_records(), &HashMap::new()).unwrap();
    let rows = &report.rows;
    assert_eq!(rows.len(), 54);
    // Independent recomputation of the SAT group.
    let sat: Vec<(String, f64)> = bundled_records()
        .iter()
        .filter(|r| r.attack == AttackId::Sat)
        .map(|r| (r.circuit.clone(), r.c as f64 / r.v as f64))
        .collect();
    let lo = sat.iter().map(|s| s.1).fold(f64::MAX, f64::min);
    let hi = sat.iter().map(|s| s.1).fold(f64::MIN, f64::max);
    for (c, x) in &sat {
        let got = row(rows, c, AttackId::Sat).ctvr_norm;
        assert!((got - (x - lo) / (hi - lo)).abs() < 1e-12);
    }
    assert!((row(rows, "s298", AttackId::Sat).ctvr_norm - 0.9172).abs() < 0.01);
    assert_eq!(row(rows, "s27", AttackId::Sat).ctvr_norm, 0.0);
    assert_eq!(row(rows, "s386", AttackId::Sat).ctvr_norm, 1.0);
    assert!(row(rows, "s27", AttackId::Sat).cgf.is_none());
    assert!(report.warnings.is_empty());
}

#[test]
fn drr_normalizes_per_circuit() {
    let recs = vec![
        record("a", AttackId::Sat, 10, 13, 1),
        record("a", AttackId::AppSat, 10, 15, 1),
        record("a", AttackId::Scope, 10, 17, 1),
        record("b", AttackId::Sat, 10, 10, 1),
    ];
    let report = compute(&recs, &HashMap::new()).unwrap();
    let drr: Vec<f64> = report
        .rows
        .iter()
        .filter(|r| r.circuit == "a")
        .map(|r| r.drr_norm)
        .collect();
    assert_eq!(drr.len(), 3);
    let mut sorted = drr.clone();
    sorted.sort_by(f64::total_cmp);
    assert_eq!(sorted[0], 0.0);
    assert!((sorted[1] - 0.5).abs() < 1e-12);
    assert_eq!(sorted[2], 1.0);
    assert_eq!(row(&report.rows, "b", AttackId::Sat).drr_norm, 0.0);
    assert_eq!(report.warnings.len(), 3, "{:?}", report.warnings);
}

#[test]
fn cgf_from_baselines() {
    let recs = vec![record("a", AttackId::Sat, 10, 400, 1)];
    let base = HashMap::from([("a".to_string(), 40)]);
    let report = compute(&recs, &base).unwrap();
    assert_eq!(report.rows[0].cgf, Some(10.0));
    let zero = HashMap::from([("a".to_string(), 0)]);
    assert!(matches!(compute(&recs, &zero), Err(MetricsError::ZeroBase)));
}

#[test]
fn json_to_csv_is_byte_identical() {
    let rows = compute(&bundled_records(), &HashMap::new()).unwrap().rows;
    let csv = report_string(&rows, ReportFormat::Csv).unwrap();
    let json = report_string(&rows, ReportFormat::Json).unwrap();
    let back = read_json_report(json.as_bytes()).unwrap();
    assert_eq!(back, rows);
    assert_eq!(report_string(&back, ReportFormat::Csv).unwrap(), csv);
    assert_eq!(read_csv_report(csv.as_bytes()).unwrap(), rows);
    assert_eq!(csv.lines().next().unwrap(), COLUMNS.join(","));
    let keys: Vec<String> = serde_json::from_str::<Vec<serde_json::Map<String, serde_json::Value>>>(&json).unwrap()[0]
        .keys()
        .cloned()
        .collect();
    let mut want: Vec<String> = COLUMNS.iter().map(|s| s.to_string()).collect();
    want.sort();
    let mut keys = keys;
    keys.sort();
    assert_eq!(keys, want);
}

#[test]
fn csv_quotes_awkward_names() {
    let recs = vec![
        record("odd, \"name\"", AttackId::Sat, 10, 12, 1),
        record("plain", AttackId::Sat, 10, 14, 1),
    ];
    let rows = compute(&recs, &HashMap::new()).unwrap().rows;
    let csv = report_string(&rows, ReportFormat::Csv).unwrap();
    assert!(csv.contains("\"odd, \"\"name\"\"\""));
    assert_eq!(read_csv_report(csv.as_bytes()).unwrap(), rows);
}

#[test]
fn reports_are_deterministic() {
    let a = compute(&bundled_records(), &HashMap::new()).unwrap().rows;
    let mut shuffled = bundled_records();
    shuffled.reverse();
    let b = compute(&shuffled, &HashMap::new()).unwrap().rows;
    assert_eq!(
        report_string(&a, ReportFormat::Csv).unwrap(),
        report_string(&b, ReportFormat::Csv).unwrap()
    );
}

proptest! {
    #[test]
    fn ratios_are_scale_free(c in 0usize..1_000_000, v in 1usize..1_000_000, k in 0usize..10_000, s in 1usize..50) {
        prop_assert!((ctvr(c * s, v * s).unwrap() - ctvr(c, v).unwrap()).abs() < 1e-12);
        prop_assert!((kcr(k * s, v * s).unwrap() - kcr(k, v).unwrap()).abs() < 1e-12);
        prop_assert!((rr(c * s, v * s).unwrap() - rr(c, v).unwrap()).abs() < 1e-12);
        prop_assert!(rr(c, v).unwrap() >= 0.0);
    }

    #[test]
    fn normalization_in_unit_interval(xs in prop::collection::vec(-1e6f64..1e6, 1..40)) {
        let (n, flat) = minmax_normalize(&xs);
        prop_assert_eq!(n.len(), xs.len());
        prop_assert!(n.iter().all(|x| (0.0..=1.0).contains(x)));
        let lo = xs.iter().copied().fold(f64::MAX, f64::min);
        let hi = xs.iter().copied().fold(f64::MIN, f64::max);
        prop_assert_eq!(flat, lo == hi);
        for (x, y) in xs.iter().zip(&n) {
            if !flat && *x == lo {
                prop_assert_eq!(*y, 0.0);
            }
            if !flat && *x == hi {
                prop_assert_eq!(*y, 1.0);
            }
        }
    }
}

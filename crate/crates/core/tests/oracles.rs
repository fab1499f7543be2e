//! Randomized comparisons of engine operations against brute-force oracles.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use dqaudit::analytics::{cross_tabulate, descriptive_stats, find_duplicates, find_gaps, outliers};
use dqaudit::checks::{check_completeness, check_primary_key, check_referential_integrity, check_validity};
use dqaudit::compare::{align_by_sequence, extract_unique, match_merge, set_membership, JoinKind};
use dqaudit::generate::generate_table;
use dqaudit::model::{CellAddress, CellValue, Column, ColumnSpec, DataType, Schema, Table};
use dqaudit::report::{parse_structured, render_report, ReportFormat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rust_decimal::Decimal;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn letters(mut n: u32) -> String {
    let mut out = Vec::new();
    while n > 0 {
        let r = (n - 1) % 26;
        out.push(b'A' + r as u8);
        n = (n - 1) / 26;
    }
    out.reverse();
    String::from_utf8(out).unwrap()
}

#[test]
fn a1_addresses_match_bijective_base26() {
    assert_eq!(CellAddress::new("t", 10, 27).a1(), "AA10");
    // Enumerate column labels in order: A..Z, AA..ZZ, AAA..
    let mut labels = Vec::new();
    for len in 1..=3 {
        let mut cur = vec![0u8; len];
        loop {
            labels.push(cur.iter().map(|&d| (b'A' + d) as char).collect::<String>());
            let mut i = len;
            while i > 0 && cur[i - 1] == 25 {
                cur[i - 1] = 0;
                i -= 1;
            }
            if i == 0 {
                break;
            }
            cur[i - 1] += 1;
        }
    }
    for (i, label) in labels.iter().enumerate() {
        let col = i as u32 + 1;
        assert_eq!(&letters(col), label);
        assert_eq!(CellAddress::new("t", 1, col).a1(), format!("{label}1"));
    }
}

fn nullable_table(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> Table {
    let columns = (0..cols)
        .map(|c| {
            let cells = (0..rows)
                .map(|_| {
                    if r.gen_bool(0.2) {
                        CellValue::Null
                    } else {
                        CellValue::from(r.gen_range(0..50i64))
                    }
                })
                .collect();
            Column::new(format!("c{c}"), cells)
        })
        .collect();
    Table::new("t", columns).unwrap()
}

#[test]
fn completeness_equals_null_scan() {
    let mut r = rng(1);
    for _ in 0..50 {
        let rows = r.gen_range(0..40);
        let t = nullable_table(&mut r, rows, 4);
        let required: Vec<bool> = (0..4).map(|_| r.gen_bool(0.5)).collect();
        let mut schema = Schema::new("t");
        for (c, &req) in required.iter().enumerate() {
            let spec = ColumnSpec::new(format!("c{c}"), DataType::Number);
            schema = schema.with_column(if req { spec.required() } else { spec });
        }
        let got: BTreeSet<(u32, u32)> = check_completeness(&t, &schema)
            .iter()
            .flat_map(|f| f.addresses.iter().map(|a| (a.row, a.column)))
            .collect();
        let mut want = BTreeSet::new();
        for (c, &req) in required.iter().enumerate() {
            for row in 0..t.row_count() {
                if req && t.cell(row, c).is_null() {
                    want.insert((row as u32 + 1, c as u32 + 1));
                }
            }
        }
        assert_eq!(got, want);
    }
}

#[test]
fn primary_key_groups_equal_group_by() {
    let mut r = rng(2);
    for _ in 0..100 {
        let n = r.gen_range(1..60);
        let keys: Vec<i64> = (0..n).map(|_| r.gen_range(0..30)).collect();
        let t = Table::from_rows("t", ["k"], keys.iter().map(|&k| vec![k.into()]).collect()).unwrap();
        let schema = Schema::new("t").with_column(ColumnSpec::new("k", DataType::Number).primary_key());
        let got: BTreeSet<Vec<u32>> = check_primary_key(&t, &schema)
            .unwrap()
            .iter()
            .map(|f| f.addresses.iter().map(|a| a.row).collect())
            .collect();
        let mut groups: BTreeMap<i64, Vec<u32>> = BTreeMap::new();
        for (i, &k) in keys.iter().enumerate() {
            groups.entry(k).or_default().push(i as u32 + 1);
        }
        let want: BTreeSet<Vec<u32>> = groups.into_values().filter(|g| g.len() > 1).collect();
        assert_eq!(got, want);
    }
}

#[test]
fn referential_integrity_equals_set_difference() {
    let mut r = rng(3);
    for _ in 0..100 {
        let parent_keys: Vec<i64> = (0..r.gen_range(0..20)).map(|_| r.gen_range(0..40)).collect();
        let child_keys: Vec<i64> = (0..r.gen_range(0..40)).map(|_| r.gen_range(0..40)).collect();
        let parent =
            Table::from_rows("p", ["id"], parent_keys.iter().map(|&k| vec![k.into()]).collect()).unwrap();
        let child =
            Table::from_rows("c", ["pid"], child_keys.iter().map(|&k| vec![k.into()]).collect()).unwrap();
        let fk = ColumnSpec::new("pid", DataType::Number).with_foreign_key("p", "id");
        let got: Vec<u32> = check_referential_integrity(&child, &parent, &fk)
            .unwrap()
            .iter()
            .map(|f| f.addresses[0].row)
            .collect();
        let want: Vec<u32> = child_keys
            .iter()
            .enumerate()
            .filter(|(_, k)| !parent_keys.iter().any(|p| p == *k))
            .map(|(i, _)| i as u32 + 1)
            .collect();
        let mut got_sorted = got.clone();
        got_sorted.sort();
        assert_eq!(got_sorted, want);
    }
}

#[test]
fn descriptive_stats_equal_single_pass_recomputation() {
    let mut r = rng(4);
    for _ in 0..100 {
        let n = r.gen_range(0..80);
        let cells: Vec<CellValue> = (0..n)
            .map(|_| {
                if r.gen_bool(0.1) {
                    CellValue::Null
                } else {
                    CellValue::Number(Decimal::new(r.gen_range(-10_000..10_000), r.gen_range(0..3)))
                }
            })
            .collect();
        let s = descriptive_stats(&Column::new("x", cells.clone()), 3);
        let values: Vec<Decimal> = cells.iter().filter_map(|c| c.as_number()).collect();
        assert_eq!(s.count, n);
        assert_eq!(s.null_count, n - values.len());
        let mut min = None;
        let mut max = None;
        let mut total = Decimal::ZERO;
        for &v in &values {
            min = Some(min.map_or(v, |m: Decimal| m.min(v)));
            max = Some(max.map_or(v, |m: Decimal| m.max(v)));
            total += v;
        }
        assert_eq!(s.min.as_ref().and_then(|c| c.as_number()), min);
        assert_eq!(s.max.as_ref().and_then(|c| c.as_number()), max);
        if values.is_empty() {
            assert!(s.mean.is_none());
        } else {
            assert_eq!(s.sum, Some(total));
            let mean = (total / Decimal::from(values.len())).round_dp(6);
            assert_eq!(s.mean_decimal(6).unwrap(), mean);
        }
        let distinct: BTreeSet<Decimal> = values.iter().copied().collect();
        assert_eq!(s.frequency.len(), distinct.len());
    }
}

#[test]
fn cross_tab_equals_pairwise_count() {
    let mut r = rng(5);
    for _ in 0..20 {
        let n = r.gen_range(0..500);
        let a: Vec<CellValue> = (0..n).map(|_| CellValue::from(r.gen_range(0..5i64))).collect();
        let b: Vec<CellValue> = (0..n)
            .map(|_| {
                if r.gen_bool(0.1) {
                    CellValue::Null
                } else {
                    ["x", "y", "z"][r.gen_range(0..3)].into()
                }
            })
            .collect();
        let ct = cross_tabulate(&Column::new("a", a.clone()), &Column::new("b", b.clone())).unwrap();
        for x in ct.row_keys() {
            for y in ct.column_keys() {
                let want = a.iter().zip(&b).filter(|(p, q)| *p == x && *q == y).count();
                assert_eq!(ct.get(x, y), want);
            }
        }
        assert_eq!(ct.counts.values().sum::<usize>(), n);
    }
}

#[test]
fn duplicates_equal_sort_then_scan() {
    let mut r = rng(6);
    for _ in 0..100 {
        let n = r.gen_range(0..50);
        let rows: Vec<(i64, i64)> = (0..n).map(|_| (r.gen_range(0..4), r.gen_range(0..4))).collect();
        let t = Table::from_rows(
            "t",
            ["a", "b"],
            rows.iter().map(|&(a, b)| vec![a.into(), b.into()]).collect(),
        )
        .unwrap();
        let report = find_duplicates(&t, &[] as &[&str]).unwrap();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (rows[i], i));
        let mut want: Vec<Vec<usize>> = Vec::new();
        let mut i = 0;
        while i < order.len() {
            let mut j = i;
            while j + 1 < order.len() && rows[order[j + 1]] == rows[order[i]] {
                j += 1;
            }
            if j > i {
                want.push(order[i..=j].to_vec());
            }
            i = j + 1;
        }
        want.sort_by_key(|g| g[0]);
        assert_eq!(report.groups, want);
    }
}

#[test]
fn gaps_equal_set_complement() {
    let mut r = rng(7);
    for _ in 0..200 {
        let n = r.gen_range(1..60);
        let values: Vec<i64> = (0..n).map(|_| r.gen_range(1..=100)).collect();
        let col = Column::new("k", values.iter().map(|&v| CellValue::from(v)).collect());
        let report = find_gaps(&col, Decimal::ONE).unwrap();
        let missing: BTreeSet<i64> = report
            .gaps
            .iter()
            .flat_map(|g| g.missing_values(Decimal::ONE))
            .map(|v| i64::try_from(v.as_number().unwrap()).unwrap())
            .collect();
        let present: BTreeSet<i64> = values.iter().copied().collect();
        let lo = *present.first().unwrap();
        let hi = *present.last().unwrap();
        let want: BTreeSet<i64> = (lo..=hi).filter(|v| !present.contains(v)).collect();
        assert_eq!(missing, want);
        assert!(report.irregular.is_empty());
    }
}

/// Linear-interpolation percentile on f64, the spreadsheet QUARTILE rule.
fn percentile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn fence_oracle(values: &[i64], k: f64) -> Vec<usize> {
    let mut sorted: Vec<f64> = values.iter().map(|&v| v as f64).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q1 = percentile(&sorted, 0.25);
    let q3 = percentile(&sorted, 0.75);
    let iqr = q3 - q1;
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| (v as f64) < q1 - k * iqr || (v as f64) > q3 + k * iqr)
        .map(|(i, _)| i)
        .collect()
}

#[test]
fn outliers_match_percentile_oracle() {
    let col = |v: &[i64]| Column::new("x", v.iter().map(|&x| CellValue::from(x)).collect());
    let k = Decimal::new(15, 1);
    assert_eq!(outliers(&col(&[1, 2, 3, 4, 100]), k).unwrap().rows, vec![4]);
    assert_eq!(fence_oracle(&[1, 2, 3, 4, 100], 1.5), vec![4]);
    assert!(outliers(&col(&[1, 2, 3, 4]), k).unwrap().rows.is_empty());
    assert!(fence_oracle(&[1, 2, 3, 4], 1.5).is_empty());
    let mut r = rng(8);
    for _ in 0..200 {
        let n = r.gen_range(4..40);
        // Integers times 4 keep every quartile and fence exact in binary.
        let values: Vec<i64> = (0..n).map(|_| r.gen_range(0..50) * 4).collect();
        assert_eq!(
            outliers(&col(&values), k).unwrap().rows,
            fence_oracle(&values, 1.5)
        );
    }
}

fn lcs_dp<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut dp = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for i in 0..a.len() {
        for j in 0..b.len() {
            dp[i + 1][j + 1] = if a[i] == b[j] {
                dp[i][j] + 1
            } else {
                dp[i][j + 1].max(dp[i + 1][j])
            };
        }
    }
    dp[a.len()][b.len()]
}

#[test]
fn sequence_alignment_pairs_equal_lcs_length() {
    let mut r = rng(9);
    for _ in 0..60 {
        let base: Vec<i64> = (0..r.gen_range(0..200)).map(|_| r.gen_range(0..8)).collect();
        let mut edited = base.clone();
        for _ in 0..r.gen_range(0..20) {
            match r.gen_range(0..3) {
                0 if !edited.is_empty() => {
                    let i = r.gen_range(0..edited.len());
                    edited.remove(i);
                }
                1 => {
                    let i = r.gen_range(0..=edited.len());
                    edited.insert(i, r.gen_range(0..8));
                }
                _ if !edited.is_empty() => {
                    let i = r.gen_range(0..edited.len());
                    edited[i] = r.gen_range(0..8);
                }
                _ => {}
            }
        }
        let table =
            |v: &[i64]| Table::from_rows("t", ["v"], v.iter().map(|&x| vec![x.into()]).collect()).unwrap();
        let al = align_by_sequence(&table(&base), &table(&edited));
        assert_eq!(al.pairs.len(), lcs_dp(&base, &edited));
        for &(i, j) in &al.pairs {
            assert_eq!(base[i], edited[j]);
        }
        assert!(al.pairs.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1));
        assert_eq!(al.pairs.len() + al.deletions.len(), base.len());
        assert_eq!(al.pairs.len() + al.insertions.len(), edited.len());
    }
}

#[test]
fn membership_equals_nested_scan() {
    let mut r = rng(10);
    for _ in 0..100 {
        let a: Vec<i64> = (0..r.gen_range(0..30)).map(|_| r.gen_range(0..20)).collect();
        let b: Vec<i64> = (0..r.gen_range(0..30)).map(|_| r.gen_range(0..20)).collect();
        let col = |v: &[i64]| Column::new("x", v.iter().map(|&x| CellValue::from(x)).collect());
        let m = set_membership(&col(&a), &col(&b));
        let to_set = |v: Vec<i64>| -> BTreeSet<CellValue> { v.into_iter().map(CellValue::from).collect() };
        let both: Vec<i64> = a.iter().copied().filter(|x| b.iter().any(|y| y == x)).collect();
        let only_a: Vec<i64> = a.iter().copied().filter(|x| !b.iter().any(|y| y == x)).collect();
        let only_b: Vec<i64> = b.iter().copied().filter(|y| !a.iter().any(|x| x == y)).collect();
        assert_eq!(m.in_both, to_set(both));
        assert_eq!(m.only_a, to_set(only_a));
        assert_eq!(m.only_b, to_set(only_b));
    }
}

#[test]
fn unique_keeps_first_occurrences_in_order() {
    let mut r = rng(11);
    for _ in 0..100 {
        let rows: Vec<(i64, i64)> = (0..r.gen_range(0..40))
            .map(|_| (r.gen_range(0..5), r.gen_range(0..100)))
            .collect();
        let t = Table::from_rows(
            "t",
            ["k", "v"],
            rows.iter().map(|&(k, v)| vec![k.into(), v.into()]).collect(),
        )
        .unwrap();
        let u = extract_unique(&t, &["k"]).unwrap();
        let mut want = Vec::new();
        for (i, &(k, v)) in rows.iter().enumerate() {
            if !rows[..i].iter().any(|&(k2, _)| k2 == k) {
                want.push((k, v));
            }
        }
        let got: Vec<(i64, i64)> = (0..u.row_count())
            .map(|i| {
                let n = |c| i64::try_from(u.cell(i, c).as_number().unwrap()).unwrap();
                (n(0), n(1))
            })
            .collect();
        assert_eq!(got, want);
    }
}

#[test]
fn merge_equals_nested_loop_join() {
    let mut r = rng(12);
    for _ in 0..100 {
        let left: Vec<(i64, i64)> = (0..r.gen_range(0..30))
            .map(|_| (r.gen_range(0..20), r.gen_range(0..100)))
            .collect();
        let mut rkeys: Vec<i64> = (0..20).collect();
        rkeys.retain(|_| r.gen_bool(0.5));
        let right: Vec<(i64, i64)> = rkeys.iter().map(|&k| (k, k * 7)).collect();
        let table = |name: &str, col: &str, v: &[(i64, i64)]| {
            Table::from_rows(
                name,
                ["k", col],
                v.iter().map(|&(k, x)| vec![k.into(), x.into()]).collect(),
            )
            .unwrap()
        };
        let (lt, rt) = (table("l", "a", &left), table("r", "b", &right));
        for join in [JoinKind::Inner, JoinKind::LeftOuter] {
            let merged = match_merge(&lt, &rt, &["k"], join).unwrap();
            let mut want: Vec<Vec<CellValue>> = Vec::new();
            for &(k, a) in &left {
                let mut hit = false;
                for &(k2, b) in &right {
                    if k == k2 {
                        want.push(vec![k.into(), a.into(), b.into()]);
                        hit = true;
                    }
                }
                if !hit && join == JoinKind::LeftOuter {
                    want.push(vec![k.into(), a.into(), CellValue::Null]);
                }
            }
            let got: Vec<Vec<CellValue>> = (0..merged.row_count())
                .map(|i| merged.row(i).into_iter().cloned().collect())
                .collect();
            let as_multiset = |v: &[Vec<CellValue>]| {
                let mut m: BTreeMap<Vec<CellValue>, usize> = BTreeMap::new();
                for row in v {
                    *m.entry(row.clone()).or_default() += 1;
                }
                m
            };
            assert_eq!(as_multiset(&got), as_multiset(&want));
        }
    }
}

#[test]
fn generated_rows_validate_and_replay() {
    let schema = Schema::new("g")
        .with_column(ColumnSpec::new("id", DataType::Number).primary_key())
        .with_column(
            ColumnSpec::new("x", DataType::Number)
                .required()
                .with_range(0, 100),
        );
    let a = generate_table(&schema, 10_000, &BTreeMap::new(), 99).unwrap();
    assert_eq!(a.row_count(), 10_000);
    assert!(check_validity(&a, &schema).is_empty());
    let b = generate_table(&schema, 10_000, &BTreeMap::new(), 99).unwrap();
    let csv = |t: &Table| {
        let mut out = Vec::new();
        dqaudit::ingest::write_csv(t, &mut out, &Default::default()).unwrap();
        out
    };
    assert_eq!(csv(&a), csv(&b));
    let ids: HashSet<&CellValue> = a.columns()[0].cells.iter().collect();
    assert_eq!(ids.len(), 10_000);
}

#[test]
fn structured_report_holds_exactly_n_findings() {
    let mut r = rng(13);
    for _ in 0..20 {
        let rows = r.gen_range(0..30);
        let t = nullable_table(&mut r, rows, 3);
        let mut schema = Schema::new("t");
        for c in 0..3 {
            schema = schema.with_column(ColumnSpec::new(format!("c{c}"), DataType::Number).required());
        }
        let mut findings = check_completeness(&t, &schema);
        dqaudit::checks::sort_findings(&mut findings);
        let mut out = Vec::new();
        render_report(&findings, None, &[&t], ReportFormat::Structured, &mut out).unwrap();
        let doc: serde_json::Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(doc["findings"].as_array().unwrap().len(), findings.len());
        assert_eq!(
            parse_structured(std::str::from_utf8(&out).unwrap())
                .unwrap()
                .findings,
            findings
        );
    }
}

#[test]
fn million_row_file_loads_with_line_count() {
    let schema = Schema::new("big")
        .with_column(ColumnSpec::new("id", DataType::Number).primary_key())
        .with_column(ColumnSpec::new("v", DataType::Number).with_range(0, 9));
    let t = generate_table(&schema, 1_000_000, &BTreeMap::new(), 5).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.csv");
    dqaudit::ingest::write_csv_file(&t, &path, &Default::default()).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let data_lines = text.lines().count() - 1;
    let loaded = dqaudit::ingest::load_csv(&path, &Default::default()).unwrap();
    assert_eq!(loaded.table.row_count(), data_lines);
    assert_eq!(data_lines, 1_000_000);
}

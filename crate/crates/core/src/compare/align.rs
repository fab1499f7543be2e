use std::collections::HashMap;

use crate::model::{CellValue, Table};

/// Row pairing between two tables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SequenceAlignment {
    /// Matched (left row, right row), both 0-based and increasing.
    pub pairs: Vec<(usize, usize)>,
    /// Left rows with no partner.
    pub deletions: Vec<usize>,
    /// Right rows with no partner.
    pub insertions: Vec<usize>,
}

/// Longest common subsequence over whole-row equality.
///
/// A common leading run is matched first. The rest is solved
/// with a full table when it fits in 16M entries, choosing the earliest
/// match among optimal pairings; larger middles fall back to Hirschberg's
/// linear-space split, which is still optimal and deterministic.
pub fn align_by_sequence(left: &Table, right: &Table) -> SequenceAlignment {
    let (a, b) = row_ids(left, right);
    let pairs = lcs_pairs(&a, &b);
    let mut out = SequenceAlignment::default();
    let (mut i, mut j) = (0, 0);
    for &(pi, pj) in &pairs {
        out.deletions.extend(i..pi);
        out.insertions.extend(j..pj);
        i = pi + 1;
        j = pj + 1;
    }
    out.deletions.extend(i..a.len());
    out.insertions.extend(j..b.len());
    out.pairs = pairs;
    out
}

/// Length of the longest common subsequence of two id sequences.
pub fn lcs_length<T: Eq>(a: &[T], b: &[T]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    for x in a {
        let mut cur = vec![0usize; b.len() + 1];
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        prev = cur;
    }
    prev[b.len()]
}

fn row_ids(left: &Table, right: &Table) -> (Vec<u32>, Vec<u32>) {
    let mut ids: HashMap<Vec<&CellValue>, u32> = HashMap::new();
    let mut out = [Vec::new(), Vec::new()];
    for (t, dst) in [left, right].into_iter().zip(out.iter_mut()) {
        for r in 0..t.row_count() {
            let next = ids.len() as u32;
            dst.push(*ids.entry(t.row(r)).or_insert(next));
        }
    }
    let [a, b] = out;
    (a, b)
}

const DP_LIMIT: usize = 16 * 1024 * 1024;

fn lcs_pairs(a: &[u32], b: &[u32]) -> Vec<(usize, usize)> {
    let prefix = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    let mut pairs: Vec<(usize, usize)> = (0..prefix).map(|i| (i, i)).collect();
    solve(&a[prefix..], &b[prefix..], prefix, prefix, DP_LIMIT, &mut pairs);
    pairs
}

fn solve(a: &[u32], b: &[u32], ai: usize, bj: usize, limit: usize, out: &mut Vec<(usize, usize)>) {
    if a.is_empty() || b.is_empty() {
        return;
    }
    if (a.len() + 1).saturating_mul(b.len() + 1) <= limit {
        return dp_pairs(a, b, ai, bj, out);
    }
    let mid = a.len() / 2;
    let fwd = lengths(&a[..mid], b);
    let rev_a: Vec<u32> = a[mid..].iter().rev().copied().collect();
    let rev_b: Vec<u32> = b.iter().rev().copied().collect();
    let bwd = lengths(&rev_a, &rev_b);
    let split = (0..=b.len())
        .max_by(|&x, &y| {
            (fwd[x] + bwd[b.len() - x])
                .cmp(&(fwd[y] + bwd[b.len() - y]))
                .then(y.cmp(&x))
        })
        .unwrap_or(0);
    solve(&a[..mid], &b[..split], ai, bj, limit, out);
    solve(&a[mid..], &b[split..], ai + mid, bj + split, limit, out);
}

fn lengths(a: &[u32], b: &[u32]) -> Vec<usize> {
    let mut prev = vec![0usize; b.len() + 1];
    for x in a {
        let mut cur = vec![0usize; b.len() + 1];
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        prev = cur;
    }
    prev
}

/// Suffix table `l[i][j]` = LCS of `a[i..]` and `b[j..]`, then a forward walk
/// that takes every available match, which yields the earliest optimal pairing.
fn dp_pairs(a: &[u32], b: &[u32], ai: usize, bj: usize, out: &mut Vec<(usize, usize)>) {
    let w = b.len() + 1;
    let mut l = vec![0u32; (a.len() + 1) * w];
    for i in (0..a.len()).rev() {
        for j in (0..b.len()).rev() {
            l[i * w + j] = if a[i] == b[j] {
                l[(i + 1) * w + j + 1] + 1
            } else {
                l[(i + 1) * w + j].max(l[i * w + j + 1])
            };
        }
    }
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] == b[j] {
            out.push((ai + i, bj + j));
            i += 1;
            j += 1;
        } else if l[(i + 1) * w + j] >= l[i * w + j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }
}

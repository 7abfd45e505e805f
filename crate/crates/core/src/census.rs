//! Censuses over the rational integers.
//!
//! Degree-4 Salem quartics with `lambda <= Q` satisfy `-2a > 2 + b > 2a` and
//! `0 < -a < Q + 3`; the square-rootable ones are parametrised by `(a, k)` with
//! `b = k^2 + 2a - 2` and `k^2 < -4a`. Both scans walk this box row by row
//! (one row per value of `a`, starting at `a = -1`) and apply the exact
//! irreducibility and `lambda <= Q` tests to every candidate.
//!
//! Rows are independent, so they are evaluated in parallel and merged back in
//! row order; output never depends on the size of the thread pool.

use std::collections::VecDeque;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{ceil_sqrt_u64, isqrt_exact_i128};
use crate::error::{Error, Result};
use crate::quartic::{is_salem_i64, salem_le_unchecked, salem_value_f64};

/// Largest `Q` accepted by the scans; keeps every row bound inside `i64`.
pub const MAX_Q: i64 = 1 << 40;

/// Records buffered per refill of a [`CensusStream`].
const CHUNK_RECORDS: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Direct,
    Bianchi(i64),
    TotallyReal(i64),
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Direct => f.write_str("direct"),
            Source::Bianchi(d) => write!(f, "bianchi({d})"),
            Source::TotallyReal(d) => write!(f, "totally_real({d})"),
        }
    }
}

/// One enumerated Salem number.
#[derive(Debug, Clone, PartialEq)]
pub struct CensusRecord {
    pub a: i64,
    pub b: i64,
    /// Positive square root of `p(-1) = 2 + b - 2a`, when it exists.
    pub k: Option<i64>,
    pub lambda_approx: f64,
    pub source: Source,
}

impl CensusRecord {
    fn new(a: i64, b: i64, k: Option<i64>) -> Self {
        Self {
            a,
            b,
            k,
            lambda_approx: salem_value_f64(a as f64, b as f64),
            source: Source::Direct,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CensusKind {
    Deg4,
    SquareRootable,
}

fn validate_q(q: i64) -> Result<()> {
    if q < 2 {
        return Err(Error::BoundTooSmall { q, min: 2 });
    }
    if q > MAX_Q {
        return Err(Error::Capacity(format!(
            "Q={q} exceeds the supported maximum {MAX_Q}"
        )));
    }
    Ok(())
}

fn witness_k(a: i64, b: i64) -> Option<i64> {
    let p_minus_one = 2 + b as i128 - 2 * a as i128;
    match isqrt_exact_i128(p_minus_one) {
        Some(k) if k > 0 => Some(k as i64),
        _ => None,
    }
}

/// Visits every `b` in the row of `a` that is Salem with `lambda <= q`.
#[inline]
fn scan_deg4_row(a: i64, q: i64, mut visit: impl FnMut(i64)) {
    // 2a < 2 + b < -2a
    for b in (2 * a - 1)..(-2 * a - 2) {
        if is_salem_i64(a, b) && salem_le_unchecked(a, b, q) {
            visit(b);
        }
    }
}

/// Visits every `(k, b)` in the row of `a` that is square-rootable Salem with `lambda <= q`.
#[inline]
fn scan_sr_row(a: i64, q: i64, mut visit: impl FnMut(i64, i64)) {
    let limit = -4 * a as i128;
    let mut k: i64 = 1;
    while (k as i128) * (k as i128) < limit {
        let b = k * k + 2 * a - 2;
        if is_salem_i64(a, b) && salem_le_unchecked(a, b, q) {
            visit(k, b);
        }
        k += 1;
    }
}

fn row_records(kind: CensusKind, j: i64, q: i64) -> Vec<CensusRecord> {
    let a = -j;
    let mut out = Vec::new();
    match kind {
        CensusKind::Deg4 => {
            scan_deg4_row(a, q, |b| out.push(CensusRecord::new(a, b, witness_k(a, b))))
        }
        CensusKind::SquareRootable => {
            scan_sr_row(a, q, |k, b| out.push(CensusRecord::new(a, b, Some(k))))
        }
    }
    out
}

fn estimated_row_size(kind: CensusKind, j: i64) -> u64 {
    match kind {
        CensusKind::Deg4 => 4 * j as u64,
        CensusKind::SquareRootable => 2 * (j as u64).isqrt() + 1,
    }
}

/// Ordered stream of census records, produced in parallel chunks of rows.
///
/// Memory is bounded by one chunk regardless of `Q`.
pub struct CensusStream {
    kind: CensusKind,
    q: i64,
    next_row: i64,
    last_row: i64,
    buffer: VecDeque<CensusRecord>,
}

impl CensusStream {
    fn new(kind: CensusKind, q: i64) -> Result<Self> {
        validate_q(q)?;
        Ok(Self {
            kind,
            q,
            next_row: 1,
            last_row: q + 2,
            buffer: VecDeque::new(),
        })
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    fn refill(&mut self) {
        while self.buffer.is_empty() && self.next_row <= self.last_row {
            let start = self.next_row;
            let mut end = start;
            let mut budget = 0u64;
            while end <= self.last_row && (end == start || budget < CHUNK_RECORDS) {
                budget += estimated_row_size(self.kind, end);
                end += 1;
            }
            let (kind, q) = (self.kind, self.q);
            let rows: Vec<Vec<CensusRecord>> = (start..end)
                .into_par_iter()
                .map(|j| row_records(kind, j, q))
                .collect();
            self.buffer.extend(rows.into_iter().flatten());
            self.next_row = end;
        }
    }
}

impl Iterator for CensusStream {
    type Item = CensusRecord;

    fn next(&mut self) -> Option<CensusRecord> {
        if self.buffer.is_empty() {
            self.refill();
        }
        self.buffer.pop_front()
    }
}

/// All degree-4 Salem numbers `lambda <= q`, ordered by `a` descending from -1,
/// then by `b` ascending.
pub fn enumerate_salem_deg4(q: i64) -> Result<CensusStream> {
    CensusStream::new(CensusKind::Deg4, q)
}

pub fn count_salem_deg4(q: i64) -> Result<u64> {
    validate_q(q)?;
    Ok((1..=q + 2)
        .into_par_iter()
        .map(|j| {
            let mut n = 0u64;
            scan_deg4_row(-j, q, |_| n += 1);
            n
        })
        .sum())
}

/// All square-rootable degree-4 Salem numbers `lambda <= q`, ordered by `a`
/// descending from -1, then by `k` ascending.
pub fn enumerate_sr(q: i64) -> Result<CensusStream> {
    CensusStream::new(CensusKind::SquareRootable, q)
}

pub fn count_sr(q: i64) -> Result<u64> {
    validate_q(q)?;
    Ok((1..=q + 2)
        .into_par_iter()
        .map(|j| {
            let mut n = 0u64;
            scan_sr_row(-j, q, |_, _| n += 1);
            n
        })
        .sum())
}

/// Every `(a, k)` of the square-rootable box `0 < -a < q + 3`, `0 < k^2 < -4a`,
/// before the irreducibility and `lambda <= q` filters.
pub fn sr_box_pairs(q: i64) -> impl Iterator<Item = (i64, i64)> {
    (1..=q.max(0) + 2).flat_map(|j| {
        let a = -j;
        (1..)
            .take_while(move |&k: &i64| (k as i128) * (k as i128) < -4 * a as i128)
            .map(move |k| (a, k))
    })
}

/// The two closed box sums `(sum_{j=1}^{Q+2} (ceil(sqrt(4j)) - 1), sum_{j=1}^{Q+2} (4j - 1))`.
pub fn box_sums(q: i64) -> Result<(u128, u128)> {
    if q < 0 {
        return Err(Error::BoundTooSmall { q, min: 0 });
    }
    let n = q as u64 + 2;
    let s_sr: u128 = (1..=n).map(|j| (ceil_sqrt_u64(4 * j) - 1) as u128).sum();
    let s_deg4 = (n as u128) * (2 * q as u128 + 5);
    Ok((s_sr, s_deg4))
}

/// Number of degree-2 Salem numbers `lambda <= q`, by enumeration of
/// `x^2 + a x + 1` over `0 < -a < q + 1`.
pub fn count_deg2(q: i64) -> Result<u64> {
    if q < 3 {
        return Err(Error::BoundTooSmall { q, min: 3 });
    }
    if q > MAX_Q {
        return Err(Error::Capacity(format!(
            "Q={q} exceeds the supported maximum {MAX_Q}"
        )));
    }
    let qq = q as i128;
    let count = (1..=q)
        .into_par_iter()
        .filter(|&j| {
            let a = -(j as i128);
            let disc = a * a - 4;
            // real, irreducible, largest root above 1 (sum of roots -a > 2), and p(Q) >= 0
            disc > 0 && isqrt_exact_i128(disc).is_none() && -a > 2 && qq * qq + a * qq + 1 >= 0
        })
        .count();
    Ok(count as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quartic::SalemQuartic;
    use std::collections::BTreeSet;

    /// Brute force over a box much wider than the scan, using only the
    /// `SalemQuartic` predicates.
    fn brute_force_deg4(q: i64, a_max: i64, b_max: i64) -> BTreeSet<(i64, i64)> {
        let mut out = BTreeSet::new();
        for a in -a_max..=a_max {
            for b in -b_max..=b_max {
                let p = SalemQuartic::new(a, b);
                if p.is_salem() && p.salem_le(q).unwrap() {
                    out.insert((a, b));
                }
            }
        }
        out
    }

    #[test]
    fn deg4_small_q() {
        let recs: Vec<_> = enumerate_salem_deg4(2).unwrap().collect();
        assert!(recs.iter().any(|r| (r.a, r.b) == (-1, -1)));
        assert!(!recs.iter().any(|r| (r.a, r.b) == (-1, -3)));
        for r in &recs {
            assert!(SalemQuartic::new(r.a, r.b).is_salem());
        }
    }

    #[test]
    fn deg4_matches_brute_force() {
        let oracle = brute_force_deg4(50, 53, 110);
        let got: BTreeSet<_> = enumerate_salem_deg4(50)
            .unwrap()
            .map(|r| (r.a, r.b))
            .collect();
        assert_eq!(got, oracle);
        assert_eq!(count_salem_deg4(50).unwrap(), oracle.len() as u64);
    }

    #[test]
    fn stream_order_is_lexicographic() {
        let recs: Vec<_> = enumerate_salem_deg4(60)
            .unwrap()
            .map(|r| (r.a, r.b))
            .collect();
        for w in recs.windows(2) {
            let ((a0, b0), (a1, b1)) = (w[0], w[1]);
            assert!(a1 < a0 || (a1 == a0 && b1 > b0));
        }
    }

    #[test]
    fn records_are_consistent() {
        for r in enumerate_salem_deg4(80).unwrap() {
            let p = SalemQuartic::new(r.a, r.b);
            let lam = p.salem_value().unwrap();
            assert!((r.lambda_approx - lam).abs() <= 1e-9 * lam);
            assert_eq!(r.k.is_some(), p.square_root_witness().is_some());
        }
    }

    #[test]
    fn sr_contains_example() {
        let recs: Vec<_> = enumerate_sr(3).unwrap().collect();
        assert!(recs.iter().any(|r| (r.a, r.b, r.k) == (-1, -3, Some(1))));
        for r in &recs {
            let k = r.k.unwrap();
            assert_eq!(2 + r.b - 2 * r.a, k * k);
        }
    }

    #[test]
    fn sr_equals_filtered_deg4() {
        for q in [2, 3, 7, 50, 123] {
            let sr: BTreeSet<_> = enumerate_sr(q).unwrap().map(|r| (r.a, r.b)).collect();
            let filtered: BTreeSet<_> = enumerate_salem_deg4(q)
                .unwrap()
                .filter(|r| SalemQuartic::new(r.a, r.b).square_root_witness().is_some())
                .map(|r| (r.a, r.b))
                .collect();
            assert_eq!(sr, filtered, "Q={q}");
            assert_eq!(count_sr(q).unwrap(), sr.len() as u64);
        }
    }

    #[test]
    fn monotone_and_subset_counts() {
        let mut prev = (0, 0);
        for q in [2, 5, 10, 40, 100, 300] {
            let c = (count_salem_deg4(q).unwrap(), count_sr(q).unwrap());
            assert!(c.0 >= prev.0 && c.1 >= prev.1);
            assert!(c.1 <= c.0);
            prev = c;
        }
    }

    #[test]
    fn box_sum_examples() {
        assert_eq!(box_sums(2).unwrap(), (9, 36));
        assert_eq!(box_sums(0).unwrap(), (3, 10));
        for q in [1i64, 17, 1000] {
            let (_, s4) = box_sums(q).unwrap();
            let direct: u128 = (1..=q as u128 + 2).map(|j| 4 * j - 1).sum();
            assert_eq!(s4, direct);
            assert_eq!(s4, ((q + 2) * (2 * q + 5)) as u128);
        }
        assert!(box_sums(-1).is_err());
    }

    #[test]
    fn box_sums_bound_counts() {
        for q in [2, 10, 100, 1000] {
            let (s_sr, s4) = box_sums(q).unwrap();
            assert!(count_salem_deg4(q).unwrap() as u128 <= s4);
            assert!(count_sr(q).unwrap() as u128 <= s_sr);
            // the sr box sum is exactly the number of (a, k) pairs in the box
            assert_eq!(sr_box_pairs(q).count() as u128, s_sr);
        }
    }

    #[test]
    fn reducible_candidates_are_the_cyclotomic_families() {
        for q in [10, 200] {
            for (a, k) in sr_box_pairs(q) {
                let b = k * k + 2 * a - 2;
                let disc = (a * a - 4 * b + 8) as i128;
                if isqrt_exact_i128(disc).is_some() {
                    assert!(b == 2 || b == a + 1 || a + b == 1, "(a,b)=({a},{b})");
                }
            }
        }
    }

    #[test]
    fn deg2_examples() {
        assert_eq!(count_deg2(10).unwrap(), 8);
        assert_eq!(count_deg2(3).unwrap(), 1);
        assert_eq!(count_deg2(1_000_000).unwrap(), 999_998);
        assert!(matches!(count_deg2(2), Err(Error::BoundTooSmall { .. })));
    }

    #[test]
    fn rejects_small_q() {
        assert!(enumerate_salem_deg4(1).is_err());
        assert!(count_sr(0).is_err());
        assert!(count_salem_deg4(MAX_Q + 1).unwrap_err().is_capacity());
    }

    #[test]
    fn independent_of_thread_count() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    enumerate_sr(400)
                        .unwrap()
                        .map(|r| (r.a, r.b, r.k))
                        .collect::<Vec<_>>()
                })
        };
        assert_eq!(run(1), run(3));
    }
}

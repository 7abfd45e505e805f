//! Salem numbers generated by the Bianchi group `PSL(2, O_K)`, `K = Q(sqrt(-D))`.
//!
//! A loxodromic element with trace `t` has an eigenvalue `mu` with
//! `mu + 1/mu = t`. The closed geodesic has real length `l` with
//! `|mu|^2 = e^l = lambda^(1/2)`, and `y = lambda^(1/2) + lambda^(-1/2)` together
//! with `w = 2 cos(2 arg mu)` are the roots of
//!
//! ```text
//! z^2 - N(t) z + (Tr(t^2) - 4)
//! ```
//!
//! so the minimal quartic of `lambda^(1/2)` is `(A, B) = (-N(t), Tr(t^2) - 2)`.
//! Lifting it through `q(x) q(-x) = p(x^2)` gives the quartic of `lambda`, which
//! is square-rootable by construction.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;

use crate::algebra::{is_perfect_square, validate_squarefree, QuadIntK};
use crate::error::{Error, Result};
use crate::quartic::SalemQuartic;

/// Trace witnesses retained per Salem number.
pub const WITNESS_CAP: usize = 16;

/// A degree-4 square-rootable Salem number produced by a Bianchi trace.
#[derive(Debug, Clone, PartialEq)]
pub struct BianchiSalem {
    /// Minimal quartic `(A, B)` of `lambda^(1/2)`.
    pub half: SalemQuartic,
    /// `(u, v)` coordinates of traces producing this number, capped at [`WITNESS_CAP`].
    pub witnesses: Vec<(BigInt, BigInt)>,
    /// Number of traces seen for this number, including those past the cap.
    pub witness_count: u64,
}

impl BianchiSalem {
    /// Minimal quartic of `lambda`.
    pub fn lifted(&self) -> SalemQuartic {
        self.half.lift_half_power()
    }

    /// `k = |B - 2|`, the square root of `p(-1)` for the lifted quartic.
    pub fn k(&self) -> BigInt {
        (self.half.b() - BigInt::from(2)).abs()
    }

    /// `y = lambda^(1/2) + lambda^(-1/2)`, the larger root of the trace polynomial.
    pub fn y_plus(&self) -> f64 {
        let n = -self.half.a().to_f64().unwrap_or(f64::NAN);
        let disc = self.half.y_discriminant().to_f64().unwrap_or(f64::NAN);
        (n + disc.sqrt()) / 2.0
    }

    pub fn lambda(&self) -> f64 {
        let half = self.half.salem_value().unwrap_or(f64::NAN);
        half * half
    }
}

/// Why a trace was or was not turned into a degree-4 Salem number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceClass {
    Accepted(SalemQuartic),
    /// `t` is rational; `y = t^2 - 2` is rational.
    Real,
    /// `Re t = 0`; the smaller root is exactly -2.
    PurelyImaginary,
    /// The trace polynomial splits over `Q`, so `lambda` has degree at most 2.
    Reducible,
}

/// `(N(t), Tr(t^2))` → discriminant of `z^2 - N z + (Tr - 4)`.
fn trace_discriminant(norm: &BigInt, trace_sq: &BigInt) -> BigInt {
    norm * norm - BigInt::from(4) * trace_sq + 16
}

pub fn classify_trace(t: &QuadIntK) -> TraceClass {
    if t.is_real() {
        return TraceClass::Real;
    }
    if t.is_purely_imaginary() {
        return TraceClass::PurelyImaginary;
    }
    let norm = t.norm();
    let trace_sq = t.trace_sq();
    if is_perfect_square(&trace_discriminant(&norm, &trace_sq)).is_some() {
        return TraceClass::Reducible;
    }
    TraceClass::Accepted(SalemQuartic::new(-norm, trace_sq - 2))
}

/// The degree-4 Salem number of the geodesic with trace `t`, if any.
pub fn salem_from_trace(t: &QuadIntK) -> Option<BianchiSalem> {
    match classify_trace(t) {
        TraceClass::Accepted(half) => Some(BianchiSalem {
            half,
            witnesses: vec![(t.u().clone(), t.v().clone())],
            witness_count: 1,
        }),
        _ => None,
    }
}

/// Leading constant of the distinct real length count of `H^3 / PSL(2, O_K)`.
pub fn marklof_constant(d: i64) -> Result<f64> {
    validate_squarefree(d, 1)?;
    let root = (d as f64).sqrt();
    Ok(if d % 4 == 3 {
        PI / (2.0 * root)
    } else {
        PI / (4.0 * root)
    })
}

/// Result of [`bianchi_census`].
#[derive(Debug, Clone, PartialEq)]
pub struct BianchiCensus {
    pub d: i64,
    pub q: i64,
    /// Distinct Salem numbers keyed by the quartic of `lambda^(1/2)`.
    pub members: BTreeMap<SalemQuartic, BianchiSalem>,
    pub traces_scanned: u64,
    pub excluded_real: u64,
    pub excluded_imaginary: u64,
    pub excluded_reducible: u64,
    /// Distinct rational `y > 2` with `lambda <= Q`: lengths whose Salem number has degree 2.
    pub rational_lengths: u64,
}

impl BianchiCensus {
    pub fn count(&self) -> usize {
        self.members.len()
    }

    /// Distinct real lengths with `lambda <= Q`, of any degree.
    pub fn all_lengths(&self) -> u64 {
        self.members.len() as u64 + self.rational_lengths
    }
}

/// Norm bound for the trace scan: `N(t) <= floor(sqrt(Q)) + 3`.
pub fn norm_bound(q: i64) -> i64 {
    (q as u64).isqrt() as i64 + 3
}

/// Number of traces the census at `(d, q)` scans.
pub fn trace_count(d: i64, q: i64) -> Result<u64> {
    validate_squarefree(d, 1)?;
    if q < 2 {
        return Err(Error::BoundTooSmall { q, min: 2 });
    }
    Ok(trace_rows(d, norm_bound(q))
        .iter()
        .map(|&(_, lo, hi)| (hi - lo + 1).max(0) as u64)
        .sum())
}

/// Trace coordinates `(u, v)` with `N(u + v omega) <= m`, grouped by `v`.
fn trace_rows(d: i64, m: i64) -> Vec<(i64, i64, i64)> {
    let mut rows = Vec::new();
    if d % 4 == 3 {
        // 4N = (2u + v)^2 + D v^2
        let vmax = ((4 * m / d) as u64).isqrt() as i64;
        for v in -vmax..=vmax {
            let r = ((4 * m - d * v * v) as u64).isqrt() as i64;
            let lo = (-r - v).div_euclid(2) + i64::from((-r - v).rem_euclid(2) != 0);
            let hi = (r - v).div_euclid(2);
            rows.push((v, lo, hi));
        }
    } else {
        let vmax = ((m / d) as u64).isqrt() as i64;
        for v in -vmax..=vmax {
            let r = ((m - d * v * v) as u64).isqrt() as i64;
            rows.push((v, -r, r));
        }
    }
    rows
}

#[derive(Default)]
struct RowTally {
    accepted: Vec<(SalemQuartic, BigInt, BigInt)>,
    rational_y: Vec<BigInt>,
    scanned: u64,
    real: u64,
    imaginary: u64,
    reducible: u64,
}

fn rational_y(t: &QuadIntK) -> Option<BigInt> {
    let n = t.norm();
    let root = is_perfect_square(&trace_discriminant(&n, &t.trace_sq()))?;
    Some((n + root) / 2)
}

/// `lambda <= Q` for a degree-2 `lambda^(1/2)` with `lambda^(1/2) + lambda^(-1/2) = y`.
fn rational_length_le(y: &BigInt, q: i64) -> bool {
    // lambda + 1/lambda = y^2 - 2
    let q = BigInt::from(q);
    let s: BigInt = y * y - 2;
    !(&q * &q - s * &q + BigInt::one()).is_negative()
}

fn scan_row(d: i64, q: i64, (v, lo, hi): (i64, i64, i64)) -> RowTally {
    let mut tally = RowTally::default();
    for u in lo..=hi {
        let t = QuadIntK::new(d, u, v).expect("d validated");
        tally.scanned += 1;
        match classify_trace(&t) {
            TraceClass::Accepted(half) => {
                let lifted = half.lift_half_power();
                debug_assert!(lifted.is_salem(), "lifted quartic {lifted} is not Salem");
                if lifted.is_salem() && lifted.salem_le(q).unwrap_or(false) {
                    tally
                        .accepted
                        .push((half, BigInt::from(u), BigInt::from(v)));
                }
            }
            other => {
                match other {
                    TraceClass::Real => tally.real += 1,
                    TraceClass::PurelyImaginary => tally.imaginary += 1,
                    _ => tally.reducible += 1,
                }
                if let Some(y) = rational_y(&t) {
                    if y > BigInt::from(2) && rational_length_le(&y, q) {
                        tally.rational_y.push(y);
                    }
                }
            }
        }
    }
    tally
}

/// Distinct degree-4 square-rootable Salem numbers `lambda <= Q` generated by
/// the traces of `PSL(2, O_K)`.
pub fn bianchi_census(d: i64, q: i64) -> Result<BianchiCensus> {
    validate_squarefree(d, 1)?;
    if q < 2 {
        return Err(Error::BoundTooSmall { q, min: 2 });
    }
    let m = norm_bound(q);
    if (m as i128) * 4 > i64::MAX as i128 {
        return Err(Error::Capacity(format!(
            "Q={q} too large for the trace scan"
        )));
    }
    let tallies: Vec<RowTally> = trace_rows(d, m)
        .into_par_iter()
        .map(|row| scan_row(d, q, row))
        .collect();

    let mut census = BianchiCensus {
        d,
        q,
        members: BTreeMap::new(),
        traces_scanned: 0,
        excluded_real: 0,
        excluded_imaginary: 0,
        excluded_reducible: 0,
        rational_lengths: 0,
    };
    let mut ys = BTreeSet::new();
    for tally in tallies {
        census.traces_scanned += tally.scanned;
        census.excluded_real += tally.real;
        census.excluded_imaginary += tally.imaginary;
        census.excluded_reducible += tally.reducible;
        ys.extend(tally.rational_y);
        for (half, u, v) in tally.accepted {
            let entry = census
                .members
                .entry(half.clone())
                .or_insert_with(|| BianchiSalem {
                    half,
                    witnesses: Vec::new(),
                    witness_count: 0,
                });
            entry.witness_count += 1;
            if entry.witnesses.len() < WITNESS_CAP {
                entry.witnesses.push((u, v));
            }
        }
    }
    census.rational_lengths = ys.len() as u64;
    Ok(census)
}

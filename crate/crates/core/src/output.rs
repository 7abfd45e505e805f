//! CSV and JSON encodings.
//!
//! CSV files start with a header row, use `,` separators and LF line endings.
//! JSON output is an array of objects with the same fields; exact integers are
//! written as decimal strings, approximate values as numbers.

use std::io::{self, Write};

use num_bigint::BigInt;
use serde::Serialize;

use crate::asymptotics::{FitResult, MultiplicityRow};
use crate::bianchi::BianchiSalem;
use crate::census::CensusRecord;
use crate::totally_real::SystemSolution;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// `x` with `digits` significant digits in positional notation.
pub fn fmt_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// `x` in scientific notation with `digits` significant digits.
pub fn fmt_scientific(x: f64, digits: usize) -> String {
    format!("{:.*e}", digits.saturating_sub(1), x)
}

fn fmt_lambda(x: f64) -> String {
    fmt_significant(x, 12)
}

/// Writes `items` as a JSON array, one object per line.
pub fn write_json_array<W: Write + ?Sized, T: Serialize>(
    w: &mut W,
    items: impl IntoIterator<Item = T>,
) -> io::Result<u64> {
    let mut n = 0u64;
    w.write_all(b"[")?;
    for item in items {
        w.write_all(if n == 0 { b"\n" } else { b",\n" })?;
        serde_json::to_writer(&mut *w, &item)?;
        n += 1;
    }
    w.write_all(if n == 0 { b"]\n" } else { b"\n]\n" })?;
    Ok(n)
}

#[derive(Serialize)]
struct CensusJson {
    a: String,
    b: String,
    k: Option<String>,
    lambda: f64,
    source: String,
}

/// Census records under the columns `a,b,k,lambda,source`; `k` is empty when absent.
pub fn write_census<W: Write + ?Sized>(
    w: &mut W,
    format: Format,
    records: impl IntoIterator<Item = CensusRecord>,
) -> io::Result<u64> {
    match format {
        Format::Csv => {
            writeln!(w, "a,b,k,lambda,source")?;
            let mut n = 0;
            for r in records {
                let k = r.k.map(|k| k.to_string()).unwrap_or_default();
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    r.a,
                    r.b,
                    k,
                    fmt_lambda(r.lambda_approx),
                    r.source
                )?;
                n += 1;
            }
            Ok(n)
        }
        Format::Json => write_json_array(
            w,
            records.into_iter().map(|r| CensusJson {
                a: r.a.to_string(),
                b: r.b.to_string(),
                k: r.k.map(|k| k.to_string()),
                lambda: r.lambda_approx,
                source: r.source.to_string(),
            }),
        ),
    }
}

#[derive(Serialize)]
struct BianchiJson {
    #[serde(rename = "A")]
    big_a: String,
    #[serde(rename = "B")]
    big_b: String,
    a_lift: String,
    b_lift: String,
    k: String,
    lambda: f64,
    num_witness_traces: String,
    witnesses: Vec<[String; 2]>,
}

/// Bianchi members under the columns `A,B,a_lift,b_lift,k,lambda,num_witness_traces`;
/// JSON additionally lists the retained witness traces as `[u, v]` pairs.
pub fn write_bianchi<'a, W: Write + ?Sized>(
    w: &mut W,
    format: Format,
    members: impl IntoIterator<Item = &'a BianchiSalem>,
) -> io::Result<u64> {
    match format {
        Format::Csv => {
            writeln!(w, "A,B,a_lift,b_lift,k,lambda,num_witness_traces")?;
            let mut n = 0;
            for s in members {
                let lift = s.lifted();
                writeln!(
                    w,
                    "{},{},{},{},{},{},{}",
                    s.half.a(),
                    s.half.b(),
                    lift.a(),
                    lift.b(),
                    s.k(),
                    fmt_lambda(s.lambda()),
                    s.witness_count
                )?;
                n += 1;
            }
            Ok(n)
        }
        Format::Json => write_json_array(
            w,
            members.into_iter().map(|s| {
                let lift = s.lifted();
                BianchiJson {
                    big_a: s.half.a().to_string(),
                    big_b: s.half.b().to_string(),
                    a_lift: lift.a().to_string(),
                    b_lift: lift.b().to_string(),
                    k: s.k().to_string(),
                    lambda: s.lambda(),
                    num_witness_traces: s.witness_count.to_string(),
                    witnesses: s
                        .witnesses
                        .iter()
                        .map(|(u, v)| [u.to_string(), v.to_string()])
                        .collect(),
                }
            }),
        ),
    }
}

#[derive(Serialize)]
struct SystemJson {
    a_u: String,
    a_v: String,
    k_u: String,
    k_v: String,
    b_u: String,
    b_v: String,
    branch: String,
    verified: bool,
}

fn big(x: &BigInt) -> String {
    x.to_string()
}

/// System solutions with their verification flag, under the columns
/// `a_u,a_v,k_u,k_v,b_u,b_v,branch,verified`. The CSV starts with a
/// `# d=<d> Q=<q>` comment line; JSON wraps the rows in an object carrying `d` and `Q`.
pub fn write_system<W: Write + ?Sized>(
    w: &mut W,
    format: Format,
    d: i64,
    q: i64,
    rows: impl IntoIterator<Item = (SystemSolution, bool)>,
) -> io::Result<u64> {
    match format {
        Format::Csv => {
            writeln!(w, "# d={d} Q={q}")?;
            writeln!(w, "a_u,a_v,k_u,k_v,b_u,b_v,branch,verified")?;
            let mut n = 0;
            for (s, ok) in rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{}",
                    s.a.u(),
                    s.a.v(),
                    s.k.u(),
                    s.k.v(),
                    s.b.u(),
                    s.b.v(),
                    s.branch,
                    ok
                )?;
                n += 1;
            }
            Ok(n)
        }
        Format::Json => {
            write!(w, "{{\"d\":\"{d}\",\"Q\":\"{q}\",\"solutions\":")?;
            let n = write_json_array(
                w,
                rows.into_iter().map(|(s, verified)| SystemJson {
                    a_u: big(s.a.u()),
                    a_v: big(s.a.v()),
                    k_u: big(s.k.u()),
                    k_v: big(s.k.v()),
                    b_u: big(s.b.u()),
                    b_v: big(s.b.v()),
                    branch: s.branch.to_string(),
                    verified,
                }),
            )?;
            writeln!(w, "}}")?;
            Ok(n)
        }
    }
}

/// Report rows under `ell,geodesic_count,salem_bound,mean_mult_lower`, six significant digits.
pub fn write_report<W: Write + ?Sized>(
    w: &mut W,
    format: Format,
    rows: &[MultiplicityRow],
) -> io::Result<u64> {
    match format {
        Format::Csv => {
            writeln!(w, "ell,geodesic_count,salem_bound,mean_mult_lower")?;
            for r in rows {
                writeln!(
                    w,
                    "{},{},{},{}",
                    fmt_scientific(r.ell, 6),
                    fmt_scientific(r.geodesic_count, 6),
                    fmt_scientific(r.salem_bound, 6),
                    fmt_scientific(r.mean_mult_lower, 6)
                )?;
            }
            Ok(rows.len() as u64)
        }
        Format::Json => write_json_array(w, rows),
    }
}

/// A fit under `constant,exponent,residual,points_used`.
pub fn write_fit<W: Write + ?Sized>(w: &mut W, format: Format, fit: &FitResult) -> io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(w, "constant,exponent,residual,points_used")?;
            writeln!(
                w,
                "{},{},{},{}",
                fmt_significant(fit.constant, 12),
                fmt_significant(fit.exponent, 12),
                fmt_scientific(fit.residual, 6),
                fit.points_used
            )
        }
        Format::Json => {
            serde_json::to_writer(&mut *w, fit)?;
            writeln!(w)
        }
    }
}

/// Two-column `x,y` series for external plotting.
pub fn write_xy<W: Write + ?Sized>(
    w: &mut W,
    x_name: &str,
    y_name: &str,
    points: &[(f64, f64)],
) -> io::Result<()> {
    writeln!(w, "{x_name},{y_name}")?;
    for (x, y) in points {
        writeln!(w, "{x},{}", fmt_significant(*y, 12))?;
    }
    Ok(())
}

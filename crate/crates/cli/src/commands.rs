use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use salem_core::algebra::validate_squarefree;
use salem_core::bianchi::{norm_bound, trace_count};
use salem_core::output::{self, fmt_significant, Format};
use salem_core::totally_real::{
    a_candidate_count, c2_upper_bound, estimated_solutions, monte_carlo_volume, volume_leading,
};
use salem_core::{
    bianchi_census, box_sums, count_deg2, count_salem_deg4, count_sr, count_system,
    enumerate_salem_deg4, enumerate_sr, enumerate_system, lattice_geometry, marklof_constant,
    multiplicity_report, omega, power_fit, verify_salem_over_l, Error,
};
use serde_json::json;

use crate::args::{
    BianchiArgs, CensusArgs, CensusKind, Cli, CocompactArgs, Command, ConstantsArgs, FitArgs,
    FitKind, MultiplicityArgs, OutputFormat, ReportCommand,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Domain(#[from] Error),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Input(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Domain(e) if e.is_capacity() => "capacity",
            CliError::Domain(_) => "domain",
            CliError::Io(_) => "io",
            CliError::Input(_) => "input",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(e) if e.is_capacity() => 4,
            CliError::Domain(_) | CliError::Input(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Points of a doubling grid ending at `qmax`, ascending, none below `min`.
const PLOT_POINTS: usize = 10;

pub fn run(cli: &Cli) -> Result<()> {
    let format = match cli.format {
        OutputFormat::Csv => Format::Csv,
        OutputFormat::Json => Format::Json,
    };
    let mut out: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let ctx = Ctx {
        format,
        dry_run: cli.dry_run,
        seed: cli.seed,
    };
    match &cli.command {
        Command::Census(a) => census(&ctx, a, &mut out)?,
        Command::Bianchi(a) => bianchi(&ctx, a, &mut out)?,
        Command::Cocompact(a) => cocompact(&ctx, a, &mut out)?,
        Command::Constants(a) => constants(&ctx, a, &mut out)?,
        Command::Fit(a) => fit(&ctx, a, &mut out)?,
        Command::Report {
            report: ReportCommand::Multiplicity(a),
        } => multiplicity(&ctx, a, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

struct Ctx {
    format: Format,
    dry_run: bool,
    seed: u64,
}

fn check_q(q: i64, min: i64) -> Result<()> {
    if q < min {
        return Err(Error::BoundTooSmall { q, min }.into());
    }
    if q > salem_core::census::MAX_Q {
        return Err(Error::Capacity(format!(
            "Q={q} exceeds the supported maximum {}",
            salem_core::census::MAX_Q
        ))
        .into());
    }
    Ok(())
}

fn doubling_grid(qmax: i64, min: i64) -> Vec<i64> {
    let mut grid: Vec<i64> = (0..PLOT_POINTS as u32)
        .map_while(|i| qmax.checked_shr(i).filter(|&q| q >= min))
        .collect();
    grid.reverse();
    grid
}

fn write_count(
    ctx: &Ctx,
    out: &mut dyn Write,
    fields: serde_json::Value,
    count: u64,
) -> Result<()> {
    match ctx.format {
        Format::Csv => writeln!(out, "{count}")?,
        Format::Json => {
            let mut v = fields;
            v["count"] = json!(count.to_string());
            writeln!(out, "{v}")?;
        }
    }
    Ok(())
}

fn write_series(out: &mut dyn Write, y_name: &str, pts: &[(f64, f64)]) -> Result<()> {
    output::write_xy(out, "Q", y_name, pts)?;
    Ok(())
}

fn write_plan(out: &mut dyn Write, items: &[(&str, String)]) -> Result<()> {
    let line: Vec<String> = items.iter().map(|(k, v)| format!("{k}={v}")).collect();
    writeln!(out, "plan {}", line.join(" "))?;
    Ok(())
}

fn census_count(kind: CensusKind, q: i64) -> salem_core::Result<u64> {
    match kind {
        CensusKind::Deg4 => count_salem_deg4(q),
        CensusKind::Sr => count_sr(q),
        CensusKind::Deg2 => count_deg2(q),
    }
}

fn census(ctx: &Ctx, a: &CensusArgs, out: &mut dyn Write) -> Result<()> {
    let (name, min, exponent) = match a.kind {
        CensusKind::Deg4 => ("deg4", 2, 2.0),
        CensusKind::Sr => ("sr", 2, 1.5),
        CensusKind::Deg2 => ("deg2", 3, 1.0),
    };
    check_q(a.qmax, min)?;
    let q = a.qmax;
    if ctx.dry_run {
        let (s_sr, s_deg4) = box_sums(q)?;
        let (candidates, estimate) = match a.kind {
            CensusKind::Deg4 => (s_deg4, 2.0 * (q as f64).powi(2)),
            CensusKind::Sr => (s_sr, 4.0 / 3.0 * (q as f64).powf(1.5)),
            CensusKind::Deg2 => (q as u128, (q - 2) as f64),
        };
        return write_plan(
            out,
            &[
                ("command", format!("census-{name}")),
                ("Q", q.to_string()),
                ("a_range", format!("[-{},-1]", q + 2)),
                ("candidates", candidates.to_string()),
                ("estimated_records", format!("{estimate:.0}")),
            ],
        );
    }
    if a.plot_data {
        let pts = doubling_grid(q, min)
            .into_iter()
            .map(|q| {
                Ok((
                    q as f64,
                    census_count(a.kind, q)? as f64 / (q as f64).powf(exponent),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        return write_series(out, &format!("count/Q^{exponent}"), &pts);
    }
    if a.count || a.kind == CensusKind::Deg2 {
        let n = census_count(a.kind, q)?;
        return write_count(ctx, out, json!({"kind": name, "Q": q.to_string()}), n);
    }
    let records = match a.kind {
        CensusKind::Deg4 => enumerate_salem_deg4(q)?,
        _ => enumerate_sr(q)?,
    };
    output::write_census(out, ctx.format, records)?;
    Ok(())
}

fn bianchi(ctx: &Ctx, a: &BianchiArgs, out: &mut dyn Write) -> Result<()> {
    validate_squarefree(a.d, 1)?;
    check_q(a.qmax, 2)?;
    let c = marklof_constant(a.d)?;
    if ctx.dry_run {
        return write_plan(
            out,
            &[
                ("command", "bianchi".into()),
                ("D", a.d.to_string()),
                ("Q", a.qmax.to_string()),
                ("norm_bound", norm_bound(a.qmax).to_string()),
                ("traces", trace_count(a.d, a.qmax)?.to_string()),
                (
                    "estimated_records",
                    format!("{:.0}", c * (a.qmax as f64).sqrt()),
                ),
            ],
        );
    }
    if a.plot_data {
        let pts = doubling_grid(a.qmax, 2)
            .into_iter()
            .map(|q| {
                Ok((
                    q as f64,
                    bianchi_census(a.d, q)?.count() as f64 / (q as f64).sqrt(),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        return write_series(out, "count/Q^0.5", &pts);
    }
    let census = bianchi_census(a.d, a.qmax)?;
    log::info!(
        "D={} Q={}: {} traces, excluded real={} imaginary={} reducible={}, rational lengths={}",
        a.d,
        a.qmax,
        census.traces_scanned,
        census.excluded_real,
        census.excluded_imaginary,
        census.excluded_reducible,
        census.rational_lengths
    );
    if a.count {
        let fields = json!({
            "D": a.d.to_string(),
            "Q": a.qmax.to_string(),
            "traces_scanned": census.traces_scanned.to_string(),
            "excluded_real": census.excluded_real.to_string(),
            "excluded_imaginary": census.excluded_imaginary.to_string(),
            "excluded_reducible": census.excluded_reducible.to_string(),
            "rational_lengths": census.rational_lengths.to_string(),
            "marklof_c": c,
        });
        return write_count(ctx, out, fields, census.count() as u64);
    }
    output::write_bianchi(out, ctx.format, census.members.values())?;
    Ok(())
}

fn cocompact(ctx: &Ctx, a: &CocompactArgs, out: &mut dyn Write) -> Result<()> {
    validate_squarefree(a.field, 2)?;
    check_q(a.qmax, 2)?;
    if ctx.dry_run {
        return write_plan(
            out,
            &[
                ("command", "cocompact".into()),
                ("d", a.field.to_string()),
                ("Q", a.qmax.to_string()),
                ("verified", a.verified.to_string()),
                (
                    "a_candidates",
                    a_candidate_count(a.field, a.qmax)?.to_string(),
                ),
                (
                    "estimated_records",
                    format!("{:.0}", estimated_solutions(a.field, a.qmax)?),
                ),
            ],
        );
    }
    if a.plot_data {
        let pts = doubling_grid(a.qmax, 2)
            .into_iter()
            .map(|q| {
                Ok((
                    q as f64,
                    count_system(a.field, q, a.verified)? as f64 / (q as f64).powf(1.5),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        return write_series(out, "count/Q^1.5", &pts);
    }
    if a.count {
        let n = count_system(a.field, a.qmax, a.verified)?;
        let fields =
            json!({"d": a.field.to_string(), "Q": a.qmax.to_string(), "verified": a.verified});
        return write_count(ctx, out, fields, n);
    }
    let d = a.field;
    let verified_only = a.verified;
    let rows = enumerate_system(d, a.qmax)?
        .map(move |s| {
            let ok = verify_salem_over_l(d, &s);
            (s, ok)
        })
        .filter(move |(_, ok)| *ok || !verified_only);
    output::write_system(out, ctx.format, d, a.qmax, rows)?;
    Ok(())
}

fn constants(ctx: &Ctx, a: &ConstantsArgs, out: &mut dyn Write) -> Result<()> {
    if ctx.dry_run {
        let what = if let Some(m) = a.omega {
            format!("omega m={m}")
        } else if let Some(d) = a.marklof_c {
            format!("marklof-c D={d}")
        } else if let Some(d) = a.c2_bound {
            format!("c2-bound d={d}")
        } else {
            format!(
                "volume h={} delta={} Q={} monte_carlo={}",
                a.h,
                a.delta,
                a.qmax.unwrap_or(0.0),
                a.monte_carlo.unwrap_or(0)
            )
        };
        writeln!(out, "plan command=constants {what}")?;
        return Ok(());
    }
    let json = ctx.format == Format::Json;
    if let Some(m) = a.omega {
        let w = omega(m)?;
        let text = format!("{}/{}", w.numer(), w.denom());
        if json {
            writeln!(out, "{}", json!({"m": m.to_string(), "omega": text}))?;
        } else {
            writeln!(out, "{text}")?;
        }
    } else if let Some(d) = a.marklof_c {
        let c = marklof_constant(d)?;
        if json {
            writeln!(out, "{}", json!({"D": d.to_string(), "marklof_c": c}))?;
        } else {
            writeln!(out, "{}", fmt_significant(c, 15))?;
        }
    } else if let Some(d) = a.c2_bound {
        let g = lattice_geometry(d)?;
        let c2 = c2_upper_bound(d)?;
        if json {
            writeln!(
                out,
                "{}",
                json!({"d": d.to_string(), "disc": g.disc.to_string(), "delta": g.delta, "c2_bound": c2})
            )?;
        } else {
            writeln!(out, "d,disc,delta,c2_bound")?;
            writeln!(
                out,
                "{d},{},{},{}",
                g.disc,
                fmt_significant(g.delta, 12),
                fmt_significant(c2, 12)
            )?;
        }
    } else {
        let q = a
            .qmax
            .ok_or_else(|| CliError::Input("--volume needs --qmax".into()))?;
        let lead = volume_leading(a.h, a.delta, q)?;
        match a.monte_carlo {
            None if json => writeln!(
                out,
                "{}",
                json!({"h": a.h, "delta": a.delta, "Q": q, "leading": lead})
            )?,
            None => writeln!(out, "{}", fmt_significant(lead, 12))?,
            Some(n) => {
                let mc = monte_carlo_volume(a.h, a.delta, q, n, ctx.seed)?;
                let ratio = mc / lead;
                if json {
                    let v = json!({"h": a.h, "delta": a.delta, "Q": q, "leading": lead, "monte_carlo": mc,
                        "samples": n.to_string(), "seed": ctx.seed.to_string(), "ratio": ratio});
                    writeln!(out, "{v}")?;
                } else {
                    writeln!(out, "h,delta,Q,leading,monte_carlo,samples,seed,ratio")?;
                    writeln!(
                        out,
                        "{},{},{},{},{},{n},{},{}",
                        a.h,
                        a.delta,
                        q,
                        fmt_significant(lead, 12),
                        fmt_significant(mc, 12),
                        ctx.seed,
                        fmt_significant(ratio, 12)
                    )?;
                }
            }
        }
    }
    Ok(())
}

fn read_points(path: &Path) -> Result<Vec<(f64, f64)>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| CliError::Input(format!("{}: missing column {name}", path.display())))
    };
    let (qi, ci) = (col("Q")?, col("count")?);
    let mut pts = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec?;
        let parse = |i: usize| {
            rec.get(i)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| {
                    CliError::Input(format!(
                        "{}: bad value on data row {}",
                        path.display(),
                        line + 1
                    ))
                })
        };
        pts.push((parse(qi)?, parse(ci)?));
    }
    Ok(pts)
}

fn fit(ctx: &Ctx, a: &FitArgs, out: &mut dyn Write) -> Result<()> {
    let field = |v: Option<i64>, flag: &str| {
        v.ok_or_else(|| CliError::Input(format!("fit needs {flag} for this kind")))
    };
    let counter: Box<dyn Fn(i64) -> salem_core::Result<u64>> = match a.kind {
        FitKind::Deg4 => Box::new(count_salem_deg4),
        FitKind::Sr => Box::new(count_sr),
        FitKind::Deg2 => Box::new(count_deg2),
        FitKind::Bianchi => {
            let d = field(a.d, "--d")?;
            Box::new(move |q| bianchi_census(d, q).map(|c| c.count() as u64))
        }
        FitKind::System => {
            let d = field(a.field, "--field")?;
            Box::new(move |q| count_system(d, q, false))
        }
    };
    if ctx.dry_run {
        let source = match &a.input {
            Some(p) => format!("input={}", p.display()),
            None => format!(
                "grid={}",
                a.grid
                    .iter()
                    .map(i64::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            ),
        };
        writeln!(out, "plan command=fit kind={:?} {source}", a.kind)?;
        return Ok(());
    }
    let pts = match &a.input {
        Some(path) => read_points(path)?,
        None => a
            .grid
            .iter()
            .map(|&q| Ok((q as f64, counter(q)? as f64)))
            .collect::<Result<Vec<_>>>()?,
    };
    if a.plot_data {
        return write_series(out, "count", &pts);
    }
    let result = power_fit(&pts)?;
    output::write_fit(out, ctx.format, &result)?;
    Ok(())
}

fn multiplicity(ctx: &Ctx, a: &MultiplicityArgs, out: &mut dyn Write) -> Result<()> {
    let rows = multiplicity_report(a.n, a.ell_max, a.step)?;
    if ctx.dry_run {
        writeln!(
            out,
            "plan command=report-multiplicity n={} ell_max={} step={} rows={}",
            a.n,
            a.ell_max,
            a.step,
            rows.len()
        )?;
        return Ok(());
    }
    if a.plot_data {
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.ell, r.mean_mult_lower)).collect();
        output::write_xy(out, "ell", "mean_mult_lower", &pts)?;
        return Ok(());
    }
    output::write_report(out, ctx.format, &rows)?;
    Ok(())
}

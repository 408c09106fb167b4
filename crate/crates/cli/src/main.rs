use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ffsphere_core::designs::{design_strength, DEFAULT_T_MAX};
use ffsphere_core::energy::{
    normalized_report, parse_exponents, separation_bound_report, with_threads, Regime,
};
use ffsphere_core::field::DEFAULT_FIELD_CAP;
use ffsphere_core::format::table_value;
use ffsphere_core::io::{default_file_name, write_points, PointFormat, SCHEMA};
use ffsphere_core::reference::{compare, compute_row, load_appendix, Appendix, DEFAULT_TOLERANCE};
use ffsphere_core::solve::DEFAULT_BUDGET;
use ffsphere_core::{build_point_set, count_solutions_formula, Error, PointSet};

const EXIT_FAILURE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_MISMATCH: u8 = 4;

#[derive(Parser)]
#[command(
    name = "ffsphere",
    version,
    about = "Finite-field point sets on spheres"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build X(d, p^e), write it to a file and print N and the orbit representatives.
    Generate {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long, value_enum, default_value_t = FileFormat::Csv)]
        format: FileFormat,
        /// Output file (default X_d{d}_q{q}.csv or .json).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact design-strength check; exits nonzero unless the set is a 3-design.
    DesignCheck {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long, default_value_t = DEFAULT_T_MAX)]
        t_max: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Riesz s-energy and its normalizations.
    Energy {
        #[command(flatten)]
        set: SetArgs,
        /// Comma-separated exponents, e.g. 2,3,3.125
        #[arg(short = 's', value_name = "LIST")]
        s: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Recompute a published energy table and compare.
    Reproduce {
        #[arg(long, value_parser = parse_appendix)]
        appendix: Appendix,
        /// Largest p to recompute (default 101 for A, 31 for B).
        #[arg(long)]
        max_p: Option<u32>,
        /// Recompute every row of the table.
        #[arg(long, conflicts_with = "max_p")]
        full: bool,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Separation bound implied by the energy, against the observed minimum distance.
    Spacing {
        #[command(flatten)]
        set: SetArgs,
        #[arg(short = 's', value_name = "S")]
        s: String,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct SetArgs {
    #[arg(short = 'd')]
    d: usize,
    #[arg(short = 'p')]
    p: u64,
    #[arg(short = 'e', default_value_t = 1)]
    e: u32,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Maximum q^d enumeration steps.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    /// Maximum field order q.
    #[arg(long, default_value_t = DEFAULT_FIELD_CAP)]
    field_cap: u64,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FileFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
    Csv,
}

fn parse_appendix(s: &str) -> Result<Appendix, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. } | Error::FieldTooLarge { .. } => EXIT_BUDGET,
            Error::InvalidParameter(_)
            | Error::NotOddPrime(_)
            | Error::Domain { .. }
            | Error::Parse(_) => EXIT_VALIDATION,
            _ => EXIT_FAILURE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Error::Io(e).into()
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e).into()
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Generate { set, format, out } => generate(&set, format, out),
        Command::DesignCheck { set, t_max, output } => design_check(&set, t_max, &output),
        Command::Energy { set, s, output } => energy(&set, &s, &output),
        Command::Reproduce {
            appendix,
            max_p,
            full,
            tol,
            threads,
            budget,
            output,
        } => reproduce(appendix, max_p, full, tol, threads, budget, &output),
        Command::Spacing { set, s, output } => spacing(&set, &s, &output),
    }
}

fn validate_threads(threads: Option<usize>) -> CliResult {
    if threads == Some(0) {
        return Err(Error::InvalidParameter("--threads must be at least 1".into()).into());
    }
    Ok(())
}

fn build(args: &SetArgs) -> Result<PointSet, Failure> {
    validate_threads(args.threads)?;
    if args.d == 0 {
        return Err(Error::InvalidParameter("-d must be at least 1".into()).into());
    }
    let set = with_threads(args.threads, || {
        build_point_set(args.d, args.p, args.e, args.field_cap, args.budget)
    })??;
    Ok(set)
}

fn sink(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(w: &mut dyn Write, value: &T) -> CliResult {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)?;
    Ok(())
}

fn display_direction(v: &[i64], norm_sq: i64) -> String {
    let body = v.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
    if norm_sq == 1 {
        format!("({body})")
    } else {
        format!("({body})/sqrt({norm_sq})")
    }
}

#[derive(Serialize)]
struct GenerateSummary<'a> {
    schema: &'static str,
    d: usize,
    p: u64,
    e: u32,
    q: u64,
    #[serde(rename = "N")]
    n: usize,
    formula_n: Option<String>,
    file: String,
    orbits: &'a [ffsphere_core::Orbit],
}

fn generate(args: &SetArgs, format: FileFormat, out: Option<PathBuf>) -> CliResult {
    let set = build(args)?;
    let point_format = match format {
        FileFormat::Csv => PointFormat::Csv,
        FileFormat::Json => PointFormat::Json,
    };
    let path = out.unwrap_or_else(|| PathBuf::from(default_file_name(&set, point_format)));
    let mut file = BufWriter::new(File::create(&path)?);
    write_points(&set, point_format, &mut file)?;
    file.flush()?;

    let orbits = set.orbit_decompose();
    let formula_n = (args.e == 1).then(|| count_solutions_formula(args.d, args.p).to_string());
    let mut w = sink(&None)?;
    match format {
        FileFormat::Json => write_json(
            &mut w,
            &GenerateSummary {
                schema: SCHEMA,
                d: args.d,
                p: args.p,
                e: args.e,
                q: set.q(),
                n: set.len(),
                formula_n,
                file: path.display().to_string(),
                orbits: &orbits,
            },
        )?,
        FileFormat::Csv => {
            writeln!(w, "d={} q={} N={}", set.d(), set.q(), set.len())?;
            if let Some(f) = formula_n {
                writeln!(w, "formula N={f}")?;
            }
            writeln!(w, "orbit representatives V ({}):", orbits.len())?;
            for o in &orbits {
                writeln!(
                    w,
                    "  {}  orbit size {}",
                    display_direction(&o.representative, o.norm_sq),
                    o.size
                )?;
            }
            writeln!(w, "wrote {}", path.display())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn design_check(args: &SetArgs, t_max: u32, output: &OutputArgs) -> CliResult {
    if t_max == 0 {
        return Err(Error::InvalidParameter("--t-max must be at least 1".into()).into());
    }
    let set = build(args)?;
    let report = with_threads(args.threads, || design_strength(&set, t_max))?;
    let mut w = sink(&output.out)?;
    match output.format {
        ReportFormat::Json => write_json(&mut w, &report)?,
        _ => {
            writeln!(w, "d={} q={} N={}", report.d, report.q, report.n)?;
            for c in &report.checks {
                let how = if c.by_symmetry {
                    " (sign symmetry)"
                } else {
                    ""
                };
                let status = if c.pass { "pass" } else { "FAIL" };
                write!(w, "index {:>2}: {status}{how}", c.t)?;
                if let Some(wit) = &c.witness {
                    write!(
                        w,
                        "  witness {}: point average {} vs sphere average {}",
                        wit.monomial, wit.point_average, wit.sphere_average
                    )?;
                }
                writeln!(w)?;
            }
            writeln!(
                w,
                "strength {} (checked up to {})",
                report.strength, report.t_max
            )?;
        }
    }
    w.flush()?;
    let odd_failure = report.checks.iter().any(|c| c.t % 2 == 1 && !c.pass);
    if odd_failure || report.strength < 3.min(t_max) {
        return Err(Failure {
            code: EXIT_FAILURE,
            message: format!(
                "X(d={}, q={}) is not a spherical 3-design (strength {})",
                report.d, report.q, report.strength
            ),
        });
    }
    Ok(())
}

fn energy(args: &SetArgs, s: &str, output: &OutputArgs) -> CliResult {
    let exponents = parse_exponents(s)?;
    let set = build(args)?;
    let report = normalized_report(&set, &exponents, args.threads)?;
    let mut w = sink(&output.out)?;
    match output.format {
        ReportFormat::Json => write_json(&mut w, &report)?,
        ReportFormat::Csv => {
            // one row in the published layout: p, then the regime's normalization per s
            let header: Vec<String> = (1..=report.rows.len()).map(|k| format!("e{k}")).collect();
            writeln!(w, "p,{}", header.join(","))?;
            let values: Vec<String> = report
                .rows
                .iter()
                .map(|r| {
                    table_value(match r.regime {
                        Regime::BelowDimension => r.e_n2,
                        Regime::AtDimension => r.e_n2_log,
                        Regime::AboveDimension => r.e_pow,
                    })
                })
                .collect();
            writeln!(w, "{},{}", args.p, values.join(","))?;
        }
        ReportFormat::Text => {
            writeln!(
                w,
                "d={} q={} N={} min_separation={}",
                report.d,
                report.q,
                report.n,
                table_value(report.min_separation)
            )?;
            for r in &report.rows {
                writeln!(w, "s={}", r.s)?;
                writeln!(w, "  E              = {}", table_value(r.energy))?;
                writeln!(w, "  E/N^2          = {}", table_value(r.e_n2))?;
                writeln!(w, "  E/(N^2 ln N)   = {}", table_value(r.e_n2_log))?;
                let label = format!("E/N^{}", r.pow_exponent);
                writeln!(w, "  {label:<14} = {}", table_value(r.e_pow))?;
                if let (Some(i), Some(r2), Some(rp)) =
                    (r.energy_integral, r.residual_n2, r.residual_pow)
                {
                    writeln!(w, "  I(s,d)         = {}", table_value(i))?;
                    writeln!(w, "  R/N^2          = {}", table_value(r2))?;
                    writeln!(w, "  R/N^(1+s/d)    = {}", table_value(rp))?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn reproduce(
    appendix: Appendix,
    max_p: Option<u32>,
    full: bool,
    tol: f64,
    threads: Option<usize>,
    budget: u128,
    output: &OutputArgs,
) -> CliResult {
    validate_threads(threads)?;
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::InvalidParameter("--tol must be a nonnegative number".into()).into());
    }
    let cap = if full {
        u32::MAX
    } else {
        max_p.unwrap_or(appendix.default_max_p())
    };
    let reference = load_appendix(appendix);
    let mut computed = Vec::new();
    for row in reference.iter().filter(|r| r.p <= cap) {
        let set_args = SetArgs {
            d: appendix.dimension(),
            p: row.p as u64,
            e: 1,
            threads,
            budget,
            field_cap: u64::MAX,
        };
        let set = build(&set_args)?;
        computed.push(compute_row(appendix, &set, threads)?);
    }
    let report = compare(&computed, &reference, tol);
    let mut w = sink(&output.out)?;
    match output.format {
        ReportFormat::Json => write_json(&mut w, &report)?,
        _ => write!(w, "{}", report.to_text())?,
    }
    w.flush()?;
    if report.summary.mismatched > 0 {
        return Err(Failure {
            code: EXIT_MISMATCH,
            message: format!(
                "{} cells outside tolerance {tol:e}",
                report.summary.mismatched
            ),
        });
    }
    Ok(())
}

fn spacing(args: &SetArgs, s: &str, output: &OutputArgs) -> CliResult {
    let exponent = s.parse()?;
    let set = build(args)?;
    let report = separation_bound_report(&set, &exponent, args.threads)?;
    let mut w = sink(&output.out)?;
    match output.format {
        ReportFormat::Json => write_json(&mut w, &report)?,
        _ => {
            writeln!(
                w,
                "d={} q={} N={} s={}",
                report.d, report.q, report.n, report.s
            )?;
            writeln!(w, "E      = {}", table_value(report.energy))?;
            writeln!(w, "C      = {}", table_value(report.c))?;
            writeln!(w, "bound  = {}", table_value(report.bound))?;
            writeln!(w, "delta  = {}", table_value(report.min_separation))?;
            writeln!(w, "ratio  = {}", table_value(report.ratio))?;
        }
    }
    w.flush()?;
    Ok(())
}

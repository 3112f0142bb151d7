//! Command-line front end: sieve tables, run census scans, estimate the
//! κ envelope, list high-quality splits, and run the self-check suites.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error. File outputs
//! are written to a temporary sibling and renamed into place, so an
//! interrupted run never leaves a partial file at the target path. Nothing
//! in any code path is randomized: identical flags give identical bytes.

use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};

use abc_census::census::{
    estimate_kappa, find_hits, scan_range, CensusError, CensusTables,
};
use abc_census::report::{
    census_csv_line, hit_csv_line, JsonArrayWriter, CENSUS_CSV_HEADER, HITS_CSV_HEADER,
};
use abc_census::tables::{
    build_totient_table, load_table_set, write_table_set, RadicalTable, TableError,
    TotientTable, MAX_TABLE_LIMIT,
};
use abc_census::verify::run_all;
use abc_census::{DomainError, Epsilon};

const VERIFY_MAX_CAP: u64 = 100_000;

#[derive(Parser)]
#[command(
    name = "abc-census",
    version,
    about = "Exact census of coprime splits c = a + b under radical inequalities"
)]
struct RunConfig {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sieve radical and totient tables up to a limit and persist them
    Sieve {
        /// Highest index, inclusive (cap 100000000; ~800 MB per table at the cap)
        #[arg(long)]
        limit: u64,
        /// Destination table file (radical record followed by totient record)
        #[arg(long)]
        out: PathBuf,
    },
    /// Scan [min, max] and emit one aggregate row per c
    Census {
        /// Smallest c (at least 3)
        #[arg(long = "min")]
        c_min: u64,
        /// Largest c, inclusive
        #[arg(long = "max")]
        c_max: u64,
        /// Rational exponent "P/Q" with 0 < P < Q <= 64 after reduction
        #[arg(long, default_value = "1/2", value_parser = Epsilon::from_str)]
        eps: Epsilon,
        /// Table file to reuse; built and saved on first use
        #[arg(long)]
        table: Option<PathBuf>,
        /// Output file (atomic rename); stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Worker threads (default: all logical processors)
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        workers: Option<u64>,
    },
    /// Minimum of G(c) / (R(c)^(1-eps) c^2) over a range, and its argmin
    Kappa {
        #[arg(long = "min")]
        c_min: u64,
        #[arg(long = "max")]
        c_max: u64,
        #[arg(long, default_value = "1/2", value_parser = Epsilon::from_str)]
        eps: Epsilon,
        /// Table file to reuse; built and saved on first use
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Splits with quality log c / log R(abc) above a threshold
    Hits {
        #[arg(long = "min")]
        c_min: u64,
        #[arg(long = "max")]
        c_max: u64,
        /// Quality threshold (at least 1)
        #[arg(long)]
        threshold: f64,
        /// Output file (atomic rename); stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the oracle self-check suites
    Verify {
        /// Upper bound for the checked range (1..=100000)
        #[arg(long = "max")]
        max: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

enum CliError {
    Usage(String),
    Runtime(String),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn runtime(msg: impl Into<String>) -> CliError {
    CliError::Runtime(msg.into())
}

fn main() -> ExitCode {
    let config = RunConfig::parse();
    match run(config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(config: RunConfig) -> Result<(), CliError> {
    match config.command {
        Command::Sieve { limit, out } => cmd_sieve(limit, &out),
        Command::Census {
            c_min,
            c_max,
            eps,
            table,
            out,
            format,
            workers,
        } => cmd_census(
            c_min,
            c_max,
            eps,
            table.as_deref(),
            out.as_deref(),
            format,
            resolve_workers(workers),
        ),
        Command::Kappa {
            c_min,
            c_max,
            eps,
            table,
        } => cmd_kappa(c_min, c_max, eps, table.as_deref()),
        Command::Hits {
            c_min,
            c_max,
            threshold,
            out,
        } => cmd_hits(c_min, c_max, threshold, out.as_deref()),
        Command::Verify { max } => cmd_verify(max),
    }
}

fn resolve_workers(flag: Option<u64>) -> usize {
    match flag {
        Some(n) => n as usize,
        None => std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1),
    }
}

fn check_scan_args(c_min: u64, c_max: u64) -> Result<(), CliError> {
    if c_min < 3 {
        return Err(usage(format!("--min must be at least 3, got {c_min}")));
    }
    if c_min > c_max {
        return Err(usage(format!("--min {c_min} exceeds --max {c_max}")));
    }
    if c_max > MAX_TABLE_LIMIT {
        return Err(usage(format!(
            "--max {c_max} exceeds the table cap {MAX_TABLE_LIMIT}"
        )));
    }
    Ok(())
}

fn cmd_sieve(limit: u64, out: &Path) -> Result<(), CliError> {
    if limit == 0 {
        return Err(usage("--limit must be at least 1"));
    }
    if limit > MAX_TABLE_LIMIT {
        return Err(usage(format!(
            "--limit {limit} exceeds the table cap {MAX_TABLE_LIMIT}"
        )));
    }
    let (radicals, totients) = build_pair(limit)?;
    write_tables_atomically(out, &radicals, &totients)?;
    println!(
        "wrote radical and totient tables (limit {limit}) to {}",
        out.display()
    );
    Ok(())
}

fn cmd_census(
    c_min: u64,
    c_max: u64,
    eps: Epsilon,
    table: Option<&Path>,
    out: Option<&Path>,
    format: Format,
    workers: usize,
) -> Result<(), CliError> {
    check_scan_args(c_min, c_max)?;
    let tables = resolve_tables(c_max, table)?;
    let body = |w: &mut dyn Write| -> Result<(), CliError> {
        match format {
            Format::Csv => {
                writeln!(w, "{CENSUS_CSV_HEADER}").map_err(io_to_cli)?;
                scan_range(c_min, c_max, eps, &tables, workers, |row| {
                    writeln!(w, "{}", census_csv_line(row))
                })
                .map_err(census_to_cli)?;
            }
            Format::Json => {
                let mut rows = JsonArrayWriter::new(&mut *w).map_err(io_to_cli)?;
                scan_range(c_min, c_max, eps, &tables, workers, |row| rows.push(row))
                    .map_err(census_to_cli)?;
                rows.finish().map_err(io_to_cli)?;
            }
        }
        Ok(())
    };
    emit(out, body)
}

fn cmd_kappa(
    c_min: u64,
    c_max: u64,
    eps: Epsilon,
    table: Option<&Path>,
) -> Result<(), CliError> {
    check_scan_args(c_min, c_max)?;
    let tables = resolve_tables(c_max, table)?;
    let workers = resolve_workers(None);
    let k = estimate_kappa(c_min, c_max, eps, &tables, workers).map_err(census_to_cli)?;
    println!(
        "kappa eps={} c=[{},{}] min_ratio={} argmin_c={}",
        k.eps,
        k.c_min,
        k.c_max,
        abc_census::report::fmt_real(k.min_ratio),
        k.argmin_c
    );
    Ok(())
}

fn cmd_hits(
    c_min: u64,
    c_max: u64,
    threshold: f64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    check_scan_args(c_min, c_max)?;
    if threshold.is_nan() || threshold < 1.0 {
        return Err(usage(format!(
            "--threshold must be at least 1, got {threshold}"
        )));
    }
    let tables = resolve_tables(c_max, None)?;
    let workers = resolve_workers(None);
    let hits = find_hits(c_min, c_max, threshold, &tables, workers).map_err(census_to_cli)?;
    emit(out, |w| {
        writeln!(w, "{HITS_CSV_HEADER}").map_err(io_to_cli)?;
        for hit in &hits {
            writeln!(w, "{}", hit_csv_line(hit)).map_err(io_to_cli)?;
        }
        Ok(())
    })
}

fn cmd_verify(max: u64) -> Result<(), CliError> {
    if max == 0 {
        return Err(usage("--max must be at least 1"));
    }
    if max > VERIFY_MAX_CAP {
        return Err(usage(format!("--max {max} exceeds the {VERIFY_MAX_CAP} cap")));
    }
    let reports = run_all(max).map_err(table_to_cli)?;
    let mut failed = 0;
    for r in &reports {
        match &r.failure {
            None => println!("suite {}: pass ({} checks)", r.name, r.checked),
            Some(counterexample) => {
                failed += 1;
                println!("suite {}: FAIL ({counterexample})", r.name);
            }
        }
    }
    if failed > 0 {
        return Err(runtime(format!("{failed} self-check suite(s) failed")));
    }
    Ok(())
}

/// Build tables in memory, or reuse a table file: an existing file is
/// loaded (sieving the totient side on demand if only the radical record
/// is present), a missing one is built at `c_max` and persisted for reuse.
fn resolve_tables(c_max: u64, table: Option<&Path>) -> Result<CensusTables, CliError> {
    let limit = c_max.max(3);
    let Some(path) = table else {
        let (radicals, totients) = build_pair(limit)?;
        return CensusTables::from_tables(radicals, totients).map_err(census_to_cli);
    };

    if path.exists() {
        let set = load_table_set(path)
            .map_err(|e| runtime(format!("{}: {e}", path.display())))?;
        let radicals = set.radicals.ok_or_else(|| {
            runtime(format!(
                "{}: table file contains no radical table",
                path.display()
            ))
        })?;
        let totients = match set.totients {
            Some(t) => t,
            None => build_totient_table(radicals.limit()).map_err(table_to_cli)?,
        };
        let tables = CensusTables::from_tables(radicals, totients).map_err(census_to_cli)?;
        if c_max > tables.limit() {
            return Err(usage(format!(
                "--max {c_max} exceeds the limit {} of table file {}",
                tables.limit(),
                path.display()
            )));
        }
        Ok(tables)
    } else {
        let (radicals, totients) = build_pair(limit)?;
        write_tables_atomically(path, &radicals, &totients)?;
        CensusTables::from_tables(radicals, totients).map_err(census_to_cli)
    }
}

fn build_pair(limit: u64) -> Result<(RadicalTable, TotientTable), CliError> {
    let radicals = abc_census::tables::build_radical_table(limit).map_err(table_to_cli)?;
    let totients = build_totient_table(limit).map_err(table_to_cli)?;
    Ok((radicals, totients))
}

fn write_tables_atomically(
    path: &Path,
    radicals: &RadicalTable,
    totients: &TotientTable,
) -> Result<(), CliError> {
    atomic_write(path, |mut w| {
        write_table_set(&mut w, radicals, totients).map_err(table_to_cli)
    })
}

/// Run `body` against stdout, or against a temp file that is renamed onto
/// `path` only after a complete, flushed write.
fn emit<F>(out: Option<&Path>, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> Result<(), CliError>,
{
    match out {
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            body(&mut w)?;
            w.flush().map_err(io_to_cli)
        }
        Some(path) => atomic_write(path, body),
    }
}

fn atomic_write<F>(path: &Path, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> Result<(), CliError>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let tmp = tempfile::Builder::new()
        .prefix(".abc-census-")
        .suffix(".tmp")
        .tempfile_in(dir)
        .map_err(|e| runtime(format!("cannot create temp file in {}: {e}", dir.display())))?;
    let mut w = BufWriter::new(tmp);
    body(&mut w)?;
    let tmp = w
        .into_inner()
        .map_err(|e| runtime(format!("flush failed: {e}")))?;
    tmp.persist(path)
        .map_err(|e| runtime(format!("cannot rename into {}: {e}", path.display())))?;
    Ok(())
}

fn io_to_cli(e: io::Error) -> CliError {
    runtime(format!("i/o: {e}"))
}

fn table_to_cli(e: TableError) -> CliError {
    match e {
        TableError::ZeroLimit | TableError::LimitExceedsCap { .. } => usage(e.to_string()),
        other => runtime(other.to_string()),
    }
}

fn census_to_cli(e: CensusError) -> CliError {
    match e {
        CensusError::Domain(DomainError::CTooSmall(_))
        | CensusError::Domain(DomainError::TableTooSmall { .. })
        | CensusError::EmptyRange { .. }
        | CensusError::ThresholdTooLow(_) => usage(e.to_string()),
        CensusError::Table(t) => table_to_cli(t),
        other => runtime(other.to_string()),
    }
}

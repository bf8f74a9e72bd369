//! `hegy` command-line tool: CSV ingestion, bootstrap tests and simulation
//! reproduction with JSON or CSV output.

pub mod args;
pub mod error;
pub mod ingest;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use clap::Parser;
use hegy_core::boot_block::block_bootstrap_test;
use hegy_core::boot_iid::iid_bootstrap_test;
use hegy_core::bootstrap::TestReport;
use hegy_core::rng::derive_seed;
use hegy_core::series::QuarterlySeries;
use hegy_core::sim::{
    empirical_rejection, power_curve, BootstrapProcedure, DgpSpec, PowerPoint, ReferenceTable,
    TableCell, TableColumn, REFERENCE_TABLES, RHO_GRID, TABLE_REPLICATES, TABLE_REPLICATIONS,
};
use serde::Serialize;

use crate::args::{Cli, Command, Format, PowerCurveArgs, SimulateArgs, TestArgs};
pub use crate::error::{CliError, Result};
pub use crate::ingest::ingest_csv;

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Replications and replicates of a full-scale `simulate --full` run.
pub const FULL_REPLICATIONS: usize = 600;
pub const FULL_REPLICATES: usize = 500;

/// Replicates of a `test` run when --B is not given.
pub const DEFAULT_REPLICATES: usize = 500;

#[derive(Serialize)]
struct SeriesInfo<'a> {
    path: &'a Path,
    length: usize,
    start_season: u8,
}

#[derive(Serialize)]
struct TestOutput<'a, C> {
    schema_version: u32,
    command: &'static str,
    input: SeriesInfo<'a>,
    report: &'a TestReport<C>,
}

/// One simulated reference-table cell.
#[derive(Debug, Clone, Serialize)]
pub struct CellResult {
    pub table: u8,
    pub cell: String,
    pub reference: f64,
    pub rate: f64,
    pub standard_error: f64,
    pub replications: usize,
    pub replicates: usize,
    pub seed: u64,
}

#[derive(Serialize)]
struct SimulateOutput<'a> {
    schema_version: u32,
    command: &'static str,
    seed: u64,
    cells: &'a [CellResult],
}

#[derive(Serialize)]
struct PowerCurveOutput<'a> {
    schema_version: u32,
    command: &'static str,
    dgp: &'a DgpSpec,
    procedure: &'a BootstrapProcedure,
    replications: usize,
    seed: u64,
    points: &'a [PowerPoint],
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Output(std::io::Error::other(e))
}

fn write_report<C: Serialize>(
    out: &mut dyn Write,
    args: &TestArgs,
    y: &QuarterlySeries,
    report: &TestReport<C>,
) -> Result<()> {
    match args.format {
        Format::Json => write_json(
            out,
            &TestOutput {
                schema_version: SCHEMA_VERSION,
                command: "test",
                input: SeriesInfo {
                    path: &args.input,
                    length: y.len(),
                    start_season: y.start_season(),
                },
                report,
            },
        ),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record([
                "method",
                "hypothesis",
                "statistic",
                "observed_statistic",
                "p_value",
                "reject",
                "replicates",
                "seed",
            ])
            .map_err(csv_error)?;
            let method = serde_json::to_value(report.method).map_err(std::io::Error::from)?;
            w.write_record([
                method.as_str().unwrap_or_default().to_string(),
                report.hypothesis.to_string(),
                report.statistic.to_string(),
                report.observed_statistic.to_string(),
                report.p_value.to_string(),
                report.reject.to_string(),
                report.bootstrap_statistics.len().to_string(),
                args.seed.to_string(),
            ])
            .map_err(csv_error)?;
            w.flush()?;
            Ok(())
        }
    }
}

fn run_test(args: &TestArgs) -> Result<()> {
    let y = ingest_csv(&args.input, args.start_season)?;
    let procedure =
        args.engine
            .procedure(args.method, args.hypothesis, args.seed, DEFAULT_REPLICATES)?;
    // Validate the destination before spending time on the bootstrap.
    let mut out = open_output(args.output.as_deref())?;
    match procedure {
        BootstrapProcedure::IidAug { hypothesis, config } => {
            let report = iid_bootstrap_test(&y, hypothesis, &config)?;
            write_report(&mut *out, args, &y, &report)
        }
        BootstrapProcedure::BlockUnaug { hypothesis, config } => {
            let report = block_bootstrap_test(&y, hypothesis, &config)?;
            write_report(&mut *out, args, &y, &report)
        }
    }
}

/// Cells selected by the `simulate` flags, with their index inside their table.
pub fn select_cells(
    args: &SimulateArgs,
) -> Result<Vec<(&'static ReferenceTable, usize, TableCell)>> {
    let tables: Vec<&'static ReferenceTable> = match args.table {
        Some(n) => vec![ReferenceTable::by_number(n)?],
        None if args.full => REFERENCE_TABLES.iter().collect(),
        None => {
            return Err(CliError::Config(
                "--table is required unless --full is given".into(),
            ))
        }
    };
    let wanted_cell: Option<TableCell> = args.cell.as_deref().map(str::parse).transpose()?;
    let wanted_column: Option<TableColumn> = args.column.as_deref().map(str::parse).transpose()?;
    let mut out = Vec::new();
    for table in tables {
        for (i, cell) in table.cells().into_iter().enumerate() {
            let keep = wanted_cell.is_none_or(|c| c == cell)
                && args.row.is_none_or(|r| r == cell.noise)
                && args.nuisance.is_none_or(|n| n == cell.nuisance)
                && wanted_column.is_none_or(|c| c == cell.column);
            if keep {
                out.push((table, i, cell));
            }
        }
    }
    if out.is_empty() {
        return Err(CliError::Config(
            "no table cell matches the selection".into(),
        ));
    }
    Ok(out)
}

/// Runs the selected reference-table cells. Cell `i` of table `n` uses seed
/// `derive(seed, [n, i])`, so a cell gives the same rate alone or in a full table.
pub fn simulate_cells(args: &SimulateArgs) -> Result<Vec<CellResult>> {
    let (default_n, default_b) = if args.full {
        (FULL_REPLICATIONS, FULL_REPLICATES)
    } else {
        (TABLE_REPLICATIONS, TABLE_REPLICATES)
    };
    let replications = args.replications.unwrap_or(default_n);
    let replicates = args.replicates.unwrap_or(default_b);
    if replications == 0 {
        return Err(CliError::Config("--N must be positive".into()));
    }
    let mut results = Vec::new();
    for (table, index, cell) in select_cells(args)? {
        let (dgp, procedure) = table.experiment(&cell, replicates);
        let procedure = match procedure {
            BootstrapProcedure::BlockUnaug { hypothesis, config } => {
                BootstrapProcedure::BlockUnaug {
                    hypothesis,
                    config: args.adjust(config)?,
                }
            }
            other => other,
        };
        let seed = derive_seed(args.seed, &[table.number as u64, index as u64]);
        let result = empirical_rejection(&dgp, &procedure, replications, seed)?;
        results.push(CellResult {
            table: table.number,
            cell: cell.to_string(),
            reference: table.value(&cell)?,
            rate: result.rejection_rate,
            standard_error: result.standard_error,
            replications,
            replicates,
            seed,
        });
    }
    Ok(results)
}

fn run_simulate(args: &SimulateArgs) -> Result<()> {
    let mut out = open_output(args.output.as_deref())?;
    let cells = simulate_cells(args)?;
    match args.format {
        Format::Json => write_json(
            &mut *out,
            &SimulateOutput {
                schema_version: SCHEMA_VERSION,
                command: "simulate",
                seed: args.seed,
                cells: &cells,
            },
        ),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for c in &cells {
                w.serialize(c).map_err(csv_error)?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

fn run_power_curve(args: &PowerCurveArgs) -> Result<()> {
    let dgp = DgpSpec {
        target_root: args.root,
        nuisance: args.nuisance,
        rho: 0.0,
        noise: args.noise,
        cycles: args.cycles,
    };
    dgp.validate()?;
    if args.replications == 0 {
        return Err(CliError::Config("--N must be positive".into()));
    }
    let procedure = args.engine.procedure(
        args.method,
        args.root.hypothesis(),
        args.seed,
        TABLE_REPLICATES,
    )?;
    let grid = args.rho.clone().unwrap_or_else(|| RHO_GRID.to_vec());
    let mut out = open_output(args.output.as_deref())?;
    let points = power_curve(&dgp, &grid, &procedure, args.replications, args.seed)?;
    match args.format {
        Format::Json => write_json(
            &mut *out,
            &PowerCurveOutput {
                schema_version: SCHEMA_VERSION,
                command: "power-curve",
                dgp: &dgp,
                procedure: &procedure,
                replications: args.replications,
                seed: args.seed,
                points: &points,
            },
        ),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["rho", "rate", "se"]).map_err(csv_error)?;
            for p in &points {
                w.write_record([
                    p.rho.to_string(),
                    p.result.rejection_rate.to_string(),
                    p.result.standard_error.to_string(),
                ])
                .map_err(csv_error)?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

fn configure_threads(threads: Option<usize>) -> Result<()> {
    match threads {
        None => Ok(()),
        Some(0) => Err(CliError::Config("--threads must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot configure {n} threads: {e}"))),
    }
}

/// Executes a parsed command line.
pub fn run(cli: &Cli) -> Result<()> {
    configure_threads(cli.threads)?;
    match &cli.command {
        Command::Test(a) => run_test(a),
        Command::Simulate(a) => run_simulate(a),
        Command::PowerCurve(a) => run_power_curve(a),
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
/// Errors go to standard error as `error[config]: ...` or `error[data]: ...`.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let msg = e.render().to_string();
            let msg = msg.trim_start_matches("error: ").trim_end();
            eprintln!("error[config]: {msg}");
            return 2;
        }
    };
    let start = Instant::now();
    match run(&cli) {
        Ok(()) => {
            eprintln!("wall time: {:.2} s", start.elapsed().as_secs_f64());
            0
        }
        Err(e) => {
            eprintln!("{}: {e}", e.prefix());
            e.exit_code()
        }
    }
}

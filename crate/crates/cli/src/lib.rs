//! Command-line front end: configuration, command dispatch and CSV/JSON
//! serialization for the `bec` binary.
//!
//! Exit codes: 0 on success, 1 for an invalid configuration (including an
//! unwritable output path), 2 when the solver fails.

// `!(x > 0)` is deliberate: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod records;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use rayon::prelude::*;
use recoil_bec::observables::grating_profile;
use recoil_bec::oracle::fv_limit_scan;
use recoil_bec::PhaseSolver64;
use thiserror::Error;

pub use config::{Cli, CommandKind, Format, RunConfig};
pub use records::{BoundaryRecord, FvRecord, FvRow, GratingRecord, PointRecord};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("solver error: {0}")]
    Solver(#[from] recoil_bec::Error),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Output(_) => 1,
            CliError::Solver(_) => 2,
        }
    }
}

/// Result of one command.
#[derive(Debug, Clone, PartialEq)]
pub enum Artifact {
    Point(PointRecord),
    Sweep(Vec<PointRecord>),
    Boundaries(BoundaryRecord),
    Grating(GratingRecord),
    Fv(FvRecord),
}

fn mu(cfg: &RunConfig) -> Result<f64, CliError> {
    cfg.mu.ok_or_else(|| CliError::Config("missing --mu".into()))
}

/// Executes the configured command.
pub fn run(cfg: &RunConfig) -> Result<Artifact, CliError> {
    let params = cfg.params;
    match cfg.command {
        CommandKind::Point => {
            let solver = PhaseSolver64::new(params)?;
            Ok(Artifact::Point(PointRecord::from(&solver.phase_point(mu(cfg)?)?)))
        }
        CommandKind::Sweep => {
            let solver = PhaseSolver64::new(params)?;
            let records = cfg
                .sweep_grid()
                .into_par_iter()
                .map(|m| solver.phase_point(m).map(|p| PointRecord::from(&p)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Artifact::Sweep(records))
        }
        CommandKind::Boundaries => {
            let solver = PhaseSolver64::new(params)?;
            let coarse = solver.scan_mu1(cfg.steps)?;
            let fine = solver.scan_mu1(2 * cfg.steps)?;
            Ok(Artifact::Boundaries(BoundaryRecord::new(
                params.model().number(),
                solver.critical(),
                cfg.steps,
                &coarse,
                &fine,
            )))
        }
        CommandKind::Grating => {
            let solver = PhaseSolver64::new(params)?;
            let point = solver.phase_point(mu(cfg)?)?;
            let profile = grating_profile(&point, &params, cfg.n_samples, 0.0)?;
            Ok(Artifact::Grating(GratingRecord::new(&point, &profile)))
        }
        CommandKind::Fv => {
            let scan = fv_limit_scan(&params, mu(cfg)?, &cfg.box_sides, &cfg.sources, &cfg.lattice)?;
            Ok(Artifact::Fv(FvRecord::from(&scan)))
        }
    }
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let out = |e: csv::Error| CliError::Output(e.to_string());
    w.write_record(header).map_err(out)?;
    for r in rows {
        w.write_record(&r).map_err(out)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
}

/// Serializes an artifact. For `grating` and `fv` the CSV form holds only the
/// sample rows; the summary fields are in the JSON form.
pub fn render(artifact: &Artifact, format: Format) -> Result<String, CliError> {
    use records::*;
    let json = |v: serde_json::Result<String>| v.map(|s| s + "\n").map_err(|e| CliError::Output(e.to_string()));
    match (artifact, format) {
        (Artifact::Point(r), Format::Json) => json(serde_json::to_string_pretty(r)),
        (Artifact::Sweep(rs), Format::Json) => json(serde_json::to_string_pretty(rs)),
        (Artifact::Boundaries(r), Format::Json) => json(serde_json::to_string_pretty(r)),
        (Artifact::Grating(r), Format::Json) => json(serde_json::to_string_pretty(r)),
        (Artifact::Fv(r), Format::Json) => json(serde_json::to_string_pretty(r)),
        (Artifact::Point(r), Format::Csv) => csv_table(&POINT_COLUMNS, [r.csv_fields()]),
        (Artifact::Sweep(rs), Format::Csv) => csv_table(&POINT_COLUMNS, rs.iter().map(PointRecord::csv_fields)),
        (Artifact::Boundaries(r), Format::Csv) => csv_table(&BOUNDARY_COLUMNS, [r.csv_fields()]),
        (Artifact::Grating(r), Format::Csv) => csv_table(
            &["x", "rho"],
            r.samples.iter().map(|s| vec![fmt_f64(s.x), fmt_f64(s.rho)]),
        ),
        (Artifact::Fv(r), Format::Csv) => csv_table(&FV_COLUMNS, r.rows.iter().map(FvRow::csv_fields)),
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let cfg = cli.into_config()?;
    log::debug!("{cfg:?}");
    let artifact = run(&cfg)?;
    if let Artifact::Fv(r) = &artifact {
        log::info!(
            "fv: case {}, final error {:e}, extrapolated error {:e}",
            r.case,
            r.final_error,
            r.extrapolated_error
        );
    }
    let text = render(&artifact, cfg.format)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Output(e.to_string())),
    }
}

/// Entry point shared by the binary and tests; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // help and version go to stdout with success
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

//! The `surveyerr` command line.
//!
//! Exit codes: 0 on success, 1 on a data or domain error (one JSON line
//! `{"code", "message"}` on stderr), 2 on a usage error.

pub mod args;
mod commands;
pub mod table;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use clap::Parser;
use serde::Serialize;

use args::Cli;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// A failure surfaced to the user.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or flag combinations (exit 2).
    Usage { code: &'static str, message: String },
    /// Data, domain or I/O problems (exit 1).
    Data { code: &'static str, message: String },
}

impl CliError {
    pub fn usage(code: &'static str, message: impl Into<String>) -> Self {
        CliError::Usage {
            code,
            message: message.into(),
        }
    }

    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage { .. } => EXIT_USAGE,
            CliError::Data { .. } => EXIT_DATA,
        }
    }

    fn record(&self) -> ErrorRecord<'_> {
        match self {
            CliError::Usage { code, message } | CliError::Data { code, message } => ErrorRecord { code, message },
        }
    }
}

impl From<surveyerr_core::Error> for CliError {
    fn from(e: surveyerr_core::Error) -> Self {
        CliError::Data {
            code: e.code(),
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Data {
            code: "io_error",
            message: e.to_string(),
        }
    }
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    code: &'a str,
    message: &'a str,
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let line = serde_json::to_string(&e.record()).expect("error record serialises");
            eprintln!("{line}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.global.threads {
        if threads == 0 {
            return Err(CliError::usage("bad_threads", "--threads must be at least 1"));
        }
        // Only fails if a pool already exists, which can only happen when
        // `run` is called twice in one process; the existing pool is fine.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let table = commands::dispatch(cli)?;
    match &cli.global.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write(cli.global.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            table.write(cli.global.format, &mut lock)?;
        }
    }
    Ok(())
}

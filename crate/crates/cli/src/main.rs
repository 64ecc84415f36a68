//! Command-line front end. Parsing, computation, and serialization each map
//! to their own exit class: 0 on success, 2 for anything wrong with the
//! invocation, 3 when a computation fails to converge (the report still
//! carries diagnostics), 4 when the report cannot be written.

mod commands;
mod config;
mod report;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

use crate::config::Cli;
use crate::report::{serialize_report, ReportEnvelope, ToolInfo};

const EXIT_OK: i32 = 0;
const EXIT_USAGE: i32 = 2;
const EXIT_NUMERICAL: i32 = 3;
const EXIT_WRITE: i32 = 4;

fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return code;
        }
    };

    let common = cli.command.common();
    let timestamp = match &common.timestamp {
        Some(raw) => match chrono::DateTime::parse_from_rfc3339(raw) {
            Ok(_) => raw.clone(),
            Err(err) => {
                eprintln!("error: --timestamp must be an RFC 3339 instant: {err}");
                return EXIT_USAGE;
            }
        },
        None => chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
    };
    let format = common.format;
    let output = common.output.clone();

    let outcome = match commands::execute(&cli.command) {
        Ok(outcome) => outcome,
        Err(message) => {
            eprintln!("error: {message}");
            return EXIT_USAGE;
        }
    };
    let failures = outcome.failures;

    let envelope = ReportEnvelope {
        tool: ToolInfo {
            name: "coulomb-s3",
            version: env!("CARGO_PKG_VERSION"),
        },
        config: outcome.echo,
        timestamp,
        sections: outcome.sections,
        warnings: outcome.warnings,
    };
    let bytes = match serialize_report(&envelope, format) {
        Ok(bytes) => bytes,
        Err(message) => {
            eprintln!("error: {message}");
            return EXIT_USAGE;
        }
    };

    let written = match &output {
        Some(path) => std::fs::write(path, &bytes)
            .map_err(|err| format!("cannot write {}: {err}", path.display())),
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|err| format!("cannot write the report: {err}")),
    };
    if let Err(message) = written {
        eprintln!("error: {message}");
        return EXIT_WRITE;
    }

    if failures > 0 {
        EXIT_NUMERICAL
    } else {
        EXIT_OK
    }
}

fn main() {
    std::process::exit(run(std::env::args_os()));
}

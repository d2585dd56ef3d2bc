mod args;
mod commands;
mod error;
mod output;
mod sweep;

use std::fs::File;
use std::io::{self, Write};
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};
use serde_json::{json, Value};

use saext_core::{UnitSystem, VERSION};

use crate::args::{Cli, Command};
use crate::commands::Context;
use crate::error::CliError;
use crate::output::{Outcome, RunManifest, TolSource, Tolerances};

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let code = match Cli::try_parse_from(&argv) {
        Ok(cli) => execute(cli, &argv),
        Err(e) => {
            let _ = e.print();
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                ErrorKind::InvalidSubcommand | ErrorKind::MissingSubcommand => {
                    let _ = Cli::command().print_help();
                    2
                }
                _ => 2,
            }
        }
    };
    std::process::exit(code);
}

fn resolve_tolerance(flag: Option<f64>, command: &str) -> Result<(Option<f64>, Tolerances), CliError> {
    let check = |v: f64, what: &str| {
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(CliError::Usage(format!("{what} must be positive and finite, got {v}")))
        }
    };
    if let Some(v) = flag {
        let v = check(v, "--tol")?;
        return Ok((Some(v), Tolerances { tol: v, source: TolSource::Flag }));
    }
    if let Ok(raw) = std::env::var("SAEXT_TOL") {
        let v: f64 = raw
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("SAEXT_TOL is not a number: '{raw}'")))?;
        let v = check(v, "SAEXT_TOL")?;
        return Ok((Some(v), Tolerances { tol: v, source: TolSource::Env }));
    }
    let tol = commands::default_tolerance(command).unwrap_or(0.0);
    Ok((None, Tolerances { tol, source: TolSource::Default }))
}

fn inner_command(cli: &Cli) -> &str {
    match &cli.command {
        Command::Sweep(s) => s.command.first().map(String::as_str).unwrap_or("sweep"),
        other => other.name(),
    }
}

fn compute(cli: &Cli, argv: &[String], start: Instant) -> Result<(Outcome, RunManifest), CliError> {
    let units = match &cli.global.units {
        Some(u) => u.parse::<UnitSystem>().map_err(|e| CliError::Usage(e.message()))?,
        None => UnitSystem::default(),
    };
    let (tol, tolerances) = resolve_tolerance(cli.global.tol, inner_command(cli))?;
    let ctx = Context { units, tol, grid_n: cli.global.grid_n, seed: cli.global.seed.unwrap_or(0) };
    let outcome = match &cli.command {
        Command::Sweep(s) => sweep::run(s, &ctx)?,
        other => commands::run(other, &ctx)?,
    };
    let mut command_line = vec!["saext".to_string()];
    command_line.extend(argv.iter().skip(1).cloned());
    let manifest = RunManifest {
        command_line,
        params: serde_json::to_value(&cli.command)?,
        units,
        tolerances,
        version: VERSION.to_string(),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok((outcome, manifest))
}

fn emit(cli: &Cli, outcome: Outcome, manifest: RunManifest) -> Result<(), CliError> {
    let mut sink: Box<dyn Write> = match &cli.global.out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    if cli.global.csv {
        outcome.table.write_csv(&mut sink)?;
    } else {
        let mut payload = outcome.json;
        payload.insert("manifest".into(), serde_json::to_value(&manifest)?);
        serde_json::to_writer_pretty(&mut sink, &Value::Object(payload))?;
        writeln!(sink)?;
    }
    sink.flush()?;
    Ok(())
}

fn execute(cli: Cli, argv: &[String]) -> i32 {
    let start = Instant::now();
    let result = compute(&cli, argv, start).and_then(|(outcome, manifest)| {
        let failed = outcome.failed;
        emit(&cli, outcome, manifest).map(|_| failed)
    });
    match result {
        Ok(false) => 0,
        Ok(true) => 1,
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => 0,
        Err(CliError::Json(e)) if e.io_error_kind() == Some(io::ErrorKind::BrokenPipe) => 0,
        Err(e) => {
            let context = json!({ "command": cli.command.name(), "argv": &argv[1..] });
            let body = e.to_json(context);
            let _ = writeln!(io::stderr(), "{}", serde_json::to_string_pretty(&body).unwrap_or_default());
            e.exit_code()
        }
    }
}

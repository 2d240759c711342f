mod args;
mod commands;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::{CommandFactory, Parser};
use serde_json::Value;
use stacky_core::Error;

use args::{Cli, Command};

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Usage(clap::Error),
    Verification(usize),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                Error::Config(_) | Error::Parse(_) | Error::Unsupported(_) => 2,
                Error::Budget(_) => 3,
                Error::Coverage(_) => 4,
                Error::Precision(_) => 5,
                Error::Numerical(_) => 6,
                _ => 7,
            },
        }
    }
}

fn config_err(msg: String) -> CliError {
    CliError::Core(Error::Config(msg))
}

/// Flags from a JSON config object, as command-line tokens.
fn config_tokens(v: &Value) -> Result<(String, Vec<OsString>), CliError> {
    let obj = v
        .as_object()
        .ok_or_else(|| config_err("config must be a JSON object".into()))?;
    let sub = obj
        .get("subcommand")
        .and_then(Value::as_str)
        .ok_or_else(|| config_err("config needs a string \"subcommand\"".into()))?
        .to_string();
    let mut out = Vec::new();
    for (k, val) in obj {
        if k == "subcommand" {
            continue;
        }
        let flag = format!("--{}", k.replace('_', "-"));
        let scalar = |x: &Value| -> Result<String, CliError> {
            match x {
                Value::String(s) => Ok(s.clone()),
                Value::Number(n) => Ok(n.to_string()),
                _ => Err(config_err(format!(
                    "config key `{k}` has an unsupported value"
                ))),
            }
        };
        match val {
            Value::Bool(true) => out.push(flag.into()),
            Value::Bool(false) | Value::Null => {}
            Value::Array(xs) => {
                let parts: Vec<String> = xs.iter().map(scalar).collect::<Result<_, _>>()?;
                out.push(flag.into());
                out.push(parts.join(",").into());
            }
            x => {
                out.push(flag.into());
                out.push(scalar(x)?.into());
            }
        }
    }
    Ok((sub, out))
}

fn parse() -> Result<Cli, CliError> {
    let raw: Vec<OsString> = std::env::args_os().collect();
    let path = raw.iter().enumerate().find_map(|(i, a)| {
        let s = a.to_str()?;
        match s.strip_prefix("--config") {
            Some("") => raw.get(i + 1).cloned(),
            Some(rest) => rest.strip_prefix('=').map(OsString::from),
            None => None,
        }
    });
    let Some(path) = path else {
        return Cli::try_parse_from(&raw).map_err(CliError::Usage);
    };
    let text = std::fs::read_to_string(&path).map_err(Error::from)?;
    let v: Value = serde_json::from_str(&text).map_err(Error::from)?;
    let (sub, tokens) = config_tokens(&v)?;
    let names: Vec<String> = Cli::command()
        .get_subcommands()
        .map(|c| c.get_name().to_string())
        .collect();
    let pos = raw
        .iter()
        .position(|a| a.to_str().is_some_and(|s| names.iter().any(|n| n == s)));
    let mut argv = vec![raw[0].clone()];
    let rest = match pos {
        Some(i) => {
            if raw[i].to_str() != Some(sub.as_str()) {
                return Err(config_err(format!(
                    "config is for `{sub}` but the command line says {:?}",
                    raw[i]
                )));
            }
            argv.extend(raw[1..i].iter().cloned());
            &raw[i + 1..]
        }
        None => &raw[1..],
    };
    argv.push(sub.into());
    argv.extend(tokens);
    argv.extend(rest.iter().cloned());
    Cli::try_parse_from(argv).map_err(CliError::Usage)
}

fn run() -> Result<(), CliError> {
    let cli = parse()?;
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(config_err("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| config_err(e.to_string()))?;
    }
    let Some(command) = &cli.command else {
        return Err(config_err("no subcommand given (see --help)".into()));
    };
    match command {
        Command::Local(a) => commands::local(a),
        Command::Disc(a) => commands::disc(a),
        Command::Invariants(a) => commands::invariants(a),
        Command::Global(a) => commands::global(a),
        Command::P1(a) => commands::p1(a),
        Command::Mu2(a) => commands::mu2(a),
        Command::Elliptic(a) => commands::elliptic(a),
        Command::Asym(a) => commands::asym(a),
        Command::Product(a) => commands::product(a),
        Command::Verify(a) => commands::verify(a),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(e)) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            ExitCode::from(code)
        }
        Err(e) => {
            match &e {
                CliError::Core(err) => eprintln!("error: {err}"),
                CliError::Verification(n) => eprintln!("error: {n} check(s) failed"),
                CliError::Usage(_) => {}
            }
            ExitCode::from(e.exit_code())
        }
    }
}

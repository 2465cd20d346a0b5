mod args;
mod commands;
mod error;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgMatches, CommandFactory, FromArgMatches};
use serde::Deserialize;
use serde_json::Value;

use args::{Cli, Command, Format};
use error::{CliError, CliResult};
use report::{Clock, Report, Status};

/// Keys whose values name input files.
const PATH_KEYS: &[&str] = &["points", "poly", "samples", "target"];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Campaign {
    command: String,
    #[serde(default)]
    params: serde_json::Map<String, Value>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<String>,
    threads: Option<usize>,
}

fn scalar_arg(key: &str, v: &Value) -> CliResult<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Array(items) => items
            .iter()
            .map(|i| scalar_arg(key, i))
            .collect::<CliResult<Vec<_>>>()
            .map(|v| v.join(",")),
        _ => Err(CliError::Usage(format!("params.{key}: expected a string, number or array"))),
    }
}

fn resolve_input(base: &Path, field: &str, value: &str) -> CliResult<String> {
    let p = base.join(value);
    if !p.is_file() {
        return Err(CliError::Usage(format!("{field}: file {} does not exist", p.display())));
    }
    Ok(p.display().to_string())
}

/// Translates a campaign file into the equivalent command line.
fn campaign_argv(path: &Path) -> CliResult<(Vec<String>, Value)> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let raw: Value = serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.display().to_string(),
        source,
    })?;
    let c: Campaign = serde_json::from_value(raw.clone()).map_err(|source| CliError::Json {
        path: path.display().to_string(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));

    let mut argv = vec![report::TOOL.to_string()];
    argv.extend(c.command.split_whitespace().map(str::to_string));
    if c.command.trim() == "run" {
        return Err(CliError::Usage("command: run cannot be nested".into()));
    }
    for (key, v) in &c.params {
        let flag = format!("--{}", key.replace('_', "-"));
        match v {
            Value::Bool(true) => argv.push(flag),
            Value::Bool(false) | Value::Null => {}
            _ => {
                let mut s = scalar_arg(key, v)?;
                if PATH_KEYS.contains(&key.as_str()) || (key == "q" && s.ends_with(".json")) {
                    s = resolve_input(base, &format!("params.{key}"), &s)?;
                }
                argv.push(flag);
                argv.push(s);
            }
        }
    }
    if let Some(seed) = c.seed {
        argv.extend(["--seed".into(), seed.to_string()]);
    }
    if let Some(out) = &c.out {
        argv.extend(["--out".into(), base.join(out).display().to_string()]);
    }
    if let Some(f) = &c.format {
        argv.extend(["--format".into(), f.clone()]);
    }
    if let Some(t) = c.threads {
        argv.extend(["--threads".into(), t.to_string()]);
    }
    Ok((argv, raw))
}

fn command_name(m: &ArgMatches) -> String {
    let mut parts = Vec::new();
    let mut cur = m;
    while let Some((name, sub)) = cur.subcommand() {
        parts.push(name.to_string());
        cur = sub;
    }
    parts.join(" ")
}

fn parse(argv: &[String]) -> Result<(Cli, String), clap::Error> {
    let m = Cli::command().try_get_matches_from(argv)?;
    let cli = Cli::from_arg_matches(&m)?;
    Ok((cli, command_name(&m)))
}

fn set_threads(n: Option<usize>) {
    #[cfg(feature = "parallel")]
    if let Some(n) = n {
        // a second call fails harmlessly when the pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
}

fn run(argv: Vec<String>) -> CliResult<i32> {
    let clock = Clock::start();
    let (mut cli, mut name) = match parse(&argv) {
        Ok(v) => v,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return Ok(code);
        }
    };
    let mut config = None;
    if let Command::Run { config: path } = &cli.command {
        let (inner, raw) = campaign_argv(path)?;
        (cli, name) = parse(&inner).map_err(|e| CliError::Usage(format!("{}: {}", path.display(), e.render())))?;
        config = Some(raw);
    }
    set_threads(cli.global.threads);

    let g = &cli.global;
    let (out, status, error) = match commands::execute(&cli.command, g) {
        Ok(out) => {
            let s = report::status_of(&out.checks);
            (out, s, None)
        }
        Err(e @ CliError::Core(sampdisc::Error::Invariant(_))) => (commands::Output::default(), Status::Error, Some(e)),
        Err(e) => return Err(e),
    };

    let text = match g.format {
        Format::Csv if error.is_none() => report::to_csv(&out)?,
        _ => report::to_json(&Report {
            tool: report::TOOL,
            version: env!("CARGO_PKG_VERSION"),
            command: name,
            argv: argv.iter().skip(1).cloned().collect(),
            config,
            seed: g.seed,
            derived_seeds: out.derived_seeds.clone(),
            status,
            checks: out.checks.clone(),
            error: error.as_ref().map(|e| e.to_string()),
            result: out.result.clone(),
            timing: clock.timing(),
        }),
    };
    report::emit(&text, g.out.as_deref())?;

    for c in out.checks.iter().filter(|c| !c.passed) {
        eprintln!("check failed: {}: {}", c.name, c.detail);
    }
    if let Some(e) = error {
        eprintln!("error: {e}");
        return Ok(e.exit_code());
    }
    Ok(if status == Status::Ok { 0 } else { 2 })
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    match run(argv) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

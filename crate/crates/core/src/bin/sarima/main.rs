mod args;
mod commands;
mod config;
mod manifest;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches};

use args::{Cli, Command};
use sarima_core::{Error, ErrorCategory};

fn exit_code(category: ErrorCategory) -> u8 {
    match category {
        ErrorCategory::Usage => 1,
        ErrorCategory::Data => 2,
        ErrorCategory::Numerical => 3,
    }
}

fn report(kind: &str, message: &str, code: u8) -> ExitCode {
    let body = serde_json::json!({ "error": kind, "message": message, "exit_code": code });
    eprintln!("{body}");
    ExitCode::from(code)
}

fn command() -> clap::Command {
    let mut cmd = Cli::command().mut_subcommands(|c| c.args_override_self(true));
    cmd.build();
    cmd
}

fn parse(argv: Vec<OsString>) -> Result<Cli, ExitCode> {
    let cmd = command();
    let argv = match config::config_path(&argv) {
        Some(path) => config::merge(argv, &cmd, path.as_ref()).map_err(|e| report(e.kind(), &e.to_string(), 1))?,
        None => argv,
    };
    let matches = cmd.try_get_matches_from(argv).map_err(|e| {
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                let _ = e.print();
                ExitCode::SUCCESS
            }
            _ => report("UsageError", e.render().to_string().trim(), 1),
        }
    })?;
    Cli::from_arg_matches(&matches).map_err(|e| report("UsageError", e.render().to_string().trim(), 1))
}

fn run(cli: &Cli) -> sarima_core::Result<()> {
    let config = match &cli.command {
        Command::Search(a) => serde_json::to_value(a),
        Command::Fit(a) => serde_json::to_value(a),
        Command::Diagnose(a) => serde_json::to_value(a),
        Command::Forecast(a) => serde_json::to_value(a),
        Command::Impact(a) => serde_json::to_value(a),
        Command::Fetch(a) => serde_json::to_value(a),
        Command::Simulate(a) => serde_json::to_value(a),
    }
    .map_err(|e| Error::Config(e.to_string()))?;
    let jobs = match &cli.command {
        Command::Search(a) => a.run.jobs,
        Command::Fit(a) => a.run.jobs,
        Command::Diagnose(a) => a.run.jobs,
        Command::Forecast(a) => a.run.jobs,
        Command::Impact(a) => a.run.jobs,
        Command::Simulate(a) => a.run.jobs,
        Command::Fetch(_) => 0,
    };
    if jobs > 0 {
        // grid_search builds its own pool; this one serves everything else
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let run = commands::Run {
        precision: cli.precision,
        command: cli.command.name(),
        config,
        started_at: chrono::Utc::now().to_rfc3339(),
    };
    match &cli.command {
        Command::Search(a) => commands::search(&run, a),
        Command::Fit(a) => commands::fit_cmd(&run, a),
        Command::Diagnose(a) => commands::diagnose(&run, a),
        Command::Forecast(a) => commands::forecast_cmd(&run, a),
        Command::Impact(a) => commands::impact_cmd(&run, a),
        Command::Fetch(a) => commands::fetch(&run, a),
        Command::Simulate(a) => commands::simulate_cmd(&run, a),
    }
}

fn main() -> ExitCode {
    let cli = match parse(std::env::args_os().collect()) {
        Ok(cli) => cli,
        Err(code) => return code,
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(e.kind(), &e.to_string(), exit_code(e.category())),
    }
}

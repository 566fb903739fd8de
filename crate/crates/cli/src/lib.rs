//! The `proxauth` command line.

pub mod args;
pub mod commands;
pub mod config;
pub mod demo;
pub mod manifest;

use anyhow::Context;
use clap::Parser;
use tracing_subscriber::EnvFilter;

use crate::args::{Cli, Command};
use crate::commands::Ctx;
use crate::config::FileConfig;
use crate::manifest::{unix_now, RunManifest};

/// A bad command line, as opposed to a failure while running it.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

/// Runs a parsed command line. `argv` excludes the program name and is
/// recorded in manifests.
pub fn run(cli: Cli, argv: Vec<String>) -> anyhow::Result<()> {
    run_with(cli, argv, None)
}

/// Replays use the configuration recorded in the manifest rather than
/// whatever the config file says today.
fn run_with(cli: Cli, argv: Vec<String>, recorded: Option<FileConfig>) -> anyhow::Result<()> {
    if let Command::Replay(r) = &cli.command {
        let m = RunManifest::load(&r.manifest)?;
        let replayed = Cli::try_parse_from(std::iter::once("proxauth".to_string()).chain(m.argv.iter().cloned()))
            .map_err(|e| UsageError(format!("manifest {} holds an invalid command line: {e}", r.manifest.display())))?;
        if matches!(replayed.command, Command::Replay(_)) {
            return Err(UsageError("a manifest cannot replay another replay".into()).into());
        }
        std::env::set_current_dir(&m.working_dir)
            .with_context(|| format!("entering recorded working directory {}", m.working_dir.display()))?;
        return run_with(replayed, m.argv, Some(m.config));
    }
    let config = match recorded {
        Some(c) => c,
        None => FileConfig::load(cli.config.as_deref())?,
    };
    let seed = cli.seed.unwrap_or(config.sim.seed);
    let args = serde_json::to_value(&cli.command).context("recording arguments")?;
    let command = args.as_object().and_then(|o| o.keys().next().cloned()).unwrap_or_default();
    let mut ctx = Ctx { config, seed, json: cli.json, argv, command, args, started_at: unix_now() };
    match &cli.command {
        Command::GenData(a) => commands::gen_data(&mut ctx, a),
        Command::Train(a) => commands::train_cmd(&ctx, a),
        Command::Eval(a) => commands::eval(&ctx, a),
        Command::Cv(a) => commands::cv(&ctx, a),
        Command::Importance(a) => commands::importance(&ctx, a),
        Command::Bench(a) => commands::bench(&ctx, a),
        Command::Attack(a) => commands::attack(&mut ctx, a),
        Command::Serve(a) => commands::serve(&mut ctx, a),
        Command::DemoSession(a) => commands::demo_session(&ctx, a),
        Command::Replay(_) => unreachable!("handled above"),
    }
}

/// Service logs go to stderr at info level; batch commands only show
/// warnings unless `RUST_LOG` says otherwise.
fn init_tracing(serving: bool) {
    let default = if serving { "info" } else { "warn" };
    let filter = EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new(default));
    let _ = tracing_subscriber::fmt().with_env_filter(filter).with_writer(std::io::stderr).try_init();
}

/// Parses `std::env::args` and runs; returns the process exit code.
pub fn main_exit_code() -> i32 {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    init_tracing(matches!(cli.command, Command::Serve(_)));
    match run(cli, argv) {
        Ok(()) => 0,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e:#}");
            2
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

//! `plegma-lab`: batch front end over the plegma-lab library.

mod input;
mod norm;
mod output;
mod plegma;
mod ramsey;
mod selftest;
mod seq;
mod sm;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgMatches, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde::Serialize;

use output::{Format, Report};

#[derive(Parser, Debug)]
#[command(
    name = "plegma-lab",
    version,
    about = "Plegma families, explicit norms on c00 and empirical k-spreading models",
    after_help = "Exit status: 0 success, 1 failed self-test or I/O error, 2 invalid input or config, 3 scale refusal."
)]
struct Cli {
    /// Directory receiving result.json, result.csv (tabular commands) and manifest.json.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output printed on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for parallel loops.
    #[arg(long, global = true, env = "PLEGMA_LAB_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(untagged)]
enum Command {
    /// Plegma families: membership, enumeration, paths, preserving maps.
    #[command(subcommand)]
    Plegma(plegma::Cmd),
    /// Ramsey-type searches on finite universes.
    #[command(subcommand)]
    Ramsey(ramsey::Cmd),
    /// Norm engines: evaluation, certificates, self-checks.
    #[command(subcommand)]
    Norm(norm::Cmd),
    /// k-sequences: generators, composition, renorming, tree decompositions.
    #[command(subcommand)]
    Seq(seq::Cmd),
    /// Empirical k-spreading models.
    #[command(subcommand)]
    Sm(sm::Cmd),
    /// Runs the acceptance suite, one pass/fail line per criterion.
    Selftest(selftest::Args),
    /// Runs a command described by a JSON file
    /// `{"command": "sm cesaro", "args": {"gen": "xk_basis", "n_max": 6}}`.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    execute(std::env::args_os().collect(), 0)
}

fn execute(argv: Vec<OsString>, depth: usize) -> ExitCode {
    let matches = match Cli::command().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cli.threads {
        // a second call from `run` finds the pool already built
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    if let Command::Run { config } = &cli.command {
        if depth > 0 {
            eprintln!("error: invalid config: run configs cannot nest");
            return ExitCode::from(2);
        }
        return match input::config_argv(config, cli.out.as_deref(), cli.format) {
            Ok(argv) => execute(argv, depth + 1),
            Err(e) => fail(e),
        };
    }
    let name = command_name(&matches);
    match dispatch(&cli.command).and_then(|r| output::emit(&r, &name, &cli.command, cli.format, cli.out.as_deref())) {
        Ok(status) => ExitCode::from(status),
        Err(e) => fail(e),
    }
}

fn dispatch(cmd: &Command) -> anyhow::Result<Report> {
    match cmd {
        Command::Plegma(c) => plegma::run(c),
        Command::Ramsey(c) => ramsey::run(c),
        Command::Norm(c) => norm::run(c),
        Command::Seq(c) => seq::run(c),
        Command::Sm(c) => sm::run(c),
        Command::Selftest(a) => selftest::run(a),
        Command::Run { .. } => unreachable!("handled before dispatch"),
    }
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

fn fail(e: anyhow::Error) -> ExitCode {
    eprintln!("error: {e:#}");
    let code = match e.downcast_ref::<plegma_lab::Error>() {
        Some(plegma_lab::Error::ScaleRefusal(_)) => 3,
        Some(_) => 2,
        None => 1,
    };
    ExitCode::from(code)
}

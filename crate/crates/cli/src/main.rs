//! `deconflict`: detect conflicts, analyse the conflict graph, compile QUBOs
//! and solve them.

mod args;
mod commands;
mod output;
mod seed;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Error classes mapped onto the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad input files or flags.
    Input(anyhow::Error),
    /// Some instances could not be solved; the others were written.
    Partial(String),
    /// Anything else, e.g. an unwritable output directory.
    Internal(anyhow::Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Partial(_) => 3,
            Failure::Internal(_) => 1,
        }
    }
}

pub type Outcome = Result<(), Failure>;

pub trait InputContext<T> {
    fn input(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> InputContext<T> for Result<T, E> {
    fn input(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Input(e.into()))
    }
}

pub trait InternalContext<T> {
    fn internal(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> InternalContext<T> for Result<T, E> {
    fn internal(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Internal(e.into()))
    }
}

fn configure_threads() -> Outcome {
    let Ok(value) = std::env::var("DECONFLICT_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| Failure::Input(anyhow::anyhow!("DECONFLICT_THREADS must be a positive integer, got {value:?}")))?;
    if threads == 0 {
        return Err(Failure::Input(anyhow::anyhow!("DECONFLICT_THREADS must be positive")));
    }
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().internal()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = configure_threads().and_then(|()| match &cli.command {
        Command::Detect(a) => commands::detect(a),
        Command::Stats(a) => commands::stats(a),
        Command::Build(a) => commands::build(a),
        Command::Solve(a) => commands::solve(a),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Input(e) => eprintln!("error: {e:#}"),
                Failure::Internal(e) => eprintln!("internal error: {e:#}"),
                Failure::Partial(msg) => eprintln!("warning: {msg}"),
            }
            ExitCode::from(failure.exit_code())
        }
    }
}

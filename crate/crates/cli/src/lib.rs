//! Command-line front end: configuration, dispatch and output.

pub mod commands;
pub mod config;
pub mod output;

use std::io::Write;

use thiserror::Error;

pub use config::{Cli, Command, Format, RunConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    /// A certified computation found a failing clause.
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

/// Runs the configured command, writing to `--out` or standard output.
pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let text = render(config)?;
    match &config.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}

/// The full output of a run as text. Reports that end in an invariant
/// violation are rendered before the error is returned by [`run`].
pub fn render(config: &RunConfig) -> Result<String, CliError> {
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = config.threads {
            b = b.num_threads(n);
        }
        b.build().map_err(|e| CliError::Validation(format!("thread pool: {e}")))?
    };
    let out = pool.install(|| commands::execute(config))?;
    let text = out.render(config.format)?;
    match out.failure {
        Some(f) => {
            // keep the report visible alongside the failing exit status
            eprint!("{text}");
            Err(CliError::Invariant(f))
        }
        None => Ok(text),
    }
}

/// Exit status of `run`, printing a one-line diagnostic on failure.
pub fn main_with(config: Result<RunConfig, CliError>) -> i32 {
    match config.and_then(|c| run(&c)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("transvecta: {e}");
            e.exit_code()
        }
    }
}

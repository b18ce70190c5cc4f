use clap::error::ErrorKind;
use clap::Parser;
use transvecta_cli::{main_with, Cli, RunConfig};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("transvecta: {}", first.trim_start_matches("error: "));
            std::process::exit(2);
        }
    };
    std::process::exit(main_with(RunConfig::from_cli(&cli)));
}

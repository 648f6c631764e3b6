mod args;
mod commands;
mod config;
mod inputs;
mod output;

use std::process::ExitCode;

use anyhow::Result;
use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use inputs::NoInputs;

fn run(cli: &Cli) -> Result<()> {
    let (run, common, config) = match &cli.command {
        Command::Ingest(a) => (commands::ingest(a)?, &a.common, serde_json::to_value(a)?),
        Command::Impact(a) => (commands::impact(a)?, &a.common, serde_json::to_value(a)?),
        Command::Imbalance(a) => (commands::imbalance(a)?, &a.common, serde_json::to_value(a)?),
        Command::Bars(a) => (commands::bars(a)?, &a.common, serde_json::to_value(a)?),
        Command::Fit(a) => (commands::fit(a)?, &a.common, serde_json::to_value(a)?),
        Command::Cv(a) => (commands::cv(a)?, &a.common, serde_json::to_value(a)?),
        Command::Synth(a) => (commands::synth(a)?, &a.common, serde_json::to_value(a)?),
        Command::Reproduce(a) => (commands::reproduce(a)?, &a.common, serde_json::to_value(a)?),
    };
    let written = run
        .outputs
        .commit(&common.out, cli.command.name(), &config, &run.inputs)?;
    for p in written {
        log::info!("wrote {}", p.display());
    }
    Ok(())
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let raw: Vec<_> = std::env::args_os().collect();
    let argv = match config::expand_args(raw) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("lobimpact: error: {}", one_line(&e));
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("lobimpact: {}", one_line(first));
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lobimpact: error: {}", one_line(&format!("{e:#}")));
            if e.downcast_ref::<NoInputs>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

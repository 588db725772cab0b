use std::process::ExitCode;

use clap::Parser;
use rumdlab::commands::{run, Cli};

fn configure_threads() -> anyhow::Result<()> {
    let Ok(value) = std::env::var("RUMDLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| {
            rumdlab::UsageError(format!(
                "RUMDLAB_THREADS must be a positive integer, got '{value}'"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| run(cli));
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(rumdlab::exit_code(&err) as u8)
        }
    }
}

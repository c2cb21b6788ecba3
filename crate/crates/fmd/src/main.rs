use std::process::ExitCode;

use clap::Parser;
use fmd::args::Cli;

fn configure_pool() -> Result<(), String> {
    let Ok(raw) = std::env::var("FMD_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("FMD_THREADS must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(why) = configure_pool() {
        eprintln!("error: {why}");
        return ExitCode::from(2);
    }
    match fmd::execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

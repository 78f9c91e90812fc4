use std::process::ExitCode;

use clap::Parser;
use lyapcert::commands::{run, Cli};

fn init_logging() {
    let level = match std::env::var("LYAPCERT_LOG").ok().as_deref().map(str::trim) {
        Some("quiet") => log::LevelFilter::Off,
        Some("info") => log::LevelFilter::Info,
        Some("debug") => log::LevelFilter::Debug,
        _ => log::LevelFilter::Warn,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
}

fn main() -> ExitCode {
    init_logging();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            if code == 2 {
                eprintln!("status=usage-error command=-");
            }
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            log::warn!("thread pool: {e}");
        }
    }
    let name = cli.command.name();
    match run(&cli) {
        Ok(outcome) => {
            eprintln!("{}", outcome.status_line(name));
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            let status = if e.exit_code() == 2 { "input-error" } else { "solver-error" };
            eprintln!("status={status} command={name} message={:?}", e.to_string());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use std::process::ExitCode;

use clap::Parser;
use subseg::cli::{self, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Cli::parse();

    let result = cli::thread_count_from_env().and_then(|threads| {
        // ignore: a pool may already exist when embedded
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
        cli::run(args, &mut std::io::stdout().lock())
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("code=check msg=one or more properties failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("{}", cli::error_line(&e));
            ExitCode::FAILURE
        }
    }
}

use std::process::ExitCode;

use clap::Parser;
use sumeval::cli::{run, Cli};
use sumeval::io::InputError;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let input_problem = err.downcast_ref::<InputError>().is_some()
                || err.downcast_ref::<sumeval::Error>().is_some()
                || err.downcast_ref::<std::io::Error>().is_some()
                || err
                    .chain()
                    .any(|cause| cause.downcast_ref::<std::io::Error>().is_some());
            ExitCode::from(if input_problem { 2 } else { 1 })
        }
    }
}

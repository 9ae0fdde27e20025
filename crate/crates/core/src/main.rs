use std::process::ExitCode;
use std::time::Instant;

use beamnoma::cli::{parse_cli, CliError, EXIT_FAILURE};
use beamnoma::{experiments, output};

fn main() -> ExitCode {
    let run = match parse_cli(std::env::args_os()) {
        Ok(run) => run,
        Err(CliError::Usage(e)) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(EXIT_FAILURE);
        }
    };

    let start = Instant::now();
    let result = match experiments::run(&run.experiment, run.threads) {
        Ok(r) => r,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(EXIT_FAILURE);
        }
    };
    if let Err(err) = output::write_results(&result, &run) {
        eprintln!("error: {err}");
        return ExitCode::from(EXIT_FAILURE);
    }
    eprintln!(
        "{} ({} trials, seed {}) -> {} in {:.2?}",
        run.experiment.kind.as_str(),
        run.experiment.trials,
        run.experiment.master_seed,
        run.output_path.display(),
        start.elapsed()
    );
    ExitCode::SUCCESS
}

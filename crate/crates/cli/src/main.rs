use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;

use clap::Parser;
use supercyc_cli::{run, Cli, CliError};

/// Caps the rayon global pool when SUPERCYC_THREADS is set.
fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("SUPERCYC_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "SUPERCYC_THREADS must be a positive integer, got {raw:?}"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("SUPERCYC_THREADS: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("supercyc: {e}");
        return ExitCode::from(e.exit_code() as u8);
    }

    // A panic anywhere below is an internal numeric failure, never a raw
    // crash: silence the default hook and translate to exit code 3.
    panic::set_hook(Box::new(|_| {}));
    let outcome = panic::catch_unwind(AssertUnwindSafe(|| run(cli)));
    let _ = panic::take_hook();

    match outcome {
        Ok(Ok(output)) => {
            print!("{}", output.stdout);
            for note in output.notes {
                eprintln!("{note}");
            }
            ExitCode::SUCCESS
        }
        Ok(Err(e)) => {
            eprintln!("supercyc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            eprintln!("supercyc: numeric failure: {message}");
            ExitCode::from(3)
        }
    }
}

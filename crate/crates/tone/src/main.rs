use clap::Parser;
use std::io::Write;
use std::process::ExitCode;
use tone::cli::{self, Cli};
use tone::error::{CliError, EXIT_CONFIG};

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.code as u8)
}

fn main() -> ExitCode {
    let args = match Cli::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.render().to_string();
            return fail(&CliError { code: EXIT_CONFIG, message: msg.lines().next().unwrap_or("").trim_start_matches("error: ").to_string() });
        }
    };
    if let Err(e) = tone::init_threads() {
        return fail(&e);
    }
    match cli::run(&args.command) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.stdout.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(EXIT_CONFIG as u8);
            }
            ExitCode::from(out.exit as u8)
        }
        Err(e) => fail(&e),
    }
}

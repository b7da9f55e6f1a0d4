//! Command-line surface: argument parsing, TOML run configs and the runner
//! mapping outcomes to exit codes.

mod config;
mod run;

use std::io::Write;

pub use config::{
    order_cap, parse_args, parse_epsilon, parse_field, Cli, CliCommand, Command, Format, Lemma, Parsed, RunConfig,
    SetOp, DEFAULT_EPSILON, DEFAULT_ITERS, DEFAULT_MAX_SIZE, ORDER_CAP_VAR,
};
pub use run::{run, verify_instance, Status, VerificationReport};

/// Operational errors: bad input, I/O, budgets.
pub const EXIT_ERROR: i32 = 1;

/// Parses `argv`, runs it and returns the process exit code.
pub fn main_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let outcome = parse_args(argv).and_then(|parsed| match parsed {
        Parsed::Info(text) => {
            out.write_all(text.as_bytes())?;
            Ok(Status::Ok)
        }
        Parsed::Run { config, save_to } => {
            if let Some(path) = save_to {
                std::fs::write(&path, config.to_toml()).map_err(|e| crate::Error::Io(format!("{}: {e}", path.display())))?;
            }
            run(&config, out)
        }
    });
    match outcome {
        Ok(status) => status.exit_code(),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

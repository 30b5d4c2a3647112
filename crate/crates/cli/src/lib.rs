//! Front end for crforge: the manifest language, subcommands and reports.

pub mod commands;
pub mod error;
pub mod manifest;
pub mod report;
pub mod selftest;

use clap::Parser;

pub use commands::{run_command, Command, Options};
pub use error::CliError;
pub use manifest::Manifest;
pub use report::{Format, Outcome, Record, Report};

#[derive(Debug, Parser)]
#[command(name = "crforge", version, about = "Exact checks on formal generic submanifolds and their maps")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parse arguments, run, and render. Never panics on bad input.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output { stdout: String::new(), stderr: text, code: 2 }
            } else {
                Output { stdout: text, stderr: String::new(), code: 0 }
            };
        }
    };
    let result = if cli.command == Command::Selftest {
        run_command(None, cli.command, &cli.opts)
    } else {
        commands::load(&cli.opts).and_then(|m| run_command(Some(&m), cli.command, &cli.opts))
    };
    match result {
        Ok(rep) => Output { stdout: rep.emit(cli.opts.format), stderr: String::new(), code: rep.exit_code() },
        Err(e) => Output { stdout: String::new(), stderr: format!("error: {e}\n"), code: e.exit_code() },
    }
}

use clap::error::ErrorKind;
use clap::Parser;
use std::io::Write;
use std::process::ExitCode;
use wglab_cli::{execute, write_csv, write_jsonl, Cli, Format};
use wglab_core::Error;

fn exit_for(e: &Error) -> ExitCode {
    eprintln!("wglab: {e}");
    ExitCode::from(if e.is_check_failure() { 2 } else { 1 })
}

fn main() -> ExitCode {
    let mut cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    if let Err(e) = cli.flags.merge_params() {
        return exit_for(&e);
    }
    let format: Format = match cli.flags.format.as_deref().unwrap_or("jsonl").parse() {
        Ok(f) => f,
        Err(e) => return exit_for(&e),
    };
    let (envs, failure) = match execute(cli.cmd, &cli.flags) {
        Ok(r) => r,
        Err(e) => return exit_for(&e),
    };
    let mut sink: Box<dyn Write> = match &cli.flags.out {
        Some(path) => match std::fs::File::create(path) {
            Ok(f) => Box::new(std::io::BufWriter::new(f)),
            Err(e) => return exit_for(&Error::Validation(format!("cannot create {}: {e}", path.display()))),
        },
        None => Box::new(std::io::stdout().lock()),
    };
    let written = match format {
        Format::Jsonl => write_jsonl(&mut sink, &envs),
        Format::Csv => write_csv(&mut sink, &envs),
    };
    if let Err(e) = written.and_then(|_| sink.flush().map_err(|e| Error::Validation(e.to_string()))) {
        return exit_for(&e);
    }
    match failure {
        Some(msg) => exit_for(&Error::Property(msg)),
        None => ExitCode::SUCCESS,
    }
}

//! Batch experiment runner: generators, algorithms, oracles and meters
//! behind one command line, with JSON or CSV records.

pub mod args;
pub mod error;
pub mod output;
pub mod run;

use std::fs::File;
use std::io::{BufWriter, Write};

use tourney_core::generate;
use tourney_core::io::{write_binary, write_text};

pub use args::{Algo, Cli, Command, FileFormat, Format, GenArgs, GenKind, RunArgs};
pub use error::CliError;
pub use run::{Record, RunSpec, PROFILE_ENV};

fn sink(path: Option<&std::path::Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

/// Runs `args` and writes the records. Fails with [`CliError::Identity`]
/// after writing if any record broke an identity.
pub fn run(args: &RunArgs, env_profile: Option<String>) -> Result<Vec<Record>, CliError> {
    let spec = RunSpec::from_args(args, env_profile)?;
    let records = spec.run()?;
    let mut w = sink(args.out.as_deref())?;
    match args.format {
        Format::Json => output::write_json(spec.describe(), &records, &mut w)?,
        Format::Csv => output::write_csv(&records, &mut w)?,
    }
    w.flush()?;
    let bad = records.iter().filter(|r| !r.identity_ok).count();
    if bad > 0 {
        return Err(CliError::Identity(bad));
    }
    Ok(records)
}

pub fn gen(args: &GenArgs) -> Result<(), CliError> {
    let t = generate(&run::generator_spec(&args.instance, args.instance.seed)?)?;
    let mut w = BufWriter::new(File::create(&args.out)?);
    match args.format {
        FileFormat::Text => write_text(&t, &mut w)?,
        FileFormat::Binary => write_binary(&t, &mut w)?,
    }
    w.flush()?;
    Ok(())
}

pub fn main_with(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::Run(args) => run(args, std::env::var(PROFILE_ENV).ok()).map(|_| ()),
        Command::Gen(args) => gen(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("tourney: {e}");
            e.exit_code()
        }
    }
}

//! Command-line front end: file formats, report rendering and the
//! subcommands wiring the pipeline together.

pub mod commands;
pub mod io;
pub mod manifest;
pub mod num;
pub mod plot;
pub mod report;

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;
use remo_core::dsp::DspError;
use remo_core::features::FeatureError;
use remo_core::learn::LearnError;
use remo_core::segmentation::SegmentationError;
use remo_core::synth::SynthError;

pub use commands::Cli;
pub use io::DataError;

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Exit code for a failed run: bad input is a data error, anything else internal.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(d) = cause.downcast_ref::<DataError>() {
            return if matches!(d, DataError::Usage(_)) { EXIT_USAGE } else { EXIT_DATA };
        }
        if cause.is::<SegmentationError>()
            || cause.is::<FeatureError>()
            || cause.is::<LearnError>()
            || cause.is::<SynthError>()
            || cause.is::<DspError>()
        {
            return EXIT_DATA;
        }
    }
    EXIT_INTERNAL
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn main_with(args: Vec<OsString>) -> i32 {
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .try_init();
    if let Some(n) = cli.jobs {
        if n == 0 {
            eprintln!("error: --jobs must be at least 1");
            return EXIT_USAGE;
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not size the worker pool: {e}");
        }
    }
    let argv: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match commands::run(cli, &argv) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

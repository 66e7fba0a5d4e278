mod commands;
mod output;
mod setfile;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "mfdft", version, about = "Multiplication-free DFT/FFT and passive radar ambiguity experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Dft,
    Fft,
    Ndft,
    Nfft,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Eq11,
    Eq12a,
    Eq12b,
    Eq12c,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OnOff {
    On,
    Off,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Transform a signal and write its spectrum as CSV.
    Transform {
        /// Built-in input e^{j2π k0 n / N}.
        #[arg(long, conflicts_with = "input")]
        tone: Option<usize>,
        /// CSV signal file with `re,im` columns.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "nfft")]
        kind: Kind,
        /// Transform size; required with --tone.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value = "spectrum")]
        out: String,
        #[arg(long)]
        svg: bool,
    },
    /// Compute an ambiguity surface for a scenario file.
    Ambiguity {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_enum, default_value = "eq12a")]
        variant: VariantArg,
        #[arg(long, default_value = "ambiguity")]
        out: String,
        #[arg(long)]
        svg: bool,
        #[arg(long, value_enum, default_value = "on")]
        conjugate_ref: OnOff,
    },
    /// Run the detection table over environments, noise cases and variants.
    Table {
        /// Scenario-set JSON; the built-in default set when omitted.
        #[arg(long, alias = "set")]
        scenario: Option<PathBuf>,
        /// Restrict the set to one variant.
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
        #[arg(long)]
        trials: Option<usize>,
        /// Comma-separated seed list.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long, default_value = "table")]
        out: String,
        #[arg(long, value_enum, default_value = "on")]
        conjugate_ref: OnOff,
    },
    /// Measured vs analytic operation counts of the nonlinear transforms.
    Opcount {
        /// Comma-separated transform sizes.
        #[arg(long, value_delimiter = ',', default_values_t = vec![2, 4, 8, 16, 32, 64, 128, 256, 512, 1024])]
        n: Vec<usize>,
        #[arg(long, default_value = "opcount")]
        out: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Transform { tone, input, kind, n, out, svg } => {
            commands::transform_cmd(tone, input.as_deref(), kind, n, &out, svg)
        }
        Command::Ambiguity { scenario, variant, out, svg, conjugate_ref } => {
            commands::ambiguity_cmd(&scenario, variant, &out, svg, conjugate_ref == OnOff::On)
        }
        Command::Table { scenario, variant, trials, seeds, out, conjugate_ref } => {
            commands::table_cmd(scenario.as_deref(), variant, trials, seeds, &out, conjugate_ref == OnOff::On)
        }
        Command::Opcount { n, out } => commands::opcount_cmd(&n, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

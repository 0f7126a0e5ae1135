use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mixchan::commands::{self, CompareArgs, DataOptions, FitArgs, Outcome, SelectArgs, SynthArgs};
use mixchan::{Binning, Family, InitStrategy};

#[derive(Parser)]
#[command(name = "mixchan", version, about = "Fit finite mixture models to received-power samples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit one mixture family and score it.
    Fit {
        #[command(flatten)]
        data: DataFlags,
        #[arg(long, default_value = "gamma")]
        family: Family,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
        components: u64,
    },
    /// Fit several families with one configuration and rank them by KL divergence.
    Compare {
        #[command(flatten)]
        data: DataFlags,
        #[arg(long, value_delimiter = ',', default_value = "gamma,gaussian,weibull")]
        families: Vec<Family>,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
        components: u64,
    },
    /// Choose the component count by BIC.
    Select {
        #[command(flatten)]
        data: DataFlags,
        #[arg(long, default_value = "gamma")]
        family: Family,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..=8))]
        max_components: u64,
    },
    /// Draw samples from a model file, one per line.
    Synth {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, env = "MIXCHAN_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct DataFlags {
    /// Sweep file (freq_hz,s21_re,s21_im) or one power sample per line.
    input: PathBuf,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, env = "MIXCHAN_SEED", default_value_t = 0)]
    seed: u64,
    /// `fd`, a bin count, or `edges:e0;e1;...`.
    #[arg(long, default_value = "fd")]
    bins: Binning,
    /// Keep sweep records in LO:HI Hz.
    #[arg(long, value_parser = parse_band)]
    band: Option<(f64, f64)>,
    #[arg(long, default_value = "quantile")]
    init: InitStrategy,
    #[arg(long, default_value_t = 500)]
    max_iterations: usize,
    /// Output directory; the report goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl From<DataFlags> for DataOptions {
    fn from(f: DataFlags) -> Self {
        DataOptions {
            input: f.input,
            restarts: f.restarts,
            seed: f.seed,
            bins: f.bins,
            band: f.band,
            init: f.init,
            max_iterations: f.max_iterations,
            out: f.out,
        }
    }
}

fn parse_band(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected LO:HI")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((lo, hi))
}

fn run(cli: Cli) -> mixchan::Result<Outcome> {
    match cli.command {
        Command::Fit { data, family, components } => commands::fit(&FitArgs {
            data: data.into(),
            family,
            components: components as usize,
        }),
        Command::Compare {
            data,
            families,
            components,
        } => commands::compare(&CompareArgs {
            data: data.into(),
            families,
            components: components as usize,
        }),
        Command::Select {
            data,
            family,
            max_components,
        } => commands::select(&SelectArgs {
            data: data.into(),
            family,
            max_components: max_components as usize,
        }),
        Command::Synth { model, n, seed, out } => commands::synth(&SynthArgs {
            model,
            n: n as usize,
            seed,
            out,
        }),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(outcome) => {
            if outcome.written.is_empty() {
                print!("{}", outcome.report);
            } else {
                print!("{}", outcome.summary);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("mixchan: {e}");
            ExitCode::FAILURE
        }
    }
}

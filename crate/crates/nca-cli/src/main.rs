use std::path::PathBuf;
use std::process;

use clap::{Parser, Subcommand};

use nca_cli::{
    cmd_height, cmd_primes, cmd_verify, emit_report, load_config, load_submodule, Suite,
    VerifyOptions,
};

/// Exact verification toolkit for orders in semisimple rational algebras.
#[derive(Parser)]
#[command(name = "nca", version, about)]
struct Cli {
    /// Write the report here instead of the config's output path or stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Pretty-print the report JSON.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the primes of the order over a rational prime.
    Primes {
        #[arg(long)]
        config: PathBuf,
        /// The rational prime.
        #[arg(long)]
        p: u64,
    },
    /// Run a randomized exact verification suite.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// product_formula, riemann_roch, duality, degree_consistency, or
        /// involution_probe.
        #[arg(long)]
        suite: Suite,
        /// Number of randomized cases.
        #[arg(long, default_value_t = 50)]
        count: usize,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Coefficient bound for sampled elements; beats NCA_COEFF_BOUND.
        #[arg(long)]
        coeff_bound: Option<i64>,
    },
    /// Heights of a free submodule, its complement, and the dual variants.
    Height {
        #[arg(long)]
        config: PathBuf,
        /// JSON file: {"ambient": n, "generators": [[element, ...], ...]}.
        #[arg(long)]
        submodule: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            process::exit(2);
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    let (cfg, report) = match &cli.command {
        Command::Primes { config, p } => {
            let cfg = load_config(config)?;
            let report = cmd_primes(&cfg, *p)?;
            (cfg, report)
        }
        Command::Verify { config, suite, count, seed, coeff_bound } => {
            let cfg = load_config(config)?;
            let opts = VerifyOptions {
                suite: *suite,
                count: *count,
                seed: *seed,
                coeff_bound: *coeff_bound,
            };
            let report = cmd_verify(&cfg, opts)?;
            (cfg, report)
        }
        Command::Height { config, submodule } => {
            let cfg = load_config(config)?;
            let spec = load_submodule(submodule)?;
            let report = cmd_height(&cfg, &spec)?;
            (cfg, report)
        }
    };
    emit_report(&report, &cfg, cli.output.as_deref(), cli.pretty)?;
    Ok(report.exit_code())
}

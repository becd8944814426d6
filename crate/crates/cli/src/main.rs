//! Command-line front end for the exact engine.
//!
//! Every subcommand resolves a realization (a built-in or a grid file),
//! computes one object, and prints it either as a human table or as
//! newline-delimited JSON records behind a one-line metadata header.
//! Output for a fixed invocation is byte-identical across runs: terms are
//! kept in graded-lexicographic order and no timestamps enter the data.
//!
//! Exit codes separate three failure kinds so scripts can branch on them:
//! `1` the mathematics rejected the input (a validation or cross-check
//! failed), `2` the invocation itself was malformed, `3` the computation
//! could not be carried out (order budget, analytic domain, I/O).

mod emit;
mod run;
mod source;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Failures grouped by exit code; each prints as a single diagnostic line.
#[derive(Debug)]
pub enum CliError {
    /// Exit 1: the input was well-formed but the mathematics says no.
    Validation(String),
    /// Exit 2: bad flags, bad input syntax, unknown names.
    Usage(String),
    /// Exit 3: order budgets, analytic-domain walls, filesystem trouble.
    Computation(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Computation(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Usage(m) | CliError::Computation(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "liestar",
    version,
    about = "Exact transport series, star products, and coproducts for coordinate-linear operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a realization grid: identity at zero, the bracket identity,
    /// and the operator-level commutation relations.
    Validate {
        #[command(flatten)]
        source: SourceArgs,
        /// Series order the checks are run through.
        #[arg(long, default_value_t = 8, value_parser = order_value)]
        order: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// The exponent-transport series K(k, q) of the realization.
    Kseries {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 6, value_parser = order_value)]
        order: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// The momentum composition law D(k, q) with its zeroth component split
    /// off, so exp(ikx) * exp(iqx) = exp(iD(k,q)x) holds term by term.
    Dseries {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 6, value_parser = order_value)]
        order: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// The coproduct of one deformed momentum in the two-leg ring.
    Coproduct {
        #[command(flatten)]
        source: SourceArgs,
        /// One-based momentum index.
        #[arg(long, short)]
        j: usize,
        #[arg(long, default_value_t = 6, value_parser = order_value)]
        order: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Integrate the transport flow numerically from q at the given momenta.
    Ode {
        #[command(flatten)]
        source: SourceArgs,
        /// Momentum components, comma-separated decimals (kept exact).
        #[arg(long, value_name = "DECIMALS")]
        k: String,
        /// Starting point components, comma-separated decimals.
        #[arg(long, value_name = "DECIMALS")]
        q: String,
        /// Fixed Runge-Kutta step count.
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        /// Integration endpoint in the flow parameter.
        #[arg(long, default_value = "1.0")]
        lambda_end: String,
        /// Truncation order of the compiled flow.
        #[arg(long, default_value_t = 12, value_parser = order_value)]
        order: usize,
        /// Largest admissible truncation-tail estimate.
        #[arg(long, default_value_t = 1e-6)]
        tail_tolerance: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the integrator, the series jet, and the catalogue closed forms
    /// against each other on sampled momenta.
    Crosscheck {
        #[command(flatten)]
        source: SourceArgs,
        /// Jet order for the series path.
        #[arg(long, default_value_t = 6, value_parser = order_value)]
        order: usize,
        /// Number of sampled (k, q) pairs.
        #[arg(long, default_value_t = 5)]
        samples: usize,
        /// Componentwise sampling radius, a decimal.
        #[arg(long, default_value = "0.05")]
        radius: String,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        /// Seed for the sample stream; a fixed seed keeps reruns identical.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Worked one-variable example: transport of a single power of the
    /// derivative, computed by the weight recursion and checked against the
    /// closed form k/(1 - (l-1) k^(l-1))^(1/(l-1)).
    #[command(name = "example-dl")]
    ExampleDl {
        /// Power of the derivative; at least 2 (lower powers have a constant
        /// or linear flow and no series content).
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 8, value_parser = order_value)]
        order: usize,
        /// Also print the closed-form expression the jet is checked against.
        #[arg(long)]
        quote_paper: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Write a realization as an editable grid file.
    Export {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

/// Realization selection shared by most subcommands.
#[derive(Args)]
struct SourceArgs {
    /// Grid file path; mutually exclusive with --builtin.
    #[arg(long, value_name = "PATH")]
    spec: Option<std::path::PathBuf>,
    /// Catalogue name: abelian, su2_fl, su2_sym.
    #[arg(long, value_name = "NAME")]
    builtin: Option<String>,
    /// Dimension, required for catalogue entries that take one (abelian).
    #[arg(long)]
    dim: Option<usize>,
    /// Deformation constant as an exact rational expression, e.g. 1/2.
    #[arg(long)]
    kappa: Option<String>,
}

#[derive(Args)]
struct OutputArgs {
    /// Output style: a human table or newline-delimited JSON records.
    #[arg(long, value_enum, default_value_t = emit::Format::Table)]
    format: emit::Format,
    /// Write to a file instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<std::path::PathBuf>,
}

/// Shared `--order` floor: below 2 nothing past the linear term exists.
fn order_value(raw: &str) -> Result<usize, String> {
    let n: usize = raw.parse().map_err(|_| "not an integer".to_string())?;
    if n < 2 {
        return Err("order must be at least 2".to_string());
    }
    Ok(n)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run::dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("liestar: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

mod commands;
mod report;
mod verify;

use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use report::Format;

#[derive(Parser, Debug)]
#[command(name = "schur-cyclic", version, about = "Cyclic codes with small Schur squares")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    #[serde(skip)]
    pub format: Format,
    /// Enumerate at most 2^bits codewords or indices.
    #[arg(long, global = true, env = "SCHUR_CYCLIC_CAP", default_value_t = 26)]
    pub exhaustive_cap: u32,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

/// Which code to build. Exactly one family of flags applies:
/// `--n --cosets`, `--k --s --m`, `--n --t` or `--k --h`.
#[derive(Args, Debug, Clone, Default, Serialize)]
pub struct CodeArgs {
    /// Field size.
    #[arg(long, default_value_t = 2)]
    pub q: u64,
    /// Code length.
    #[arg(long)]
    pub n: Option<usize>,
    /// Coset representatives of the generating set; closed under
    /// multiplication by q.
    #[arg(long, value_delimiter = ',')]
    pub cosets: Option<Vec<usize>>,
    /// Number of base-q digits; the length is q^k - 1.
    #[arg(long)]
    pub k: Option<u32>,
    /// Window length of the restricted weight.
    #[arg(long)]
    pub s: Option<u32>,
    /// Largest digit sum allowed in any window.
    #[arg(long)]
    pub m: Option<u32>,
    /// Remove 0 from the generating set.
    #[arg(long)]
    pub drop_zero: bool,
    /// Keep every coset inside {0, ..., t}.
    #[arg(long)]
    pub t: Option<usize>,
    /// Keep every index of q-ary weight at most (q - 1) h.
    #[arg(long)]
    pub h: Option<u32>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a code and report its parameters and bounds.
    Construct {
        #[command(flatten)]
        code: CodeArgs,
        /// Recompute dimensions by rank and distances by exhaustive search
        /// where they fit under the cap.
        #[arg(long)]
        verify: bool,
    },
    /// Describe the square of a code and cross-check its generator.
    Square {
        #[command(flatten)]
        code: CodeArgs,
    },
    /// Emit one of the two parameter tables.
    Table {
        #[arg(value_enum)]
        which: TableArg,
        #[arg(long)]
        kmin: Option<u32>,
        #[arg(long, default_value_t = 12)]
        kmax: u32,
        /// Also recompute dim C^2 as the rank of the product rows.
        #[arg(long)]
        rank_oracle: bool,
    },
    /// Run a verification suite; exits nonzero on any failure.
    Verify {
        suite: String,
        /// Length for the theorem1 suite.
        #[arg(long)]
        n: Option<usize>,
        /// Digit count for the srw suite.
        #[arg(long)]
        k: Option<u32>,
    },
    /// Minimum distance of a code or its square.
    Distance {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        square: bool,
        /// Random codewords drawn when exhaustive search is over the cap.
        #[arg(long, default_value_t = 1 << 16)]
        samples: u64,
    },
    /// The window digraph, its characteristic polynomial and walk counts.
    Graph {
        #[arg(long, default_value_t = 2)]
        q: u64,
        #[arg(long)]
        s: u32,
        #[arg(long)]
        m: u32,
        /// Report counts for k = 0..=kmax.
        #[arg(long, default_value_t = 20)]
        kmax: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableArg {
    T1,
    T2,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((report, format)) => {
            print!("{}", report.render(format));
            if report.failures() == 0 {
                ExitCode::SUCCESS
            } else {
                if let Some(c) = report.checks.iter().find(|c| !c.passed) {
                    eprintln!(
                        "verification failed in {}: {}",
                        c.name,
                        c.detail.as_deref().unwrap_or("no detail")
                    );
                }
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<(report::RunReport, Format)> {
    let g = cli.global;
    if let Some(jobs) = g.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let report = match cli.command {
        Command::Construct { code, verify } => commands::construct(argv, &g, &code, verify)?,
        Command::Square { code } => commands::square(argv, &g, &code)?,
        Command::Table {
            which,
            kmin,
            kmax,
            rank_oracle,
        } => commands::table(argv, &g, which, kmin, kmax, rank_oracle)?,
        Command::Verify { suite, n, k } => verify::run(argv, &g, &suite, n, k)?,
        Command::Distance {
            code,
            square,
            samples,
        } => commands::distance(argv, &g, &code, square, samples)?,
        Command::Graph { q, s, m, kmax } => commands::graph(argv, &g, q, s, m, kmax)?,
    };
    Ok((report, g.format))
}

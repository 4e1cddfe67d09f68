use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use maxdet::search::BoundMode;
use maxdet_cli::commands::{self, DecomposeArgs, SearchArgs};

#[derive(Parser)]
#[command(name = "maxdet", version, about = "Maximal determinants of ±1 matrices of odd order")]
struct Cli {
    /// Worker threads (0: all cores).
    #[arg(long, global = true, env = "MAXDET_JOBS", default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Bound {
    Theorem,
    Fischer,
    Off,
}

#[derive(Subcommand)]
enum Cmd {
    /// Upper bounds on the determinant of order n.
    Bounds {
        n: usize,
        #[arg(long)]
        json: bool,
    },
    /// Enumerate candidate Gram matrices with determinant at least dmin².
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dmin: BigInt,
        #[arg(long, default_value_t = 0)]
        parallel_depth: usize,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        resume: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Bound::Theorem)]
        bound_mode: Bound,
        #[arg(long)]
        node_budget: Option<u64>,
        /// Keep only the largest determinant found.
        #[arg(long)]
        top_only: bool,
    },
    /// Decide decomposability of charpoly-compatible candidate pairs.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, num_args = 2, value_names = ["I", "J"])]
        pair: Option<Vec<usize>>,
        #[arg(long, default_value_t = 1_000_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 100_000)]
        max_witnesses: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regression against the published results: an order, rangeN, or all.
    Verify {
        target: String,
        /// Include the long runs (order 15, the order-11 range, order-19
        /// decompositions).
        #[arg(long)]
        extended: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify the normalized determinant range above a gap floor.
    Range {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        gap_floor: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ehlich block matrices with perfect-square determinant at least dmin².
    EhlichScan {
        n: usize,
        #[arg(long, default_value = "1")]
        dmin: BigInt,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a candidate file as aligned matrices.
    Show {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

fn run(cli: Cli) -> Result<bool> {
    if cli.jobs > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global()?;
    }
    match cli.cmd {
        Cmd::Bounds { n, json } => commands::bounds(n, json).map(|_| true),
        Cmd::Search {
            n,
            dmin,
            parallel_depth,
            checkpoint,
            resume,
            out,
            bound_mode,
            node_budget,
            top_only,
        } => commands::search_cmd(SearchArgs {
            n,
            d_min: dmin,
            jobs: cli.jobs,
            parallel_depth,
            checkpoint,
            resume,
            out,
            bound_mode: match bound_mode {
                Bound::Theorem => BoundMode::Theorem,
                Bound::Fischer => BoundMode::Fischer,
                Bound::Off => BoundMode::Off,
            },
            node_budget,
            top_only,
        })
        .map(|_| true),
        Cmd::Decompose {
            input,
            pair,
            budget,
            max_witnesses,
            out,
        } => commands::decompose_cmd(DecomposeArgs {
            input,
            pair: pair.map(|p| (p[0], p[1])),
            budget,
            max_witnesses,
            out,
        }),
        Cmd::Verify { target, extended, out } => commands::verify_cmd(&target, extended, out.as_deref()),
        Cmd::Range { n, gap_floor, out } => commands::range_cmd(n, gap_floor, out.as_deref()),
        Cmd::EhlichScan { n, dmin, out } => commands::ehlich_scan_cmd(n, dmin, out.as_deref()).map(|_| true),
        Cmd::Show { input } => commands::show_cmd(&input).map(|_| true),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

//! Command-line front end.
//!
//! Exit codes: 0 on success or a higgledy-piggledy verdict, 1 when a checked
//! property fails or a search is exhausted, 2 on bad input.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "hpforge", version, about = "Higgledy-piggledy subspace sets and their codes")]
struct Cli {
    /// Worker threads for the scans and searches. Results do not depend on it.
    #[arg(long, global = true, env = "HPFORGE_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Auto,
    Strong,
    Transversal,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verify an arrangement file and print its certificate.
    Verify {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
    },
    /// Build a named construction.
    Construct {
        name: String,
        #[arg(long)]
        q: u32,
        /// Master seed for searched constructions.
        #[arg(long)]
        seed: Option<u64>,
        /// Dimension for `tetrahedron`.
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Extension degree for `subline_triples`.
        #[arg(long, default_value_t = 2)]
        m: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a search template file.
    Search {
        template: PathBuf,
        /// Replaces the seed in the template.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Codes, saturating sets and bounds.
    Codes {
        #[command(subcommand)]
        command: CodesCommand,
    },
    /// Resolving set of the point-hyperplane incidence graph from a line set.
    Resolve {
        input: PathBuf,
        /// Independently re-check that the set resolves the graph.
        #[arg(long)]
        check: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build, certify and check everything that fits at each q.
    Report {
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        q_list: Vec<u32>,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args, Debug)]
struct CodeInput {
    /// An arrangement file (its covered points become columns) or a code file.
    input: PathBuf,
    /// Read the covered points over the extension of this degree.
    #[arg(long, default_value_t = 1)]
    extension: u32,
}

#[derive(Subcommand, Debug)]
enum CodesCommand {
    /// Write the code of an arrangement's covered points.
    Export {
        #[command(flatten)]
        code: CodeInput,
        /// Use the points as parity-check columns rather than generator columns.
        #[arg(long)]
        parity: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force minimality test; covered points are generator columns.
    Minimality {
        #[command(flatten)]
        code: CodeInput,
    },
    /// Exact covering radius; covered points are parity-check columns.
    CoveringRadius {
        #[command(flatten)]
        code: CodeInput,
    },
    /// Saturation of an arrangement's covered points.
    Saturating {
        input: PathBuf,
        /// Check this rho only; otherwise the least rho is computed.
        #[arg(long)]
        rho: Option<usize>,
        /// Embed in PG(N, q^(N-k+1)) and check (N-k)-saturation there.
        #[arg(long)]
        embed: bool,
    },
    /// Closed-form bounds at q.
    Bounds {
        #[arg(long)]
        q: u32,
        /// Build and check the instances behind the bounds.
        #[arg(long)]
        instances: bool,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

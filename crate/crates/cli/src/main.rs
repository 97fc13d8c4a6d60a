//! `mantra`: command-line front end for the triangulation toolkit.
//!
//! Exit status: 0 success, 1 verification found mismatches, 2 usage error,
//! 3 I/O or data error.

mod commands;
mod fetch;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mantra_core::adjacency::FeatureKind;
use mantra_core::dataset::SplitRatios;

#[derive(Debug, Parser)]
#[command(name = "mantra", version, about = "Exact homology, manifold checks and dataset tooling for triangulated manifolds")]
pub struct Cli {
    /// Worker threads for batch work (default: available parallelism)
    #[arg(long, global = true, value_name = "N", value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file
    #[arg(long, short)]
    pub output: PathBuf,
    /// Overwrite the output if it exists
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    /// Lexicographic `id=[[...],...]` listings
    Lex,
    /// Dataset JSON, gzip-compressed or plain
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Md,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a lexicographic listing (or dataset JSON) to dataset JSON
    Convert {
        /// Input format
        #[arg(long = "from", value_enum, default_value = "lex")]
        from: InputFormat,
        /// Input file
        #[arg(long, short)]
        input: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Recompute and attach all derivable labels
    Labels {
        #[arg(long, short)]
        input: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Recompute labels and compare with the stored ones (exit 1 on mismatch)
    Verify {
        #[arg(long, short)]
        input: PathBuf,
        /// Write a per-field mismatch report (.md, .json, otherwise CSV)
        #[arg(long)]
        report: Option<PathBuf>,
        /// Overwrite the report if it exists
        #[arg(long)]
        force: bool,
    },
    /// Verify that every record is a closed combinatorial manifold (exit 1 if not)
    Check {
        #[arg(long, short)]
        input: PathBuf,
        /// Print every record, not only failures
        #[arg(long)]
        all: bool,
    },
    /// Replace every triangulation by its iterated barycentric subdivision
    Subdivide {
        #[arg(long, short)]
        input: PathBuf,
        /// Number of subdivisions
        #[arg(long, short = 'n', default_value_t = 1)]
        iterations: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Deterministic stratified train/validation/test split, written as {id: split}
    Split {
        #[arg(long, short)]
        input: PathBuf,
        /// 64-bit seed
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Three fractions summing to 1
        #[arg(long, default_value = "0.6,0.2,0.2", value_parser = parse_ratios)]
        ratios: SplitRatios,
        /// Label to stratify by, e.g. name, genus, betti_1, betti_numbers
        #[arg(long = "stratify-by", value_name = "KEY")]
        stratify_by: String,
        #[command(flatten)]
        out: Output,
    },
    /// Label distribution tables
    Stats {
        #[arg(long, short)]
        input: PathBuf,
        /// Label key; repeat for several tables
        #[arg(long, short, required = true)]
        key: Vec<String>,
        /// Table format
        #[arg(long, value_enum, default_value = "md")]
        format: TableFormat,
    },
    /// Compute simplex features and write CSV files plus a JSON sidecar
    Features {
        #[arg(long, short)]
        input: PathBuf,
        /// Feature kind
        #[arg(long, value_parser = parse_kind)]
        kind: FeatureKind,
        /// Seed, required for random kinds
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory
        #[arg(long, short)]
        output: PathBuf,
        /// Write into a non-empty directory
        #[arg(long)]
        force: bool,
    },
    /// Download the dataset archives listed in the version manifest
    Fetch {
        /// Version tag in the manifest
        #[arg(long, default_value = "latest")]
        version: String,
        /// Destination directory (default: $MANTRA_CACHE_DIR, then ~/.cache/mantra)
        #[arg(long)]
        dest: Option<PathBuf>,
        /// Manifest file to use instead of the built-in one
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Download again even if the files exist
        #[arg(long)]
        force: bool,
    },
}

fn parse_ratios(s: &str) -> Result<SplitRatios, String> {
    s.parse().map_err(|e: mantra_core::dataset::SplitError| e.to_string())
}

fn parse_kind(s: &str) -> Result<FeatureKind, String> {
    s.parse().map_err(|_| {
        let kinds: Vec<&str> = FeatureKind::ALL.iter().map(|k| k.as_str()).collect();
        format!("unknown kind {s:?}; expected one of: {}", kinds.join(", "))
    })
}

/// A mistake in how the command was invoked, reported with exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(usize::from(n)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.is::<UsageError>() { 2 } else { 3 })
        }
    }
}

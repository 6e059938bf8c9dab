//! The `nks` command line.
//!
//! Exit status: 0 success, 1 invalid input, 2 unsatisfiable query,
//! 3 internal error.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bench::{gen_queries, gen_synthetic, run_benchmark, write_bound_csv, write_csv, BenchPlan, SyntheticSpec};
use crate::datafile::{read_dataset, save_dataset, write_dataset};
use crate::error::Error;
use crate::index::{Index, IndexConfig, Mode};
use crate::oracle::brute_force_topk;
use crate::persistence::{open_index, save_index};
use crate::search::{search_source, SearchOptions, SearchOutcome};
use crate::types::Query;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_UNSATISFIABLE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "nks", version, about = "Nearest keyword set search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic dataset file.
    Gen(GenArgs),
    /// Build an index from a dataset file and save it to a directory.
    Build(BuildArgs),
    /// Top-k query against an index directory or a dataset file.
    Query(QueryArgs),
    /// Run a benchmark plan and write CSV.
    Bench(BenchArgs),
    /// Compare exact search against brute force on a dataset.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    size: usize,
    #[arg(long)]
    dict: usize,
    #[arg(long, default_value_t = 1)]
    tags: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dataset file to write; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct IndexArgs {
    #[arg(long, default_value = "exact")]
    mode: Mode,
    /// Random projection vectors.
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 5)]
    scales: usize,
    #[arg(long, default_value_t = 10_000)]
    table_size: usize,
    /// Finest bin width; derived from the projection span if absent.
    #[arg(long)]
    w0: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl IndexArgs {
    fn config(&self) -> IndexConfig {
        let c = IndexConfig::new(self.mode)
            .with_vectors(self.m)
            .with_scales(self.scales)
            .with_table_size(self.table_size)
            .with_seed(self.seed);
        match self.w0 {
            Some(w) => c.with_initial_width(w),
            None => c,
        }
    }
}

#[derive(Debug, Args)]
struct BuildArgs {
    dataset: PathBuf,
    #[command(flatten)]
    index: IndexArgs,
    /// Index directory; must be empty or absent.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct QueryArgs {
    /// Index directory or dataset file.
    input: PathBuf,
    /// Comma-separated query keywords.
    #[arg(long, value_delimiter = ',', required = true)]
    keywords: Vec<String>,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Search mode. For an index directory it must match the saved mode.
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 5)]
    scales: usize,
    #[arg(long, default_value_t = 10_000)]
    table_size: usize,
    #[arg(long)]
    w0: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct BenchArgs {
    plan: PathBuf,
    /// CSV file for the per-cell rows; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV file for approximation-bound rows.
    #[arg(long)]
    bounds: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    dataset: PathBuf,
    /// Check only this query instead of random ones.
    #[arg(long, value_delimiter = ',')]
    keywords: Option<Vec<String>>,
    #[arg(long, default_value_t = 20)]
    queries: usize,
    #[arg(long, default_value_t = 3)]
    q: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[command(flatten)]
    index: IndexArgs,
}

enum Failure {
    Error(Error),
    Unsatisfiable,
    Mismatch(String),
    Output(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Output(e)
    }
}

/// Parses `args` (including the program name) and runs the command on the
/// process's standard streams.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    dispatch_to(args, &mut io::stdout().lock(), &mut io::stderr().lock())
}

pub fn dispatch_to<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match run(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Unsatisfiable) => {
            let _ = writeln!(err, "unsatisfiable query");
            EXIT_UNSATISFIABLE
        }
        Err(Failure::Error(e)) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::ResourceLimit(_) => EXIT_INTERNAL,
                _ => EXIT_INVALID,
            }
        }
        Err(Failure::Mismatch(m)) => {
            let _ = writeln!(err, "mismatch: {m}");
            EXIT_INTERNAL
        }
        Err(Failure::Output(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INTERNAL
        }
    }
}

fn run(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Gen(a) => {
            let ds = gen_synthetic(&SyntheticSpec::new(a.size, a.dim, a.dict, a.tags, a.seed))?;
            match a.out {
                Some(path) => save_dataset(&ds, path)?,
                None => write_dataset(&ds, &mut *out)?,
            }
        }
        Command::Build(a) => {
            let ds = read_dataset(&a.dataset)?;
            let index = Index::build(&ds, a.index.config())?;
            save_index(&index, &ds, &a.out)?;
            writeln!(
                out,
                "{} points, {} scales, {} mode -> {}",
                ds.len(),
                index.levels().len(),
                index.mode(),
                a.out.display()
            )?;
        }
        Command::Query(a) => query(a, out)?,
        Command::Bench(a) => {
            let text = fs::read_to_string(&a.plan).map_err(|e| Error::io(&a.plan, e))?;
            let report = run_benchmark(&BenchPlan::from_toml(&text)?);
            match a.out {
                Some(path) => write_csv(&report, create(&path)?)?,
                None => write_csv(&report, &mut *out)?,
            }
            if let Some(path) = a.bounds {
                write_bound_csv(&report, create(&path)?)?;
            }
        }
        Command::Verify(a) => verify(a, out)?,
    }
    Ok(())
}

fn create(path: &Path) -> Result<fs::File, Error> {
    fs::File::create(path).map_err(|e| Error::io(path, e))
}

fn query(a: QueryArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let query = Query::new(a.keywords.iter().map(|k| k.trim().to_string()))?;
    let options = SearchOptions::default();
    let report = if a.input.is_dir() {
        let disk = open_index(&a.input)?;
        let saved = disk.manifest().config.mode;
        if let Some(mode) = a.mode.filter(|&m| m != saved) {
            return Err(Error::invalid(format!("index was built in {saved} mode, {mode} requested")).into());
        }
        search_source(&disk, &query, a.k, &options)?
    } else {
        let ds = read_dataset(&a.input)?;
        let args = IndexArgs {
            mode: a.mode.unwrap_or(Mode::Exact),
            m: a.m,
            scales: a.scales,
            table_size: a.table_size,
            w0: a.w0,
            seed: a.seed,
        };
        let index = Index::build(&ds, args.config())?;
        search_source(&index.source(&ds), &query, a.k, &options)?
    };
    match report.outcome {
        SearchOutcome::Unsatisfiable => Err(Failure::Unsatisfiable),
        SearchOutcome::Found(entries) => {
            writeln!(out, "rank\tdiameter\tids")?;
            for (rank, e) in entries.iter().enumerate() {
                let ids: Vec<String> = e.ids().iter().map(u64::to_string).collect();
                writeln!(out, "{}\t{:.6}\t{}", rank + 1, e.diameter(), ids.join(","))?;
            }
            Ok(())
        }
    }
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let ds = read_dataset(&a.dataset)?;
    let config = a.index.config().with_mode(Mode::Exact);
    let index = Index::build(&ds, config)?;
    let queries = match a.keywords {
        Some(kws) => vec![Query::new(kws)?],
        None => gen_queries(&ds, a.q.min(ds.dictionary().len()), a.queries, a.index.seed)?,
    };
    let source = index.source(&ds);
    for (i, q) in queries.iter().enumerate() {
        let found = search_source(&source, q, a.k, &SearchOptions::default())?.outcome;
        if found.is_unsatisfiable() {
            return Err(Failure::Unsatisfiable);
        }
        let truth = brute_force_topk(&ds, q, a.k)?;
        let expected: Vec<f64> = truth.entries().iter().map(|e| e.diameter()).collect();
        if found.diameters() != expected {
            return Err(Failure::Mismatch(format!(
                "query {} {:?}: index gave {:?}, brute force {:?}",
                i,
                q.keywords(),
                found.diameters(),
                expected
            )));
        }
    }
    writeln!(out, "ok\t{} queries agree with brute force", queries.len())?;
    Ok(())
}

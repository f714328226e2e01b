//! `ambit`: command-line front end for ambit-core.

mod cache;
mod jobs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use crate::cache::{cache_key, Cache};
use crate::jobs::{execute, prepare, revalidate_ramsey, Budgets, Command, JobSpec};

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_RESOURCE: u8 = 3;
pub const EXIT_BUG: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ambit_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("usage: {0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_bug_signal() => EXIT_BUG,
            CliError::Core(ambit_core::Error::ResourceCap(_) | ambit_core::Error::BoundTooLarge(_)) => EXIT_RESOURCE,
            CliError::Core(_) | CliError::Json(_) | CliError::Usage(_) => EXIT_VALIDATION,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "ambit", version, about = "Finite Ramsey, Fraïssé and minimal-flow checks")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// Run a job file instead of a subcommand.
    #[arg(long, global = true)]
    job: Option<PathBuf>,
    /// Directory for cached reports.
    #[arg(long, global = true, env = "AMBIT_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Search node budget (default 10^8).
    #[arg(long, global = true)]
    budget_nodes: Option<u64>,
    /// Search time budget in seconds (default 600).
    #[arg(long, global = true)]
    budget_secs: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

fn job_from(cli: &Cli) -> Result<JobSpec, CliError> {
    let mut job = match (&cli.job, &cli.command) {
        (Some(path), None) => serde_json::from_str::<JobSpec>(&std::fs::read_to_string(path)?)?,
        (None, Some(cmd)) => JobSpec {
            command: cmd.clone(),
            budgets: Budgets::default(),
        },
        (Some(_), Some(_)) => return Err(CliError::Usage("give either --job or a subcommand".into())),
        (None, None) => return Err(CliError::Usage("no subcommand given".into())),
    };
    if cli.budget_nodes.is_some() {
        job.budgets.nodes = cli.budget_nodes;
    }
    if cli.budget_secs.is_some() {
        job.budgets.secs = cli.budget_secs;
    }
    Ok(job)
}

fn run(cli: &Cli) -> Result<String, CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let prepared = prepare(job_from(cli)?)?;
    let tag = prepared.job.command.tag();
    let cache = cli.cache_dir.as_ref().map(Cache::open).transpose()?;
    let key = cache_key(&prepared.key_material);
    if let Some(cache) = &cache {
        if let Some(doc) = cache.get(&key)? {
            let doc = match prepared.job.command {
                Command::Ramsey(_) => revalidate_ramsey(&prepared, &doc)?,
                _ => doc,
            };
            eprintln!("cached: {key}");
            return Ok(doc);
        }
    }
    let doc = execute(&prepared, cli.threads)?;
    if let Some(cache) = &cache {
        cache.put(&key, &doc, tag)?;
        eprintln!("computed: {key}");
    }
    Ok(doc)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(doc) => {
            print!("{doc}");
            ExitCode::from(EXIT_OK)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

//! `extrucat` command-line entry point.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use extrucat_cli::bench::{self, BenchOptions, Scenario};
use extrucat_cli::cq::{load_dir, run_suite};
use extrucat_cli::ops::{self, Dataset};
use extrucat_cli::CliError;
use extrucat_core::assets::AssetStore;
use extrucat_core::ontology::OntologyConfig;
use extrucat_server::ServerConfig;

#[derive(Debug, Parser)]
#[command(name = "extrucat", version, about = "Extruder catalogue operator tooling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load Turtle files into the persistent store.
    Load {
        #[arg(long, default_value = "var")]
        data_dir: PathBuf,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Seed the persistent store (idempotent; a failed seed is rolled back).
    Seed {
        #[arg(long, default_value = "var")]
        data_dir: PathBuf,
        #[command(subcommand)]
        dataset: SeedSet,
    },
    /// Run the competency-question files against the demo data.
    CqSuite {
        /// Ontology to load before the demo data; the bundled one otherwise.
        #[arg(long)]
        ontology: Option<PathBuf>,
        #[arg(long, default_value = concat!(env!("CARGO_MANIFEST_DIR"), "/cq"))]
        dir: PathBuf,
        /// Query this persistent store instead of a fresh demo store.
        #[arg(long, conflicts_with = "ontology")]
        data_dir: Option<PathBuf>,
    },
    /// Time the main API operations against their budgets.
    Bench {
        #[arg(long, default_value_t = 20)]
        runs: usize,
        #[arg(long, default_value_t = 50)]
        extruders: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Concurrent request workers for the read-only scenarios.
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Limit to these scenarios; all by default.
        #[arg(long = "scenario", value_enum)]
        scenarios: Vec<Scenario>,
        /// Exit nonzero when a mean exceeds its budget.
        #[arg(long)]
        strict: bool,
    },
    /// Write the store as a Turtle snapshot (compacting the journal when
    /// written in place).
    ExportSnapshot {
        #[arg(long, default_value = "var")]
        data_dir: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the HTTP API.
    Serve {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum SeedSet {
    /// Three annotated extruders, solutions, suppliers and a CAD model.
    Demo,
    /// Generated extruders.
    Bench {
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // Seeding narrates every annotation at info; only the server wants that.
    let level = if matches!(cli.command, Command::Serve { .. }) {
        "info"
    } else {
        "warn"
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Load { data_dir, files } => {
            let store = ops::open_store(&data_dir)?;
            let report = ops::load(&store, &files)?;
            println!(
                "loaded {} triples ({} total) at revision {}",
                report.added, report.total, report.revision
            );
        }
        Command::Seed { data_dir, dataset } => {
            let store = ops::open_store(&data_dir)?;
            let dataset = match dataset {
                SeedSet::Demo => Dataset::Demo,
                SeedSet::Bench { count, seed } => Dataset::Bench { count, seed },
            };
            let assets = AssetStore::new(data_dir.join("assets"));
            let report = ops::seed(&store, dataset, &OntologyConfig::default(), &assets)?;
            println!(
                "seeded {} extruders; store at revision {}",
                report.extruders.len(),
                report.revision
            );
        }
        Command::CqSuite {
            ontology,
            dir,
            data_dir,
        } => return cq_suite(ontology.as_deref(), &dir, data_dir.as_deref()),
        Command::Bench {
            runs,
            extruders,
            seed,
            workers,
            scenarios,
            strict,
        } => {
            let options = BenchOptions {
                runs,
                extruders,
                seed,
                workers,
            };
            let scenarios = if scenarios.is_empty() {
                Scenario::ALL.to_vec()
            } else {
                scenarios
            };
            let report = bench::run(&options, &scenarios)?;
            println!("{report}");
            if strict && !report.within_budget() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::ExportSnapshot { data_dir, out } => {
            let store = ops::open_store(&data_dir)?;
            let (path, revision) = ops::export_snapshot(&store, &data_dir, out.as_deref())?;
            println!("wrote {} at revision {revision}", path.display());
        }
        Command::Serve { config } => serve(config.as_deref())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn cq_suite(ontology: Option<&Path>, dir: &Path, data_dir: Option<&Path>) -> Result<ExitCode, CliError> {
    let files = load_dir(dir)?;
    if files.is_empty() {
        log::warn!("no .cq files in {}", dir.display());
        println!("0 questions, 0 failed");
        return Ok(ExitCode::SUCCESS);
    }
    let (graph, _assets) = match data_dir {
        Some(d) => (ops::open_store(d)?.snapshot(), None),
        None => {
            let (g, guard) = ops::demo_graph(ontology)?;
            (g, Some(guard))
        }
    };
    let report = run_suite(&graph, &files);
    println!("{report}");
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn serve(path: Option<&Path>) -> Result<(), CliError> {
    let mut config = match path {
        Some(p) => ServerConfig::load(p).map_err(|e| CliError::Input(e.to_string()))?,
        None => ServerConfig::default(),
    };
    config
        .apply_env(std::env::vars())
        .map_err(|e| CliError::Input(e.to_string()))?;
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|source| CliError::Io {
            path: PathBuf::from("tokio runtime"),
            source,
        })?;
    runtime
        .block_on(extrucat_server::serve(config))
        .map_err(|e| CliError::Input(e.to_string()))
}

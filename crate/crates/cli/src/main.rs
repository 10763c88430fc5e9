//! `awctl`: operator commands run against the store on disk.
//!
//! Exit codes: 0 ok, 1 partial failure, 2 input error, 3 not found.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aw_core::config::Config;
use aw_core::domain::{GroupId, Role, Store};
use aw_core::export::{export_group, manifest_path, ExportFormat};
use aw_core::ingest::{
    ingest_collection, run_incremental_update, select_collections_for_update, CollectionReport,
    FixtureAdapter, IngestOptions, LeaseTable, SourceAdapter,
};
use aw_core::search::{rebuild_index, SearchIndex};
use aw_core::service::hash_password;
use clap::{Parser, Subcommand, ValueEnum};

const SOURCE_MARKER: &str = "awctl-source";

#[derive(Parser)]
#[command(name = "awctl", version, about = "Operator tool for the web archive curation service")]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ingest collections from a fixture corpus directory.
    Ingest {
        #[arg(long)]
        source: PathBuf,
        /// Only these external ids (repeatable). Default: every collection.
        #[arg(long = "collection")]
        collections: Vec<String>,
    },
    /// Refresh ingested collections with recent captures.
    Update {
        #[arg(long)]
        window_days: Option<u32>,
        /// Corpus directory. Defaults to the one used by the last ingest.
        #[arg(long)]
        source: Option<PathBuf>,
    },
    /// Rebuild the search index from the store.
    Reindex,
    /// Export a group's resources.
    Export {
        #[arg(long)]
        group: GroupId,
        #[arg(long, value_parser = parse_format)]
        format: ExportFormat,
        #[arg(long)]
        out: PathBuf,
    },
    /// Manage accounts.
    User {
        #[command(subcommand)]
        command: UserCommand,
    },
}

#[derive(Subcommand)]
enum UserCommand {
    Add {
        username: String,
        #[arg(long)]
        password: String,
        #[arg(long, value_enum, default_value_t = RoleArg::Member)]
        role: RoleArg,
        #[arg(long)]
        display_name: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RoleArg {
    Admin,
    Curator,
    Member,
}

impl From<RoleArg> for Role {
    fn from(r: RoleArg) -> Self {
        match r {
            RoleArg::Admin => Role::Admin,
            RoleArg::Curator => Role::Curator,
            RoleArg::Member => Role::Member,
        }
    }
}

fn parse_format(s: &str) -> Result<ExportFormat, String> {
    s.parse()
}

#[derive(Debug)]
enum Failure {
    Partial(String),
    Input(String),
    NotFound(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Partial(_) => 1,
            Failure::Input(_) => 2,
            Failure::NotFound(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Partial(m) | Failure::Input(m) | Failure::NotFound(m) => m,
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_max_level(tracing_subscriber::filter::LevelFilter::WARN)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("awctl: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let config = match &cli.config {
        Some(path) => Config::load(path).map_err(|e| Failure::Input(e.to_string()))?,
        None => Config::default(),
    };
    match cli.command {
        Command::Ingest { source, collections } => ingest(&config, &source, &collections),
        Command::Update { window_days, source } => {
            update(&config, window_days.unwrap_or(config.update_window_days), source)
        }
        Command::Reindex => reindex(&config),
        Command::Export { group, format, out } => export(&config, group, format, &out),
        Command::User {
            command: UserCommand::Add { username, password, role, display_name },
        } => add_user(&config, &username, &password, role.into(), display_name),
    }
}

fn open_store(config: &Config) -> Result<Store, Failure> {
    Store::open(&config.storage_path).map_err(|e| Failure::Partial(format!("cannot open store: {e}")))
}

fn options(config: &Config) -> IngestOptions {
    IngestOptions {
        parallelism: config.fetch_parallelism,
        leases: LeaseTable::global().clone(),
    }
}

/// Reads the corpus listing up front so that a bad source leaves the store
/// untouched.
fn load_source(source: &Path) -> Result<(FixtureAdapter, Vec<String>), Failure> {
    if !source.is_dir() {
        return Err(Failure::Input(format!("{} is not a corpus directory", source.display())));
    }
    let adapter = FixtureAdapter::new(source);
    let ids = adapter
        .list_collections()
        .map_err(|e| Failure::Input(e.to_string()))?
        .into_iter()
        .map(|r| r.external_id)
        .collect();
    Ok((adapter, ids))
}

fn print_report(r: &CollectionReport) {
    println!(
        "{}: group {} {}, {} seeds, +{} resources, {} updated, +{} captures, {} seed errors",
        r.external_id,
        r.group_id.map_or_else(|| "-".to_owned(), |g| g.to_string()),
        if r.created { "created" } else { "refreshed" },
        r.seeds_seen,
        r.resources_added,
        r.resources_updated,
        r.captures_added,
        r.seed_errors.len()
    );
    for e in &r.seed_errors {
        println!("  {}: {}", e.url, e.message);
    }
}

fn ingest(config: &Config, source: &Path, only: &[String]) -> Outcome {
    let (adapter, available) = load_source(source)?;
    let missing: Vec<&String> = only.iter().filter(|id| !available.contains(id)).collect();
    if !missing.is_empty() {
        return Err(Failure::NotFound(format!("unknown collection(s) {missing:?}")));
    }
    let selected = if only.is_empty() { available } else { only.to_vec() };

    let store = open_store(config)?;
    let source = source.canonicalize().unwrap_or_else(|_| source.to_owned());
    fs::write(config.storage_path.join(SOURCE_MARKER), source.to_string_lossy().as_bytes())
        .map_err(|e| Failure::Partial(format!("cannot record source: {e}")))?;

    let opts = options(config);
    let mut failed = 0;
    let mut seed_errors = 0;
    for id in &selected {
        match ingest_collection(&store, &adapter, id, &opts) {
            Ok(report) => {
                seed_errors += report.seed_errors.len();
                print_report(&report);
            }
            Err(e) => {
                failed += 1;
                println!("{id}: failed: {e}");
            }
        }
    }
    println!(
        "{} collections ingested, {failed} failed, {seed_errors} seed errors",
        selected.len() - failed
    );
    save_index(config, &store)?;
    if failed > 0 || seed_errors > 0 {
        return Err(Failure::Partial(format!("{failed} collections failed, {seed_errors} seed errors")));
    }
    Ok(())
}

fn update(config: &Config, window_days: u32, source: Option<PathBuf>) -> Outcome {
    let source = match source {
        Some(s) => s,
        None => fs::read_to_string(config.storage_path.join(SOURCE_MARKER))
            .map(|s| PathBuf::from(s.trim()))
            .map_err(|_| Failure::Input("no --source given and no previous ingest recorded".into()))?,
    };
    let (adapter, _) = load_source(&source)?;
    let store = open_store(config)?;
    let selected = select_collections_for_update(&store.cursors(), store.now(), window_days);
    println!("{} collections selected (window {window_days} days)", selected.len());

    let opts = options(config);
    let mut failed = 0;
    for id in &selected {
        match run_incremental_update(&store, &adapter, std::slice::from_ref(id), &opts) {
            Ok(report) => report.collections.iter().for_each(print_report),
            Err(e) => {
                failed += 1;
                println!("{id}: failed: {e}");
            }
        }
    }
    save_index(config, &store)?;
    if failed > 0 {
        return Err(Failure::Partial(format!("{failed} collection updates failed")));
    }
    Ok(())
}

fn save_index(config: &Config, store: &Store) -> Result<usize, Failure> {
    let index = SearchIndex::new();
    let n = rebuild_index(store, &index).map_err(|e| Failure::Partial(format!("index rebuild failed: {e}")))?;
    index
        .save(&config.index_path)
        .map_err(|e| Failure::Partial(format!("index write failed: {e}")))?;
    Ok(n)
}

fn reindex(config: &Config) -> Outcome {
    let store = open_store(config)?;
    let n = save_index(config, &store)?;
    println!("{n} documents indexed, {} resources in store", store.resource_ids().len());
    Ok(())
}

fn export(config: &Config, group: GroupId, format: ExportFormat, out: &Path) -> Outcome {
    let store = open_store(config)?;
    if store.group(group).is_err() {
        return Err(Failure::NotFound(format!("unknown group {group}")));
    }
    let actor = operator(&store)?;
    let manifest = export_group(&store, group, format, out, actor)
        .map_err(|e| Failure::Partial(format!("export failed: {e}")))?;
    println!(
        "{} resources, {} captures written to {} (manifest {})",
        manifest.resource_count,
        manifest.capture_count,
        out.display(),
        manifest_path(out).display()
    );
    Ok(())
}

/// Exports are attributed to the first admin account.
fn operator(store: &Store) -> Result<aw_core::domain::UserId, Failure> {
    store
        .users()
        .into_iter()
        .filter(|u| u.role == Role::Admin)
        .map(|u| u.id)
        .min()
        .ok_or_else(|| Failure::Input("no admin account; create one with `awctl user add --role admin`".into()))
}

fn add_user(config: &Config, username: &str, password: &str, role: Role, display_name: Option<String>) -> Outcome {
    let hash = hash_password(password).map_err(|e| Failure::Input(e.to_string()))?;
    let store = open_store(config)?;
    let account = store
        .create_user(username, display_name.as_deref().unwrap_or(username), role, hash)
        .map_err(|e| Failure::Input(e.to_string()))?;
    println!("user {} created with id {}", account.username, account.id);
    Ok(())
}

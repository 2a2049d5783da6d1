use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use tiergraph_core::config::resolve_config_path;
use tiergraph_core::eval::{load_suite, run_benchmark, WallClock};
use tiergraph_core::extract::{extract_file, ExtractOptions};
use tiergraph_core::json::to_canonical_json;
use tiergraph_core::navigate::{GraphFormat, GraphOptions, DEFAULT_MAX_DEPTH};
use tiergraph_core::store::{self, metrics_path, MetricsSeries, Scheduler, SnapshotStore};
use tiergraph_core::{scan_corpus, Config, Parallelism};
use tiergraph_service::{AppState, RouterOptions, Workspace};

/// Layered call-graph mining for multi-project code bases.
#[derive(Parser)]
#[command(name = "tiergraph", version)]
struct Cli {
    /// Config file (default: $TIERGRAPH_CONFIG, then ./tiergraph.toml).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Run everything on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    /// More log output (-v info, -vv debug). RUST_LOG overrides.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the files of every project with their category.
    Scan,
    /// Dump the extracted model of one source file.
    Extract {
        file: PathBuf,
        #[arg(long, default_value = "adhoc")]
        project: String,
    },
    /// Rebuild, persist a snapshot and update the metrics series.
    Sweep(SweepArgs),
    /// Stored snapshots.
    #[command(subcommand)]
    Snapshots(SnapshotsCmd),
    /// Summary of a snapshot (the newest by default).
    Snapshot {
        #[arg(long)]
        id: Option<String>,
    },
    /// Delete all but the newest N snapshots.
    Prune {
        #[arg(long)]
        keep: usize,
    },
    /// Daily metrics series.
    #[command(subcommand)]
    Metrics(MetricsCmd),
    /// Keyword search over all project files.
    Search {
        keyword: String,
        /// ASCII case-insensitive.
        #[arg(long)]
        ci: bool,
        #[arg(long)]
        snapshot: Option<String>,
    },
    /// Top-down call graph from an entry member.
    Graph {
        #[arg(long)]
        entry: String,
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
        max_depth: usize,
        #[arg(long)]
        snapshot: Option<String>,
        /// Write to a file instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Score generated call graphs against a ground-truth suite.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        snapshot: Option<String>,
    },
    /// Serve the read-only HTTP API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Built UI bundle to serve for non-API paths.
        #[arg(long)]
        ui_dir: Option<PathBuf>,
        /// Permissive CORS for local UI development.
        #[arg(long)]
        dev: bool,
        /// How often to look for a newer snapshot.
        #[arg(long, default_value = "30s", value_parser = humantime::parse_duration)]
        reload_interval: Duration,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// One sweep, then exit (the default without --interval).
    #[arg(long, conflicts_with = "interval")]
    once: bool,
    /// Sweep every interval, e.g. `24h` or `90m`, until interrupted.
    #[arg(long, value_parser = humantime::parse_duration)]
    interval: Option<Duration>,
}

#[derive(Subcommand)]
enum SnapshotsCmd {
    List,
}

#[derive(Subcommand)]
enum MetricsCmd {
    /// Print the series as JSON, or write it as CSV.
    Export {
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging(cli.verbose);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn init_logging(verbose: u8) {
    let default = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let filter = tracing_subscriber::EnvFilter::try_from_default_env()
        .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new(default));
    tracing_subscriber::fmt().with_env_filter(filter).with_writer(std::io::stderr).init();
}

fn load_config(flag: Option<&Path>) -> anyhow::Result<Config> {
    let path = resolve_config_path(flag).unwrap_or_else(|| PathBuf::from("tiergraph.toml"));
    if !path.exists() {
        bail!("no config file at {} (use --config or TIERGRAPH_CONFIG)", path.display());
    }
    Ok(Config::load(&path)?)
}

fn out(text: impl AsRef<[u8]>) -> anyhow::Result<()> {
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(text.as_ref())?;
    stdout.flush()?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mode = if cli.sequential {
        Parallelism::Sequential
    } else {
        Parallelism::default()
    };
    let config = || load_config(cli.config.as_deref());
    match cli.command {
        Command::Scan => {
            let cfg = config()?;
            out(to_canonical_json(&scan_corpus(&cfg.projects)?)?)
        }
        Command::Extract { file, project } => {
            let source = std::fs::read(&file).with_context(|| format!("reading {}", file.display()))?;
            let cfg = config().ok();
            let opts = match cfg.as_ref().and_then(|c| c.project(&project).map(|p| (c, p))) {
                Some((c, p)) => ExtractOptions::for_project(p, &c.extra_builtin_types),
                None => ExtractOptions::default(),
            };
            let name = file.to_string_lossy().replace('\\', "/");
            let model = extract_file(&project, &name, &String::from_utf8_lossy(&source), &opts);
            out(to_canonical_json(&model)?)
        }
        Command::Sweep(args) => {
            let cfg = config()?;
            match args.interval {
                Some(interval) if !args.once => {
                    let stop = Arc::new(AtomicBool::new(false));
                    let flag = Arc::clone(&stop);
                    let rt = tokio::runtime::Builder::new_current_thread().enable_all().build()?;
                    std::thread::spawn(move || {
                        rt.block_on(async {
                            let _ = tokio::signal::ctrl_c().await;
                        });
                        flag.store(true, Ordering::SeqCst);
                    });
                    Scheduler::for_sweeps(cfg, mode).run(interval, &stop)?;
                    Ok(())
                }
                _ => {
                    let snap = store::run_once(&cfg, mode)?;
                    out(to_canonical_json(&snap.summary())?)
                }
            }
        }
        Command::Snapshots(SnapshotsCmd::List) => {
            let cfg = config()?;
            let ids = SnapshotStore::new(&cfg.data_dir).list()?;
            out(ids.iter().map(|i| format!("{i}\n")).collect::<String>())
        }
        Command::Snapshot { id } => {
            let cfg = config()?;
            let store = SnapshotStore::new(&cfg.data_dir);
            let snap = match id {
                Some(id) => store.load(&id)?,
                None => store.load_latest()?,
            };
            out(to_canonical_json(&snap.summary())?)
        }
        Command::Prune { keep } => {
            let cfg = config()?;
            let removed = SnapshotStore::new(&cfg.data_dir).prune(keep)?;
            out(removed.iter().map(|i| format!("removed {i}\n")).collect::<String>())
        }
        Command::Metrics(MetricsCmd::Export { csv }) => {
            let cfg = config()?;
            let series = MetricsSeries::load(&metrics_path(&cfg.data_dir))?;
            match csv {
                Some(path) => Ok(series.save(&path)?),
                None => out(to_canonical_json(&series)?),
            }
        }
        Command::Search { keyword, ci, snapshot } => {
            let ws = Workspace::open(&config()?, snapshot.as_deref())?;
            out(ws.search_json(&keyword, ci)?)
        }
        Command::Graph {
            entry,
            format,
            max_depth,
            snapshot,
            output,
        } => {
            let format: GraphFormat = format.parse()?;
            if max_depth == 0 {
                bail!("--max-depth must be positive");
            }
            let ws = Workspace::open(&config()?, snapshot.as_deref())?;
            let bytes = ws.graph(&entry, GraphOptions { max_depth }, format)?;
            match output {
                Some(p) => std::fs::write(&p, bytes).with_context(|| format!("writing {}", p.display())),
                None => out(bytes),
            }
        }
        Command::Bench { suite, csv, snapshot } => {
            let cfg = config()?;
            let store = SnapshotStore::new(&cfg.data_dir);
            let snap = match snapshot {
                Some(id) => store.load(&id)?,
                None => store.load_latest()?,
            };
            let suite = load_suite(&suite)?;
            let report = run_benchmark(&snap, &suite, &WallClock, GraphOptions::default());
            if let Some(p) = csv {
                std::fs::write(&p, report.to_csv()?).with_context(|| format!("writing {}", p.display()))?;
            }
            out(to_canonical_json(&report)?)
        }
        Command::Serve {
            addr,
            ui_dir,
            dev,
            reload_interval,
        } => {
            let cfg = config()?;
            let state = Arc::new(AppState::new(cfg));
            let opts = RouterOptions { ui_dir, dev_cors: dev };
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(tiergraph_service::serve(addr, state, opts, reload_interval))?;
            Ok(())
        }
    }
}

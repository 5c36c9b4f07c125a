use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use monobreak::{analyze, AnalysisOptions, Betweenness, ScanConfig};

#[derive(Parser)]
#[command(name = "monobreak", version, about = "Suggest microservice boundaries for a Django monolith")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan a project and print a decomposition report.
    Analyze(AnalyzeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(clap::Args)]
struct AnalyzeArgs {
    /// Root directory of the project.
    project_dir: PathBuf,
    /// Operational data (ops-JSON) to add runtime weights.
    #[arg(long, conflicts_with = "static_only")]
    ops: Option<PathBuf>,
    /// Use the static dependency graph only.
    #[arg(long)]
    static_only: bool,
    /// Number of services to cut the project into.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    services: Option<u64>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Also write the graph as Graphviz DOT to this file.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// TOML file extending the base-class and ignore lists.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Treat every edge as length 1 when computing betweenness.
    #[arg(long)]
    unweighted_betweenness: bool,
}

fn run(args: AnalyzeArgs) -> Result<(), String> {
    let scan = match &args.config {
        Some(path) => ScanConfig::from_toml_file(path).map_err(|e| e.to_string())?,
        None => ScanConfig::default(),
    };
    let options = AnalysisOptions {
        ops_path: args.ops,
        static_only: args.static_only,
        services: args.services.map(|n| n as usize),
        betweenness: if args.unweighted_betweenness { Betweenness::Unweighted } else { Betweenness::Weighted },
        scan,
    };
    let analysis = analyze(&args.project_dir, &options).map_err(|e| e.to_string())?;

    for w in &analysis.report.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(path) = &args.dot {
        fs::write(path, analysis.render_dot()).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    match args.format {
        Format::Text => print!("{}", analysis.report.render_text()),
        Format::Json => print!("{}", analysis.report.render_json()),
    }
    Ok(())
}

fn thread_pool() -> Result<Option<rayon::ThreadPool>, String> {
    let Ok(value) = std::env::var("MONOBREAK_THREADS") else {
        return Ok(None);
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("MONOBREAK_THREADS must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build().map(Some).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::FAILURE;
        }
    };
    let Command::Analyze(args) = cli.command;
    let result = thread_pool().and_then(|pool| match pool {
        Some(pool) => pool.install(|| run(args)),
        None => run(args),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use modelbench_core::pipeline::output_override;
use modelbench_core::{run_stage, RunContext, Stage};
use modelbench_server::{ServerConfig, DEFAULT_BIND};
use tracing_subscriber::EnvFilter;

/// Profile-driven benchmarking of model datasets.
#[derive(Debug, Parser)]
#[command(name = "modelbench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct StageArgs {
    /// Benchmark profile (JSON).
    #[arg(long)]
    profile: PathBuf,
    /// Output directory; overrides MODELBENCH_OUT and the profile's output_path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Discover candidate files and write dataset_info.json.
    Scan(StageArgs),
    /// Parse candidates into IR files and write ir_info.json.
    Parse(StageArgs),
    /// Compute measures and write measures.json and measures_per_model.json.
    Measure(StageArgs),
    /// Build report.json from the measure artifacts.
    Report(StageArgs),
    /// Scan, parse, measure and report in order.
    Run(StageArgs),
    /// Serve the HTTP API (and optionally a built UI bundle).
    Serve {
        /// Directory holding profile files.
        #[arg(long, default_value = ".")]
        profiles: PathBuf,
        #[arg(long, default_value = DEFAULT_BIND)]
        bind: String,
        /// Profile used by artifact routes without a `profile` query parameter.
        #[arg(long)]
        default_profile: Option<String>,
        /// Static files served at `/`.
        #[arg(long)]
        static_dir: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run_cli_stage(stage: Stage, args: StageArgs) -> anyhow::Result<()> {
    let ctx = RunContext::load(&args.profile, output_override(args.out))?;
    tracing::info!(stage = %stage, output = %ctx.output_dir.display(), "starting");
    let summary = run_stage(&ctx, stage).with_context(|| format!("{stage} stage failed"))?;
    print!("{summary}");
    println!("artifacts in {}", ctx.output_dir.display());
    Ok(())
}

fn serve(config: ServerConfig, bind: &str) -> anyhow::Result<()> {
    let runtime = tokio::runtime::Runtime::new()?;
    runtime
        .block_on(modelbench_server::serve(config, bind))
        .with_context(|| format!("server on {bind} failed"))
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("warn")))
        .with_writer(std::io::stderr)
        .init();

    // clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Scan(a) => run_cli_stage(Stage::Scan, a),
        Command::Parse(a) => run_cli_stage(Stage::Parse, a),
        Command::Measure(a) => run_cli_stage(Stage::Measure, a),
        Command::Report(a) => run_cli_stage(Stage::Report, a),
        Command::Run(a) => run_cli_stage(Stage::Run, a),
        Command::Serve { profiles, bind, default_profile, static_dir, out } => serve(
            ServerConfig {
                profile_dir: profiles,
                output_override: output_override(out),
                default_profile,
                static_dir,
            },
            &bind,
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

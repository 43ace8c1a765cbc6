//! `plateau`: numerical laboratory for test-function-regulated loop
//! integrals. Exit codes: 0 all checks pass, 1 a check failed, 2 bad
//! configuration or usage.

mod commands;
mod config;
mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use commands::CommandOutput;
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "plateau", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Regulator profile and partition-of-unity checks.
    Testfn(CommonArgs),
    /// Wilson-line checks.
    Wilson {
        #[command(subcommand)]
        action: WilsonAction,
    },
    /// Step-limit axial divergence and its cancellation.
    AnomalyAxial(CommonArgs),
    /// Vector-current defect coefficient.
    AnomalyVector(CommonArgs),
    /// Counterterm and assembled anomaly.
    AnomalyTotal(CommonArgs),
    /// Smooth-shift legitimacy vs hard-cutoff surface term.
    ShiftDemo(CommonArgs),
    /// Shell-domain integral, deterministic and Monte Carlo.
    Shell(CommonArgs),
}

#[derive(Subcommand)]
enum WilsonAction {
    /// Pass/fail table of covariance and variation checks.
    Check(CommonArgs),
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON configuration file (built-in defaults if omitted).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path prefix; writes <prefix>.csv or <prefix>.json.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Override the configured RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the configured Monte Carlo sample budget.
    #[arg(long)]
    samples: Option<u64>,
    /// Override the configured worker-stream count.
    #[arg(long)]
    workers: Option<u64>,
    /// Print the built-in default configuration and exit.
    #[arg(long)]
    print_default_config: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Testfn(args) => dispatch(args, |c: &config::TestfnConfig| commands::run_testfn(c)),
        Command::Wilson {
            action: WilsonAction::Check(args),
        } => dispatch(args, |c: &config::WilsonConfig| commands::run_wilson(c)),
        Command::AnomalyAxial(args) => dispatch_triangle(args, commands::run_anomaly_axial),
        Command::AnomalyVector(args) => dispatch_triangle(args, commands::run_anomaly_vector),
        Command::AnomalyTotal(args) => dispatch_triangle(args, commands::run_anomaly_total),
        Command::ShiftDemo(args) => dispatch_shift(args),
        Command::Shell(args) => dispatch_shell(args),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load_config<C: DeserializeOwned + Serialize + Default>(
    args: &CommonArgs,
) -> Result<Option<C>, String> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            serde_json::from_str(&text)
                .map_err(|e| format!("config {}: {e}", path.display()))?
        }
        None => C::default(),
    };
    if args.print_default_config {
        cfg = C::default();
        let mut s = serde_json::to_string_pretty(&cfg).expect("default config serialization");
        s.push('\n');
        print!("{s}");
        return Ok(None);
    }
    Ok(Some(cfg))
}

fn emit(args: &CommonArgs, out: &CommandOutput) -> Result<ExitCode, String> {
    if let Some(prefix) = &args.output {
        let (path, body) = match args.format {
            Format::Csv => (with_suffix(prefix, ".csv"), out.report.to_csv()),
            Format::Json => (with_suffix(prefix, ".json"), out.report.to_json()),
        };
        write_file(&path, &body)?;
        for (suffix, contents) in &out.plots {
            write_file(&with_suffix(prefix, suffix), contents)?;
        }
    }
    print!("{}", out.report.render_table());
    Ok(if out.report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    std::fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn dispatch<C: DeserializeOwned + Serialize + Default>(
    args: &CommonArgs,
    run: impl FnOnce(&C) -> Result<CommandOutput, String>,
) -> Result<ExitCode, String> {
    let Some(cfg) = load_config::<C>(args)? else {
        return Ok(ExitCode::SUCCESS);
    };
    let out = run(&cfg)?;
    emit(args, &out)
}

fn apply_overrides(args: &CommonArgs, cfg: &mut config::TriangleFileConfig) {
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(samples) = args.samples {
        cfg.mc_samples = samples;
    }
    if let Some(workers) = args.workers {
        cfg.workers = workers;
    }
}

fn dispatch_triangle(
    args: &CommonArgs,
    run: impl FnOnce(&config::TriangleFileConfig) -> Result<CommandOutput, String>,
) -> Result<ExitCode, String> {
    let Some(mut cfg) = load_config::<config::TriangleFileConfig>(args)? else {
        return Ok(ExitCode::SUCCESS);
    };
    apply_overrides(args, &mut cfg);
    let out = run(&cfg)?;
    emit(args, &out)
}

fn dispatch_shift(args: &CommonArgs) -> Result<ExitCode, String> {
    let Some(mut cfg) = load_config::<config::ShiftDemoConfig>(args)? else {
        return Ok(ExitCode::SUCCESS);
    };
    apply_overrides(args, &mut cfg.triangle);
    let out = commands::run_shift_demo(&cfg)?;
    emit(args, &out)
}

fn dispatch_shell(args: &CommonArgs) -> Result<ExitCode, String> {
    let Some(mut cfg) = load_config::<config::ShellConfig>(args)? else {
        return Ok(ExitCode::SUCCESS);
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(samples) = args.samples {
        cfg.mc_samples = samples;
    }
    if let Some(workers) = args.workers {
        cfg.workers = workers;
    }
    let out = commands::run_shell(&cfg)?;
    emit(args, &out)
}

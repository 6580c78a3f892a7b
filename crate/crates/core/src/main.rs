use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tipscan::config::{self, LoadedConfig};
use tipscan::io::{parse_records_csv, portrait_csv, records_csv, trajectory_csv, write_file};
use tipscan::model::{Dynamics, ModelKind};
use tipscan::pipeline::{extrapolate_crossing, run_pipeline, PipelineConfig, Which};
use tipscan::portrait::{default_lambdas, default_starts, phase_portrait};
use tipscan::sde::integrate;
use tipscan::{Error, Result};

#[derive(Parser)]
#[command(
    name = "tipscan",
    version,
    about = "VAR early-warning analysis of ramped stochastic systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a model and write its subsampled trajectory
    Simulate(RunArgs),
    /// Run the sliding-window analysis and write the records CSV
    Analyze(RunArgs),
    /// Write phase-portrait point sets at fixed forcing values
    Portrait(PortraitArgs),
    /// Extrapolate an eigenvalue trend from a records CSV to zero
    Extrapolate(ExtrapolateArgs),
    /// Print the reference parameter table
    Presets,
}

#[derive(Args)]
struct RunArgs {
    /// Key/value config file; values override the model preset
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    /// Seed for both the simulation noise and the Monte Carlo draws
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = "TIPSCAN_OUT_DIR", default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    se_method: Option<String>,
    #[arg(long)]
    detrend: Option<String>,
    #[arg(long)]
    stride: Option<String>,
    #[arg(long)]
    stop_rule: Option<String>,
}

#[derive(Args)]
struct PortraitArgs {
    #[arg(long, default_value = "fold")]
    model: String,
    /// Comma-separated forcing values (defaults to the reference set)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambda: Vec<f64>,
    /// Integration time of each trajectory
    #[arg(long, default_value_t = 20.0)]
    duration: f64,
    #[arg(long, env = "TIPSCAN_OUT_DIR", default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct ExtrapolateArgs {
    #[arg(long)]
    records: PathBuf,
    #[arg(long, default_value = "leading")]
    which: String,
    #[arg(long, default_value_t = f64::NEG_INFINITY, allow_hyphen_values = true)]
    from: f64,
    #[arg(long, default_value_t = f64::INFINITY, allow_hyphen_values = true)]
    to: f64,
}

fn resolve_config(args: &RunArgs) -> Result<LoadedConfig> {
    let model = args
        .model
        .as_deref()
        .map(str::parse::<ModelKind>)
        .transpose()?;
    let mut loaded = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            config::load(&text, model)?
        }
        None => LoadedConfig {
            config: PipelineConfig::preset(model.unwrap_or(ModelKind::Fold)),
            warnings: Vec::new(),
        },
    };
    let cfg = &mut loaded.config;
    if let Some(seed) = args.seed {
        *cfg = cfg.with_seed(seed);
    }
    let overrides = [
        ("se_method", &args.se_method),
        ("detrend", &args.detrend),
        ("stride", &args.stride),
        ("stop_rule", &args.stop_rule),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            config::apply(cfg, key, v)?;
        }
    }
    cfg.validate()?;
    Ok(loaded)
}

fn out_path(dir: &Path, name: String) -> PathBuf {
    dir.join(name)
}

fn simulate(args: RunArgs) -> Result<()> {
    let loaded = resolve_config(&args)?;
    warn(&loaded.warnings);
    let cfg = loaded.config;
    let frame = integrate(&cfg.model_spec(), &cfg.sim)?.subsample(cfg.sub)?;
    let path = out_path(&args.out, format!("{}_trajectory.csv", cfg.model));
    write_file(&path, &trajectory_csv(&frame))?;
    println!("wrote {} ({} samples)", path.display(), frame.len());
    Ok(())
}

fn analyze(args: RunArgs) -> Result<()> {
    let loaded = resolve_config(&args)?;
    warn(&loaded.warnings);
    let cfg = loaded.config;
    let run = run_pipeline(&cfg)?;
    let records = out_path(&args.out, format!("{}_records.csv", cfg.model));
    write_file(&records, &records_csv(&run.records))?;
    let trajectory = out_path(&args.out, format!("{}_trajectory.csv", cfg.model));
    write_file(&trajectory, &trajectory_csv(&run.frame))?;
    let failed = run.records.iter().filter(|r| r.failed()).count();
    println!(
        "wrote {} ({} windows, {} failed) and {}",
        records.display(),
        run.records.len(),
        failed,
        trajectory.display()
    );
    Ok(())
}

fn portrait(args: PortraitArgs) -> Result<()> {
    let kind: ModelKind = args.model.parse()?;
    let preset = PipelineConfig::preset(kind);
    let model = preset.model_spec();
    let lambdas = if args.lambda.is_empty() {
        default_lambdas(kind)
    } else {
        args.lambda.clone()
    };
    let starts = default_starts(&model);
    for lambda in lambdas {
        let mut sets = phase_portrait(&model, lambda, &starts, args.duration)?;
        if let Ok(eq) = model.equilibrium(lambda) {
            sets.push(("equilibrium".to_string(), vec![eq]));
        }
        let path = out_path(&args.out, format!("{kind}_portrait_lambda_{lambda}.csv"));
        write_file(&path, &portrait_csv(&sets))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn extrapolate(args: ExtrapolateArgs) -> Result<()> {
    let which: Which = args.which.parse()?;
    let text = std::fs::read_to_string(&args.records)
        .map_err(|e| Error::Io(format!("{}: {e}", args.records.display())))?;
    let records = parse_records_csv(&text)?;
    let c = extrapolate_crossing(&records, which, (args.from, args.to))?;
    println!("n_used = {}", c.n_used);
    println!("slope = {}", c.slope);
    println!("intercept = {}", c.intercept);
    println!("se_slope = {}", c.se_slope);
    match (c.t_cross, c.lambda_cross) {
        (Some(t), Some(l)) => {
            println!("t_cross = {t}");
            println!("lambda_cross = {l}");
        }
        (Some(t), None) => println!("t_cross = {t}"),
        _ => println!("t_cross = none (non-positive slope)"),
    }
    Ok(())
}

fn warn(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Analyze(a) => analyze(a),
        Command::Portrait(a) => portrait(a),
        Command::Extrapolate(a) => extrapolate(a),
        Command::Presets => {
            print!("{}", config::presets_table());
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

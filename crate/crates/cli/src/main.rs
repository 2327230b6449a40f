use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use mdlearn::problem::write_instance;
use mdlearn::{Error, InstanceSpec, Result};
use mdlearn_cli::config::{parse_seeds, Algorithm, ExperimentConfig, InstanceSource, OutputFormat};
use mdlearn_cli::records::{to_csv, to_json, RunRecord};
use mdlearn_cli::runner::{lower_bound_sweep, rmdl_head_to_head, run_experiment, sweep, SweepAxis};

#[derive(Parser)]
#[command(name = "mdlearn", about = "Multi-distribution learning experiments", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured algorithm once per seed.
    Solve(RunArgs),
    /// Measure samples-to-target across an axis of instance sizes or targets.
    Sweep(SweepArgs),
    /// Head-to-head scaling study on the hard instance family.
    LowerboundSweep(LowerBoundArgs),
    /// Solve a convex instance with the group-robust solver.
    Gdro(RunArgs),
    /// Robust training: on an instance per seed, or the built-in imbalanced
    /// task compared against pooled fitting when no instance is given.
    Rmdl(RmdlArgs),
    /// Write a generated instance to a file.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config document.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Instance file (spec or explicit atoms); overrides the config's.
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated seed list; mutually exclusive with --seed.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    t_scale: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// n, epsilon, or class-size.
    #[arg(long)]
    axis: String,
    /// Comma-separated axis values.
    #[arg(long)]
    values: String,
}

#[derive(Args)]
struct LowerBoundArgs {
    /// Comma-separated distribution counts.
    #[arg(long, default_value = "2,8")]
    n_values: String,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value = "0")]
    seeds: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct RmdlArgs {
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct GenerateArgs {
    /// Instance family: lower-bound, coins, random-agnostic, realizable, or
    /// convex-gdro.
    #[arg(long)]
    family: String,
    /// Family parameter, repeatable: --set key=value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    out: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve(args) => {
            let config = resolve_config(&args, None)?;
            emit(&run_experiment(&config)?, &config.out, config.format)
        }
        Command::Gdro(args) => {
            let config = resolve_config(&args, Some(Algorithm::Gdro))?;
            emit(&run_experiment(&config)?, &config.out, config.format)
        }
        Command::Sweep(args) => {
            let config = resolve_config(&args.run, None)?;
            let axis = SweepAxis::parse(&args.axis)?;
            let values = parse_values(&args.values)?;
            emit(&sweep(&config, axis, &values)?, &config.out, config.format)
        }
        Command::LowerboundSweep(args) => {
            let n_values: Vec<usize> = parse_values(&args.n_values)?
                .into_iter()
                .map(|v| v as usize)
                .collect();
            let seeds = parse_seeds(&args.seeds)?;
            let records = lower_bound_sweep(&n_values, args.eps, &seeds)?;
            let format = match args.format.as_deref() {
                Some(s) => OutputFormat::parse(s)?,
                None => OutputFormat::Csv,
            };
            emit(&records, &args.out, format)
        }
        Command::Rmdl(args) => {
            if args.run.config.is_some() || args.run.instance.is_some() {
                let config = resolve_config(&args.run, Some(Algorithm::Rmdl))?;
                return emit(&run_experiment(&config)?, &config.out, config.format);
            }
            let seeds = seeds_from(&args.run)?;
            let mut records = Vec::with_capacity(2 * seeds.len());
            for &seed in &seeds {
                let started = std::time::Instant::now();
                let outcome = rmdl_head_to_head(seed)?;
                let wall_ms = started.elapsed().as_millis() as u64;
                for (algorithm, worst) in
                    [("rmdl", outcome.rmdl_worst), ("pooled-erm", outcome.pooled_worst)]
                {
                    records.push(RunRecord {
                        run_id: format!("task-{algorithm}-s{seed}"),
                        algorithm: algorithm.into(),
                        n: 2,
                        size: 2,
                        eps_target: 0.0,
                        samples_used: outcome.samples_each,
                        opt_gap: None,
                        worst_group_risk: worst,
                        wall_ms,
                        seed,
                    });
                }
            }
            let format = match args.run.format.as_deref() {
                Some(s) => OutputFormat::parse(s)?,
                None => OutputFormat::Csv,
            };
            emit(&records, &args.run.out, format)
        }
        Command::Generate(args) => {
            let mut doc = format!("{}\nfamily = {}\n", mdlearn::instances::SPEC_HEADER, args.family);
            for pair in &args.set {
                let Some((key, value)) = pair.split_once('=') else {
                    return Err(Error::Config {
                        field: pair.clone(),
                        message: "expected --set key=value".into(),
                    });
                };
                doc.push_str(&format!("{} = {}\n", key.trim(), value.trim()));
            }
            let spec = InstanceSpec::parse(&doc)?;
            let instance = spec.build()?;
            let text = write_instance(&instance)?;
            std::fs::write(&args.out, text)?;
            eprintln!("wrote {}", args.out.display());
            Ok(())
        }
    }
}

/// Merges a config document with flag overrides. The subcommand may pin the
/// algorithm; `solve` honors whatever the config says.
fn resolve_config(args: &RunArgs, algorithm: Option<Algorithm>) -> Result<ExperimentConfig> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::from_text(&std::fs::read_to_string(path)?)?,
        None => {
            let Some(instance) = &args.instance else {
                return Err(Error::Config {
                    field: "instance".into(),
                    message: "give --config or --instance".into(),
                });
            };
            ExperimentConfig::new(
                InstanceSource::File(instance.clone()),
                algorithm.unwrap_or(Algorithm::Mdl),
            )
        }
    };
    if let Some(forced) = algorithm {
        config.algorithm = forced;
    }
    if args.config.is_some() {
        if let Some(instance) = &args.instance {
            config.instance = InstanceSource::File(instance.clone());
        }
    }
    if args.seed.is_some() && args.seeds.is_some() {
        return Err(Error::Config {
            field: "seeds".into(),
            message: "give --seed or --seeds, not both".into(),
        });
    }
    if let Some(seed) = args.seed {
        config.seeds = vec![seed];
    }
    if let Some(seeds) = &args.seeds {
        config.seeds = parse_seeds(seeds)?;
    }
    if let Some(eps) = args.eps {
        config.eps = eps;
    }
    if let Some(delta) = args.delta {
        config.delta = delta;
    }
    if let Some(t_scale) = args.t_scale {
        config.t_scale = t_scale;
    }
    if let Some(out) = &args.out {
        config.out = Some(out.clone());
    }
    if let Some(format) = args.format.as_deref() {
        config.format = OutputFormat::parse(format)?;
    }
    config.validate()?;
    Ok(config)
}

fn seeds_from(args: &RunArgs) -> Result<Vec<u64>> {
    if args.seed.is_some() && args.seeds.is_some() {
        return Err(Error::Config {
            field: "seeds".into(),
            message: "give --seed or --seeds, not both".into(),
        });
    }
    if let Some(seed) = args.seed {
        return Ok(vec![seed]);
    }
    match &args.seeds {
        Some(s) => parse_seeds(s),
        None => Ok(vec![0]),
    }
}

fn parse_values(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|part| {
            part.trim().parse().map_err(|_| Error::Config {
                field: "values".into(),
                message: format!("expected comma-separated numbers, got `{part}`"),
            })
        })
        .collect()
}

/// Writes records to the output path (or stdout) and per-run timings to
/// stderr. Files never carry wall-clock time, so repeated runs are
/// byte-identical.
fn emit(records: &[RunRecord], out: &Option<PathBuf>, format: OutputFormat) -> Result<()> {
    let rendered = match format {
        OutputFormat::Csv => to_csv(records),
        OutputFormat::Json => to_json(records),
    };
    match out {
        Some(path) => {
            std::fs::write(path, rendered)?;
            eprintln!("wrote {} records to {}", records.len(), path.display());
        }
        None => print!("{rendered}"),
    }
    let total: u64 = records.iter().map(|r| r.wall_ms).sum();
    for r in records {
        eprintln!("{}: {} ms", r.run_id, r.wall_ms);
    }
    eprintln!("total: {total} ms");
    Ok(())
}

//! Command-line driver for the planning-landscape analysis pipeline.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use planscape::error::{Error, Result};
use planscape::metrics::{project, random_walk, sub_seed, ProjectionAggregate};
use planscape::report::{
    run_study, EnvironmentInput, StudyConfig, DEFAULT_REPEATS, DEFAULT_SEED, DEFAULT_WALK_LENGTH,
};
use planscape::space::{load_environment_path, Aggregation, LoadOptions};
use planscape::stats::DEFAULT_ALPHA;

#[derive(Parser)]
#[command(name = "planscape", version, about = "Planning-landscape analysis for configurable systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full study: optima, FDC, correlation length, statistics and
    /// cross-environment overlap.
    Analyze(AnalyzeArgs),
    /// Export a landscape projected onto two options as a long-form grid.
    Project(ProjectArgs),
    /// Emit seeded random-walk traces for inspection.
    Walk(WalkArgs),
}

/// Flags shared by every subcommand that loads environment tables.
#[derive(Args, Debug, Clone)]
struct LoaderArgs {
    /// Environment table as id=path (repeatable).
    #[arg(long = "env", value_name = "ID=PATH")]
    env: Vec<String>,
    /// Name of the performance column.
    #[arg(long = "perf-col", value_name = "NAME")]
    perf_col: Option<String>,
    /// Field delimiter; auto-detected among , ; and tab when omitted.
    #[arg(long, value_name = "CHAR")]
    delimiter: Option<String>,
    /// Comma-separated columns that are neither options nor performance.
    #[arg(long = "ignore-cols", value_name = "A,B", value_delimiter = ',')]
    ignore_cols: Vec<String>,
    /// Explicit domains file overriding inference (name = v1, v2, ... lines).
    #[arg(long, value_name = "FILE")]
    domains: Option<PathBuf>,
    /// Accept incomplete landscapes and restrict analysis to measured plans.
    #[arg(long)]
    partial: bool,
    /// Optional TOML config file; command-line flags override its keys.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[command(flatten)]
    loader: LoaderArgs,
    /// Aggregation for duplicate measurements of one plan.
    #[arg(long = "agg", value_name = "mean|median")]
    agg: Option<String>,
    /// Performance-equality tolerance for optima classification.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Sampled points per random walk (start included).
    #[arg(long = "walk-len", value_name = "N")]
    walk_len: Option<usize>,
    /// Number of random-walk repeats per environment.
    #[arg(long, value_name = "N")]
    repeats: Option<usize>,
    /// Master seed for all randomized analyses.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Significance level for all statistical tests.
    #[arg(long)]
    alpha: Option<f64>,
    /// Literature reference correlation length, NAME=VALUE (repeatable).
    #[arg(long = "ell-baseline", value_name = "NAME=VALUE")]
    ell_baseline: Vec<String>,
    /// Machine-readable report path; the human summary goes to stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ProjectArgs {
    #[command(flatten)]
    loader: LoaderArgs,
    /// First projection option name.
    #[arg(long = "x", value_name = "OPTION")]
    x: Option<String>,
    /// Second projection option name.
    #[arg(long = "y", value_name = "OPTION")]
    y: Option<String>,
    /// Cell aggregator over the remaining options.
    #[arg(long = "agg", value_name = "mean|min")]
    agg: Option<String>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct WalkArgs {
    #[command(flatten)]
    loader: LoaderArgs,
    /// Number of walks to emit.
    #[arg(long, value_name = "N")]
    count: Option<usize>,
    /// Sampled points per walk (start included).
    #[arg(long = "walk-len", value_name = "N")]
    walk_len: Option<usize>,
    /// Master seed; walk k uses the k-th derived sub-seed.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

/// Keys accepted in a TOML config file. Command-line flags override.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    env: Option<Vec<String>>,
    perf_col: Option<String>,
    agg: Option<String>,
    epsilon: Option<f64>,
    walk_len: Option<usize>,
    repeats: Option<usize>,
    seed: Option<u64>,
    alpha: Option<f64>,
    partial: Option<bool>,
    delimiter: Option<String>,
    ignore_cols: Option<Vec<String>>,
    domains: Option<PathBuf>,
    out: Option<PathBuf>,
    count: Option<usize>,
    x: Option<String>,
    y: Option<String>,
    project_agg: Option<String>,
    ell_baseline: Option<Vec<String>>,
}

fn read_file_config(path: Option<&PathBuf>) -> Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            toml::from_str(&text).map_err(|e| Error::Format {
                line: 1,
                message: format!("config file {}: {e}", path.display()),
            })
        }
    }
}

fn parse_env_specs(specs: &[String]) -> Result<Vec<EnvironmentInput>> {
    specs
        .iter()
        .map(|spec| match spec.split_once('=') {
            Some((id, path)) if !id.is_empty() && !path.is_empty() => Ok(EnvironmentInput {
                id: id.to_string(),
                path: PathBuf::from(path),
            }),
            _ => {
                // Bare path: default the id to the file stem.
                let path = PathBuf::from(spec);
                let id = path
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .map(|s| s.to_string())
                    .ok_or_else(|| {
                        Error::Argument(format!(
                            "--env expects ID=PATH or a file path, got {spec:?}"
                        ))
                    })?;
                Ok(EnvironmentInput { id, path })
            }
        })
        .collect()
}

fn parse_delimiter(s: &str) -> Result<u8> {
    let unescaped = match s {
        "\\t" | "tab" => "\t",
        other => other,
    };
    let bytes = unescaped.as_bytes();
    if bytes.len() != 1 {
        return Err(Error::Argument(format!(
            "delimiter must be a single character, got {s:?}"
        )));
    }
    Ok(bytes[0])
}

fn parse_baselines(specs: &[String]) -> Result<Vec<(String, f64)>> {
    specs
        .iter()
        .map(|spec| {
            let (name, value) = spec.split_once('=').ok_or_else(|| {
                Error::Argument(format!("--ell-baseline expects NAME=VALUE, got {spec:?}"))
            })?;
            let value: f64 = value.parse().map_err(|_| {
                Error::Argument(format!("--ell-baseline value {value:?} is not a number"))
            })?;
            Ok((name.to_string(), value))
        })
        .collect()
}

fn load_options(loader: &LoaderArgs, file: &FileConfig, agg: Option<&str>) -> Result<LoadOptions> {
    let aggregation = match agg.or(file.agg.as_deref()) {
        Some(s) => s.parse::<Aggregation>()?,
        None => Aggregation::Mean,
    };
    let delimiter = match loader.delimiter.as_deref().or(file.delimiter.as_deref()) {
        Some(s) => Some(parse_delimiter(s)?),
        None => None,
    };
    let ignore_columns = if loader.ignore_cols.is_empty() {
        file.ignore_cols.clone().unwrap_or_default()
    } else {
        loader.ignore_cols.clone()
    };
    Ok(LoadOptions {
        performance_column: loader
            .perf_col
            .clone()
            .or_else(|| file.perf_col.clone())
            .unwrap_or_else(|| "performance".to_string()),
        aggregation,
        delimiter,
        ignore_columns,
        partial: loader.partial || file.partial.unwrap_or(false),
    })
}

fn environments(loader: &LoaderArgs, file: &FileConfig) -> Result<Vec<EnvironmentInput>> {
    let specs = if loader.env.is_empty() {
        file.env.clone().unwrap_or_default()
    } else {
        loader.env.clone()
    };
    if specs.is_empty() {
        return Err(Error::Argument(
            "no environments given; use --env ID=PATH or the env key in a config file".into(),
        ));
    }
    parse_env_specs(&specs)
}

fn single_environment(loader: &LoaderArgs, file: &FileConfig) -> Result<EnvironmentInput> {
    let mut envs = environments(loader, file)?;
    if envs.len() != 1 {
        return Err(Error::Argument(format!(
            "this command takes exactly one environment, got {}",
            envs.len()
        )));
    }
    Ok(envs.remove(0))
}

fn out_path(cli: Option<PathBuf>, file: &FileConfig) -> Result<PathBuf> {
    cli.or_else(|| file.out.clone())
        .ok_or_else(|| Error::Argument("--out PATH is required".into()))
}

fn write_output(path: &PathBuf, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<()> {
    let file = read_file_config(args.loader.config.as_ref())?;
    let out = out_path(args.out.clone(), &file)?;
    let mut config = StudyConfig::new(environments(&args.loader, &file)?);
    config.load = load_options(&args.loader, &file, args.agg.as_deref())?;
    config.domains_file = args.loader.domains.clone().or_else(|| file.domains.clone());
    config.epsilon = args.epsilon.or(file.epsilon).unwrap_or(0.0);
    config.walk_length = args
        .walk_len
        .or(file.walk_len)
        .unwrap_or(DEFAULT_WALK_LENGTH);
    config.repeats = args.repeats.or(file.repeats).unwrap_or(DEFAULT_REPEATS);
    config.seed = args.seed.or(file.seed).unwrap_or(DEFAULT_SEED);
    config.alpha = args.alpha.or(file.alpha).unwrap_or(DEFAULT_ALPHA);
    config.ell_baselines = if args.ell_baseline.is_empty() {
        parse_baselines(&file.ell_baseline.clone().unwrap_or_default())?
    } else {
        parse_baselines(&args.ell_baseline)?
    };

    let report = run_study(&config)?;
    write_output(&out, &report.to_machine_text())?;
    print!("{}", report.to_summary_text());
    Ok(())
}

fn cmd_project(args: ProjectArgs) -> Result<()> {
    let file = read_file_config(args.loader.config.as_ref())?;
    let out = out_path(args.out.clone(), &file)?;
    let env = single_environment(&args.loader, &file)?;
    let opts = load_options(&args.loader, &file, None)?;
    let x = args
        .x
        .clone()
        .or_else(|| file.x.clone())
        .ok_or_else(|| Error::Argument("--x OPTION is required".into()))?;
    let y = args
        .y
        .clone()
        .or_else(|| file.y.clone())
        .ok_or_else(|| Error::Argument("--y OPTION is required".into()))?;
    let aggregate = match args.agg.as_deref().or(file.project_agg.as_deref()) {
        Some(s) => s.parse::<ProjectionAggregate>()?,
        None => ProjectionAggregate::Mean,
    };

    let landscape = load_environment_path(&env.id, &env.path, &opts, None)
        .map_err(|e| e.in_stage("load", &env.id))?;
    let grid = project(&landscape, &x, &y, aggregate).map_err(|e| e.in_stage("project", &env.id))?;
    write_output(&out, &grid.to_long_form(','))?;
    println!(
        "wrote {} cells of {} x {} to {}",
        grid.cells.len(),
        grid.option_a,
        grid.option_b,
        out.display()
    );
    Ok(())
}

fn cmd_walk(args: WalkArgs) -> Result<()> {
    let file = read_file_config(args.loader.config.as_ref())?;
    let out = out_path(args.out.clone(), &file)?;
    let env = single_environment(&args.loader, &file)?;
    let opts = load_options(&args.loader, &file, None)?;
    let count = args.count.or(file.count).unwrap_or(1);
    if count == 0 {
        return Err(Error::Argument("--count must be at least 1".into()));
    }
    let length = args
        .walk_len
        .or(file.walk_len)
        .unwrap_or(DEFAULT_WALK_LENGTH);
    let seed = args.seed.or(file.seed).unwrap_or(DEFAULT_SEED);

    let landscape = load_environment_path(&env.id, &env.path, &opts, None)
        .map_err(|e| e.in_stage("load", &env.id))?;
    let space = landscape.space();

    let mut text = String::new();
    text.push_str("walk,step,plan_index");
    for opt in space.options() {
        text.push(',');
        text.push_str(opt.name());
    }
    text.push_str(",performance\n");
    for k in 0..count {
        let walk = random_walk(&landscape, length, sub_seed(seed, k as u64))
            .map_err(|e| e.in_stage("walk", &env.id))?;
        for (step, &(index, perf)) in walk.trace.iter().enumerate() {
            let plan = space.index_to_plan(index).expect("walk stays in the space");
            let labels = space.plan_labels(&plan).expect("plan from this space");
            text.push_str(&format!("{k},{step},{index}"));
            for label in labels {
                text.push(',');
                text.push_str(label);
            }
            text.push_str(&format!(",{perf}\n"));
        }
    }
    write_output(&out, &text)?;
    println!(
        "wrote {count} walk(s) of {length} points to {}",
        out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Project(args) => cmd_project(args),
        Command::Walk(args) => cmd_walk(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("planscape: {err}");
            let mut source = std::error::Error::source(&err);
            while let Some(inner) = source {
                eprintln!("  caused by: {inner}");
                source = inner.source();
            }
            ExitCode::FAILURE
        }
    }
}

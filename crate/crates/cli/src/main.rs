//! `qudo` command-line interface.
//!
//! Exit codes: 0 success, 1 I/O or other failure, 2 invalid arguments or
//! configuration, 3 a resource limit caused rows to be skipped (partial
//! results are still written).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qudo::bench::{
    emit, run_experiment, EncodingChoice, ExperimentConfig, OutputFormat, PenaltyOverrides, RowStatus,
};
use qudo::encode::{encode_qubo, encode_qudo, native_decode, resource_summary, Encoding, ProblemInstance, ProblemKind};
use qudo::oracle::brute_force_optimum;
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(name = "qudo", version, about = "QUBO/QUDO encodings and qubit/qudit QAOA benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the instance, penalties, resources and encoded model as JSON.
    Encode(EncodeArgs),
    /// Solve the instance by exhaustive enumeration.
    Exact(ExactArgs),
    /// Benchmark one instance over the requested depths.
    Run(RunArgs),
    /// Benchmark a grid of sizes (repeat --n / --k) or a list of configs.
    Sweep(RunArgs),
}

#[derive(Debug, Args)]
struct InstanceArgs {
    /// tsp, sdvrp, mdvrp, max_k_cut, coloring or scheduling.
    #[arg(long)]
    problem: Option<String>,
    /// Cities, customers, vertices or jobs.
    #[arg(long)]
    n: Vec<usize>,
    /// Partitions or colors.
    #[arg(long)]
    k: Vec<usize>,
    #[arg(long)]
    depots: Option<usize>,
    /// Vehicle count; repeat once per depot for MDVRP.
    #[arg(long)]
    vehicles: Vec<usize>,
    /// Seed for both instance generation and restart starts.
    #[arg(long)]
    seed: Option<u64>,
    /// Instance JSON file instead of a generated instance.
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long = "penalty-a")]
    penalty_a: Option<f64>,
    #[arg(long = "penalty-b")]
    penalty_b: Option<f64>,
    #[arg(long = "penalty-c")]
    penalty_c: Option<f64>,
}

#[derive(Debug, Args)]
struct EncodeArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    /// qubo, qudo or both.
    #[arg(long, default_value = "qudo")]
    encoding: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExactArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    /// JSON experiment config; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// qubo, qudo or both.
    #[arg(long)]
    encoding: Option<String>,
    /// Circuit depth p; repeatable.
    #[arg(long)]
    depth: Vec<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long = "max-iters")]
    max_iters: Option<usize>,
    /// Worker threads for restart-level parallelism.
    #[arg(long)]
    workers: Option<usize>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Invalid(String),
    Resource(String),
    Other(String),
}

impl From<qudo::Error> for CliError {
    fn from(e: qudo::Error) -> Self {
        match e {
            qudo::Error::InvalidArgument(_) | qudo::Error::Json(_) => CliError::Invalid(e.to_string()),
            qudo::Error::ResourceLimit { .. } => CliError::Resource(e.to_string()),
            _ => CliError::Other(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

fn parse_json_value<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {what} {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| invalid(format!("bad {what} {}: {e}", path.display())))
}

fn parse_encoding_choice(s: &str) -> CliResult<EncodingChoice> {
    match s.trim().to_ascii_lowercase().as_str() {
        "qubo" => Ok(EncodingChoice::Qubo),
        "qudo" => Ok(EncodingChoice::Qudo),
        "both" => Ok(EncodingChoice::Both),
        _ => Err(invalid(format!("unknown encoding '{s}'"))),
    }
}

fn parse_format(s: &str) -> CliResult<OutputFormat> {
    match s.trim().to_ascii_lowercase().as_str() {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        _ => Err(invalid(format!("unknown format '{s}'"))),
    }
}

/// At most one value for subcommands that take a single size.
fn single<T: Copy>(values: &[T], flag: &str) -> CliResult<Option<T>> {
    match values {
        [] => Ok(None),
        [v] => Ok(Some(*v)),
        _ => Err(invalid(format!("--{flag} may be given only once here"))),
    }
}

impl InstanceArgs {
    /// Applies the instance-related flags on top of `cfg`; `grid` leaves
    /// repeated `--n` / `--k` to the caller.
    fn apply(&self, cfg: &mut ExperimentConfig, grid: bool) -> CliResult<()> {
        if let Some(p) = &self.problem {
            cfg.problem = p.parse::<ProblemKind>()?;
        }
        if !grid {
            if let Some(n) = single(&self.n, "n")? {
                cfg.sizes.n = n;
            }
            if let Some(k) = single(&self.k, "k")? {
                cfg.sizes.k = Some(k);
            }
        }
        if self.depots.is_some() {
            cfg.sizes.depots = self.depots;
        }
        if !self.vehicles.is_empty() {
            cfg.sizes.vehicles = self.vehicles.clone();
        }
        if let Some(seed) = self.seed {
            cfg.instance_seed = seed;
            cfg.optimizer.seed = seed;
        }
        if let Some(path) = &self.instance {
            let inst: ProblemInstance = parse_json_value(path, "instance")?;
            cfg.problem = inst.kind();
            cfg.instance = Some(inst);
        }
        let p = &mut cfg.penalties;
        p.a = self.penalty_a.or(p.a);
        p.b = self.penalty_b.or(p.b);
        p.c = self.penalty_c.or(p.c);
        Ok(())
    }

    fn require_problem(&self, cfg: &ExperimentConfig) -> CliResult<()> {
        if self.problem.is_none() && self.instance.is_none() && cfg.instance.is_none() {
            return Err(invalid("--problem or --instance is required"));
        }
        Ok(())
    }

    fn resolve(&self) -> CliResult<(ProblemInstance, PenaltyOverrides)> {
        let mut cfg = ExperimentConfig::default();
        self.require_problem(&cfg)?;
        self.apply(&mut cfg, false)?;
        Ok((cfg.resolve_instance()?, cfg.penalties))
    }
}

impl RunArgs {
    fn apply(&self, cfg: &mut ExperimentConfig, grid: bool) -> CliResult<()> {
        self.inst.apply(cfg, grid)?;
        if let Some(e) = &self.encoding {
            cfg.encoding = parse_encoding_choice(e)?;
        }
        if !self.depth.is_empty() {
            cfg.depths = self.depth.clone();
        }
        if let Some(r) = self.restarts {
            cfg.optimizer.restarts = r;
        }
        if let Some(m) = self.max_iters {
            cfg.optimizer.max_iterations = m;
        }
        if self.workers.is_some() {
            cfg.workers = self.workers;
        }
        if let Some(f) = &self.format {
            cfg.format = parse_format(f)?;
        }
        Ok(())
    }

    fn base_configs(&self) -> CliResult<Vec<ExperimentConfig>> {
        let Some(path) = &self.config else {
            self.inst.require_problem(&ExperimentConfig::default())?;
            return Ok(vec![ExperimentConfig::default()]);
        };
        let value: Value = parse_json_value(path, "config")?;
        let list = match value {
            Value::Array(items) => items,
            other => vec![other],
        };
        list.into_iter()
            .map(|v| serde_json::from_value(v).map_err(|e| invalid(format!("bad config {}: {e}", path.display()))))
            .collect()
    }
}

fn write_json_value(value: &Value, out: Option<&Path>) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Other(e.to_string()))?;
    match out {
        Some(p) => fs::write(p, text + "\n").map_err(|e| CliError::Other(format!("{}: {e}", p.display()))),
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Other(e.to_string())),
            _ => Ok(()),
        },
    }
}

fn cmd_encode(args: &EncodeArgs) -> CliResult<()> {
    let (inst, penalties) = args.inst.resolve()?;
    let weights = penalties.resolve(&inst);
    let resources = resource_summary(&inst);
    let mut models = Vec::new();
    for encoding in parse_encoding_choice(&args.encoding)?.encodings() {
        weights.validate_for(&inst, encoding)?;
        let model = match encoding {
            Encoding::Qudo => serde_json::to_value(encode_qudo(&inst, &weights)?),
            Encoding::Qubo => serde_json::to_value(encode_qubo(&inst, &weights)?),
        }
        .map_err(|e| CliError::Other(e.to_string()))?;
        models.push(json!({ "encoding": encoding, "model": model }));
    }
    let value = json!({
        "instance": inst,
        "penalties": weights,
        "resources": resources,
        "models": models,
    });
    write_json_value(&value, args.out.as_deref())
}

fn cmd_exact(args: &ExactArgs) -> CliResult<()> {
    let (inst, _) = args.inst.resolve()?;
    let exact = brute_force_optimum(&inst)?;
    let optimizers = exact
        .optimizers
        .iter()
        .map(|a| native_decode(&inst, a).map(|d| json!({ "assignment": a, "structure": d.structure })))
        .collect::<qudo::Result<Vec<_>>>()?;
    let value = json!({
        "instance": inst,
        "sense": exact.sense,
        "optimal_value": exact.optimal_value,
        "num_optimizers": optimizers.len(),
        "optimizers": optimizers,
    });
    write_json_value(&value, args.out.as_deref())
}

fn cmd_run(args: &RunArgs, sweep: bool) -> CliResult<bool> {
    let mut configs = Vec::new();
    for mut cfg in args.base_configs()? {
        args.apply(&mut cfg, sweep)?;
        if sweep {
            // Size grid from repeated --n / --k.
            let ns = if args.inst.n.is_empty() { vec![cfg.sizes.n] } else { args.inst.n.clone() };
            let ks: Vec<Option<usize>> = if args.inst.k.is_empty() {
                vec![cfg.sizes.k]
            } else {
                args.inst.k.iter().map(|&k| Some(k)).collect()
            };
            for &n in &ns {
                for &k in &ks {
                    let mut c = cfg.clone();
                    c.sizes.n = n;
                    c.sizes.k = k;
                    configs.push(c);
                }
            }
        } else {
            configs.push(cfg);
        }
    }
    let format = configs.first().map(|c| c.format).unwrap_or_default();
    let mut rows = Vec::new();
    for cfg in &configs {
        rows.extend(run_experiment(cfg)?);
    }
    match emit(&rows, format, args.out.as_deref()) {
        Err(e) if !e.is_broken_pipe() => return Err(e.into()),
        _ => {}
    }
    Ok(rows.iter().any(|r| r.status == RowStatus::SkippedResource))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Encode(a) => cmd_encode(a).map(|_| false),
        Command::Exact(a) => cmd_exact(a).map(|_| false),
        Command::Run(a) => cmd_run(a, false),
        Command::Sweep(a) => cmd_run(a, true),
    };
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("qudo: some rows were skipped for exceeding the resource budget");
            ExitCode::from(3)
        }
        Err(CliError::Invalid(m)) => {
            eprintln!("qudo: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Resource(m)) => {
            eprintln!("qudo: {m}");
            ExitCode::from(3)
        }
        Err(CliError::Other(m)) => {
            eprintln!("qudo: {m}");
            ExitCode::from(1)
        }
    }
}

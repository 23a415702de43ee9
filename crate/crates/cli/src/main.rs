use std::io::{BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use serde::Serialize;

use renyi_core::bounds::{bound_report, spike_perturbation, witness_pair_uniform, DEFAULT_SLACK};
use renyi_core::estimators::{estimate_divergence, median_amplify, Poissonized};
use renyi_core::experiment::{
    distinguishing_check, empirical_complexity, run_sweep, ExperimentConfig, FamilyTemplate, CSV_HEADER,
};
use renyi_core::monitor::{MonitorConfig, StreamMonitor};
use renyi_core::verify::{run_verification, VerifyOptions};
use renyi_core::{Distribution, DivergenceOrder, Estimate, EstimatorConfig, Histogram, Method, Normalization};

mod config;

use config::{int, Layered};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] renyi_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Input(String),
    #[error("undefined estimate: every symbol count is below alpha = {0}, so the estimated power sum is 0")]
    Undefined(f64),
    #[error("{0} verification check(s) failed")]
    VerifyFailed(usize),
}

impl CliError {
    fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        CliError::Io { path: path.as_ref().to_path_buf(), source }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Undefined(_) => 2,
            _ => 1,
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

/// Rényi divergence estimation against a known reference distribution.
#[derive(Debug, Parser)]
#[command(name = "renyi", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate D_α(p‖q) from samples of p.
    Estimate(EstimateArgs),
    /// Monte Carlo sample-complexity sweep over alphabet and sample sizes (CSV).
    Sweep(SweepArgs),
    /// Witness pair behind the lower bound, with an optional empirical check.
    Lowerbound(LowerboundArgs),
    /// Evaluate the sufficient condition and the lower-bound constants.
    Bounds(BoundsArgs),
    /// Check the estimator against exact enumeration on small instances.
    Verify(VerifyArgs),
    /// Score a symbol stream against the reference in sliding windows.
    Monitor(MonitorArgs),
}

#[derive(Debug, Args)]
struct EstimateArgs {
    /// Reference distribution file.
    #[arg(long)]
    reference: PathBuf,
    /// Observed symbols, one index per line.
    #[arg(long, conflicts_with_all = ["p", "p_family"])]
    samples: Option<PathBuf>,
    /// Draw samples from this distribution file.
    #[arg(long, conflicts_with = "p_family")]
    p: Option<PathBuf>,
    /// Draw samples from a family: reference, uniform, witness, spike:C[@POS], almost_uniform:R[:SEED].
    #[arg(long)]
    p_family: Option<FamilyTemplate>,
    /// Number of samples to draw (per group).
    #[arg(short, long)]
    n: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, default_value = "corrected")]
    method: Method,
    #[arg(long, default_value = "exact")]
    normalization: Normalization,
    /// Median of this many independent groups (odd).
    #[arg(long, default_value_t = 1)]
    groups: u64,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// TOML file with the sweep settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    method: Option<Method>,
    #[arg(long)]
    normalization: Option<Normalization>,
    #[arg(long)]
    k_min: Option<u64>,
    #[arg(long)]
    k_max: Option<u64>,
    #[arg(long)]
    p: Option<FamilyTemplate>,
    #[arg(long)]
    q: Option<FamilyTemplate>,
    #[arg(long)]
    n_min: Option<u64>,
    #[arg(long)]
    n_max: Option<u64>,
    #[arg(long)]
    n_factor: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    slack: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(..=i64::MAX as u64))]
    seed: Option<u64>,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LowerboundArgs {
    #[arg(short, long)]
    k: Option<usize>,
    /// Reference family at size k.
    #[arg(long, default_value = "uniform", conflicts_with = "reference")]
    q: FamilyTemplate,
    /// Reference distribution file (instead of --q and -k).
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    /// Run the estimator on both members with a tenth of the implied sample count.
    #[arg(long)]
    check: bool,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[arg(short, long)]
    k: Option<usize>,
    #[arg(long, default_value = "uniform", conflicts_with = "reference")]
    q: FamilyTemplate,
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Distribution file for p.
    #[arg(long, conflicts_with = "p_family")]
    p: Option<PathBuf>,
    #[arg(long, default_value = "reference")]
    p_family: FamilyTemplate,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(short, long)]
    n: u64,
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_SLACK)]
    slack: f64,
    /// Symbol whose mass the perturbation raises; defaults to the smallest q.
    #[arg(long)]
    perturb_index: Option<usize>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, hide = true)]
    corrupt_normalization: bool,
}

#[derive(Debug, Args)]
struct MonitorArgs {
    /// TOML file with monitor settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long)]
    window: Option<u64>,
    /// Defaults to the window size.
    #[arg(long)]
    stride: Option<u64>,
    /// Alarm threshold in bits (default 0.5).
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Symbol stream, one index per line; standard input when absent.
    #[arg(long)]
    input: Option<PathBuf>,
}

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn read_distribution(path: &Path) -> CliResult<Distribution> {
    Distribution::parse(&read_text(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read_symbols(path: &Path) -> CliResult<Vec<u64>> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let s = line
            .parse()
            .map_err(|_| CliError::Input(format!("{}:{}: not a symbol index: {line:?}", path.display(), i + 1)))?;
        out.push(s);
    }
    Ok(out)
}

fn stdout_error(e: std::io::Error) -> CliError {
    CliError::io("<stdout>", e)
}

fn print_json(value: &impl Serialize) -> CliResult {
    let line = serde_json::to_string(value).map_err(|e| CliError::Input(e.to_string()))?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{line}").map_err(stdout_error)
}

fn reference_for(k: Option<usize>, template: FamilyTemplate, file: Option<&Path>) -> CliResult<Distribution> {
    match (file, k) {
        (Some(path), _) => read_distribution(path),
        (None, Some(k)) => Ok(template.reference(k)?),
        (None, None) => Err(CliError::Input("give either --reference or -k".into())),
    }
}

#[derive(Serialize)]
struct EstimateRecord {
    estimate_bits: Option<f64>,
    method: Method,
    n: u64,
    alpha: f64,
}

fn cmd_estimate(a: EstimateArgs) -> CliResult {
    let q = read_distribution(&a.reference)?;
    let ord = DivergenceOrder::new(a.alpha)?;
    let cfg = EstimatorConfig::new(a.method, a.normalization, ord)?;
    let (estimate, n) = if let Some(path) = &a.samples {
        if a.groups != 1 {
            return Err(CliError::Input("--groups needs generated samples".into()));
        }
        let h = Histogram::from_symbols(read_symbols(path)?, q.k())?;
        let n = h.total();
        (estimate_divergence(&h, &q, &cfg)?, n)
    } else {
        let p = match (&a.p, a.p_family) {
            (Some(path), _) => read_distribution(path)?,
            (None, Some(t)) => t.sampled(&q, ord)?,
            (None, None) => return Err(CliError::Input("give --samples, --p or --p-family".into())),
        };
        let n = a.n.ok_or_else(|| CliError::Input("-n is required when drawing samples".into()))?;
        let est = if cfg.wants_poissonized_samples() {
            median_amplify(&Poissonized(&p), &q, &cfg, n, a.groups, a.seed)?
        } else {
            median_amplify(&p, &q, &cfg, n, a.groups, a.seed)?
        };
        (est, n)
    };
    print_json(&EstimateRecord { estimate_bits: estimate.bits(), method: a.method, n, alpha: a.alpha })?;
    match estimate {
        Estimate::Bits(_) => Ok(()),
        Estimate::Undefined => Err(CliError::Undefined(a.alpha)),
    }
}

fn cmd_sweep(a: SweepArgs) -> CliResult {
    let mut layered = Layered::load(a.config.as_deref())?;
    layered.set("alpha", a.alpha);
    layered.set("method", a.method.map(|m| m.to_string()));
    layered.set("normalization", a.normalization.map(|m| m.to_string()));
    layered.set("k_min", int(a.k_min));
    layered.set("k_max", int(a.k_max));
    layered.set("p", a.p.map(|t| t.to_string()));
    layered.set("q", a.q.map(|t| t.to_string()));
    layered.set("n_min", int(a.n_min));
    layered.set("n_max", int(a.n_max));
    layered.set("n_factor", a.n_factor);
    layered.set("delta", a.delta);
    layered.set("epsilon", a.epsilon);
    layered.set("slack", a.slack);
    layered.set("trials", int(a.trials));
    layered.set("master_seed", int(a.seed));
    let file_output = layered.take_path("output")?;
    let output = a.output.or(file_output);
    let config: ExperimentConfig = layered.into_config()?;
    config.validate()?;

    let (sink, label): (Box<dyn Write>, PathBuf) = match &output {
        Some(path) => (Box::new(std::fs::File::create(path).map_err(|e| CliError::io(path, e))?), path.clone()),
        None => (Box::new(std::io::stdout().lock()), PathBuf::from("<stdout>")),
    };
    let mut sink = BufWriter::new(sink);
    let mut write_err = None;
    writeln!(sink, "{CSV_HEADER}").map_err(|e| CliError::io(&label, e))?;
    let rows = run_sweep(&config, |row| {
        if write_err.is_none() {
            if let Err(e) = writeln!(sink, "{}", row.to_csv()).and_then(|_| sink.flush()) {
                write_err = Some(e);
            }
        }
    })?;
    if let Some(e) = write_err {
        return Err(CliError::io(&label, e));
    }
    sink.flush().map_err(|e| CliError::io(&label, e))?;
    for k in config.k_values() {
        match empirical_complexity(&rows, k, 1.0 / 3.0) {
            Some(n) => eprintln!("k = {k}: empirical sample complexity {n}"),
            None => eprintln!("k = {k}: error probability stayed above 1/3 on the swept range"),
        }
    }
    Ok(())
}

fn cmd_lowerbound(a: LowerboundArgs) -> CliResult {
    let q = reference_for(a.k, a.q, a.reference.as_deref())?;
    let ord = DivergenceOrder::new(a.alpha)?;
    let pair = witness_pair_uniform(&q, ord)?;
    let mut record = serde_json::to_value(&pair).map_err(|e| CliError::Input(e.to_string()))?;
    if a.check {
        let check = distinguishing_check(&pair, ord, a.trials, a.seed)?;
        record["check"] = serde_json::to_value(check).map_err(|e| CliError::Input(e.to_string()))?;
    }
    print_json(&record)
}

fn cmd_bounds(a: BoundsArgs) -> CliResult {
    let q = reference_for(a.k, a.q, a.reference.as_deref())?;
    let ord = DivergenceOrder::new(a.alpha)?;
    let p = match &a.p {
        Some(path) => read_distribution(path)?,
        None => a.p_family.sampled(&q, ord)?,
    };
    let index = a.perturb_index.unwrap_or_else(|| q.argmin());
    let v = spike_perturbation(&p, index)?;
    let report = bound_report(&p, &q, ord, a.n, a.delta, a.epsilon, a.slack, &v)?;
    print_json(&report)
}

fn cmd_verify(a: VerifyArgs) -> CliResult {
    let results = run_verification(VerifyOptions { corrupt_normalization: a.corrupt_normalization, seed: a.seed })?;
    let mut out = std::io::stdout().lock();
    let w = |out: &mut std::io::StdoutLock, s: String| writeln!(out, "{s}").map_err(stdout_error);
    w(
        &mut out,
        format!("{:>2} {:>2} {:>5}  {:<17} {:>22} {:>22}  status", "k", "n", "alpha", "check", "oracle", "reference"),
    )?;
    for r in &results {
        w(
            &mut out,
            format!(
                "{:>2} {:>2} {:>5}  {:<17} {:>22.15e} {:>22.15e}  {}",
                r.k,
                r.n,
                r.alpha,
                r.check.to_string(),
                r.observed,
                r.expected,
                if r.passed { "ok" } else { "FAIL" }
            ),
        )?;
    }
    let failed: Vec<_> = results.iter().filter(|r| !r.passed).collect();
    w(&mut out, format!("{} checks, {} failed", results.len(), failed.len()))?;
    for r in &failed {
        eprintln!("failed {} at k = {}, n = {}, alpha = {}: p = {:?}, q = {:?}", r.check, r.k, r.n, r.alpha, r.p, r.q);
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::VerifyFailed(failed.len()))
    }
}

fn cmd_monitor(a: MonitorArgs) -> CliResult {
    let mut layered = Layered::load(a.config.as_deref())?;
    layered.set("window", int(a.window));
    layered.set("stride", int(a.stride));
    layered.set("threshold", a.threshold);
    layered.set("alpha", a.alpha);
    let reference = match a.reference {
        Some(path) => Some(path),
        None => layered.take_path("reference")?,
    };
    let reference = reference.ok_or_else(|| CliError::Config("reference distribution file is required".into()))?;
    let _ = layered.take_path("reference")?;
    if let Some(window) = layered.get("window").cloned() {
        layered.fill("stride", window);
    }
    layered.fill("threshold", 0.5);
    layered.fill("alpha", 2.0);
    let config: MonitorConfig = layered.into_config()?;
    let q = read_distribution(&reference)?;
    let mut monitor = StreamMonitor::new(q, config)?;

    let (input, label): (Box<dyn BufRead>, PathBuf) = match &a.input {
        Some(path) => (
            Box::new(std::io::BufReader::new(std::fs::File::open(path).map_err(|e| CliError::io(path, e))?)),
            path.clone(),
        ),
        None => (Box::new(std::io::stdin().lock()), PathBuf::from("<stdin>")),
    };
    let mut out = BufWriter::new(std::io::stdout().lock());
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| CliError::io(&label, e))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        // negative indices are outside the alphabet, like too-large ones
        let symbol = match line.parse::<i64>() {
            Ok(s) if s >= 0 => s as u64,
            Ok(_) => u64::MAX,
            Err(_) => {
                return Err(CliError::Input(format!("{}:{}: not a symbol index: {line:?}", label.display(), i + 1)))
            }
        };
        if let Some(record) = monitor.push(symbol)? {
            let json = serde_json::to_string(&record).map_err(|e| CliError::Input(e.to_string()))?;
            writeln!(out, "{json}").map_err(stdout_error)?;
        }
    }
    out.flush().map_err(stdout_error)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are input errors; 2 is reserved for undefined estimates
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Estimate(a) => cmd_estimate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Lowerbound(a) => cmd_lowerbound(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Monitor(a) => cmd_monitor(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("renyi: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

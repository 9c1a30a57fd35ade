//! `cogagg`: analyse, optimise, simulate and sweep the spectrum-aggregating
//! cognitive access protocol from JSON scenario files.
//!
//! Exit codes: 0 success, 1 usage or config error, 2 runtime error.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cogagg::scenario::{load_config, Config, SweepSimulation};
use cogagg::sim::{self, SimConfig, SimMode};
use cogagg::sweep::{self, OutputFormat};
use cogagg::{ScenarioConfig, SweepSpec};

#[derive(Parser, Debug)]
#[command(name = "cogagg", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form mu_p, pi, mu_s and stability verdicts for one scenario.
    Analyze(Common),
    /// Secondary service rate for every number of sensed bands, and the best one.
    Optimize(Common),
    /// Monte Carlo run of the protocol next to the closed-form rates.
    Simulate(SimulateArgs),
    /// One row per value of the sweep axis.
    Sweep(Common),
    /// Aggregation with and without a power limit against single-band selection.
    Compare(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Scenario or sweep file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Simulation seed (overrides `sim_seed` in sweep files).
    #[arg(long)]
    seed: Option<u64>,
    /// Simulated slots (overrides `sim_slots`; enables simulation in sweeps).
    #[arg(long)]
    slots: Option<u64>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value_t = Mode::Dominant)]
    mode: Mode,
    /// Slots excluded from statistics; defaults to 10% of the run.
    #[arg(long)]
    warmup: Option<u64>,
    /// Write a newline-delimited JSON record per slot here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Dominant,
    Original,
}

const DEFAULT_SEED: u64 = 1;
const DEFAULT_SLOTS: u64 = 100_000;

/// Errors in what the user asked for, as opposed to failures while evaluating it.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 1;
    }
    match err.downcast_ref::<cogagg::Error>() {
        Some(e) if e.is_config() => 1,
        _ => 2,
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Analyze(args) => {
            let scenario = load_scenario(&args)?;
            let row = sweep::analyze_scenario(&scenario)?;
            emit(&args, |out, format| match format {
                OutputFormat::Csv => sweep::write_csv(std::slice::from_ref(&row), out),
                OutputFormat::Json => sweep::write_json(&row, out),
            })
        }
        Command::Optimize(args) => {
            let scenario = load_scenario(&args)?;
            let result = sweep::optimize_scenario(&scenario)?;
            if let Some(label) = &scenario.label {
                eprintln!("{label}: m_opt = {} (mu_s = {})", result.m_opt, result.mu_s_opt);
            }
            emit(&args, |out, format| match format {
                OutputFormat::Csv => sweep::write_csv(&sweep::profile_rows(&result), out),
                OutputFormat::Json => sweep::write_json(&result, out),
            })
        }
        Command::Simulate(sim_args) => simulate(sim_args),
        Command::Sweep(args) => {
            let mut spec = load_sweep(&args)?;
            if args.slots.is_some() || args.seed.is_some() {
                let current = spec.simulation.unwrap_or(SweepSimulation {
                    slots: DEFAULT_SLOTS,
                    seed: DEFAULT_SEED,
                });
                spec.simulation = Some(SweepSimulation {
                    slots: args.slots.unwrap_or(current.slots),
                    seed: args.seed.unwrap_or(current.seed),
                });
            }
            let rows = sweep::run_sweep(&spec)?;
            emit(&args, |out, format| sweep::write_rows(&rows, format, out))
        }
        Command::Compare(args) => {
            let rows = match load_config(&args.config)? {
                Config::Sweep(spec) => sweep::run_compare(&spec)?,
                Config::Scenario(sc) => vec![sweep::compare_point(&sc, None)?],
            };
            emit(&args, |out, format| sweep::write_rows(&rows, format, out))
        }
    }
}

fn simulate(args: SimulateArgs) -> anyhow::Result<()> {
    let common = &args.common;
    let scenario = load_scenario(common)?;
    let slots = common.slots.unwrap_or(DEFAULT_SLOTS);
    let mode = match args.mode {
        Mode::Dominant => SimMode::Dominant,
        Mode::Original => SimMode::Original,
    };
    let mut cfg = SimConfig::new(scenario.clone(), mode, slots, common.seed.unwrap_or(DEFAULT_SEED));
    if let Some(w) = args.warmup {
        cfg.warmup = w;
    }
    if cfg.slots <= cfg.warmup {
        bail!(UsageError(format!(
            "--slots ({}) must exceed the warmup ({})",
            cfg.slots, cfg.warmup
        )));
    }

    let report = match &args.trace {
        Some(path) => {
            let file = fs::File::create(path)
                .with_context(|| format!("creating trace file {}", path.display()))?;
            let mut writer = io::BufWriter::new(file);
            let report = sim::run_with_trace(&cfg, &mut writer)?;
            writer
                .flush()
                .with_context(|| format!("writing trace file {}", path.display()))?;
            report
        }
        None => sim::run(&cfg)?,
    };
    let row = sweep::simulate_with_analysis(report, &scenario)?;
    emit(common, |out, format| match format {
        OutputFormat::Csv => sweep::write_csv(std::slice::from_ref(&row), out),
        OutputFormat::Json => sweep::write_json(&row, out),
    })
}

fn load_scenario(args: &Common) -> anyhow::Result<ScenarioConfig> {
    match load_config(&args.config)? {
        Config::Scenario(s) => Ok(s),
        Config::Sweep(_) => bail!(UsageError(format!(
            "{}: expected a scenario file, found a sweep (axis/values)",
            args.config.display()
        ))),
    }
}

fn load_sweep(args: &Common) -> anyhow::Result<SweepSpec> {
    match load_config(&args.config)? {
        Config::Sweep(s) => Ok(s),
        Config::Scenario(_) => bail!(UsageError(format!(
            "{}: expected a sweep file with `axis` and `values`",
            args.config.display()
        ))),
    }
}

/// Renders into memory, then writes the whole output at once.
fn emit<F>(args: &Common, render: F) -> anyhow::Result<()>
where
    F: FnOnce(&mut Vec<u8>, OutputFormat) -> cogagg::Result<()>,
{
    let format = match args.format {
        Format::Csv => OutputFormat::Csv,
        Format::Json => OutputFormat::Json,
    };
    let mut buf = Vec::new();
    render(&mut buf, format)?;
    match &args.out {
        Some(path) => {
            fs::write(path, &buf).with_context(|| format!("writing {}", path.display()))?
        }
        None => io::stdout().write_all(&buf).context("writing to stdout")?,
    }
    Ok(())
}

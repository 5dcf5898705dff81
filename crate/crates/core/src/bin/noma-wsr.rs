use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use noma_wsr::channel::{generate_instance, ChannelConfig};
use noma_wsr::experiment::{run_and_write, ExperimentId, ExperimentSpec};
use noma_wsr::model::Instance;
use noma_wsr::multi_carrier::{exhaustive_oracle, McpcOptions, OracleOptions, SolveReport, Solver};

#[derive(Parser)]
#[command(name = "noma-wsr", version, about = "Weighted sum-rate allocation for multi-carrier NOMA")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print the report as JSON.
    Solve(SolveArgs),
    /// Draw a random instance and write it as JSON.
    Generate(GenerateArgs),
    /// Run an experiment grid and write CSV.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct ChannelArgs {
    /// Channel config JSON; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long, env = "NOMA_WSR_SEED")]
    seed: Option<u64>,
}

impl ChannelArgs {
    fn load(&self) -> anyhow::Result<ChannelConfig> {
        let mut cfg = match &self.config {
            Some(p) => ChannelConfig::from_json_file(p)
                .with_context(|| format!("reading channel config {}", p.display()))?,
            None => ChannelConfig::default(),
        };
        if let Some(n) = self.n {
            cfg.subcarriers = n;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value = "jspa")]
    solver: Solver,
    /// Override the instance's multiplexing limit.
    #[arg(long = "M")]
    m: Option<usize>,
    #[arg(long, default_value_t = 1e-4)]
    epsilon: f64,
    /// Also run the exhaustive oracle and report the gap.
    #[arg(long)]
    oracle: bool,
    /// Write the per-iteration budget trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long = "K")]
    k: usize,
    #[arg(long = "M", default_value_t = 2)]
    m: usize,
    /// Stream index under the seed.
    #[arg(long, default_value_t = 0)]
    id: u64,
    #[command(flatten)]
    channel: ChannelArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// wsr-vs-k, opcount-vs-k, pf-frame or oracle-gap.
    id: ExperimentId,
    /// Comma-separated user counts.
    #[arg(long = "K", value_delimiter = ',')]
    k: Option<Vec<usize>>,
    #[arg(long = "M", value_delimiter = ',')]
    m: Option<Vec<usize>>,
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long = "solver", value_delimiter = ',')]
    solvers: Option<Vec<Solver>>,
    #[command(flatten)]
    channel: ChannelArgs,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Serialize)]
struct OracleSummary {
    wsr: f64,
    gap: f64,
    relative_gap: f64,
}

#[derive(Serialize)]
struct SolveOutput {
    #[serde(flatten)]
    report: SolveReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleSummary>,
}

fn print_stdout(text: &str) -> anyhow::Result<()> {
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn solve(args: SolveArgs) -> anyhow::Result<ExitCode> {
    let mut inst = Instance::from_json_file(&args.instance)
        .with_context(|| format!("reading instance {}", args.instance.display()))?;
    if let Some(m) = args.m {
        inst = inst.with_max_mux(m);
        inst.validate()?;
    }
    anyhow::ensure!(args.epsilon > 0.0, "--epsilon must be > 0");
    let opts = McpcOptions {
        epsilon: args.epsilon,
        keep_trace: args.trace.is_some(),
        ..McpcOptions::default()
    };
    let mut report = args.solver.solve(&inst, &opts)?;
    if let Some(path) = &args.trace {
        report.write_trace_csv(std::fs::File::create(path)?)?;
        report.trace.clear();
    }
    let oracle = if args.oracle {
        let best = exhaustive_oracle(&inst, &OracleOptions::default())?.wsr;
        Some(OracleSummary {
            wsr: best,
            gap: best - report.wsr,
            relative_gap: (best - report.wsr) / best.abs().max(f64::MIN_POSITIVE),
        })
    } else {
        None
    };
    let converged = report.converged;
    let json = serde_json::to_string_pretty(&SolveOutput { report, oracle })?;
    match &args.out {
        Some(p) => std::fs::write(p, json + "\n")?,
        None => print_stdout(&json)?,
    }
    Ok(if converged { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn generate(args: GenerateArgs) -> anyhow::Result<ExitCode> {
    let mut cfg = args.channel.load()?;
    cfg.max_mux = args.m;
    let inst = generate_instance(&cfg, args.k, args.id)?;
    let json = inst.to_json_string()?;
    match &args.out {
        Some(p) => std::fs::write(p, json + "\n")?,
        None => print_stdout(&json)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn experiment(args: ExperimentArgs) -> anyhow::Result<ExitCode> {
    let mut spec = ExperimentSpec::new(args.id, args.out);
    spec.channel = ChannelConfig {
        max_mux: spec.channel.max_mux,
        ..args.channel.load()?
    };
    if args.id == ExperimentId::OracleGap && args.channel.n.is_none() && args.channel.config.is_none() {
        spec.channel.subcarriers = 3;
    }
    if let Some(k) = args.k {
        spec.k_values = k;
    }
    if let Some(m) = args.m {
        spec.m_values = m;
    }
    if let Some(s) = args.seeds {
        spec.seeds = s;
    }
    if let Some(e) = args.epsilon {
        spec.epsilon = e;
    }
    if let Some(s) = args.solvers {
        spec.solvers = s;
    }
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.unwrap_or(0))
        .build()?;
    let paths = pool.install(|| run_and_write(&spec))?;
    for p in paths {
        eprintln!("wrote {}", p.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Generate(a) => generate(a),
        Command::Experiment(a) => experiment(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

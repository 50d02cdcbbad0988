//! vreward - verifiable reward scoring, evaluation and toy-policy simulation.

use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use vreward::harness::{
    emit_report, evaluate, load_records, EvalOptions, EvalRecord, FailurePolicy, ReportFormat,
    TaskSelection,
};
use vreward::parser::{analyze, analyze_payload, TaskKind, Violation};
use vreward::reward::{score_response, RewardBreakdown, RewardConfig};
use vreward::sim::{write_outputs, SimulationPlan};
use vreward::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "vreward",
    version,
    about = "Verifiable rewards and trajectory metrics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Aggregate IoU and DFD/HD/RMSE over a JSONL file
    Eval(EvalArgs),
    /// Dump the per-record reward breakdown as JSONL
    Reward(RewardArgs),
    /// Dump per-record format verdicts as JSONL
    Parse(ParseArgs),
    /// Train the toy policy under each reward variant
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TaskArg {
    Affordance,
    Trajectory,
    Both,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReportArg {
    Json,
    Csv,
    Table,
}

#[derive(clap::Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    task: TaskArg,
    #[arg(long, value_enum, default_value = "table")]
    report: ReportArg,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Score unparseable predictions as IoU 0 / distance 1000·√2 instead of excluding them
    #[arg(long)]
    penalize_failures: bool,
    /// Predictions are bare payloads without think/answer tags
    #[arg(long)]
    pre_parsed: bool,
    /// Worker threads for record scoring
    #[arg(long)]
    workers: Option<usize>,
    /// Model label in the report; defaults to the input file stem
    #[arg(long)]
    model: Option<String>,
}

#[derive(clap::Args, Debug)]
struct RewardArgs {
    #[arg(long)]
    input: PathBuf,
    /// Reward config (TOML, or JSON by extension)
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    k: Option<f64>,
    /// Path weights as DFD,HD,RMSE
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    #[arg(long)]
    format_reward: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
struct ParseArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    pre_parsed: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
struct SimulateArgs {
    /// Simulation plan (TOML, or JSON by extension); defaults when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct RewardLine<'a> {
    id: &'a str,
    task: TaskKind,
    #[serde(flatten)]
    breakdown: RewardBreakdown<f64>,
}

#[derive(Serialize)]
struct ParseLine<'a> {
    id: &'a str,
    task: TaskKind,
    compliant: bool,
    violations: Vec<Violation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reasoning: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval(a) => run_eval(a),
        Command::Reward(a) => run_reward(a),
        Command::Parse(a) => run_parse(a),
        Command::Simulate(a) => run_simulate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Error::Schema(errors) = &e {
                for err in errors {
                    eprintln!("line {}: {}", err.line, err.message);
                }
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn read_valid(path: &Path) -> Result<Vec<EvalRecord>> {
    load_records(path)?.into_valid()
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) => {
            let f = std::fs::File::create(p).map_err(|e| Error::Io {
                path: p.to_path_buf(),
                source: e,
            })?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn write_jsonl<T: Serialize>(out: &mut dyn Write, path: Option<&Path>, item: &T) -> Result<()> {
    let line = serde_json::to_string(item).map_err(|e| Error::Serialize(e.to_string()))?;
    writeln!(out, "{line}").map_err(|e| Error::Io {
        path: path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf),
        source: e,
    })
}

fn flush(out: &mut dyn Write, path: Option<&Path>) -> Result<()> {
    out.flush().map_err(|e| Error::Io {
        path: path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf),
        source: e,
    })
}

fn run_eval(args: EvalArgs) -> Result<()> {
    let records = read_valid(&args.input)?;
    let selection = match args.task {
        TaskArg::Affordance => TaskSelection::Affordance,
        TaskArg::Trajectory => TaskSelection::Trajectory,
        TaskArg::Both => TaskSelection::Both,
    };
    let opts = EvalOptions {
        pre_parsed: args.pre_parsed,
        failure_policy: if args.penalize_failures {
            FailurePolicy::Penalize
        } else {
            FailurePolicy::Exclude
        },
        workers: args.workers,
        ..EvalOptions::default()
    };
    let model = args.model.clone().unwrap_or_else(|| {
        args.input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "model".into())
    });
    let report = evaluate(&model, &records, selection, &opts)?;
    let format = match args.report {
        ReportArg::Json => ReportFormat::Json,
        ReportArg::Csv => ReportFormat::Csv,
        ReportArg::Table => ReportFormat::Table,
    };
    match &args.out {
        Some(path) => emit_report(&report, format, path),
        None => {
            let text = vreward::harness::render_report(&report, format)?;
            let mut out = open_out(None)?;
            out.write_all(text.as_bytes()).map_err(|e| Error::Io {
                path: "<stdout>".into(),
                source: e,
            })?;
            flush(&mut out, None)
        }
    }
}

fn reward_config(args: &RewardArgs) -> Result<RewardConfig<f64>> {
    let mut cfg = match &args.config {
        Some(p) => RewardConfig::from_file(p)?,
        None => RewardConfig::default(),
    };
    if let Some(t) = args.tau {
        cfg.tau = t;
    }
    if let Some(k) = args.k {
        cfg.k = k;
    }
    if let Some(w) = &args.weights {
        if w.len() != 3 {
            return Err(Error::InvalidConfig(format!(
                "--weights takes three values DFD,HD,RMSE, got {}",
                w.len()
            )));
        }
        cfg.path_weights.dfd = w[0];
        cfg.path_weights.hd = w[1];
        cfg.path_weights.rmse = w[2];
    }
    if let Some(f) = args.format_reward {
        cfg.format_reward_value = f;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run_reward(args: RewardArgs) -> Result<()> {
    let cfg = reward_config(&args)?;
    let records = read_valid(&args.input)?;
    let path = args.out.as_deref();
    let mut out = open_out(path)?;
    for rec in &records {
        let line = RewardLine {
            id: &rec.id,
            task: rec.task,
            breakdown: score_response(&rec.prediction, &rec.ground_truth, &cfg),
        };
        write_jsonl(&mut out, path, &line)?;
    }
    flush(&mut out, path)
}

fn run_parse(args: ParseArgs) -> Result<()> {
    let records = read_valid(&args.input)?;
    let path = args.out.as_deref();
    let mut out = open_out(path)?;
    for rec in &records {
        let a = if args.pre_parsed {
            analyze_payload::<f64>(&rec.prediction, rec.task)
        } else {
            analyze::<f64>(&rec.prediction, rec.task)
        };
        let line = ParseLine {
            id: &rec.id,
            task: rec.task,
            compliant: a.verdict.compliant,
            violations: a.verdict.violations,
            reasoning: a.parsed.map(|p| p.reasoning).filter(|r| !r.is_empty()),
        };
        write_jsonl(&mut out, path, &line)?;
    }
    flush(&mut out, path)
}

fn run_simulate(args: SimulateArgs) -> Result<()> {
    let plan = match &args.config {
        Some(p) => SimulationPlan::from_file(p)?,
        None => SimulationPlan::default(),
    };
    let curves = plan.run()?;
    write_outputs(&args.out, &plan.base, &curves)?;
    for c in &curves {
        eprintln!(
            "{:<8} seed {:<3} path error {:>8.2} -> {:>8.2}",
            c.variant.as_str(),
            c.seed,
            c.first().path_error(),
            c.last().path_error()
        );
    }
    Ok(())
}

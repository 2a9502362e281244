//! Command-line front-end. Reports go to `--out DIR/report.jsonl`, or to
//! stdout without `--out`; failures print one JSON error record on stderr.

use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cocycle_lab::driver::{
    certify, execute, execute_resume, export_run, first_difference, single_step, Checkpoint, Pipeline,
    PipelineConfig, RunReport,
};
use cocycle_lab::Error;

#[derive(Parser)]
#[command(name = "cocycle-lab", about = "Exact constructions of bounded ergodic cocycles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `run.rounds`.
    #[arg(long)]
    rounds: Option<usize>,
    /// Overrides `run.max-depth`.
    #[arg(long)]
    depth: Option<u32>,
    /// Accepted for scripts; every pipeline is deterministic already.
    #[arg(long)]
    seedless: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// One modification step from f = 1.
    Step(Common),
    /// The recursion over a finite generating set.
    Run {
        #[command(flatten)]
        common: Common,
        /// Continue from a checkpoint written by an aborted run.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// The recursion over a generator stream.
    RunInfinite {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Run with the boundedness certificate.
    Bounded(Common),
    /// Run with the norm bound c(σ).
    NormBounded(Common),
    /// Re-check a stored report; with --config also re-run and compare.
    Certify {
        report: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// CSV exports of the terminal function, its level sets, the ladder and skew edges.
    Export(Common),
}

fn load(c: &Common) -> Result<PipelineConfig, Error> {
    let mut config = PipelineConfig::load(&c.config)?;
    if let Some(r) = c.rounds {
        config.run.rounds = r;
    }
    if let Some(d) = c.depth {
        config.run.max_depth = d;
    }
    Ok(config)
}

fn emit(report: &RunReport, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("report.jsonl"), report.to_jsonl())?;
        }
        None => print!("{}", report.to_jsonl()),
    }
    Ok(())
}

fn error_record(kind: &str, message: &str) {
    let rec = serde_json::json!({ "record": "error", "kind": kind, "message": message });
    eprintln!("{rec}");
}

fn run_pipeline(c: &Common, pipeline: Pipeline, resume: Option<&Path>) -> Result<ExitCode, Error> {
    let config = load(c)?;
    let done = match resume {
        Some(p) => {
            let cp: Checkpoint = serde_json::from_str(&std::fs::read_to_string(p)?)?;
            execute_resume(&config, cp)?
        }
        None => execute(&config, pipeline)?,
    };
    emit(&done.report, c.out.as_deref())?;
    if let Some(e) = &done.error {
        if let (Some(cp), Some(dir)) = (&done.checkpoint, &c.out) {
            std::fs::write(dir.join("checkpoint.json"), serde_json::to_string_pretty(cp)?)?;
        }
        error_record(e.kind(), &e.to_string());
        return Ok(ExitCode::from(2));
    }
    let bad = certify(&done.report);
    if let Some(v) = bad.first() {
        error_record("PostconditionFailure", &v.to_string());
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn main_inner(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Step(c) => {
            let config = load(&c)?;
            let group = config.group.build()?;
            let report = cocycle_lab::with_group!(&group, g => single_step(g, &config)?.1);
            emit(&report, c.out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { common, resume } => run_pipeline(&common, Pipeline::Run, resume.as_deref()),
        Command::RunInfinite { common, resume } => run_pipeline(&common, Pipeline::RunInfinite, resume.as_deref()),
        Command::Bounded(c) => run_pipeline(&c, Pipeline::Bounded, None),
        Command::NormBounded(c) => run_pipeline(&c, Pipeline::NormBounded, None),
        Command::Certify { report, config } => {
            let stored = RunReport::read_jsonl(BufReader::new(std::fs::File::open(&report)?))?;
            if let Some(v) = certify(&stored).first() {
                error_record("PostconditionFailure", &v.to_string());
                return Ok(ExitCode::from(1));
            }
            if let Some(path) = config {
                let config = PipelineConfig::load(&path)?;
                let pipeline = match config.run.mode {
                    cocycle_lab::driver::Mode::Finite => Pipeline::Run,
                    cocycle_lab::driver::Mode::Infinite => Pipeline::RunInfinite,
                };
                let fresh = execute(&config, pipeline)?;
                if let Some(diff) = first_difference(&stored, &fresh.report) {
                    error_record("ReportMismatch", &diff);
                    return Ok(ExitCode::from(1));
                }
            }
            println!("certified: {} records, {} checks", stored.records.len(), stored.all_checks().count());
            Ok(ExitCode::SUCCESS)
        }
        Command::Export(c) => {
            let config = load(&c)?;
            let dir = c.out.clone().unwrap_or_else(|| PathBuf::from("export"));
            for p in export_run(&config, &dir)? {
                println!("{}", p.display());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            error_record(e.kind(), &e.to_string());
            ExitCode::from(2)
        }
    }
}

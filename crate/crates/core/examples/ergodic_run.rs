//! Runs the approximation recursion from a config and prints the report
//! summary.
//!
//!     cargo run --example ergodic_run -- configs/z2.toml 2

use std::time::Instant;

use cocycle_lab::driver::{execute, Mode, Pipeline, PipelineConfig, Record};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| "configs/z2.toml".into());
    let mut config = PipelineConfig::load(path.as_ref())?;
    if let Some(r) = args.next() {
        config.run.rounds = r.parse()?;
    }
    let start = Instant::now();
    let pipeline = match config.run.mode {
        Mode::Finite => Pipeline::Run,
        Mode::Infinite => Pipeline::RunInfinite,
    };
    let out = execute(&config, pipeline)?;
    for rec in &out.report.records {
        match rec {
            Record::Round(r) => println!(
                "round {}: A={} g={} level={} m={} depth={} eps={} delta={} values={:?}",
                r.round, r.a, r.g, r.level, r.m, r.depth, r.eps, r.delta, r.values
            ),
            Record::Connectivity { ladder, .. } => {
                let counts: Vec<usize> = ladder.iter().map(|r| r.components).collect();
                println!("ladder components by level: {counts:?}");
            }
            Record::FinalEvc { round, source, .. } => println!("round {round} witness on the final cocycle: {source}"),
            Record::EssentialValue { g, verdict, .. } => println!("essential value {g}: {verdict}"),
            Record::Summary { status, error, .. } => println!("status: {status} {}", error.clone().unwrap_or_default()),
            _ => {}
        }
    }
    let failed: Vec<String> = out
        .report
        .all_checks()
        .filter(|(_, c)| !c.holds())
        .map(|(k, c)| format!("{k}: {c}"))
        .collect();
    println!("{} checks, {} failed {:?}", out.report.all_checks().count(), failed.len(), failed);
    println!("elapsed {:.1?}", start.elapsed());
    Ok(())
}

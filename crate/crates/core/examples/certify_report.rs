//! Writes a report, re-checks it, then edits one rational and shows which
//! clause the checker names.
//!
//!     cargo run --example certify_report -- configs/z2.toml

use cocycle_lab::driver::{certify, execute, Pipeline, PipelineConfig, Record, RunReport};
use cocycle_lab::rational::q;

fn main() -> anyhow::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "configs/z2.toml".into());
    let mut config = PipelineConfig::load(path.as_ref())?;
    config.run.rounds = config.run.rounds.min(2);
    let report = execute(&config, Pipeline::Run)?.report;
    let text = report.to_jsonl();
    println!("{} records, {} stored checks", report.records.len(), report.all_checks().count());
    println!("untouched: {} violations", certify(&report).len());

    let mut edited = RunReport::read_jsonl(text.as_bytes())?;
    for rec in &mut edited.records {
        if let Record::Round(r) = rec {
            r.eps = q(1, 3);
            break;
        }
    }
    for v in certify(&edited) {
        println!("edited: {v}");
    }
    Ok(())
}

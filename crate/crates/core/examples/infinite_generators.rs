//! The recursion over a stream of commuting involutions: round n controls
//! the first n generators, and each σ_j may take values in K_j = F_j F_j⁻¹.
//!
//!     cargo run --example infinite_generators -- configs/involutions.toml

use cocycle_lab::driver::{execute, Pipeline, PipelineConfig, Record};

fn main() -> anyhow::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "configs/involutions.toml".into());
    let config = PipelineConfig::load(path.as_ref())?;
    let out = execute(&config, Pipeline::RunInfinite)?;
    for rec in &out.report.records {
        match rec {
            Record::Round(r) => println!(
                "round {}: {} generators, level {} -> {}, eps {}, values {:?}",
                r.round, r.generators, r.level, r.m, r.eps, r.values
            ),
            Record::Boundedness(b) => println!("{}: K = {:?}, taken {:?}", b.generator, b.allowed, b.observed),
            Record::Summary { status, .. } => println!("{status}"),
            _ => {}
        }
    }
    Ok(())
}

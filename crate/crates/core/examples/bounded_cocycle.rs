//! The bounded-cocycle pipeline on Z²: every increment of the terminal
//! function lies in K = {0, ±e1, ±e2}.
//!
//!     cargo run --example bounded_cocycle -- configs/z2-squared.toml

use cocycle_lab::driver::{execute, Pipeline, PipelineConfig};

fn main() -> anyhow::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "configs/z2-squared.toml".into());
    let config = PipelineConfig::load(path.as_ref())?;
    let out = execute(&config, Pipeline::Bounded)?;
    for b in out.report.boundedness() {
        let ok = b.checks.iter().all(|c| c.holds());
        println!(
            "{}: K = {:?}, values taken {:?}, undefined mass {}, {}",
            b.generator,
            b.allowed,
            b.observed,
            b.undefined_measure,
            if ok { "bounded" } else { "NOT bounded" }
        );
    }
    Ok(())
}

//! Norm bounds c(σ) for the direct sum of countably many copies of Z under
//! the sup norm, with the unit vectors and then an H of norm 5.
//!
//!     cargo run --example norm_bounded -- configs/direct-sum.toml

use cocycle_lab::driver::{execute, Pipeline, PipelineConfig};

fn main() -> anyhow::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "configs/direct-sum.toml".into());
    let mut config = PipelineConfig::load(path.as_ref())?;
    for generators in [config.group.generators.clone(), vec!["(5)".into(), "(0,1)".into()]] {
        config.group.generators = generators;
        println!("H = {:?}", config.group.generators);
        for rounds in 0..=config.run.rounds {
            config.run.rounds = rounds;
            let out = execute(&config, Pipeline::NormBounded)?;
            let c: Vec<String> = out
                .report
                .boundedness()
                .map(|b| format!("{}={}", b.generator, b.norm_bound.clone().unwrap_or_default()))
                .collect();
            println!("  {rounds} rounds: c = {}", c.join(" "));
        }
        config.run.rounds = 2;
    }
    Ok(())
}

//! Skew-product connectivity: a coboundary with values in a proper subgroup
//! never connects, while a step output connects at its terminal level.
//!
//!     cargo run --example skew_ladder

use cocycle_lab::cocycle::{coboundary_kernel, StepFunction};
use cocycle_lab::driver::{single_step, PipelineConfig};
use cocycle_lab::evc::{skew_connectivity, skew_ladder_all};
use cocycle_lab::group::FiniteGroup;

fn counts(r: &[cocycle_lab::evc::ConnectivityReport]) -> Vec<usize> {
    r.iter().map(|c| c.components).collect()
}

fn main() -> anyhow::Result<()> {
    let z4 = FiniteGroup::cyclic(4);
    // values in {0, 2}
    let f = StepFunction::from_fn(3, |x| if x % 3 == 0 { 2u16 } else { 0 });
    let literal = skew_connectivity(&z4, &coboundary_kernel(&z4, &f, 6, 6)?)?;
    println!("Z/4 coboundary into {{0,2}}: literal graph {} components", literal.components);
    println!("  ladder {:?}", counts(&skew_ladder_all(&z4, &f, 1, 6)?));

    let config: PipelineConfig = PipelineConfig::from_toml(
        r#"
        name = "z3-step"
        [group]
        kind = "cyclic"
        order = 3
        generators = ["1"]
        [measure]
        kind = "uniform"
        [action]
        kind = "adding-machine"
        [run]
        eps = "1/4"
        max-depth = 14
        "#,
    )?;
    let z3 = FiniteGroup::cyclic(3);
    let (out, _) = single_step(&z3, &config)?;
    let ladder = skew_ladder_all(&z3, &out.f_tilde, 1, out.depth)?;
    let control = skew_ladder_all(&z3, &StepFunction::constant(0, 0u16), 1, out.depth)?;
    println!("Z/3 after one step (depth {}): ladder {:?}", out.depth, counts(&ladder));
    println!("  constant control {:?}", counts(&control));
    Ok(())
}

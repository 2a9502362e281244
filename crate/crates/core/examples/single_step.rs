//! One modification step on the reference instance: Z/2, adding machine,
//! uniform measure, f = 1, n = 1, eps = 1/4, Z = X, g = 1.
//!
//!     cargo run --example single_step

use cocycle_lab::cocycle::StepFunction;
use cocycle_lab::group::FiniteGroup;
use cocycle_lab::lemma::{construct_step, StepInput};
use cocycle_lab::odometer::{ActionKind, CylinderSet, GammaAction, ProductMeasure};
use cocycle_lab::rational::q;

fn main() -> anyhow::Result<()> {
    let group = FiniteGroup::cyclic(2);
    let mu = ProductMeasure::uniform();
    let action = GammaAction::new(ActionKind::AddingMachine, 24)?;
    let f = StepFunction::constant(0, 0u16);
    let z = CylinderSet::full(0);
    let input = StepInput {
        group: &group,
        mu: &mu,
        gens: &action.generators,
        f: &f,
        n: 1,
        h_set: &[1],
        z: &z,
        g: &1,
        k: 1,
        eps: q(1, 4),
        max_depth: 16,
    };
    let out = construct_step(&input)?;
    println!("m = {}, working depth {}", out.m, out.depth);
    println!("eps = {}, eps' = {}, Lambda = {}, delta = {}", out.eps, out.eps_prime, out.lambda, out.delta);
    println!("mu(Z00) = {}", out.z00.measure(&mu)?);
    println!("changed increment mass per generator: {:?}", out.changes.iter().map(|c| c.to_string()).collect::<Vec<_>>());
    for c in &out.checks {
        println!("  {} {c}", if c.holds() { "ok  " } else { "FAIL" });
    }
    Ok(())
}

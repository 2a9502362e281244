//! Exact cylinder measures, Radon-Nikodym derivatives and how far the
//! odometer distorts a biased product measure.
//!
//!     cargo run --example measure_algebra

use cocycle_lab::odometer::{radon_nikodym, ActionKind, GammaAction, ProductMeasure, Word};
use cocycle_lab::rational::q;

fn main() -> anyhow::Result<()> {
    let schedules = [
        ("uniform", ProductMeasure::uniform()),
        ("bernoulli 1/3", ProductMeasure::bernoulli(&q(1, 3))?),
        ("period-2 (1/2, 1/3)", ProductMeasure::periodic(&[q(1, 2), q(1, 3)])?),
    ];
    let x = Word::parse("0110")?;
    let y = Word::parse("1011")?;
    let odometer = GammaAction::new(ActionKind::AddingMachine, 12)?;
    for (name, mu) in &schedules {
        println!("{name}");
        let children = mu.cylinder_measure(&Word::parse("01100")?) + mu.cylinder_measure(&Word::parse("01101")?);
        println!("  mu[{x}] = {} = mu[{x}0] + mu[{x}1] = {children}", mu.cylinder_measure(&x));
        println!("  rho({x}, {y}) = {}", radon_nikodym(mu, &x, &y)?);
        for g in &odometer.generators {
            println!("  {}: largest cylinder ratio {}", g.name, g.map.max_ratio(mu));
        }
    }
    Ok(())
}

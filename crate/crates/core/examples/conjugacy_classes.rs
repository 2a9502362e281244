//! Conjugacy classes, covering numbers and the constant δ = 1/(3Λ) for the
//! shipped finite groups.
//!
//!     cargo run --example conjugacy_classes

use cocycle_lab::evc::delta_for;
use cocycle_lab::group::{conjugacy_class, conjugate_closure, covering_number, FiniteGroup, Group, DEFAULT_CLASS_BUDGET};

fn main() -> anyhow::Result<()> {
    for group in [FiniteGroup::cyclic(4), FiniteGroup::symmetric(3), FiniteGroup::dihedral(4)] {
        println!("{} (order {})", group.name(), group.len());
        let mut seen = Vec::new();
        for g in group.elements().unwrap_or_default() {
            let class = conjugacy_class(&group, &g, DEFAULT_CLASS_BUDGET)?;
            let mut members: Vec<String> = class.elements().iter().map(|e| group.format(e)).collect();
            members.sort();
            if seen.contains(&members) {
                continue;
            }
            let cover = covering_number(&group, &g, 1, DEFAULT_CLASS_BUDGET)?;
            println!("  {:<24} Lambda={} delta={}", members.join(" "), cover.lambda, delta_for(&group, &g, 1)?);
            seen.push(members);
        }
    }
    let s4 = FiniteGroup::symmetric(4);
    let h = [s4.parse("(1 2)")?];
    let closure = conjugate_closure(&s4, &h, DEFAULT_CLASS_BUDGET)?;
    println!("S4: conjugate closure of (1 2) has {} elements", closure.elements.len());
    Ok(())
}

use super::{StepInput, StepOutput};
use crate::cocycle::{delta, dist, is_incremental, is_inner, Increment, StepFunction};
use crate::error::Result;
use crate::group::{conjugacy_class, covering_number, Group, DEFAULT_CLASS_BUDGET};
use crate::ledger::{Check, Rel};
use crate::odometer::{orbit_overflow, CylinderSet, Generator, ProductMeasure};
use crate::rational::{abs, one, q, q_ratio, zero, Q};

/// Increments of `f` for every generator at depth `d`; the remainder stays
/// undefined.
pub fn increments<G: Group>(
    group: &G,
    mu: &ProductMeasure,
    f: &StepFunction<G::Elem>,
    gens: &[Generator],
    d: u32,
) -> Result<Vec<Increment<G::Elem>>> {
    gens.iter().map(|g| delta(group, f, &g.map, d, mu, &one())).collect()
}

/// Per generator, `μ{Δ_σ f_new ≠ Δ_σ f_old}` with undefined points counted,
/// and the set where all increments agree.
pub fn increment_changes<E: Clone + Eq + std::hash::Hash>(
    mu: &ProductMeasure,
    old: &[Increment<E>],
    new: &[Increment<E>],
) -> Result<(Vec<Q>, CylinderSet)> {
    let d = new.first().map_or(0, |i| i.depth);
    let table = mu.table(d)?;
    let mut all = CylinderSet::full(d);
    let mut changes = Vec::new();
    for (a, b) in old.iter().zip(new) {
        let mut num = 0u128;
        for x in 0..1u64 << d {
            let same = matches!((a.at(x), b.at(x)), (Some(u), Some(v)) if u == v);
            if !same {
                num += table.numer[x as usize];
                all.remove(x);
            }
        }
        changes.push(q_ratio(num, table.den));
    }
    Ok((changes, all))
}

/// Re-derives every promised property from `(f̃, θ, Z_00, m, h, ε)` and the
/// original input alone.
pub fn validate_step<G: Group>(
    input: &StepInput<'_, G>,
    out: &StepOutput<G::Elem>,
) -> Result<(Vec<Check>, Vec<Q>)> {
    let (group, mu, gens) = (input.group, input.mu, input.gens);
    let w = out.f_tilde.depth.max(out.theta.depth).max(out.z00.depth);
    let eps = &out.eps;
    let mut checks = Vec::new();

    let o = orbit_overflow(mu, gens, out.m, w, Some(&one()))?;
    checks.push(Check::new("overflow", o.measure, Rel::Lt, eps.clone()));
    checks.push(Check::flag("more-refined", out.m > input.n));

    checks.push(Check::flag(
        "inner",
        is_inner(group, mu, &out.f_tilde, gens, out.m, w)?.pass,
    ));
    let h_inv = group.inv(&out.h);
    let inc = is_incremental(
        group,
        mu,
        &out.f_tilde,
        gens,
        |v| input.in_h(v) || *v == out.h || *v == h_inv,
        w,
        &one(),
    )?;
    checks.push(Check::flag("incremental", inc.pass));
    checks.push(Check::flag(
        "h-conjugate",
        conjugacy_class(group, input.g, DEFAULT_CLASS_BUDGET)?.contains(&out.h),
    ));

    let table = mu.table(w)?;
    let z = input.z.refine(w.max(input.z.depth));
    let z00 = out.z00.refine(w);
    let mut inside = true;
    let mut disjoint = true;
    let mut on_target = true;
    let mut worst = zero();
    for x in z00.iter() {
        let y = out.theta.apply(x);
        inside &= z.contains(x) && z.contains(y);
        disjoint &= !z00.contains(y);
        let v = group.mul(out.f_tilde.at(y), &group.inv(out.f_tilde.at(x)));
        on_target &= group.in_translate(input.k, input.g, &v);
        let r = abs(&(q_ratio(table.numer[y as usize], table.numer[x as usize]) - one()));
        worst = worst.max(r);
    }
    checks.push(Check::flag("core-inside", inside));
    checks.push(Check::flag("core-disjoint", disjoint));
    let lambda = covering_number(group, input.g, input.k, DEFAULT_CLASS_BUDGET)?.lambda;
    let delta_ = q(1, 3 * lambda as i64);
    checks.push(Check::new("delta", out.delta.clone(), Rel::Eq, delta_.clone()));
    checks.push(Check::new(
        "core-mass",
        table.of_set(&z00),
        Rel::Gt,
        delta_ * table.of_set(&z),
    ));
    checks.push(Check::flag("core-target", on_target));
    checks.push(Check::new("core-derivative", worst, Rel::Lt, eps.clone()));

    let old = increments(group, mu, input.f, gens, w)?;
    let new = increments(group, mu, &out.f_tilde, gens, w)?;
    let (changes, agree) = increment_changes(mu, &old, &new)?;
    checks.push(Check::new("agreement", table.of_set(&agree), Rel::Gt, one() - eps));
    let d = dist(group, mu, &old, &new, gens.len() as u32)?;
    checks.push(Check::new("distance", d.value, Rel::Lt, eps.clone()));
    Ok((checks, changes))
}

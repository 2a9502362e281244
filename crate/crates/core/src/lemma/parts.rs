use std::collections::{BTreeMap, HashMap};

use crate::cocycle::{ExtendedStepFunction, StepFunction};
use crate::error::{Error, Result};
use crate::group::{conjugacy_class, covering_number, Group, DEFAULT_CLASS_BUDGET};
use crate::odometer::{
    fa1_involution, invariant_hull, lex_key, mask, orbit_overflow, CylinderSet, Fa1Involution,
    FiniteDepthMap, Generator, ProductMeasure,
};
use crate::rational::{one, q, zero, Q};

/// `ε'` with `Σ_σ μ(σM) < ε` whenever `μ(M) < ε'`: the largest `t` where the
/// summed modulus of every generator stays at `ε`, capped below `ε`.
pub fn choose_eps_prime(mu: &ProductMeasure, gens: &[Generator], eps: &Q) -> Q {
    let cap = eps * q(1023, 1024);
    let lines: Vec<Vec<(Q, Q)>> = gens.iter().map(|g| g.map.modulus_lines(mu)).collect();
    let total = |t: &Q| -> Q {
        lines
            .iter()
            .map(|ls| ls.iter().map(|(r, c)| r * t + c).min().unwrap_or_else(zero))
            .sum()
    };
    // the sum is concave and piecewise linear; it bends only where two lines
    // of one generator cross
    let mut knots = vec![zero()];
    for ls in &lines {
        for (i, (r1, c1)) in ls.iter().enumerate() {
            for (r2, c2) in &ls[i + 1..] {
                if r1 != r2 {
                    let t = (c2 - c1) / (r1 - r2);
                    if t > zero() {
                        knots.push(t);
                    }
                }
            }
        }
    }
    knots.sort();
    knots.dedup();
    let last = knots.last().cloned().unwrap_or_else(zero);
    knots.push(&last + one());
    for w in knots.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let (fa, fb) = (total(a), total(b));
        if fb >= *eps || b == knots.last().unwrap() {
            let slope = (&fb - &fa) / (b - a);
            if slope <= zero() {
                return cap;
            }
            return (a + (eps - fa) / slope).min(cap);
        }
    }
    cap
}

/// `Z_0 ⊆ Z` and `h ∈ g^•` with `f(x)⁻¹ g f(x) ∈ U_k h` on `Z_0`.
#[derive(Clone, Debug)]
pub struct Z0Choice<E> {
    pub z0: CylinderSet,
    pub h: E,
    pub lambda: usize,
}

/// Takes the `h` in `g^•` whose set `Z_0` is heaviest, ties going to the first
/// class member.
pub fn find_z0_h<G: Group>(
    group: &G,
    mu: &ProductMeasure,
    f: &StepFunction<G::Elem>,
    z: &CylinderSet,
    g: &G::Elem,
    k: usize,
) -> Result<Z0Choice<G::Elem>> {
    let lambda = covering_number(group, g, k, DEFAULT_CLASS_BUDGET)?.lambda;
    let class = conjugacy_class(group, g, DEFAULT_CLASS_BUDGET)?;
    let d = f.depth.max(z.depth);
    let table = mu.table(d)?;
    let conj: Vec<G::Elem> = f
        .values()
        .iter()
        .map(|v| group.mul(&group.mul(&group.inv(v), g), v))
        .collect();
    let mut best: Option<(u128, G::Elem, CylinderSet)> = None;
    for h in class.elements() {
        let ok: Vec<bool> = conj.iter().map(|c| group.in_translate(k, &h, c)).collect();
        let z0 = CylinderSet::from_fn(d, |x| z.contains(x) && ok[f.index_at(x) as usize]);
        let w = table.sum_numer(z0.iter());
        if best.as_ref().is_none_or(|b| w > b.0) {
            best = Some((w, h, z0));
        }
    }
    let (w, h, z0) = best.expect("conjugacy classes are non-empty");
    let mu_z = table.sum_numer(z.refine(d).iter());
    if w * (lambda as u128) < mu_z {
        return Err(Error::PostconditionFailure {
            clause: "z0-mass".into(),
            detail: format!("no conjugate covers 1/{lambda} of Z"),
        });
    }
    Ok(Z0Choice { z0, h, lambda })
}

/// The `S_n`-invariant partition by fingerprint, described on suffixes.
#[derive(Clone, Debug)]
pub struct Classification {
    pub n: u32,
    /// Depth of the suffix words (coordinates `n+1..`) the classes depend on.
    pub suffix_depth: u32,
    /// `Y'_1..Y'_s` as sets of suffix words.
    pub classes: Vec<CylinderSet>,
}

fn fingerprint<E: Clone + Eq + std::hash::Hash>(
    fstar: &ExtendedStepFunction<E>,
    prefix: &[u128],
    n: u32,
    a: u64,
) -> Vec<(u32, u128)> {
    let mut fp: Vec<(u32, u128)> = (0..1u64 << n)
        .map(|t| (fstar.index_at(t | a << n), prefix[t as usize]))
        .collect();
    fp.sort_unstable();
    fp
}

/// Groups suffixes `a` by the multiset `{(f*(t, a), μ_n[t]) : t ∈ X_n}`.
pub fn classify_classes<E: Clone + Eq + std::hash::Hash>(
    fstar: &ExtendedStepFunction<E>,
    n: u32,
    mu: &ProductMeasure,
) -> Result<Classification> {
    let sd = fstar.depth.saturating_sub(n);
    let prefix = mu.table(n)?.numer;
    let mut order: Vec<Vec<(u32, u128)>> = Vec::new();
    let mut members: HashMap<Vec<(u32, u128)>, Vec<u64>> = HashMap::new();
    for a in 0..1u64 << sd {
        let fp = fingerprint(fstar, &prefix, n, a);
        let slot = members.entry(fp.clone()).or_default();
        if slot.is_empty() {
            order.push(fp);
        }
        slot.push(a);
    }
    let classes = order
        .iter()
        .map(|fp| {
            let m = &members[fp];
            CylinderSet::from_fn(sd, |a| m.contains(&a))
        })
        .collect();
    Ok(Classification {
        n,
        suffix_depth: sd,
        classes,
    })
}

/// `θ_{a,b}`: the prefix bijection matching `(f*(t, a), μ_n[t])` to
/// `(f*(θt, b), μ_n[θt])`, pairing equal keys in lexicographic order.
pub fn prefix_bijection<E: Clone + Eq + std::hash::Hash>(
    fstar: &ExtendedStepFunction<E>,
    prefix: &[u128],
    n: u32,
    a: u64,
    b: u64,
) -> Result<Vec<u32>> {
    let keyed = |s: u64| {
        let mut by: BTreeMap<(u32, u128), Vec<u64>> = BTreeMap::new();
        for t in 0..1u64 << n {
            by.entry((fstar.index_at(t | s << n), prefix[t as usize]))
                .or_default()
                .push(t);
        }
        for v in by.values_mut() {
            v.sort_by_key(|&t| lex_key(t, n));
        }
        by
    };
    let (ka, kb) = (keyed(a), keyed(b));
    let mut perm = vec![0u32; 1 << n];
    for (key, ts) in &ka {
        let us = kb
            .get(key)
            .filter(|us| us.len() == ts.len())
            .ok_or_else(|| Error::invalid("suffixes lie in different fingerprint classes"))?;
        for (t, u) in ts.iter().zip(us) {
            perm[*t as usize] = *u as u32;
        }
    }
    Ok(perm)
}

/// The chosen `m` with the saturated overflow set `B_m`.
#[derive(Clone, Debug)]
pub struct MChoice {
    pub m: u32,
    /// `B_m` at depth `m + 1`.
    pub b_m: CylinderSet,
    pub b_m_measure: Q,
    /// `D_1..D_s` as subsets of `{0,1}^{m-n}`.
    pub cells: Vec<CylinderSet>,
}

/// Smallest `m >= max(n+1, min_m)` with `μ(B_m) < ε'`. With `m` at least the
/// depth the classes depend on, the cells `D_j` reproduce `Y'_j` exactly.
pub fn choose_m(
    mu: &ProductMeasure,
    gens: &[Generator],
    n: u32,
    min_m: u32,
    eps_prime: &Q,
    classes: &Classification,
    max_m: u32,
) -> Result<MChoice> {
    let start = (n + 1).max(min_m).max(n + classes.suffix_depth);
    for m in start..=max_m {
        let o = orbit_overflow(mu, gens, m, m + 1, Some(&one()))?;
        let b_m = invariant_hull(&o.set, n);
        let b_m_measure = b_m.measure(mu)?;
        if b_m_measure < *eps_prime {
            let cells = classes
                .classes
                .iter()
                .map(|y| y.refine(m - n))
                .collect();
            return Ok(MChoice {
                m,
                b_m,
                b_m_measure,
                cells,
            });
        }
    }
    Err(Error::DepthExhausted(format!(
        "no m in {start}..={max_m} brings the saturated overflow below {}",
        crate::rational::fmt_q(eps_prime)
    )))
}

/// `τ = id × ι` on `X^n` and the halves `A`, `C = τA`.
#[derive(Clone, Debug)]
pub struct TauBuild {
    pub iota: Fa1Involution,
    /// Working depth on `X`.
    pub depth: u32,
    /// `τ` on suffix words of depth `depth - n`.
    pub tau: FiniteDepthMap,
    pub a: CylinderSet,
    pub c: CylinderSet,
    /// Suffixes whose `X^m` part `ι` leaves fixed; they sit in `A`.
    pub fixed: CylinderSet,
}

pub fn build_tau(mu: &ProductMeasure, n: u32, m: u32, eps: &Q, max_depth: u32) -> Result<TauBuild> {
    if m >= max_depth {
        return Err(Error::BudgetExhausted(format!("no room for the involution beyond m = {m}")));
    }
    let tail = mu.shifted(m);
    let iota = fa1_involution(&tail, &CylinderSet::full(0), eps, max_depth - m)?;
    let k = iota.map.depth;
    let depth = m + k;
    let s = m - n;
    let sd = depth - n;
    let perm: Vec<u32> = (0..1u64 << sd)
        .map(|a| ((a & mask(s)) | iota.map.apply(a >> s) << s) as u32)
        .collect();
    let tau = FiniteDepthMap::new(sd, perm)?;
    let first: Vec<bool> = {
        let mut v = vec![false; 1 << k];
        for (e, _) in &iota.pairs {
            v[e.bits as usize] = true;
        }
        v
    };
    let a = CylinderSet::from_fn(sd, |a| {
        let y = a >> s;
        first[y as usize] || iota.fixed.contains(y)
    });
    let c = a.complement();
    let fixed = CylinderSet::from_fn(sd, |a| iota.fixed.contains(a >> s));
    Ok(TauBuild {
        iota,
        depth,
        tau,
        a,
        c,
        fixed,
    })
}

/// `f̃`: `1` on suffixes in `B'_m`, `f` on `A ∖ B'_m`, `f·h` on `C ∖ B'_m`.
pub fn assemble_f_tilde<G: Group>(
    group: &G,
    f: &StepFunction<G::Elem>,
    h: &G::Elem,
    n: u32,
    a: &CylinderSet,
    b_prime: &CylinderSet,
    depth: u32,
) -> StepFunction<G::Elem> {
    let k = f.values().len() as u32;
    let mut candidates = vec![group.identity()];
    candidates.extend(f.values().iter().cloned());
    candidates.extend(f.values().iter().map(|v| group.mul(v, h)));
    let index = (0..1u64 << depth)
        .map(|x| {
            let s = x >> n;
            if b_prime.contains(s) {
                0
            } else if a.contains(s) {
                1 + f.index_at(x)
            } else {
                1 + k + f.index_at(x)
            }
        })
        .collect();
    StepFunction::from_table(depth, candidates, index)
}

/// `θ`, the set `A'` it moves and the core `Z_00`.
#[derive(Clone, Debug)]
pub struct ThetaBuild {
    pub theta: FiniteDepthMap,
    pub a_prime: CylinderSet,
    pub z00: CylinderSet,
}

#[allow(clippy::too_many_arguments)]
pub fn build_theta<E: Clone + Eq + std::hash::Hash>(
    mu: &ProductMeasure,
    fstar: &ExtendedStepFunction<E>,
    n: u32,
    classes: &Classification,
    tau: &TauBuild,
    b_prime: &CylinderSet,
    z0: &CylinderSet,
) -> Result<ThetaBuild> {
    let sd = tau.depth - n;
    let t = &tau.tau;
    let a_prime = CylinderSet::from_fn(sd, |a| {
        let b = t.apply(a);
        classes.classes.iter().any(|y| y.contains(a) && y.contains(b))
            && !b_prime.contains(a)
            && !b_prime.contains(b)
            && !tau.fixed.contains(a)
    });
    let prefix = mu.table(n)?.numer;
    let low = mask(classes.suffix_depth);
    let mut cache: HashMap<(u64, u64), Vec<u32>> = HashMap::new();
    let mut perm = vec![0u32; 1 << tau.depth];
    for a in 0..1u64 << sd {
        if !a_prime.contains(a) {
            for p in 0..1u64 << n {
                let x = p | a << n;
                perm[x as usize] = x as u32;
            }
            continue;
        }
        let b = t.apply(a);
        let key = (a & low, b & low);
        if !cache.contains_key(&key) {
            cache.insert(key, prefix_bijection(fstar, &prefix, n, key.0, key.1)?);
        }
        let pb = &cache[&key];
        for p in 0..1u64 << n {
            perm[(p | a << n) as usize] = (pb[p as usize] as u64 | b << n) as u32;
        }
    }
    let theta = FiniteDepthMap::new(tau.depth, perm)?;
    let z00 = CylinderSet::from_fn(tau.depth, |x| {
        let a = x >> n;
        z0.contains(x) && tau.a.contains(a) && a_prime.contains(a)
    });
    Ok(ThetaBuild {
        theta,
        a_prime,
        z00,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{FiniteGroup, FreeAbelian};
    use crate::odometer::{ActionKind, GammaAction};

    #[test]
    fn eps_prime_examples() {
        let mu = ProductMeasure::uniform();
        let am = GammaAction::new(ActionKind::AddingMachine, 10).unwrap();
        assert_eq!(choose_eps_prime(&mu, &am.generators, &q(1, 4)), q(1, 8));
        let swap = GammaAction::new(ActionKind::FirstBitSwap, 1).unwrap();
        assert_eq!(choose_eps_prime(&mu, &swap.generators, &q(1, 4)), q(1023, 4096));
        // ratio 2 on one piece of each of two generators
        let b = ProductMeasure::bernoulli(&q(1, 3)).unwrap();
        let two = GammaAction::new(ActionKind::Involutions { count: 2 }, 2).unwrap();
        assert_eq!(choose_eps_prime(&b, &two.generators, &q(1, 4)), q(1, 16));
    }

    #[test]
    fn eps_prime_survives_unbounded_ratios() {
        // the adding machine under a biased measure has ratios 2^k
        let b = ProductMeasure::bernoulli(&q(1, 3)).unwrap();
        let am = GammaAction::new(ActionKind::AddingMachine, 24).unwrap();
        let e = choose_eps_prime(&b, &am.generators, &q(1, 4));
        assert!(e > q(1, 1000), "{e}");
        // oracle: images of every union of depth-8 cylinders below ε', worst first
        let d = 8;
        let table = b.table(d).unwrap();
        let images: Vec<Vec<Option<u32>>> = am.generators.iter().map(|g| g.map.image_table(d)).collect();
        let spread = |x: u64| -> Q {
            images
                .iter()
                .filter_map(|im| im[x as usize].map(|y| table.measure(y as u64)))
                .sum()
        };
        let mut words: Vec<u64> = (0..1u64 << d).collect();
        words.sort_by_key(|&x| std::cmp::Reverse(spread(x) / table.measure(x)));
        let (mut mass, mut image) = (zero(), zero());
        for x in words {
            if &mass + table.measure(x) >= e {
                continue;
            }
            mass += table.measure(x);
            image += spread(x);
        }
        assert!(image < q(1, 4), "{image}");
    }

    #[test]
    fn z0_abelian_and_trivial() {
        let z2 = FreeAbelian::new(2);
        let mu = ProductMeasure::uniform();
        let f = StepFunction::from_fn(2, |x| vec![x as i64, 0]);
        let z = CylinderSet::full(1);
        let c = find_z0_h(&z2, &mu, &f, &z, &vec![1, 0], 1).unwrap();
        assert_eq!(c.h, vec![1, 0]);
        assert_eq!(c.z0.measure(&mu).unwrap(), q(1, 1));
        let s3 = FiniteGroup::symmetric(3);
        let g = s3.parse("(1 2)").unwrap();
        let one = StepFunction::constant(0, s3.identity());
        let c = find_z0_h(&s3, &mu, &one, &z, &g, 1).unwrap();
        assert_eq!(c.h, g);
        assert_eq!(c.z0.measure(&mu).unwrap(), q(1, 1));
    }

    #[test]
    fn z0_in_s3_takes_a_half() {
        let s3 = FiniteGroup::symmetric(3);
        let mu = ProductMeasure::uniform();
        let g = s3.parse("(1 2)").unwrap();
        let t13 = s3.parse("(1 3)").unwrap();
        let f = StepFunction::from_fn(1, |x| if x & 1 == 0 { s3.identity() } else { t13 });
        let c = find_z0_h(&s3, &mu, &f, &CylinderSet::full(0), &g, 1).unwrap();
        assert_eq!(c.lambda, 3);
        assert_eq!(c.z0.measure(&mu).unwrap(), q(1, 2));
        // oracle: h is the conjugate f⁻¹ g f of one half
        let other = s3.mul(&s3.mul(&s3.inv(&t13), &g), &t13);
        assert!(c.h == g || c.h == other);
    }

    #[test]
    fn fingerprint_classes() {
        let mu = ProductMeasure::uniform();
        let f: StepFunction<u16> = StepFunction::constant(0, 0);
        let one = classify_classes(&f.extend(&CylinderSet::full(0)), 2, &mu).unwrap();
        assert_eq!(one.classes.len(), 1);
        let bit = StepFunction::from_fn(1, |x| (x & 1) as u16);
        let c = classify_classes(&bit.extend(&CylinderSet::full(0)), 1, &mu).unwrap();
        assert_eq!(c.classes.len(), 1);
        let half = CylinderSet::from_fn(1, |x| x == 0);
        assert_eq!(classify_classes(&bit.extend(&half), 1, &mu).unwrap().classes.len(), 1);
        let second = CylinderSet::from_fn(2, |x| x >> 1 == 0);
        let c = classify_classes(&bit.extend(&second), 1, &mu).unwrap();
        assert_eq!(c.classes.len(), 2);
        // oracle: enumerate the ⊥ pattern of each suffix bit
        assert!(c.classes[0].contains(0) && c.classes[1].contains(1));
    }

    #[test]
    fn prefix_bijection_preserves_keys() {
        let mu = ProductMeasure::periodic(&[q(1, 2), q(1, 3)]).unwrap();
        let f = StepFunction::from_fn(3, |x| ((x & 1) ^ (x >> 2 & 1)) as u16);
        let fs = f.extend(&CylinderSet::full(0));
        let prefix = mu.table(2).unwrap().numer;
        let p = prefix_bijection(&fs, &prefix, 2, 0, 1).unwrap();
        for t in 0..4u64 {
            assert_eq!(fs.at(t), fs.at(p[t as usize] as u64 | 1 << 2));
            assert_eq!(prefix[t as usize], prefix[p[t as usize] as usize]);
        }
        // different multisets have no bijection
        let g = StepFunction::from_fn(3, |x| (x >> 1 & x >> 2 & 1) as u16).extend(&CylinderSet::full(0));
        assert!(prefix_bijection(&g, &prefix, 2, 0, 1).is_err());
    }

    #[test]
    fn choose_m_for_adding_machine() {
        let mu = ProductMeasure::uniform();
        let am = GammaAction::new(ActionKind::AddingMachine, 20).unwrap();
        let f: StepFunction<u16> = StepFunction::constant(0, 0);
        let cls = classify_classes(&f.extend(&CylinderSet::full(0)), 1, &mu).unwrap();
        let eps_prime = q(1, 8);
        let c = choose_m(&mu, &am.generators, 1, 0, &eps_prime, &cls, 16).unwrap();
        // oracle: the hull of {1^m, 0^m} at n has mass 2^(1-(m-n))
        let oracle = (2..16).find(|&m| crate::rational::pow2_neg(m - 1 - 1) < eps_prime).unwrap();
        assert_eq!(c.m, oracle);
        assert_eq!(c.m, 6);
        assert_eq!(c.cells.len(), 1);
        let swap = GammaAction::new(ActionKind::FirstBitSwap, 1).unwrap();
        assert_eq!(choose_m(&mu, &swap.generators, 1, 3, &eps_prime, &cls, 16).unwrap().m, 3);
    }

    #[test]
    fn tau_is_an_involution() {
        let mu = ProductMeasure::periodic(&[q(1, 3), q(2, 3)]).unwrap();
        let t = build_tau(&mu, 1, 3, &q(1, 8), 14).unwrap();
        assert!(t.tau.is_involution());
        assert!(t.tau.max_derivative_defect(&mu.shifted(1)).unwrap() < q(1, 8));
        let u = build_tau(&ProductMeasure::uniform(), 1, 3, &q(1, 8), 10).unwrap();
        assert_eq!(u.tau.max_derivative_defect(&ProductMeasure::uniform()).unwrap(), q(0, 1));
        assert_eq!(u.depth, 4);
    }
}

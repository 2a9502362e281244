use std::cmp::Reverse;
use std::collections::HashMap;
use std::hash::Hash;

use crate::cocycle::StepFunction;
use crate::error::{Error, Result};
use crate::odometer::{CylinderSet, FiniteDepthMap, MeasureTable, ProductMeasure};
use crate::rational::{abs, fmt_q, one, q_ratio, zero, Q};

/// `B ⊆ A` and `θ ∈ [S_depth]` with `θB ⊆ A`, `μ(B) > δμ(A)`,
/// `|dμ∘θ/dμ - 1| < δ` and `α(θx, x)` in the target on `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvcWitness {
    pub depth: u32,
    pub b: CylinderSet,
    pub theta: FiniteDepthMap,
    /// `μ(B) - δμ(A)`.
    pub measure_slack: Q,
    /// `δ - max_B |dμ∘θ/dμ - 1|`.
    pub derivative_slack: Q,
    /// Mass that may be spoiled without losing the measure inequality.
    pub reserve: Q,
}

/// The cocycle is given through labels: `α(y, x) = φ(l(y), l(x))`, and the
/// caller decides whether `φ(l(y), l(x))` lies in the target set.
pub struct LabelledCocycle<'a, V, F> {
    pub labels: &'a StepFunction<V>,
    pub in_target: F,
}

impl<V, F: Fn(&V, &V) -> bool> LabelledCocycle<'_, V, F>
where
    V: Clone + Eq + Hash,
{
    fn hit(&self, y: u64, x: u64) -> bool {
        (self.in_target)(self.labels.at(y), self.labels.at(x))
    }
}

/// Searches `θ` among pairings of depth-`M` words, `M` growing up to
/// `max_depth`; words are matched across label classes, heaviest first.
pub fn check_evc<V, F>(
    mu: &ProductMeasure,
    alpha: &LabelledCocycle<'_, V, F>,
    a: &CylinderSet,
    delta: &Q,
    max_depth: u32,
) -> Result<EvcWitness>
where
    V: Clone + Eq + Hash,
    F: Fn(&V, &V) -> bool,
{
    let start = a.depth.max(alpha.labels.depth);
    let mut best = zero();
    let mut needed = zero();
    for m in start..=max_depth.max(start) {
        let table = mu.table(m)?;
        let a_m = a.refine(m);
        let mu_a = table.of_set(&a_m);
        if mu_a == zero() {
            return Err(Error::invalid("EVC needs a set of positive measure"));
        }
        needed = delta * &mu_a;
        let (theta, b) = pairing_search(&table, alpha, &a_m, delta);
        let mu_b = table.of_set(&b);
        if mu_b > needed {
            return finish(&table, theta, b, &mu_a, delta);
        }
        best = best.max(mu_b);
    }
    Err(Error::SearchExhausted(format!(
        "best witness mass {} does not exceed {}",
        fmt_q(&best),
        fmt_q(&needed)
    )))
}

fn within(table: &MeasureTable, y: u64, x: u64, delta: &Q) -> bool {
    abs(&(q_ratio(table.numer[y as usize], table.numer[x as usize]) - one())) < *delta
}

fn pairing_search<V, F>(
    table: &MeasureTable,
    alpha: &LabelledCocycle<'_, V, F>,
    a: &CylinderSet,
    delta: &Q,
) -> (FiniteDepthMap, CylinderSet)
where
    V: Clone + Eq + Hash,
    F: Fn(&V, &V) -> bool,
{
    let m = table.depth;
    let nlab = alpha.labels.values().len();
    // classes by label, heaviest first then lexicographic
    let mut classes: Vec<Vec<u64>> = vec![Vec::new(); nlab];
    for x in a.iter() {
        classes[alpha.labels.index_at(x) as usize].push(x);
    }
    for c in &mut classes {
        c.sort_by_key(|&x| (Reverse(table.numer[x as usize]), crate::odometer::lex_key(x, m)));
    }
    let vals = alpha.labels.values();
    let t = |i: usize, j: usize| (alpha.in_target)(&vals[i], &vals[j]);
    let mut matched = vec![false; 1 << m];
    let mut pairs: Vec<(u64, u64)> = Vec::new();
    let mut b = CylinderSet::empty(m);
    // identity points first: α(x, x) in the target
    let self_ok: Vec<bool> = (0..nlab).map(|i| t(i, i)).collect();
    // label pairs useful in both directions come first
    let mut order: Vec<(usize, usize, u8)> = Vec::new();
    for i in 0..nlab {
        for j in i + 1..nlab {
            let score = t(i, j) as u8 + t(j, i) as u8;
            if score > 0 && !(self_ok[i] && self_ok[j]) {
                order.push((i, j, score));
            }
        }
    }
    order.sort_by_key(|&(i, j, s)| (Reverse(s), i, j));
    for (i, j, _) in order {
        let (ci, cj) = (&classes[i], &classes[j]);
        let (mut p, mut q) = (0, 0);
        while p < ci.len() && q < cj.len() {
            let (y, x) = (ci[p], cj[q]);
            if matched[y as usize] {
                p += 1;
                continue;
            }
            if matched[x as usize] {
                q += 1;
                continue;
            }
            // x ∈ B needs α(y, x) in target, y ∈ B needs α(x, y)
            let x_in = t(i, j) && within(table, y, x, delta);
            let y_in = t(j, i) && within(table, x, y, delta);
            if x_in || y_in {
                matched[y as usize] = true;
                matched[x as usize] = true;
                pairs.push((x, y));
                if x_in {
                    b.insert(x);
                }
                if y_in {
                    b.insert(y);
                }
                p += 1;
                q += 1;
            } else if table.numer[y as usize] > table.numer[x as usize] {
                p += 1;
            } else {
                q += 1;
            }
        }
    }
    for x in a.iter() {
        if !matched[x as usize] && alpha.hit(x, x) {
            b.insert(x);
        }
    }
    let theta = FiniteDepthMap::from_pairs(m, &pairs).expect("pairs are disjoint");
    (theta, b)
}

fn finish(
    table: &MeasureTable,
    theta: FiniteDepthMap,
    b: CylinderSet,
    mu_a: &Q,
    delta: &Q,
) -> Result<EvcWitness> {
    let mu_b = table.of_set(&b);
    // derivatives only depend on the pair of numerators
    let mut ratios: HashMap<(u128, u128), Q> = HashMap::new();
    let mut ratio = |y: u64, x: u64| {
        let key = (table.numer[y as usize], table.numer[x as usize]);
        ratios.entry(key).or_insert_with(|| q_ratio(key.0, key.1)).clone()
    };
    let mut worst = zero();
    let mut inv_sup: Option<Q> = None;
    for x in b.iter() {
        let y = theta.apply(x);
        worst = worst.max(abs(&(ratio(y, x) - one())));
        // (θ⁻¹)'(θx) = μ(x) / μ(θx)
        let r = ratio(x, y);
        inv_sup = Some(match inv_sup {
            Some(s) if s >= r => s,
            _ => r,
        });
    }
    let inv_sup = inv_sup.unwrap_or_else(one);
    let measure_slack = mu_b - delta * mu_a;
    Ok(EvcWitness {
        depth: table.depth,
        reserve: &measure_slack / (one() + inv_sup),
        measure_slack,
        derivative_slack: delta - worst,
        theta,
        b,
    })
}

/// Packages a given `(B, θ)` as a witness for `A`, computing its slacks.
/// No inequality is checked here; see [`validate_witness`].
pub fn witness_from(
    mu: &ProductMeasure,
    a: &CylinderSet,
    b: CylinderSet,
    theta: FiniteDepthMap,
    delta: &Q,
) -> Result<EvcWitness> {
    let d = a.depth.max(b.depth).max(theta.depth);
    let table = mu.table(d)?;
    let mu_a = table.of_set(&a.refine(d));
    finish(&table, theta.refine(d), b.refine(d), &mu_a, delta)
}

/// Independent re-check of every witness inequality from scratch.
pub fn validate_witness<V, F>(
    mu: &ProductMeasure,
    alpha: &LabelledCocycle<'_, V, F>,
    a: &CylinderSet,
    delta: &Q,
    w: &EvcWitness,
) -> std::result::Result<(), String>
where
    V: Clone + Eq + Hash,
    F: Fn(&V, &V) -> bool,
{
    let d = w
        .depth
        .max(a.depth)
        .max(w.b.depth)
        .max(w.theta.depth)
        .max(alpha.labels.depth);
    let table = mu.table(d).map_err(|e| e.to_string())?;
    let (mut mu_a, mut mu_b) = (0u128, 0u128);
    let mut ratio_ok: HashMap<(u128, u128), bool> = HashMap::new();
    for x in 0..1u64 << d {
        let wx = table.numer[x as usize];
        if a.contains(x) {
            mu_a += wx;
        }
        if !w.b.contains(x) {
            continue;
        }
        mu_b += wx;
        let y = w.theta.apply(x);
        if !a.contains(x) {
            return Err(format!("B not inside A at {x:b}"));
        }
        if !a.contains(y) {
            return Err(format!("θB not inside A at {x:b}"));
        }
        let wy = table.numer[y as usize];
        let ok = *ratio_ok
            .entry((wy, wx))
            .or_insert_with(|| abs(&(q_ratio(wy, wx) - one())) < *delta);
        if !ok {
            return Err(format!("derivative bound fails at {x:b}"));
        }
        if !alpha.hit(y, x) {
            return Err(format!("cocycle value off target at {x:b}"));
        }
    }
    let (mu_a, mu_b) = (q_ratio(mu_a, table.den), q_ratio(mu_b, table.den));
    if mu_b <= delta * &mu_a {
        return Err(format!("μ(B) = {} is not above δμ(A) = {}", fmt_q(&mu_b), fmt_q(&(delta * mu_a))));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn identity_witness_for_trivial_cocycle() {
        let mu = ProductMeasure::uniform();
        let f = StepFunction::constant(0, 0u16);
        let alpha = LabelledCocycle {
            labels: &f,
            in_target: |y: &u16, x: &u16| y == x,
        };
        let a = CylinderSet::full(0);
        let w = check_evc(&mu, &alpha, &a, &q(1, 2), 4).unwrap();
        assert!(w.theta.is_identity());
        assert_eq!(w.b.measure(&mu).unwrap(), q(1, 1));
        assert_eq!(validate_witness(&mu, &alpha, &a, &q(1, 2), &w), Ok(()));
    }

    #[test]
    fn radon_nikodym_with_uniform_measure() {
        let mu = ProductMeasure::uniform();
        let t = mu.table(3).unwrap();
        let labels = StepFunction::from_fn(3, |x| t.numer[x as usize]);
        let alpha = LabelledCocycle {
            labels: &labels,
            in_target: |y: &u128, x: &u128| y == x,
        };
        let a = CylinderSet::from_words(&[crate::odometer::Word::parse("01").unwrap()]);
        let w = check_evc(&mu, &alpha, &a, &q(9, 10), 5).unwrap();
        assert_eq!(validate_witness(&mu, &alpha, &a, &q(9, 10), &w), Ok(()));
    }

    #[test]
    fn nontrivial_value_needs_pairs() {
        // f = first bit in Z/2, target {1}: pair x with x ^ 1
        let mu = ProductMeasure::uniform();
        let f = StepFunction::from_fn(1, |x| (x & 1) as u16);
        let alpha = LabelledCocycle {
            labels: &f,
            in_target: |y: &u16, x: &u16| (y + 2 - x) % 2 == 1,
        };
        let a = CylinderSet::full(0);
        let w = check_evc(&mu, &alpha, &a, &q(1, 3), 3).unwrap();
        assert_eq!(w.b.measure(&mu).unwrap(), q(1, 1));
        assert_eq!(validate_witness(&mu, &alpha, &a, &q(1, 3), &w), Ok(()));
        // inside the cylinder [0] there is no room
        let a0 = CylinderSet::from_words(&[crate::odometer::Word::parse("0").unwrap()]);
        assert!(matches!(
            check_evc(&mu, &alpha, &a0, &q(1, 3), 3),
            Err(Error::SearchExhausted(_))
        ));
    }

    #[test]
    fn validator_rejects_tampering() {
        let mu = ProductMeasure::uniform();
        let f = StepFunction::from_fn(1, |x| (x & 1) as u16);
        let alpha = LabelledCocycle {
            labels: &f,
            in_target: |y: &u16, x: &u16| (y + 2 - x) % 2 == 1,
        };
        let a = CylinderSet::full(0);
        let mut w = check_evc(&mu, &alpha, &a, &q(1, 3), 3).unwrap();
        w.theta = FiniteDepthMap::identity(w.depth);
        assert!(validate_witness(&mu, &alpha, &a, &q(1, 3), &w).is_err());
    }
}

use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::Group;
use crate::odometer::{orbit_overflow, CylinderSet, Generator, ProductMeasure};
use crate::rational::{one, pow2_neg, zero, Q};

use super::{delta, Increment, StepFunction};

/// A distance split into its computed part and the truncation bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dist {
    pub value: Q,
    pub truncation: Q,
}

impl Dist {
    pub fn total(&self) -> Q {
        &self.value + &self.truncation
    }
}

/// `Σ_{j≤L} 2^{-j} ∫ min(1, d_G(c1_j, c2_j)) dμ` over the first `L` generators;
/// points where either side is undefined count with distance 1.
pub fn dist<G: Group>(
    group: &G,
    mu: &ProductMeasure,
    c1: &[Increment<G::Elem>],
    c2: &[Increment<G::Elem>],
    level: u32,
) -> Result<Dist> {
    let mut value = zero();
    for (j, (a, b)) in c1.iter().zip(c2).take(level as usize).enumerate() {
        if a.depth != b.depth {
            return Err(Error::DepthMismatch {
                left: a.depth,
                right: b.depth,
            });
        }
        let t = mu.table(a.depth)?;
        let mut integral = zero();
        for x in 0..1u64 << a.depth {
            let d = match (a.at(x), b.at(x)) {
                (Some(u), Some(v)) => group.metric(u, v).min(one()),
                _ => one(),
            };
            if d != zero() {
                integral += d * t.measure(x);
            }
        }
        value += integral * pow2_neg(j as u32 + 1);
    }
    Ok(Dist {
        value,
        truncation: pow2_neg(level),
    })
}

/// Outcome of a predicate evaluated on the cylinder algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateReport {
    pub pass: bool,
    pub violations: CylinderSet,
    pub violation_measure: Q,
    /// Mass where the answer is unknown because a generator is truncated.
    pub unknown_measure: Q,
}

/// `f = 1` on the overflow set `O(S_n, Σ)`. The truncation remainder is part of
/// the overflow set, so it is never silently passed.
pub fn is_inner<G: Group>(
    group: &G,
    mu: &ProductMeasure,
    f: &StepFunction<G::Elem>,
    gens: &[Generator],
    n: u32,
    d: u32,
) -> Result<PredicateReport> {
    let d = d.max(f.depth);
    let o = orbit_overflow(mu, gens, n, d, None)?;
    let violations = CylinderSet::from_fn(d, |x| o.set.contains(x) && !group.is_identity(f.at(x)));
    let violation_measure = violations.measure(mu)?;
    Ok(PredicateReport {
        pass: violations.is_empty(),
        violations,
        violation_measure,
        unknown_measure: o.remainder_measure,
    })
}

/// `Δ_σ f ∈ {1} ∪ H` on every defined piece, for every `σ`.
pub fn is_incremental<G: Group>(
    group: &G,
    mu: &ProductMeasure,
    f: &StepFunction<G::Elem>,
    gens: &[Generator],
    h: impl Fn(&G::Elem) -> bool,
    d: u32,
    remainder_bound: &Q,
) -> Result<PredicateReport> {
    let d = d.max(f.depth);
    let mut violations = CylinderSet::empty(d);
    let mut unknown = CylinderSet::empty(d);
    for g in gens {
        let inc = delta(group, f, &g.map, d, mu, remainder_bound)?;
        let ok: Vec<bool> = inc.values.iter().map(|v| group.is_identity(v) || h(v)).collect();
        for x in 0..1u64 << d {
            match inc.at(x) {
                None => unknown.insert(x),
                Some(v) => {
                    let i = inc.values.iter().position(|w| w == v).unwrap();
                    if !ok[i] {
                        violations.insert(x);
                    }
                }
            }
        }
    }
    Ok(PredicateReport {
        pass: violations.is_empty(),
        violation_measure: violations.measure(mu)?,
        unknown_measure: unknown.measure(mu)?,
        violations,
    })
}

/// One term `(f_n, ε_n, k_n)` of an approximating sequence.
#[derive(Clone, Debug)]
pub struct ApproxRound<E> {
    pub f: StepFunction<E>,
    pub eps: Q,
    pub k: u32,
}

/// The sequence `(f_n, ε_n, k_n)` with, per generator, the mass where
/// consecutive increments disagree.
#[derive(Clone, Debug)]
pub struct CocycleApproximant<E> {
    pub rounds: Vec<ApproxRound<E>>,
    /// `changes[r][σ] = μ{Δ_σ f_r ≠ Δ_σ f_{r+1}}`.
    pub changes: Vec<Vec<Q>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct StabilizationEntry {
    pub round: usize,
    pub generator: usize,
    #[serde(with = "crate::rational::serde_q")]
    pub changed_after: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub bound: Q,
}

impl<E: Clone + Eq + Hash> CocycleApproximant<E> {
    pub fn new(f: StepFunction<E>, eps: Q, k: u32) -> Self {
        CocycleApproximant {
            rounds: vec![ApproxRound { f, eps, k }],
            changes: Vec::new(),
        }
    }

    pub fn push(&mut self, round: ApproxRound<E>, changes: Vec<Q>) {
        self.rounds.push(round);
        self.changes.push(changes);
    }

    pub fn last(&self) -> &ApproxRound<E> {
        self.rounds.last().unwrap()
    }

    /// `ε_{n+1} < ε_n / 2` and `k_{n+1} > k_n`.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        for (n, w) in self.rounds.windows(2).enumerate() {
            if &w[1].eps * Q::from_integer(2.into()) >= w[0].eps {
                return Err(format!("eps does not halve after round {}", n + 1));
            }
            if w[1].k <= w[0].k {
                return Err(format!("k does not increase after round {}", n + 1));
            }
        }
        Ok(())
    }

    /// `Σ_{m>n} ε_m`, closing the unbuilt tail with `ε_last` since the
    /// sequence more than halves.
    pub fn tail_bound(&self, n: usize) -> Q {
        let built: Q = self.rounds.iter().skip(n + 1).map(|r| r.eps.clone()).sum();
        built + &self.last().eps
    }

    /// For each round `n` and generator `σ`, the mass that can still change
    /// after round `n` against `Σ_{m>n} ε_m`.
    pub fn stabilization_ledger(&self) -> Vec<StabilizationEntry> {
        let eps: Vec<Q> = self.rounds.iter().map(|r| r.eps.clone()).collect();
        stabilization_entries(&eps, &self.changes)
    }
}

/// The ledger from the ε sequence `ε_1, ε_2, ...` (one more entry than
/// `changes`) and the per-round change masses alone.
pub fn stabilization_entries(eps: &[Q], changes: &[Vec<Q>]) -> Vec<StabilizationEntry> {
    let mut out = Vec::new();
    let gens = changes.first().map_or(0, |c| c.len());
    let last = eps.last().cloned().unwrap_or_else(zero);
    for n in 0..eps.len() {
        let bound: Q = eps.iter().skip(n + 1).cloned().sum::<Q>() + &last;
        for s in 0..gens {
            let changed_after: Q = changes.iter().skip(n).map(|c| c[s].clone()).sum();
            out.push(StabilizationEntry {
                round: n + 1,
                generator: s,
                changed_after,
                bound: bound.clone(),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{FiniteGroup, FreeAbelian};
    use crate::odometer::{ActionKind, GammaAction};
    use crate::rational::q;

    #[test]
    fn dist_examples() {
        let g = FiniteGroup::cyclic(2);
        let mu = ProductMeasure::uniform();
        let a = Increment::from_fn(3, |_| Some(0u16));
        let b = Increment::from_fn(3, |x| Some(if x == 0b101 { 1u16 } else { 0 }));
        let d = dist(&g, &mu, &[a.clone()], &[b.clone()], 1).unwrap();
        assert_eq!(d.value, q(1, 16));
        assert_eq!(d.truncation, q(1, 2));
        assert_eq!(dist(&g, &mu, &[a.clone()], &[a.clone()], 1).unwrap().value, q(0, 1));
        assert_eq!(
            dist(&g, &mu, &[b.clone()], &[a.clone()], 1).unwrap(),
            dist(&g, &mu, &[a], &[b], 1).unwrap()
        );
    }

    #[test]
    fn inner_examples() {
        let g = FreeAbelian::new(1);
        let mu = ProductMeasure::uniform();
        let am = GammaAction::new(ActionKind::AddingMachine, 10).unwrap();
        let one = StepFunction::constant(0, vec![0i64]);
        for n in 1..6 {
            assert!(is_inner(&g, &mu, &one, &am.generators, n, 10).unwrap().pass);
        }
        let f = StepFunction::from_fn(3, |x| if x == 0b111 { vec![1] } else { vec![0] });
        assert!(!is_inner(&g, &mu, &f, &am.generators, 3, 10).unwrap().pass);
        let swap = GammaAction::new(ActionKind::FirstBitSwap, 1).unwrap();
        assert!(is_inner(&g, &mu, &f, &swap.generators, 2, 4).unwrap().pass);
    }

    #[test]
    fn incremental_examples() {
        let g = FiniteGroup::cyclic(3);
        let mu = ProductMeasure::uniform();
        let swap = GammaAction::new(ActionKind::FirstBitSwap, 1).unwrap();
        let c = StepFunction::constant(2, 2u16);
        assert!(is_incremental(&g, &mu, &c, &swap.generators, |_| false, 2, &q(0, 1)).unwrap().pass);
        let f = StepFunction::from_fn(1, |x| x as u16);
        let hset = [1u16, 2u16];
        assert!(is_incremental(&g, &mu, &f, &swap.generators, |v| hset.contains(v), 2, &q(0, 1)).unwrap().pass);
        let r = is_incremental(&g, &mu, &f, &swap.generators, |_| false, 2, &q(0, 1)).unwrap();
        assert!(!r.pass);
        assert_eq!(r.violation_measure, q(1, 1));
    }

    #[test]
    fn approximant_invariants() {
        let f = StepFunction::constant(0, 0u16);
        let mut a = CocycleApproximant::new(f.clone(), q(1, 4), 1);
        a.push(ApproxRound { f: f.clone(), eps: q(1, 10), k: 2 }, vec![q(1, 20)]);
        assert!(a.check_invariants().is_ok());
        a.push(ApproxRound { f, eps: q(1, 20), k: 3 }, vec![q(0, 1)]);
        assert!(a.check_invariants().is_err());
        let ledger = a.stabilization_ledger();
        assert!(ledger.iter().all(|e| e.changed_after <= e.bound));
    }
}

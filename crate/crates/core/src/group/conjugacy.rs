//! Conjugacy classes, the covering number `Λ(g, U)` and conjugate closures.

use std::collections::{BTreeMap, HashMap, VecDeque};

use super::Group;
use crate::error::{Error, Result};
use crate::rational::Q;

pub const DEFAULT_CLASS_BUDGET: usize = 4096;

/// The class `g^•` with, for each member `c`, a witness `x` with `x g x⁻¹ = c`.
#[derive(Clone, Debug)]
pub struct ConjugacyClass<E> {
    pub base: E,
    pub members: Vec<(E, E)>,
}

impl<E: Clone + Eq> ConjugacyClass<E> {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn elements(&self) -> Vec<E> {
        self.members.iter().map(|(c, _)| c.clone()).collect()
    }

    pub fn contains(&self, x: &E) -> bool {
        self.members.iter().any(|(c, _)| c == x)
    }
}

/// Enumerates `g^•` by closing `{g}` under conjugation by the model's
/// conjugators. Members are returned in sorted order.
pub fn conjugacy_class<G: Group>(
    group: &G,
    g: &G::Elem,
    budget: usize,
) -> Result<ConjugacyClass<G::Elem>> {
    let Some(gens) = group.conjugators() else {
        return Ok(ConjugacyClass {
            base: g.clone(),
            members: vec![(g.clone(), group.identity())],
        });
    };
    let mut found: BTreeMap<G::Elem, G::Elem> = BTreeMap::new();
    found.insert(g.clone(), group.identity());
    let mut queue = VecDeque::from([(g.clone(), group.identity())]);
    while let Some((c, w)) = queue.pop_front() {
        for s in &gens {
            for s in [s.clone(), group.inv(s)] {
                let next = group.conj(&s, &c);
                if !found.contains_key(&next) {
                    if found.len() >= budget {
                        return Err(Error::UnboundedClass {
                            element: group.format(g),
                            budget,
                        });
                    }
                    let wit = group.mul(&s, &w);
                    found.insert(next.clone(), wit.clone());
                    queue.push_back((next, wit));
                }
            }
        }
    }
    Ok(ConjugacyClass {
        base: g.clone(),
        members: found.into_iter().collect(),
    })
}

/// An optimal cover of `g^•` by translates `U d`, `d ∈ g^•`.
#[derive(Clone, Debug)]
pub struct Covering<E> {
    pub lambda: usize,
    pub centers: Vec<E>,
}

/// `Λ(g, U_k)`: the least number of translates `U_k d` (`d ∈ g^•`) covering
/// `g^•`, solved exactly by branch and bound.
pub fn covering_number<G: Group>(
    group: &G,
    g: &G::Elem,
    k: usize,
    budget: usize,
) -> Result<Covering<G::Elem>> {
    let class = conjugacy_class(group, g, budget)?;
    let elems = class.elements();
    let n = elems.len();
    // covers[d] = members c with c d⁻¹ ∈ U_k
    let covers: Vec<Vec<usize>> = (0..n)
        .map(|d| {
            (0..n)
                .filter(|&c| group.in_translate(k, &elems[d], &elems[c]))
                .collect()
        })
        .collect();
    let chosen = min_set_cover(n, &covers);
    Ok(Covering {
        lambda: chosen.len(),
        centers: chosen.into_iter().map(|i| elems[i].clone()).collect(),
    })
}

/// Exact minimum set cover of `{0..n}` by the given sets. Returns the indices
/// of the chosen sets, lexicographically least among optimal solutions found
/// first by the branching order.
pub(crate) fn min_set_cover(n: usize, sets: &[Vec<usize>]) -> Vec<usize> {
    // greedy upper bound
    let mut best: Vec<usize> = {
        let mut covered = vec![false; n];
        let mut pick = vec![];
        while covered.iter().any(|c| !c) {
            let (i, _) = sets
                .iter()
                .enumerate()
                .map(|(i, s)| (i, s.iter().filter(|&&e| !covered[e]).count()))
                .max_by_key(|&(i, gain)| (gain, std::cmp::Reverse(i)))
                .expect("non-empty family");
            for &e in &sets[i] {
                covered[e] = true;
            }
            pick.push(i);
        }
        pick.sort_unstable();
        pick
    };
    let mut containing: Vec<Vec<usize>> = vec![vec![]; n];
    for (i, s) in sets.iter().enumerate() {
        for &e in s {
            containing[e].push(i);
        }
    }
    let max_set = sets.iter().map(Vec::len).max().unwrap_or(1).max(1);

    fn branch(
        covered: &mut Vec<u32>,
        current: &mut Vec<usize>,
        best: &mut Vec<usize>,
        sets: &[Vec<usize>],
        containing: &[Vec<usize>],
        max_set: usize,
    ) {
        let Some(first) = covered.iter().position(|&c| c == 0) else {
            if current.len() < best.len() {
                let mut c = current.clone();
                c.sort_unstable();
                *best = c;
            }
            return;
        };
        let uncovered = covered.iter().filter(|&&c| c == 0).count();
        let lower = current.len() + uncovered.div_ceil(max_set);
        if lower >= best.len() {
            return;
        }
        for &i in &containing[first] {
            for &e in &sets[i] {
                covered[e] += 1;
            }
            current.push(i);
            branch(covered, current, best, sets, containing, max_set);
            current.pop();
            for &e in &sets[i] {
                covered[e] -= 1;
            }
        }
    }

    let mut covered = vec![0u32; n];
    branch(&mut covered, &mut vec![], &mut best, sets, &containing, max_set);
    best
}

/// `H^• = ∪_{h ∈ H} h^•` as an explicit sorted set, with `sup ‖h‖` over it
/// when the model has a norm.
#[derive(Clone, Debug)]
pub struct Closure<E> {
    pub elements: Vec<E>,
    pub norm_sup: Option<Q>,
}

impl<E: Ord> Closure<E> {
    pub fn contains(&self, x: &E) -> bool {
        self.elements.binary_search(x).is_ok()
    }
}

pub fn conjugate_closure<G: Group>(
    group: &G,
    generators: &[G::Elem],
    budget: usize,
) -> Result<Closure<G::Elem>> {
    let mut all: HashMap<G::Elem, ()> = HashMap::new();
    for h in generators {
        for c in conjugacy_class(group, h, budget)?.elements() {
            all.insert(c, ());
        }
    }
    let mut elements: Vec<G::Elem> = all.into_keys().collect();
    elements.sort();
    let norm_sup = elements
        .iter()
        .map(|e| group.norm(e))
        .collect::<Option<Vec<Q>>>()
        .map(|ns| ns.into_iter().max().unwrap_or_default());
    Ok(Closure { elements, norm_sup })
}

use std::collections::BTreeMap;

use super::{CylinderSet, FiniteDepthMap, ProductMeasure, Word};
use crate::error::{Error, Result};
use crate::rational::{q_ratio, Q};

/// An involution on `A` moving all but a small part of it, with bounded
/// distortion.
#[derive(Clone, Debug)]
pub struct Fa1Involution {
    pub map: FiniteDepthMap,
    /// Matched pairs `(e, τe)`; the first entries make up `E'`.
    pub pairs: Vec<(Word, Word)>,
    pub fixed: CylinderSet,
    pub fixed_measure: Q,
    pub max_defect: Q,
}

/// Pairs words of `A` so that `τ² = id`, `τA = A`, `τ = id` off `A`, the fixed
/// part of `A` has measure `< eps`, and `|dμ∘τ/dμ - 1| < eps` everywhere.
///
/// Equal-measure words are matched first in lexicographic order; what is left
/// is matched greedily by adjacent measures.
pub fn fa1_involution(
    mu: &ProductMeasure,
    a: &CylinderSet,
    eps: &Q,
    max_depth: u32,
) -> Result<Fa1Involution> {
    if a.measure(mu)? == crate::rational::zero() {
        return Err(Error::invalid("fa1_involution needs a set of positive measure"));
    }
    let start = a.depth.max(1);
    for k in start..=max_depth {
        let table = mu.table(k)?;
        let set = a.refine(k);
        let mut classes: BTreeMap<u128, Vec<u64>> = BTreeMap::new();
        for x in set.iter() {
            classes.entry(table.numer[x as usize]).or_default().push(x);
        }
        let mut pairs = Vec::new();
        let mut left: Vec<u64> = Vec::new();
        for words in classes.values_mut() {
            words.sort_by_key(|&x| super::lex_key(x, k));
            for c in words.chunks(2) {
                match c {
                    [x, y] => pairs.push((*x, *y)),
                    [x] => left.push(*x),
                    _ => unreachable!(),
                }
            }
        }
        // leftovers are ordered by measure (BTreeMap order), heaviest first
        left.reverse();
        let mut fixed = Vec::new();
        let mut i = 0;
        while i < left.len() {
            if i + 1 < left.len() {
                let (hi, lo) = (table.numer[left[i] as usize], table.numer[left[i + 1] as usize]);
                if q_ratio(hi, lo) - crate::rational::one() < *eps {
                    pairs.push((left[i], left[i + 1]));
                    i += 2;
                    continue;
                }
            }
            fixed.push(left[i]);
            i += 1;
        }
        let fixed_num = table.sum_numer(fixed.iter().copied());
        let fixed_measure = q_ratio(fixed_num, table.den);
        if fixed_measure < *eps {
            let map = FiniteDepthMap::from_pairs(k, &pairs)?;
            let max_defect = pairs
                .iter()
                .map(|&(x, y)| {
                    let (a, b) = (table.numer[x as usize], table.numer[y as usize]);
                    q_ratio(a.max(b), a.min(b)) - crate::rational::one()
                })
                .max()
                .unwrap_or_else(crate::rational::zero);
            let fixed_set = CylinderSet::from_fn(k, |x| fixed.contains(&x));
            return Ok(Fa1Involution {
                map,
                pairs: pairs
                    .into_iter()
                    .map(|(x, y)| (Word::new(x, k), Word::new(y, k)))
                    .collect(),
                fixed: fixed_set,
                fixed_measure,
                max_defect,
            });
        }
    }
    Err(Error::BudgetExhausted(format!(
        "no pairing with fixed mass below {} within depth {max_depth}",
        crate::rational::fmt_q(eps)
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn uniform_whole_space_swaps_first_bit() {
        let mu = ProductMeasure::uniform();
        let r = fa1_involution(&mu, &CylinderSet::full(0), &q(1, 10), 8).unwrap();
        assert_eq!(r.map.depth, 1);
        assert_eq!(r.map.apply(0), 1);
        assert_eq!(r.max_defect, q(0, 1));
        assert!(r.map.is_involution());
    }

    #[test]
    fn equal_weight_pairing() {
        let mu = ProductMeasure::bernoulli(&q(1, 3)).unwrap();
        let a = CylinderSet::from_words(&[Word::parse("01").unwrap(), Word::parse("10").unwrap()]);
        let r = fa1_involution(&mu, &a, &q(1, 100), 8).unwrap();
        assert_eq!(r.map.apply(0b10), 0b01);
        assert_eq!(r.max_defect, q(0, 1));
        assert_eq!(r.fixed_measure, q(0, 1));
    }

    #[test]
    fn postconditions_on_nonuniform_measure() {
        let mu = ProductMeasure::bernoulli(&q(1, 3)).unwrap();
        let eps = q(1, 20);
        let r = fa1_involution(&mu, &CylinderSet::full(0), &eps, 14).unwrap();
        assert!(r.map.is_involution());
        assert!(r.fixed_measure < eps);
        assert!(r.max_defect < eps);
        assert!(r.map.max_derivative_defect(&mu).unwrap() < eps);
    }

    #[test]
    fn budget_exhausted() {
        let mu = ProductMeasure::bernoulli(&q(1, 3)).unwrap();
        let err = fa1_involution(&mu, &CylinderSet::full(0), &q(1, 1000), 3).unwrap_err();
        assert!(matches!(err, Error::BudgetExhausted(_)));
    }
}

//! Exactly computable group models with small invariant neighborhoods and
//! relatively compact conjugacy classes.

mod abelian;
mod conjugacy;
mod finite;

use std::fmt::Debug;
use std::hash::Hash;

pub use abelian::{DirectSumZ, FreeAbelian, ProductGroup};
pub use conjugacy::{
    conjugacy_class, conjugate_closure, covering_number, Closure, ConjugacyClass, Covering,
    DEFAULT_CLASS_BUDGET,
};
pub use finite::FiniteGroup;

use crate::error::Result;
use crate::rational::Q;

/// A group with a two-sided invariant metric and a base of symmetric normal
/// neighborhoods `U_1 ⊇ U_2 ⊇ ...` of the identity.
pub trait Group: Send + Sync {
    type Elem: Clone + Eq + Hash + Ord + Debug + Send + Sync;

    fn name(&self) -> String;
    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;

    /// Bi-invariant metric.
    fn metric(&self, a: &Self::Elem, b: &Self::Elem) -> Q;

    /// Membership of `x` in the base neighborhood `U_k`, `k >= 1`.
    fn in_neighborhood(&self, k: usize, x: &Self::Elem) -> bool;

    /// Elements whose conjugation action generates all inner automorphisms.
    /// `None` means the group is abelian.
    fn conjugators(&self) -> Option<Vec<Self::Elem>>;

    fn norm(&self, _a: &Self::Elem) -> Option<Q> {
        None
    }

    fn format(&self, a: &Self::Elem) -> String;
    fn parse(&self, s: &str) -> Result<Self::Elem>;

    /// All elements, for finite groups.
    fn elements(&self) -> Option<Vec<Self::Elem>> {
        None
    }

    /// A finite sample of elements used by invariant checks.
    fn sample(&self) -> Vec<Self::Elem>;

    fn order(&self) -> Option<usize> {
        self.elements().map(|e| e.len())
    }

    fn is_identity(&self, a: &Self::Elem) -> bool {
        *a == self.identity()
    }

    fn conj(&self, x: &Self::Elem, g: &Self::Elem) -> Self::Elem {
        self.mul(&self.mul(x, g), &self.inv(x))
    }

    /// `x ∈ U_k · g`.
    fn in_translate(&self, k: usize, g: &Self::Elem, x: &Self::Elem) -> bool {
        self.in_neighborhood(k, &self.mul(x, &self.inv(g)))
    }
}

#[cfg(test)]
pub(crate) mod laws {
    //! Shared axiom checks for every shipped model.
    use super::*;

    pub fn check_group_laws<G: Group>(g: &G) {
        let s = g.sample();
        let e = g.identity();
        for a in &s {
            assert_eq!(g.mul(&e, a), *a);
            assert_eq!(g.mul(a, &e), *a);
            assert_eq!(g.mul(a, &g.inv(a)), e);
            assert_eq!(g.parse(&g.format(a)).unwrap(), *a);
            for b in s.iter().take(12) {
                for c in s.iter().take(12) {
                    assert_eq!(g.mul(&g.mul(a, b), c), g.mul(a, &g.mul(b, c)));
                }
            }
        }
    }

    pub fn check_metric_and_base<G: Group>(g: &G) {
        let s: Vec<_> = g.sample().into_iter().take(16).collect();
        for a in &s {
            for b in &s {
                for c in &s {
                    assert_eq!(g.metric(&g.mul(a, b), &g.mul(a, c)), g.metric(b, c));
                    assert_eq!(g.metric(&g.mul(b, a), &g.mul(c, a)), g.metric(b, c));
                }
            }
        }
        for k in 1..4 {
            assert!(g.in_neighborhood(k, &g.identity()));
            for x in &s {
                let inside = g.in_neighborhood(k, x);
                assert_eq!(inside, g.in_neighborhood(k, &g.inv(x)), "symmetry");
                if g.in_neighborhood(k + 1, x) {
                    assert!(inside, "nested");
                }
                for y in &s {
                    assert_eq!(inside, g.in_neighborhood(k, &g.conj(y, x)), "normality");
                }
            }
        }
        // the intersection of the base is trivial on the sample
        for x in &s {
            if !g.is_identity(x) {
                assert!((1..8).any(|k| !g.in_neighborhood(k, x)));
            }
        }
    }
}

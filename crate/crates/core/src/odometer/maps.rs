use std::collections::HashSet;

use super::{mask, MeasureTable, ProductMeasure, Word};
use crate::error::{Error, Result};
use crate::rational::{q_ratio, Q};

/// A permutation of depth-`depth` words, extended by the identity on deeper
/// coordinates. An element of the full group of `S_depth`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteDepthMap {
    pub depth: u32,
    perm: Vec<u32>,
}

impl FiniteDepthMap {
    pub fn new(depth: u32, perm: Vec<u32>) -> Result<Self> {
        if perm.len() != 1usize << depth {
            return Err(Error::invalid("permutation length must be 2^depth"));
        }
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            let slot = seen
                .get_mut(p as usize)
                .ok_or_else(|| Error::invalid("permutation value out of range"))?;
            if *slot {
                return Err(Error::invalid("map is not a bijection"));
            }
            *slot = true;
        }
        Ok(FiniteDepthMap { depth, perm })
    }

    pub fn identity(depth: u32) -> Self {
        FiniteDepthMap {
            depth,
            perm: (0..1u32 << depth).collect(),
        }
    }

    /// Builds the involution exchanging each listed pair.
    pub fn from_pairs(depth: u32, pairs: &[(u64, u64)]) -> Result<Self> {
        let mut perm: Vec<u32> = (0..1u32 << depth).collect();
        let mut touched = HashSet::new();
        for &(a, b) in pairs {
            if !touched.insert(a) || (a != b && !touched.insert(b)) {
                return Err(Error::invalid("pairs overlap"));
            }
            perm[a as usize] = b as u32;
            perm[b as usize] = a as u32;
        }
        Ok(FiniteDepthMap { depth, perm })
    }

    /// Applies the map to a word of any depth `>= self.depth`.
    #[inline]
    pub fn apply(&self, x: u64) -> u64 {
        let m = mask(self.depth);
        self.perm[(x & m) as usize] as u64 | (x & !m)
    }

    pub fn apply_word(&self, w: &Word) -> Word {
        assert!(w.depth >= self.depth);
        Word::new(self.apply(w.bits), w.depth)
    }

    pub fn refine(&self, depth: u32) -> FiniteDepthMap {
        assert!(depth >= self.depth);
        FiniteDepthMap {
            depth,
            perm: (0..1u64 << depth).map(|x| self.apply(x) as u32).collect(),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &FiniteDepthMap) -> FiniteDepthMap {
        let d = self.depth.max(other.depth);
        FiniteDepthMap {
            depth: d,
            perm: (0..1u64 << d)
                .map(|x| self.apply(other.apply(x)) as u32)
                .collect(),
        }
    }

    pub fn inverse(&self) -> FiniteDepthMap {
        let mut perm = vec![0u32; self.perm.len()];
        for (x, &y) in self.perm.iter().enumerate() {
            perm[y as usize] = x as u32;
        }
        FiniteDepthMap {
            depth: self.depth,
            perm,
        }
    }

    pub fn is_involution(&self) -> bool {
        self.perm
            .iter()
            .enumerate()
            .all(|(x, &y)| self.perm[y as usize] as usize == x)
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(x, &y)| x == y as usize)
    }

    pub fn fixed_points(&self) -> impl Iterator<Item = u64> + '_ {
        self.perm
            .iter()
            .enumerate()
            .filter(|(x, &y)| *x == y as usize)
            .map(|(x, _)| x as u64)
    }

    /// `dμ∘φ/dμ` on the cylinder of `x`: `μ[φ(w)] / μ[w]` at the map's depth.
    pub fn derivative(&self, table: &MeasureTable, x: u64) -> Q {
        assert_eq!(table.depth, self.depth);
        let w = x & mask(self.depth);
        q_ratio(table.numer[self.perm[w as usize] as usize], table.numer[w as usize])
    }

    /// Largest `|dμ∘φ/dμ - 1|` over all words.
    pub fn max_derivative_defect(&self, mu: &ProductMeasure) -> Result<Q> {
        let t = mu.table(self.depth)?;
        let one = crate::rational::one();
        Ok((0..1u64 << self.depth)
            .map(|x| crate::rational::abs(&(self.derivative(&t, x) - &one)))
            .max()
            .unwrap_or_else(crate::rational::zero))
    }

    pub fn perm(&self) -> &[u32] {
        &self.perm
    }
}

/// A map given by prefix rewrites: on the cylinder of `source` it replaces that
/// prefix by `target` and keeps every deeper coordinate. Pieces are listed up
/// to a truncation depth; whatever the listed pieces do not cover is the
/// remainder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseCylinderMap {
    pub pieces: Vec<(Word, Word)>,
    pub truncation: u32,
}

impl PiecewiseCylinderMap {
    pub fn new(pieces: Vec<(Word, Word)>, truncation: u32) -> Result<Self> {
        for (s, t) in &pieces {
            if s.depth != t.depth {
                return Err(Error::DepthMismatch {
                    left: s.depth,
                    right: t.depth,
                });
            }
            if s.depth > truncation {
                return Err(Error::invalid("piece deeper than the truncation depth"));
            }
        }
        let map = PiecewiseCylinderMap { pieces, truncation };
        map.check_disjoint()?;
        Ok(map)
    }

    fn check_disjoint(&self) -> Result<()> {
        let overlap = |words: Vec<&Word>| {
            let mut v = words;
            v.sort_by_key(|w| w.lex_key());
            v.windows(2).any(|p| p[0].is_prefix_of(p[1]))
        };
        if overlap(self.pieces.iter().map(|p| &p.0).collect()) {
            return Err(Error::invalid("piece sources overlap"));
        }
        if overlap(self.pieces.iter().map(|p| &p.1).collect()) {
            return Err(Error::invalid("piece targets overlap"));
        }
        Ok(())
    }

    pub fn inverse(&self) -> PiecewiseCylinderMap {
        PiecewiseCylinderMap {
            pieces: self.pieces.iter().map(|(s, t)| (*t, *s)).collect(),
            truncation: self.truncation,
        }
    }

    /// Image of every depth-`d` word, `None` on the remainder. Pieces deeper
    /// than `d` are ignored, so their cylinders count as remainder.
    pub fn image_table(&self, d: u32) -> Vec<Option<u32>> {
        let mut out = vec![None; 1 << d];
        for (s, t) in &self.pieces {
            if s.depth > d {
                continue;
            }
            for tail in 0..1u64 << (d - s.depth) {
                out[(s.bits | tail << s.depth) as usize] = Some((t.bits | tail << s.depth) as u32);
            }
        }
        out
    }

    /// Measure not covered by pieces of depth `<= d`.
    pub fn remainder_measure(&self, mu: &ProductMeasure, d: u32) -> Q {
        let covered: Q = self
            .pieces
            .iter()
            .filter(|(s, _)| s.depth <= d)
            .map(|(s, _)| mu.cylinder_measure(s))
            .sum();
        crate::rational::one() - covered
    }

    /// Supremum over pieces of `μ[target] / μ[source]`, which is the supremum of
    /// `dμ∘σ/dμ` on the covered part.
    pub fn max_ratio(&self, mu: &ProductMeasure) -> Q {
        self.pieces
            .iter()
            .map(|(s, t)| mu.cylinder_measure(t) / mu.cylinder_measure(s))
            .max()
            .unwrap_or_else(crate::rational::one)
    }

    /// Lines `ρt + c` whose minimum bounds `μ(σM)` over the covered part
    /// when `μ(M) = t`: pieces with ratio above `ρ` are charged their whole
    /// target mass `c`, the others at most `ρ` times their share of `M`.
    pub fn modulus_lines(&self, mu: &ProductMeasure) -> Vec<(Q, Q)> {
        let mut pieces: Vec<(Q, Q)> = self
            .pieces
            .iter()
            .map(|(s, t)| {
                let mt = mu.cylinder_measure(t);
                (&mt / mu.cylinder_measure(s), mt)
            })
            .collect();
        pieces.sort();
        let mut lines = Vec::new();
        let mut above: Q = pieces.iter().map(|p| p.1.clone()).sum();
        lines.push((crate::rational::zero(), above.clone()));
        let mut i = 0;
        while i < pieces.len() {
            let rho = pieces[i].0.clone();
            while i < pieces.len() && pieces[i].0 == rho {
                above -= &pieces[i].1;
                i += 1;
            }
            lines.push((rho, above.clone()));
        }
        lines
    }

    /// Whether a piece changes some coordinate beyond `l`.
    pub fn piece_leaves(s: &Word, t: &Word, l: u32) -> bool {
        (s.bits ^ t.bits) >> l != 0
    }
}

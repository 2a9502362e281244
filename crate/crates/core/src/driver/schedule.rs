use serde::{Deserialize, Serialize};

/// Indices `(a, g, u)` into the enumerations of sets, increments and
/// neighborhoods.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub a: usize,
    pub g: usize,
    pub u: usize,
}

/// Diagonal enumeration with repetition: stage `s` lists, in lexicographic
/// order, every triple whose indices are all below `s` (capped by the sizes),
/// and stages follow one another forever. Each triple recurs in every later
/// stage.
#[derive(Clone, Debug)]
pub struct Schedule {
    pub sets: usize,
    pub increments: usize,
    pub neighborhoods: usize,
}

impl Schedule {
    pub fn new(sets: usize, increments: usize, neighborhoods: usize) -> Self {
        assert!(sets > 0 && increments > 0 && neighborhoods > 0);
        Schedule {
            sets,
            increments,
            neighborhoods,
        }
    }

    pub fn stage(&self, s: usize) -> Vec<Triple> {
        let mut out = Vec::new();
        for a in 0..s.min(self.sets) {
            for g in 0..s.min(self.increments) {
                for u in 0..s.min(self.neighborhoods) {
                    out.push(Triple { a, g, u });
                }
            }
        }
        out
    }

    /// The first `n` triples of the infinite sequence.
    pub fn prefix(&self, n: usize) -> Vec<Triple> {
        let mut out = Vec::with_capacity(n);
        let mut s = 1;
        while out.len() < n {
            out.extend(self.stage(s));
            s += 1;
        }
        out.truncate(n);
        out
    }

    /// Rounds needed before every triple has appeared at least once.
    pub fn covering_length(&self) -> usize {
        let full = self.sets.max(self.increments).max(self.neighborhoods);
        (1..=full).map(|s| self.stage(s).len()).sum()
    }

    pub fn all(&self) -> Vec<Triple> {
        self.stage(self.sets.max(self.increments).max(self.neighborhoods))
    }
}

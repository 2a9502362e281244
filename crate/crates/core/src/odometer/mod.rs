//! The space `{0,1}^N` with exact product measures, cylinder algebra and the
//! tail relation filtered by `S_n` (agreement beyond coordinate `n`).
//!
//! A word of depth `d` is stored as a `u64` whose bit `i-1` is coordinate `i`,
//! so `x & mask(n)` is the prefix in `X_n` and `x >> n` the suffix in `X^n`.

mod action;
mod fa1;
mod maps;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use action::{orbit_overflow, ActionKind, GammaAction, Generator, Overflow};
pub use fa1::{fa1_involution, Fa1Involution};
pub use maps::{FiniteDepthMap, PiecewiseCylinderMap};

use crate::error::{Error, Result};
use crate::rational::{q_ratio, Q};

/// Hard ceiling for explicitly enumerated depths.
pub const MAX_TABLE_DEPTH: u32 = 26;

#[inline]
pub fn mask(depth: u32) -> u64 {
    if depth >= 64 {
        u64::MAX
    } else {
        (1u64 << depth) - 1
    }
}

/// A finite 0/1 word; denotes the cylinder of points starting with it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub bits: u64,
    pub depth: u32,
}

impl Word {
    pub fn new(bits: u64, depth: u32) -> Self {
        Word {
            bits: bits & mask(depth),
            depth,
        }
    }

    pub fn empty() -> Self {
        Word { bits: 0, depth: 0 }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() > 63 {
            return Err(Error::invalid("word too long"));
        }
        let mut bits = 0u64;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << i,
                _ => return Err(Error::invalid(format!("not a 0/1 word: {s:?}"))),
            }
        }
        Ok(Word::new(bits, s.len() as u32))
    }

    /// Coordinate `i` (1-based).
    pub fn bit(&self, i: u32) -> u8 {
        ((self.bits >> (i - 1)) & 1) as u8
    }

    pub fn prefix(&self, n: u32) -> Word {
        Word::new(self.bits, n.min(self.depth))
    }

    pub fn suffix(&self, n: u32) -> Word {
        let n = n.min(self.depth);
        Word::new(self.bits >> n, self.depth - n)
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        self.depth <= other.depth && (other.bits & mask(self.depth)) == self.bits
    }

    /// Key ordering words lexicographically by coordinate sequence.
    pub fn lex_key(&self) -> (u64, u32) {
        (lex_key(self.bits, self.depth), self.depth)
    }
}

/// Reverses the low `depth` bits so that integer order is lexicographic order
/// of `x_1 x_2 ...`.
pub fn lex_key(bits: u64, depth: u32) -> u64 {
    if depth == 0 {
        0
    } else {
        bits.reverse_bits() >> (64 - depth)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.depth {
            write!(f, "{}", self.bit(i))?;
        }
        Ok(())
    }
}

/// Weight of one coordinate: `P(x_i = 0) = zero/den`, `P(x_i = 1) = one/den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordWeight {
    pub zero: u64,
    pub one: u64,
}

impl CoordWeight {
    pub fn new(zero: u64, one: u64) -> Result<Self> {
        if zero == 0 || one == 0 {
            return Err(Error::invalid("coordinate weights must be positive"));
        }
        let g = gcd(zero, one);
        Ok(CoordWeight {
            zero: zero / g,
            one: one / g,
        })
    }

    /// From the probability of the symbol 0.
    pub fn from_q(p0: &Q) -> Result<Self> {
        use num_traits::ToPrimitive;
        let (n, d) = (p0.numer().to_u64(), p0.denom().to_u64());
        match (n, d) {
            (Some(n), Some(d)) if n > 0 && n < d => Self::new(n, d - n),
            _ => Err(Error::invalid("coordinate weight must lie strictly between 0 and 1")),
        }
    }

    pub fn den(&self) -> u64 {
        self.zero + self.one
    }

    pub fn of(&self, bit: u8) -> u64 {
        if bit == 0 {
            self.zero
        } else {
            self.one
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// An eventually periodic product measure on `{0,1}^N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductMeasure {
    pub head: Vec<CoordWeight>,
    pub period: Vec<CoordWeight>,
}

impl ProductMeasure {
    pub fn new(head: Vec<CoordWeight>, period: Vec<CoordWeight>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::invalid("measure schedule needs a non-empty period"));
        }
        Ok(ProductMeasure { head, period })
    }

    pub fn uniform() -> Self {
        ProductMeasure {
            head: vec![],
            period: vec![CoordWeight { zero: 1, one: 1 }],
        }
    }

    /// Same weight `(p0, 1 - p0)` on every coordinate.
    pub fn bernoulli(p0: &Q) -> Result<Self> {
        Self::new(vec![], vec![CoordWeight::from_q(p0)?])
    }

    pub fn periodic(p0s: &[Q]) -> Result<Self> {
        let period = p0s.iter().map(CoordWeight::from_q).collect::<Result<Vec<_>>>()?;
        Self::new(vec![], period)
    }

    /// Weight of coordinate `i` (1-based).
    pub fn coord(&self, i: u32) -> CoordWeight {
        let i = (i - 1) as usize;
        if i < self.head.len() {
            self.head[i]
        } else {
            self.period[(i - self.head.len()) % self.period.len()]
        }
    }

    /// The image measure on `X^n` re-indexed from coordinate 1.
    pub fn shifted(&self, n: u32) -> ProductMeasure {
        let n = n as usize;
        if n < self.head.len() {
            ProductMeasure {
                head: self.head[n..].to_vec(),
                period: self.period.clone(),
            }
        } else {
            let k = (n - self.head.len()) % self.period.len();
            let mut period = self.period[k..].to_vec();
            period.extend_from_slice(&self.period[..k]);
            ProductMeasure { head: vec![], period }
        }
    }

    pub fn is_uniform(&self) -> bool {
        self.head.iter().chain(&self.period).all(|w| w.zero == w.one)
    }

    /// Exact measure of a cylinder.
    pub fn cylinder_measure(&self, w: &Word) -> Q {
        let (mut num, mut den) = (1u128, 1u128);
        for i in 1..=w.depth {
            let c = self.coord(i);
            num *= c.of(w.bit(i)) as u128;
            den *= c.den() as u128;
        }
        q_ratio(num, den)
    }

    /// Per-word numerators at `depth` over a common denominator.
    pub fn table(&self, depth: u32) -> Result<MeasureTable> {
        if depth > MAX_TABLE_DEPTH {
            return Err(Error::SizeGuard(format!(
                "depth {depth} exceeds the explicit table ceiling {MAX_TABLE_DEPTH}"
            )));
        }
        let mut den: u128 = 1;
        let mut numer: Vec<u128> = vec![1];
        for i in 1..=depth {
            let c = self.coord(i);
            den = den
                .checked_mul(c.den() as u128)
                .filter(|d| *d < (1u128 << 100))
                .ok_or_else(|| {
                    Error::DepthExhausted(format!("measure denominators overflow at depth {i}"))
                })?;
            let half = numer.len();
            let mut next = vec![0u128; half * 2];
            for (w, &v) in numer.iter().enumerate() {
                next[w] = v * c.zero as u128;
                next[w | half] = v * c.one as u128;
            }
            numer = next;
        }
        Ok(MeasureTable { depth, numer, den })
    }
}

/// Cylinder weights of every word at a fixed depth: `μ[w] = numer[w] / den`.
#[derive(Clone, Debug)]
pub struct MeasureTable {
    pub depth: u32,
    pub numer: Vec<u128>,
    pub den: u128,
}

impl MeasureTable {
    pub fn measure(&self, w: u64) -> Q {
        q_ratio(self.numer[w as usize], self.den)
    }

    pub fn sum<I: IntoIterator<Item = u64>>(&self, words: I) -> Q {
        q_ratio(self.sum_numer(words), self.den)
    }

    pub fn sum_numer<I: IntoIterator<Item = u64>>(&self, words: I) -> u128 {
        words.into_iter().map(|w| self.numer[w as usize]).sum()
    }

    pub fn of_set(&self, set: &CylinderSet) -> Q {
        let refined;
        let set = if set.depth == self.depth {
            set
        } else {
            refined = set.refine(self.depth);
            &refined
        };
        self.sum(set.iter())
    }

    pub fn len(&self) -> usize {
        self.numer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numer.is_empty()
    }
}

pub fn cylinder_measure(mu: &ProductMeasure, w: &Word) -> Q {
    mu.cylinder_measure(w)
}

/// `ρ(x, y)` for tail-equivalent points agreeing beyond the common depth:
/// `∏ w_i(y_i) / w_i(x_i)`.
pub fn radon_nikodym(mu: &ProductMeasure, x: &Word, y: &Word) -> Result<Q> {
    if x.depth != y.depth {
        return Err(Error::DepthMismatch {
            left: x.depth,
            right: y.depth,
        });
    }
    Ok(mu.cylinder_measure(y) / mu.cylinder_measure(x))
}

/// The `S_n`-class of `x`: all words differing from `x` in coordinates `<= n`.
pub fn class_of(x: &Word, n: u32) -> Result<Vec<Word>> {
    if x.depth < n {
        return Err(Error::invalid(format!("class_of needs depth >= {n}, got {}", x.depth)));
    }
    let high = x.bits & !mask(n);
    Ok((0..1u64 << n).map(|p| Word::new(high | p, x.depth)).collect())
}

/// A finite union of cylinders, stored as the set of depth-`depth` words it contains.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CylinderSet {
    pub depth: u32,
    member: Vec<bool>,
}

impl CylinderSet {
    pub fn empty(depth: u32) -> Self {
        CylinderSet {
            depth,
            member: vec![false; 1 << depth],
        }
    }

    pub fn full(depth: u32) -> Self {
        CylinderSet {
            depth,
            member: vec![true; 1 << depth],
        }
    }

    pub fn from_fn(depth: u32, f: impl Fn(u64) -> bool) -> Self {
        CylinderSet {
            depth,
            member: (0..1u64 << depth).map(f).collect(),
        }
    }

    /// Union of the given cylinders, represented at the largest of their depths.
    pub fn from_words(words: &[Word]) -> Self {
        let depth = words.iter().map(|w| w.depth).max().unwrap_or(0);
        Self::from_fn(depth, |x| {
            words.iter().any(|w| (x & mask(w.depth)) == w.bits)
        })
    }

    pub fn contains(&self, x: u64) -> bool {
        self.member[(x & mask(self.depth)) as usize]
    }

    pub fn insert(&mut self, x: u64) {
        self.member[(x & mask(self.depth)) as usize] = true;
    }

    pub fn remove(&mut self, x: u64) {
        self.member[(x & mask(self.depth)) as usize] = false;
    }

    pub fn refine(&self, depth: u32) -> CylinderSet {
        assert!(depth >= self.depth, "refine to a smaller depth");
        Self::from_fn(depth, |x| self.contains(x))
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.member
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i as u64)
    }

    pub fn words(&self) -> Vec<Word> {
        self.iter().map(|x| Word::new(x, self.depth)).collect()
    }

    pub fn count(&self) -> usize {
        self.member.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.member.iter().any(|&b| b)
    }

    fn zip(&self, other: &CylinderSet, op: impl Fn(bool, bool) -> bool) -> CylinderSet {
        let d = self.depth.max(other.depth);
        Self::from_fn(d, |x| op(self.contains(x), other.contains(x)))
    }

    pub fn union(&self, other: &CylinderSet) -> CylinderSet {
        self.zip(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &CylinderSet) -> CylinderSet {
        self.zip(other, |a, b| a && b)
    }

    pub fn minus(&self, other: &CylinderSet) -> CylinderSet {
        self.zip(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> CylinderSet {
        CylinderSet {
            depth: self.depth,
            member: self.member.iter().map(|b| !b).collect(),
        }
    }

    pub fn is_subset(&self, other: &CylinderSet) -> bool {
        let d = self.depth.max(other.depth);
        (0..1u64 << d).all(|x| !self.contains(x) || other.contains(x))
    }

    /// Whether membership depends only on coordinates beyond `n`.
    pub fn is_saturated(&self, n: u32) -> bool {
        *self == invariant_hull(self, n)
    }

    pub fn measure(&self, mu: &ProductMeasure) -> Result<Q> {
        Ok(mu.table(self.depth)?.of_set(self))
    }
}

/// The smallest `S_n`-invariant set containing `set`: union of the `S_n`-classes
/// meeting it.
pub fn invariant_hull(set: &CylinderSet, n: u32) -> CylinderSet {
    let d = set.depth;
    if n >= d {
        return if set.is_empty() {
            CylinderSet::empty(d)
        } else {
            CylinderSet::full(d)
        };
    }
    let mut hit = vec![false; 1 << (d - n)];
    for x in set.iter() {
        hit[(x >> n) as usize] = true;
    }
    CylinderSet::from_fn(d, |x| hit[(x >> n) as usize])
}

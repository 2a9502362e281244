use std::collections::HashMap;
use std::hash::Hash;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::group::Group;
use crate::odometer::{mask, CylinderSet, PiecewiseCylinderMap, ProductMeasure, Word};
use crate::rational::Q;

/// A cylinder-measurable function `X → V` of a fixed depth: a list of values
/// plus, per word, an index into that list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepFunction<V> {
    pub depth: u32,
    values: Vec<V>,
    index: Vec<u32>,
}

/// A step function that may take the absorbing value `⊥` (`None`).
pub type ExtendedStepFunction<E> = StepFunction<Option<E>>;

impl<V: Clone + Eq + Hash> StepFunction<V> {
    pub fn constant(depth: u32, v: V) -> Self {
        StepFunction {
            depth,
            values: vec![v],
            index: vec![0; 1 << depth],
        }
    }

    pub fn from_fn(depth: u32, mut f: impl FnMut(u64) -> V) -> Self {
        let mut values = Vec::new();
        let mut seen: HashMap<V, u32> = HashMap::new();
        let index = (0..1u64 << depth)
            .map(|x| {
                let v = f(x);
                *seen.entry(v.clone()).or_insert_with(|| {
                    values.push(v);
                    (values.len() - 1) as u32
                })
            })
            .collect();
        StepFunction {
            depth,
            values,
            index,
        }
    }

    /// Builds from candidate values and a per-word index into them, merging
    /// equal candidates and dropping unused ones.
    pub fn from_table(depth: u32, candidates: Vec<V>, index: Vec<u32>) -> Self {
        assert_eq!(index.len(), 1usize << depth);
        let mut values: Vec<V> = Vec::new();
        let mut remap = vec![u32::MAX; candidates.len()];
        let mut used = vec![false; candidates.len()];
        for &i in &index {
            used[i as usize] = true;
        }
        for (i, v) in candidates.into_iter().enumerate() {
            if !used[i] {
                continue;
            }
            remap[i] = match values.iter().position(|w| *w == v) {
                Some(j) => j as u32,
                None => {
                    values.push(v);
                    (values.len() - 1) as u32
                }
            };
        }
        let index = index.into_iter().map(|i| remap[i as usize]).collect();
        StepFunction {
            depth,
            values,
            index,
        }
    }

    /// Value at a word of any depth `>= self.depth`.
    #[inline]
    pub fn at(&self, x: u64) -> &V {
        &self.values[self.index_at(x) as usize]
    }

    #[inline]
    pub fn index_at(&self, x: u64) -> u32 {
        self.index[(x & mask(self.depth)) as usize]
    }

    /// The distinct values taken.
    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub fn refine(&self, depth: u32) -> Self {
        assert!(depth >= self.depth);
        StepFunction {
            depth,
            values: self.values.clone(),
            index: (0..1u64 << depth).map(|x| self.index_at(x)).collect(),
        }
    }

    pub fn map<W: Clone + Eq + Hash>(&self, f: impl Fn(&V) -> W) -> StepFunction<W> {
        StepFunction::from_fn(self.depth, |x| f(self.at(x)))
    }

    /// Words where the value is `v`.
    pub fn level_set(&self, v: &V) -> CylinderSet {
        match self.values.iter().position(|w| w == v) {
            Some(i) => CylinderSet::from_fn(self.depth, |x| self.index_at(x) == i as u32),
            None => CylinderSet::empty(self.depth),
        }
    }
}

impl<E: Clone + Eq + Hash> StepFunction<E> {
    /// `f*`: `f` on `z0`, `⊥` elsewhere.
    pub fn extend(&self, z0: &CylinderSet) -> ExtendedStepFunction<E> {
        let d = self.depth.max(z0.depth);
        StepFunction::from_fn(d, |x| z0.contains(x).then(|| self.at(x).clone()))
    }

    /// Pointwise product `f(x)·g(x)`.
    pub fn pointwise<G: Group<Elem = E>>(&self, group: &G, other: &Self) -> Self {
        let d = self.depth.max(other.depth);
        StepFunction::from_fn(d, |x| group.mul(self.at(x), other.at(x)))
    }

    pub fn is_identity<G: Group<Elem = E>>(&self, group: &G) -> bool {
        self.values.iter().all(|v| group.is_identity(v))
    }

    pub fn write_csv<G: Group<Elem = E>, W: Write>(&self, group: &G, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["word", "element"])?;
        for x in 0..1u64 << self.depth {
            w.write_record([Word::new(x, self.depth).to_string(), group.format(self.at(x))])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<G: Group<Elem = E>, R: Read>(group: &G, input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let mut rows: Vec<(Word, E)> = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let (Some(w), Some(e)) = (rec.get(0), rec.get(1)) else {
                return Err(Error::invalid("step function rows need word,element"));
            };
            rows.push((Word::parse(w)?, group.parse(e)?));
        }
        let depth = rows.first().map(|r| r.0.depth).unwrap_or(0);
        if rows.len() != 1 << depth || rows.iter().any(|r| r.0.depth != depth) {
            return Err(Error::invalid("step function table must list every word of one depth"));
        }
        let mut table: Vec<Option<E>> = vec![None; 1 << depth];
        for (w, e) in rows {
            table[w.bits as usize] = Some(e);
        }
        if table.iter().any(Option::is_none) {
            return Err(Error::invalid("duplicate word in step function table"));
        }
        Ok(StepFunction::from_fn(depth, |x| table[x as usize].clone().unwrap()))
    }
}

/// `Δ_σ f` at a working depth; undefined (`None`) on the generator remainder.
#[derive(Clone, Debug)]
pub struct Increment<E> {
    pub depth: u32,
    pub values: Vec<E>,
    index: Vec<u32>,
}

const UNDEFINED: u32 = u32::MAX;

impl<E: Clone + Eq + Hash> Increment<E> {
    #[inline]
    pub fn at(&self, x: u64) -> Option<&E> {
        match self.index[(x & mask(self.depth)) as usize] {
            UNDEFINED => None,
            i => Some(&self.values[i as usize]),
        }
    }

    pub fn remainder(&self) -> CylinderSet {
        CylinderSet::from_fn(self.depth, |x| self.at(x).is_none())
    }

    /// Rebuilds a table from explicit values, mainly for tests.
    pub fn from_fn(depth: u32, f: impl Fn(u64) -> Option<E>) -> Self {
        let mut values: Vec<E> = Vec::new();
        let index = (0..1u64 << depth)
            .map(|x| match f(x) {
                None => UNDEFINED,
                Some(v) => match values.iter().position(|w| *w == v) {
                    Some(i) => i as u32,
                    None => {
                        values.push(v);
                        (values.len() - 1) as u32
                    }
                },
            })
            .collect();
        Increment {
            depth,
            values,
            index,
        }
    }
}

/// `Δ_σ f(x) = f(σx)·f(x)⁻¹` on all depth-`d` words covered by pieces of `σ`.
/// Fails when the uncovered remainder is heavier than `remainder_bound`.
pub fn delta<G: Group>(
    group: &G,
    f: &StepFunction<G::Elem>,
    sigma: &PiecewiseCylinderMap,
    d: u32,
    mu: &ProductMeasure,
    remainder_bound: &Q,
) -> Result<Increment<G::Elem>> {
    if d < f.depth {
        return Err(Error::DepthMismatch {
            left: d,
            right: f.depth,
        });
    }
    let images = sigma.image_table(d);
    let fv = f.values();
    let inverses: Vec<G::Elem> = fv.iter().map(|v| group.inv(v)).collect();
    let mut memo: HashMap<(u32, u32), u32> = HashMap::new();
    let mut values: Vec<G::Elem> = Vec::new();
    let mut seen: HashMap<G::Elem, u32> = HashMap::new();
    let mut index = vec![UNDEFINED; 1 << d];
    for (x, img) in images.iter().enumerate() {
        let Some(y) = img else { continue };
        let (a, b) = (f.index_at(*y as u64), f.index_at(x as u64));
        let slot = *memo.entry((a, b)).or_insert_with(|| {
            let v = group.mul(&fv[a as usize], &inverses[b as usize]);
            *seen.entry(v.clone()).or_insert_with(|| {
                values.push(v);
                (values.len() - 1) as u32
            })
        });
        index[x] = slot;
    }
    let inc = Increment {
        depth: d,
        values,
        index,
    };
    let rem = inc.remainder().measure(mu)?;
    if rem > *remainder_bound {
        return Err(Error::DepthExhausted(format!(
            "increment undefined on mass {} at depth {d}",
            crate::rational::fmt_q(&rem)
        )));
    }
    Ok(inc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use crate::odometer::{ActionKind, GammaAction};
    use crate::rational::q;

    fn z3() -> FiniteGroup {
        FiniteGroup::cyclic(3)
    }

    #[test]
    fn constant_has_trivial_increment() {
        let g = z3();
        let a = GammaAction::new(ActionKind::AddingMachine, 8).unwrap();
        let f = StepFunction::constant(3, 2u16);
        let inc = delta(&g, &f, &a.generators[0].map, 8, &ProductMeasure::uniform(), &q(1, 64)).unwrap();
        for x in 0..255 {
            assert_eq!(inc.at(x), Some(&0));
        }
        assert_eq!(inc.at(255), None);
    }

    #[test]
    fn first_bit_function_under_swap() {
        let g = z3();
        let h = 1u16;
        let f = StepFunction::from_fn(1, |x| if x & 1 == 0 { 0 } else { h });
        let s = GammaAction::new(ActionKind::FirstBitSwap, 1).unwrap();
        let inc = delta(&g, &f, &s.generators[0].map, 3, &ProductMeasure::uniform(), &q(0, 1)).unwrap();
        for x in 0..8 {
            let v = *inc.at(x).unwrap();
            assert!(v == h || v == g.inv(&h));
        }
    }

    #[test]
    fn inverse_generator_law() {
        let g = FiniteGroup::symmetric(3);
        let a = GammaAction::new(ActionKind::AddingMachine, 7).unwrap();
        let f = StepFunction::from_fn(3, |x| (x % 6) as u16);
        let mu = ProductMeasure::uniform();
        let bound = q(1, 32);
        let d_t = delta(&g, &f, &a.generators[0].map, 7, &mu, &bound).unwrap();
        let d_ti = delta(&g, &f, &a.generators[1].map, 7, &mu, &bound).unwrap();
        for x in 0..127u64 {
            let tx = x + 1;
            assert_eq!(*d_ti.at(tx).unwrap(), g.inv(d_t.at(x).unwrap()));
        }
    }

    #[test]
    fn csv_round_trip() {
        let g = FiniteGroup::symmetric(3);
        let f = StepFunction::from_fn(2, |x| x as u16);
        let mut buf = Vec::new();
        f.write_csv(&g, &mut buf).unwrap();
        let back = StepFunction::read_csv(&g, buf.as_slice()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn extension_marks_complement() {
        let f = StepFunction::constant(1, 5u16);
        let z0 = CylinderSet::from_words(&[Word::parse("10").unwrap()]);
        let e = f.extend(&z0);
        assert_eq!(e.at(0b01), &Some(5));
        assert_eq!(e.at(0b00), &None);
    }
}

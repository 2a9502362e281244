use std::collections::{BTreeMap, HashMap};

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::cocycle::{CocycleKernel, StepFunction};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::odometer::{mask, Word};

/// Largest `2^depth · |G|` vertex count the oracle accepts.
pub const MAX_SKEW_VERTICES: usize = 1 << 24;

/// Components of a finite-depth skew-product graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityReport {
    /// Depth of the words the cocycle is evaluated on.
    pub depth: u32,
    /// Relation level: words are linked when they agree beyond it.
    pub level: u32,
    /// Vertices are `{0,1}^resolution × G`.
    pub resolution: u32,
    pub group_order: usize,
    pub components: usize,
    /// One `(word, element)` per component.
    pub representatives: Vec<(String, String)>,
}

fn finite_elements<G: Group>(group: &G) -> Result<(Vec<G::Elem>, HashMap<G::Elem, usize>)> {
    let elems = group
        .elements()
        .ok_or_else(|| Error::invalid("skew connectivity needs a finite group"))?;
    let index = elems.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
    Ok((elems, index))
}

fn guard(depth: u32, order: usize) -> Result<()> {
    if depth > 26 || (1usize << depth).saturating_mul(order) > MAX_SKEW_VERTICES {
        return Err(Error::SizeGuard(format!(
            "skew graph 2^{depth} x {order} exceeds {MAX_SKEW_VERTICES} vertices"
        )));
    }
    Ok(())
}

fn report<G: Group>(
    group: &G,
    elems: &[G::Elem],
    uf: &mut UnionFind<usize>,
    resolution: u32,
    depth: u32,
    level: u32,
) -> ConnectivityReport {
    let n = elems.len();
    let mut reps: BTreeMap<usize, usize> = BTreeMap::new();
    for v in 0..(1usize << resolution) * n {
        reps.entry(uf.find_mut(v)).or_insert(v);
    }
    let mut representatives: Vec<(String, String)> = reps
        .values()
        .map(|&v| {
            (
                Word::new((v / n) as u64, resolution).to_string(),
                group.format(&elems[v % n]),
            )
        })
        .collect();
    representatives.sort();
    ConnectivityReport {
        depth,
        level,
        resolution,
        group_order: n,
        components: reps.len(),
        representatives,
    }
}

/// Graph on `{0,1}^M × G` with `(w, g) ∼ (w', c(w', w) g)` for `w, w'` in one
/// `S_m`-class of the kernel.
pub fn skew_connectivity<G: Group>(
    group: &G,
    kernel: &CocycleKernel<G::Elem>,
) -> Result<ConnectivityReport> {
    let (elems, index) = finite_elements(group)?;
    let n = elems.len();
    guard(kernel.depth, n)?;
    let mut uf = UnionFind::new((1usize << kernel.depth) * n);
    for w in 0..1u64 << kernel.depth {
        let high = w & !mask(kernel.m);
        for p in 0..1u64 << kernel.m {
            let v = high | p;
            let c = kernel.get(v, w);
            for (gi, g) in elems.iter().enumerate() {
                let target = index[&group.mul(c, g)];
                uf.union(w as usize * n + gi, v as usize * n + target);
            }
        }
    }
    Ok(report(group, &elems, &mut uf, kernel.depth, kernel.depth, kernel.m))
}

/// The edge list of the kernel skew graph as `(w|g, w'|g')` labels.
pub fn skew_edges<G: Group>(
    group: &G,
    kernel: &CocycleKernel<G::Elem>,
) -> Result<Vec<(String, String)>> {
    let (elems, _) = finite_elements(group)?;
    guard(kernel.depth, elems.len())?;
    let mut out = Vec::new();
    let d = kernel.depth;
    for w in 0..1u64 << d {
        let high = w & !mask(kernel.m);
        for p in 0..1u64 << kernel.m {
            let v = high | p;
            if v <= w {
                continue;
            }
            let c = kernel.get(v, w);
            for g in &elems {
                out.push((
                    format!("{}|{}", Word::new(w, d), group.format(g)),
                    format!("{}|{}", Word::new(v, d), group.format(&group.mul(c, g))),
                ));
            }
        }
    }
    Ok(out)
}

/// Skew graph of `α(y, x) = f(y) f(x)⁻¹` seen at a coarser resolution:
/// vertices `{0,1}^L × G`, and depth-`M` words `x, y` agreeing beyond `D`
/// link `(x|L, g)` with `(y|L, f(y) f(x)⁻¹ g)`.
///
/// Each `(x, g)` is joined to a hub `(x >> D, f(x)⁻¹ g)`; two projected
/// vertices share a hub exactly when some pair of words links them.
pub fn skew_ladder<G: Group>(
    group: &G,
    f: &StepFunction<G::Elem>,
    resolution: u32,
    level: u32,
    depth: u32,
) -> Result<ConnectivityReport> {
    if !(resolution <= level && level <= depth && f.depth <= depth) {
        return Err(Error::invalid("skew ladder needs resolution <= level <= depth and f.depth <= depth"));
    }
    let (elems, index) = finite_elements(group)?;
    let n = elems.len();
    guard(depth, n)?;
    let base = (1usize << resolution) * n;
    let hubs = (1usize << (depth - level)) * n;
    let mut uf = UnionFind::new(base + hubs);
    // hub index of the pair (value index of f, element)
    let inv_vals: Vec<G::Elem> = f.values().iter().map(|v| group.inv(v)).collect();
    let shift: Vec<Vec<usize>> = inv_vals
        .iter()
        .map(|iv| elems.iter().map(|g| index[&group.mul(iv, g)]).collect())
        .collect();
    for x in 0..1u64 << depth {
        let fi = f.index_at(x) as usize;
        let vtx = (x & mask(resolution)) as usize * n;
        let hub = base + (x >> level) as usize * n;
        for gi in 0..n {
            uf.union(vtx + gi, hub + shift[fi][gi]);
        }
    }
    Ok(report(group, &elems, &mut uf, resolution, depth, level))
}

#[derive(Default)]
struct Patterns {
    list: Vec<Vec<u32>>,
    interned: HashMap<Vec<u32>, u32>,
}

/// [`skew_ladder`] for every level `resolution..=depth` at once.
///
/// The link pattern of a suffix `s` at level `D` is the set of
/// `(x|L, f-index of x)` over words `x` with `x >> D = s`; patterns of level
/// `D + 1` are unions of two patterns of level `D`. Links only grow with the
/// level, so one union-find absorbs each distinct pattern once.
pub fn skew_ladder_all<G: Group>(
    group: &G,
    f: &StepFunction<G::Elem>,
    resolution: u32,
    depth: u32,
) -> Result<Vec<ConnectivityReport>> {
    if !(resolution <= depth && f.depth <= depth) {
        return Err(Error::invalid("skew ladder needs resolution <= depth and f.depth <= depth"));
    }
    let (elems, index) = finite_elements(group)?;
    let n = elems.len();
    // only the projected vertices are stored; the words are streamed
    guard(resolution, n)?;
    if depth > 30 {
        return Err(Error::SizeGuard(format!("ladder depth {depth} exceeds 30")));
    }
    let nv = f.values().len() as u32;
    // mul[v][w][g] = index of f_v f_w⁻¹ g
    let inv_vals: Vec<G::Elem> = f.values().iter().map(|v| group.inv(v)).collect();
    let mul: Vec<Vec<Vec<usize>>> = f
        .values()
        .iter()
        .map(|v| {
            inv_vals
                .iter()
                .map(|iw| elems.iter().map(|g| index[&group.mul(&group.mul(v, iw), g)]).collect())
                .collect()
        })
        .collect();
    let mut uf = UnionFind::new((1usize << resolution) * n);
    let mut pats = Patterns::default();
    let absorb = |p: Vec<u32>, pats: &mut Patterns, uf: &mut UnionFind<usize>| -> u32 {
        if let Some(&id) = pats.interned.get(&p) {
            return id;
        }
        let (t0, v0) = ((p[0] / nv) as usize, (p[0] % nv) as usize);
        for &code in &p[1..] {
            let (t, v) = ((code / nv) as usize, (code % nv) as usize);
            for gi in 0..n {
                uf.union(t0 * n + gi, t * n + mul[v][v0][gi]);
            }
        }
        let id = pats.list.len() as u32;
        pats.list.push(p.clone());
        pats.interned.insert(p, id);
        id
    };
    let mut ids: Vec<u32> = (0..1u64 << (depth - resolution))
        .map(|s| {
            let mut p: Vec<u32> = (0..1u64 << resolution)
                .map(|t| t as u32 * nv + f.index_at(s << resolution | t))
                .collect();
            p.sort_unstable();
            p.dedup();
            absorb(p, &mut pats, &mut uf)
        })
        .collect();
    let mut out = vec![report(group, &elems, &mut uf, resolution, depth, resolution)];
    let mut merged: HashMap<(u32, u32), u32> = HashMap::new();
    for level in resolution + 1..=depth {
        ids = ids
            .chunks(2)
            .map(|c| {
                let key = (c[0].min(c[1]), c[0].max(c[1]));
                if let Some(&id) = merged.get(&key) {
                    return id;
                }
                let (a, b) = (&pats.list[key.0 as usize], &pats.list[key.1 as usize]);
                let mut p: Vec<u32> = a.iter().chain(b).copied().collect();
                p.sort_unstable();
                p.dedup();
                let id = absorb(p, &mut pats, &mut uf);
                merged.insert(key, id);
                id
            })
            .collect();
        out.push(report(group, &elems, &mut uf, resolution, depth, level));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::coboundary_kernel;
    use crate::group::FiniteGroup;

    /// Oracle: breadth-first search on the explicit edge set.
    fn bfs_components(vertices: usize, edges: &[(usize, usize)]) -> usize {
        let mut adj = vec![Vec::new(); vertices];
        for &(a, b) in edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; vertices];
        let mut count = 0;
        for s in 0..vertices {
            if seen[s] {
                continue;
            }
            count += 1;
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(v) = stack.pop() {
                for &u in &adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
        }
        count
    }

    #[test]
    fn trivial_cocycle_has_order_many_components() {
        for k in [2, 3, 5] {
            let g = FiniteGroup::cyclic(k);
            let f = StepFunction::constant(0, 0u16);
            let kern = coboundary_kernel(&g, &f, 3, 3).unwrap();
            assert_eq!(skew_connectivity(&g, &kern).unwrap().components, k);
        }
    }

    #[test]
    fn first_bit_coboundary_on_eight_vertices() {
        let g = FiniteGroup::cyclic(2);
        let f = StepFunction::from_fn(1, |x| (x & 1) as u16);
        let kern = coboundary_kernel(&g, &f, 2, 2).unwrap();
        let r = skew_connectivity(&g, &kern).unwrap();
        assert_eq!(r.components, 2);
        // brute force over the 8 vertices
        let mut edges = Vec::new();
        for w in 0..4usize {
            for v in 0..4usize {
                for h in 0..2usize {
                    let c = (f.at(v as u64) + 2 - f.at(w as u64)) % 2;
                    edges.push((w * 2 + h, v * 2 + (c as usize + h) % 2));
                }
            }
        }
        assert_eq!(bfs_components(8, &edges), 2);
    }

    #[test]
    fn ladder_matches_brute_force() {
        let g = FiniteGroup::cyclic(2);
        let f = StepFunction::from_fn(4, |x| ((x >> 1 ^ x >> 3) & 1) as u16);
        for level in 1..=4 {
            let r = skew_ladder(&g, &f, 1, level, 4).unwrap();
            let mut edges = Vec::new();
            for x in 0..16u64 {
                for y in 0..16u64 {
                    if x >> level != y >> level {
                        continue;
                    }
                    let c = (f.at(y) + 2 - f.at(x)) % 2;
                    for h in 0..2u16 {
                        edges.push(((x & 1) as usize * 2 + h as usize, (y & 1) as usize * 2 + ((c + h) % 2) as usize));
                    }
                }
            }
            assert_eq!(r.components, bfs_components(4, &edges), "level {level}");
        }
    }

    #[test]
    fn ladder_is_monotone_and_coboundaries_stay_split() {
        let g = FiniteGroup::cyclic(3);
        let f = StepFunction::from_fn(3, |x| (x % 3) as u16);
        let mut prev = usize::MAX;
        for level in 1..=6 {
            let c = skew_ladder(&g, &f, 1, level, 6).unwrap().components;
            assert!(c <= prev);
            prev = c;
        }
        assert_eq!(skew_ladder(&g, &f, 3, 6, 6).unwrap().components, 3);
    }

    #[test]
    fn all_levels_agree_with_single_levels() {
        let s3 = FiniteGroup::symmetric(3);
        let vals: Vec<u16> = (0..6).collect();
        let f = StepFunction::from_fn(5, |x| vals[((x * 7 + (x >> 2)) % 6) as usize]);
        for l in 1..=2 {
            let all = skew_ladder_all(&s3, &f, l, 7).unwrap();
            assert_eq!(all.len() as u32, 7 - l + 1);
            for r in &all {
                assert_eq!(r, &skew_ladder(&s3, &f, l, r.level, 7).unwrap());
            }
        }
        let z2 = FiniteGroup::cyclic(2);
        let c = skew_ladder_all(&z2, &StepFunction::constant(0, 0u16), 1, 6).unwrap();
        assert!(c.iter().all(|r| r.components == 2));
    }

    #[test]
    fn size_guard_trips() {
        let g = FiniteGroup::cyclic(2);
        let f = StepFunction::constant(0, 0u16);
        assert!(matches!(skew_ladder(&g, &f, 1, 25, 25), Err(Error::SizeGuard(_))));
    }
}

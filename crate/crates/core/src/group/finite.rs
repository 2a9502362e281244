use std::collections::{BTreeMap, HashMap, VecDeque};
use std::io::Read;

use super::Group;
use crate::error::{Error, Result};
use crate::rational::{one, zero, Q};

/// A finite group given by its multiplication table. Discrete topology; the
/// neighborhood base defaults to `{1}` but may be coarsened by normal
/// symmetric subsets.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    name: String,
    labels: Vec<String>,
    table: Vec<u16>,
    inverse: Vec<u16>,
    identity: u16,
    /// `base[k-1]` is the indicator of `U_k`; indices past the end reuse the last set.
    base: Vec<Vec<bool>>,
}

impl FiniteGroup {
    pub fn from_table(name: &str, labels: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 || n > u16::MAX as usize || table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("multiplication table must be square and non-empty"));
        }
        if table.iter().flatten().any(|&x| x >= n) {
            return Err(Error::invalid("table entry out of range"));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| Error::invalid("table has no identity"))?;
        let mut inverse = vec![0u16; n];
        for a in 0..n {
            let b = (0..n)
                .find(|&b| table[a][b] == identity)
                .ok_or_else(|| Error::invalid(format!("{} has no inverse", labels[a])))?;
            inverse[a] = b as u16;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::invalid("table is not associative"));
                    }
                }
            }
        }
        let flat = table.iter().flatten().map(|&x| x as u16).collect();
        let mut trivial = vec![false; n];
        trivial[identity] = true;
        Ok(FiniteGroup {
            name: name.to_string(),
            labels,
            table: flat,
            inverse,
            identity: identity as u16,
            base: vec![trivial],
        })
    }

    /// Reads a table in CSV form: a header row `*,a,b,...` followed by one
    /// row per left factor, `a,ab,...`.
    pub fn from_csv<R: Read>(name: &str, reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let header = rdr.headers()?.clone();
        let labels: Vec<String> = header.iter().skip(1).map(|s| s.trim().to_string()).collect();
        let index: HashMap<&str, usize> =
            labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let mut rows: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for rec in rdr.records() {
            let rec = rec?;
            let mut it = rec.iter().map(str::trim);
            let left = it.next().ok_or_else(|| Error::invalid("empty row"))?;
            let li = *index
                .get(left)
                .ok_or_else(|| Error::invalid(format!("unknown element {left}")))?;
            let row = it
                .map(|s| {
                    index
                        .get(s)
                        .copied()
                        .ok_or_else(|| Error::invalid(format!("unknown element {s}")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.insert(li, row);
        }
        if rows.len() != labels.len() {
            return Err(Error::invalid("table is missing rows"));
        }
        Self::from_table(name, labels, rows.into_values().collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("*");
        for l in &self.labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for a in 0..self.labels.len() {
            out.push_str(&self.labels[a]);
            for b in 0..self.labels.len() {
                out.push(',');
                out.push_str(&self.labels[self.table[a * self.labels.len() + b] as usize]);
            }
            out.push('\n');
        }
        out
    }

    pub fn cyclic(n: usize) -> Self {
        let labels = (0..n).map(|i| i.to_string()).collect();
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::from_table(&format!("Z/{n}"), labels, table).expect("cyclic table is valid")
    }

    /// The group generated by the given permutations of `{0, .., degree-1}`.
    pub fn from_permutations(name: &str, degree: usize, gens: &[Vec<usize>]) -> Result<Self> {
        let id: Vec<usize> = (0..degree).collect();
        let compose = |p: &[usize], q: &[usize]| -> Vec<usize> { q.iter().map(|&i| p[i]).collect() };
        let mut seen = vec![id.clone()];
        let mut queue = VecDeque::from([id]);
        while let Some(p) = queue.pop_front() {
            for g in gens {
                let r = compose(g, &p);
                if !seen.contains(&r) {
                    seen.push(r.clone());
                    queue.push_back(r);
                }
            }
        }
        seen.sort();
        let index: HashMap<Vec<usize>, usize> =
            seen.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let table = seen
            .iter()
            .map(|p| seen.iter().map(|q| index[&compose(p, q)]).collect())
            .collect();
        let labels = seen.iter().map(|p| cycle_notation(p)).collect();
        Self::from_table(name, labels, table)
    }

    pub fn symmetric(n: usize) -> Self {
        let mut gens = vec![];
        if n >= 2 {
            let mut t: Vec<usize> = (0..n).collect();
            t.swap(0, 1);
            gens.push(t);
            gens.push((0..n).map(|i| (i + 1) % n).collect());
        }
        Self::from_permutations(&format!("S{n}"), n, &gens).expect("symmetric group")
    }

    /// Symmetries of the regular `n`-gon acting on its vertices.
    pub fn dihedral(n: usize) -> Self {
        let rot = (0..n).map(|i| (i + 1) % n).collect();
        let refl = (0..n).map(|i| (n - i) % n).collect();
        Self::from_permutations(&format!("D{n}"), n, &[rot, refl]).expect("dihedral group")
    }

    pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> Self {
        let (na, nb) = (a.len(), b.len());
        let labels = (0..na * nb)
            .map(|i| format!("{}|{}", a.labels[i / nb], b.labels[i % nb]))
            .collect();
        let table = (0..na * nb)
            .map(|x| {
                (0..na * nb)
                    .map(|y| {
                        let p = a.table[(x / nb) * na + y / nb] as usize;
                        let q = b.table[(x % nb) * nb + y % nb] as usize;
                        p * nb + q
                    })
                    .collect()
            })
            .collect();
        Self::from_table(&format!("{}x{}", a.name, b.name), labels, table).expect("product table")
    }

    /// Replaces the neighborhood base by the given normal symmetric subsets
    /// (element labels), outermost first.
    pub fn with_base(mut self, sets: &[Vec<&str>]) -> Result<Self> {
        let mut base = vec![];
        for set in sets {
            let mut ind = vec![false; self.len()];
            for l in set {
                ind[self.index_of(l)?] = true;
            }
            base.push(ind);
        }
        let n = self.len();
        for (k, ind) in base.iter().enumerate() {
            if !ind[self.identity as usize] {
                return Err(Error::invalid("neighborhood must contain the identity"));
            }
            for x in 0..n {
                if ind[x] != ind[self.inverse[x] as usize] {
                    return Err(Error::invalid("neighborhood is not symmetric"));
                }
                for y in 0..n {
                    let c = self.conj(&(y as u16), &(x as u16)) as usize;
                    if ind[x] != ind[c] {
                        return Err(Error::invalid("neighborhood is not normal"));
                    }
                }
                if k > 0 && ind[x] && !base[k - 1][x] {
                    return Err(Error::invalid("neighborhoods must be nested"));
                }
            }
        }
        if base.last().map(|l| l.iter().filter(|&&b| b).count()) != Some(1) {
            return Err(Error::invalid("the base must end with the trivial neighborhood"));
        }
        self.base = base;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label.trim())
            .ok_or_else(|| Error::invalid(format!("{} has no element {label:?}", self.name)))
    }

    pub fn label(&self, a: u16) -> &str {
        &self.labels[a as usize]
    }
}

fn cycle_notation(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] == start {
            continue;
        }
        let mut cyc = vec![];
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            cyc.push((i + 1).to_string());
            i = p[i];
        }
        out.push('(');
        out.push_str(&cyc.join(" "));
        out.push(')');
    }
    if out.is_empty() {
        "()".to_string()
    } else {
        out
    }
}

impl Group for FiniteGroup {
    type Elem = u16;

    fn name(&self) -> String {
        self.name.clone()
    }

    fn identity(&self) -> u16 {
        self.identity
    }

    fn mul(&self, a: &u16, b: &u16) -> u16 {
        self.table[*a as usize * self.len() + *b as usize]
    }

    fn inv(&self, a: &u16) -> u16 {
        self.inverse[*a as usize]
    }

    fn metric(&self, a: &u16, b: &u16) -> Q {
        if a == b {
            zero()
        } else {
            one()
        }
    }

    fn in_neighborhood(&self, k: usize, x: &u16) -> bool {
        let k = k.max(1).min(self.base.len());
        self.base[k - 1][*x as usize]
    }

    fn conjugators(&self) -> Option<Vec<u16>> {
        let all: Vec<u16> = (0..self.len() as u16).collect();
        let abelian = all.iter().all(|a| all.iter().all(|b| self.mul(a, b) == self.mul(b, a)));
        if abelian {
            None
        } else {
            Some(all)
        }
    }

    fn format(&self, a: &u16) -> String {
        self.labels[*a as usize].clone()
    }

    fn parse(&self, s: &str) -> Result<u16> {
        self.index_of(s).map(|i| i as u16)
    }

    fn elements(&self) -> Option<Vec<u16>> {
        Some((0..self.len() as u16).collect())
    }

    fn sample(&self) -> Vec<u16> {
        (0..self.len() as u16).collect()
    }
}

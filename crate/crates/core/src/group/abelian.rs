use super::Group;
use crate::error::{Error, Result};
use crate::rational::{one, q_int, zero, Q};

fn parse_ints(s: &str) -> Result<Vec<i64>> {
    let s = s.trim().trim_start_matches('(').trim_end_matches(')');
    if s.trim().is_empty() {
        return Ok(vec![]);
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::invalid(format!("not an integer: {t:?}")))
        })
        .collect()
}

fn fmt_ints(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn sup_norm(v: &[i64]) -> Q {
    q_int(v.iter().map(|x| x.abs()).max().unwrap_or(0))
}

/// `Z^d` with the discrete topology, `U_k = {0}`.
#[derive(Clone, Debug)]
pub struct FreeAbelian {
    pub rank: usize,
}

impl FreeAbelian {
    pub fn new(rank: usize) -> Self {
        FreeAbelian { rank }
    }

    pub fn unit(&self, i: usize, sign: i64) -> Vec<i64> {
        let mut v = vec![0; self.rank];
        v[i] = sign;
        v
    }

    /// `{±e_1, .., ±e_d}`.
    pub fn signed_units(&self) -> Vec<Vec<i64>> {
        (0..self.rank)
            .flat_map(|i| [self.unit(i, 1), self.unit(i, -1)])
            .collect()
    }
}

impl Group for FreeAbelian {
    type Elem = Vec<i64>;

    fn name(&self) -> String {
        format!("Z^{}", self.rank)
    }

    fn identity(&self) -> Vec<i64> {
        vec![0; self.rank]
    }

    fn mul(&self, a: &Vec<i64>, b: &Vec<i64>) -> Vec<i64> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn inv(&self, a: &Vec<i64>) -> Vec<i64> {
        a.iter().map(|x| -x).collect()
    }

    fn metric(&self, a: &Vec<i64>, b: &Vec<i64>) -> Q {
        if a == b {
            zero()
        } else {
            one()
        }
    }

    fn in_neighborhood(&self, _k: usize, x: &Vec<i64>) -> bool {
        x.iter().all(|&c| c == 0)
    }

    fn conjugators(&self) -> Option<Vec<Vec<i64>>> {
        None
    }

    fn norm(&self, a: &Vec<i64>) -> Option<Q> {
        Some(sup_norm(a))
    }

    fn format(&self, a: &Vec<i64>) -> String {
        fmt_ints(a)
    }

    fn parse(&self, s: &str) -> Result<Vec<i64>> {
        let v = parse_ints(s)?;
        if v.len() != self.rank {
            return Err(Error::invalid(format!("expected {} coordinates in {s:?}", self.rank)));
        }
        Ok(v)
    }

    fn sample(&self) -> Vec<Vec<i64>> {
        let mut out = vec![self.identity()];
        for i in 0..self.rank {
            for s in [1, -1, 2, -3] {
                out.push(self.unit(i, s));
            }
        }
        if self.rank >= 2 {
            out.push(self.mul(&self.unit(0, 1), &self.unit(1, -2)));
        }
        out
    }
}

/// `⊕_{n>0} Z`, finitely supported integer sequences with the sup-norm.
#[derive(Clone, Debug, Default)]
pub struct DirectSumZ;

impl DirectSumZ {
    fn trim(mut v: Vec<i64>) -> Vec<i64> {
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    }

    /// `±e_n` for `n = 1..=count`, i.e. the norm-one unit vectors.
    pub fn signed_units(count: usize) -> Vec<Vec<i64>> {
        (1..=count)
            .flat_map(|n| {
                [1, -1].map(|s| {
                    let mut v = vec![0; n];
                    v[n - 1] = s;
                    v
                })
            })
            .collect()
    }
}

impl Group for DirectSumZ {
    type Elem = Vec<i64>;

    fn name(&self) -> String {
        "DirectSum(Z)".to_string()
    }

    fn identity(&self) -> Vec<i64> {
        vec![]
    }

    fn mul(&self, a: &Vec<i64>, b: &Vec<i64>) -> Vec<i64> {
        let n = a.len().max(b.len());
        let v = (0..n)
            .map(|i| a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0))
            .collect();
        Self::trim(v)
    }

    fn inv(&self, a: &Vec<i64>) -> Vec<i64> {
        a.iter().map(|x| -x).collect()
    }

    fn metric(&self, a: &Vec<i64>, b: &Vec<i64>) -> Q {
        if a == b {
            zero()
        } else {
            one()
        }
    }

    fn in_neighborhood(&self, _k: usize, x: &Vec<i64>) -> bool {
        x.is_empty()
    }

    fn conjugators(&self) -> Option<Vec<Vec<i64>>> {
        None
    }

    fn norm(&self, a: &Vec<i64>) -> Option<Q> {
        Some(sup_norm(a))
    }

    fn format(&self, a: &Vec<i64>) -> String {
        fmt_ints(a)
    }

    fn parse(&self, s: &str) -> Result<Vec<i64>> {
        Ok(Self::trim(parse_ints(s)?))
    }

    fn sample(&self) -> Vec<Vec<i64>> {
        let mut out = vec![vec![]];
        out.extend(Self::signed_units(3));
        out.push(vec![2, 0, -1]);
        out.push(vec![0, 5]);
        out
    }
}

/// Direct product of two models; metric is the max, `U_k` the product.
#[derive(Clone, Debug)]
pub struct ProductGroup<A, B> {
    pub left: A,
    pub right: B,
}

impl<A: Group, B: Group> ProductGroup<A, B> {
    pub fn new(left: A, right: B) -> Self {
        ProductGroup { left, right }
    }
}

impl<A: Group, B: Group> Group for ProductGroup<A, B> {
    type Elem = (A::Elem, B::Elem);

    fn name(&self) -> String {
        format!("{}x{}", self.left.name(), self.right.name())
    }

    fn identity(&self) -> Self::Elem {
        (self.left.identity(), self.right.identity())
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        (self.left.mul(&a.0, &b.0), self.right.mul(&a.1, &b.1))
    }

    fn inv(&self, a: &Self::Elem) -> Self::Elem {
        (self.left.inv(&a.0), self.right.inv(&a.1))
    }

    fn metric(&self, a: &Self::Elem, b: &Self::Elem) -> Q {
        let l = self.left.metric(&a.0, &b.0);
        let r = self.right.metric(&a.1, &b.1);
        if l > r {
            l
        } else {
            r
        }
    }

    fn in_neighborhood(&self, k: usize, x: &Self::Elem) -> bool {
        self.left.in_neighborhood(k, &x.0) && self.right.in_neighborhood(k, &x.1)
    }

    fn conjugators(&self) -> Option<Vec<Self::Elem>> {
        let l = self.left.conjugators();
        let r = self.right.conjugators();
        if l.is_none() && r.is_none() {
            return None;
        }
        let mut out = vec![];
        for a in l.unwrap_or_default() {
            out.push((a, self.right.identity()));
        }
        for b in r.unwrap_or_default() {
            out.push((self.left.identity(), b));
        }
        Some(out)
    }

    fn format(&self, a: &Self::Elem) -> String {
        format!("{}|{}", self.left.format(&a.0), self.right.format(&a.1))
    }

    fn parse(&self, s: &str) -> Result<Self::Elem> {
        let (l, r) = s
            .split_once('|')
            .ok_or_else(|| Error::invalid(format!("expected `a|b`, got {s:?}")))?;
        Ok((self.left.parse(l)?, self.right.parse(r)?))
    }

    fn elements(&self) -> Option<Vec<Self::Elem>> {
        let l = self.left.elements()?;
        let r = self.right.elements()?;
        Some(
            l.iter()
                .flat_map(|a| r.iter().map(move |b| (a.clone(), b.clone())))
                .collect(),
        )
    }

    fn sample(&self) -> Vec<Self::Elem> {
        let l = self.left.sample();
        let r = self.right.sample();
        l.iter()
            .take(6)
            .flat_map(|a| r.iter().take(6).map(move |b| (a.clone(), b.clone())))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{laws, FiniteGroup};

    #[test]
    fn abelian_models_satisfy_the_axioms() {
        laws::check_group_laws(&FreeAbelian::new(2));
        laws::check_metric_and_base(&FreeAbelian::new(2));
        laws::check_group_laws(&DirectSumZ);
        laws::check_metric_and_base(&DirectSumZ);
        let p = ProductGroup::new(FreeAbelian::new(1), FiniteGroup::symmetric(3));
        laws::check_group_laws(&p);
        laws::check_metric_and_base(&p);
    }

    #[test]
    fn direct_sum_is_canonical() {
        let g = DirectSumZ;
        assert_eq!(g.mul(&vec![1, 2], &vec![-1, -2]), g.identity());
        assert_eq!(g.parse("(0,1,0)").unwrap(), vec![0, 1]);
        assert_eq!(g.norm(&vec![2, -5, 1]), Some(q_int(5)));
    }
}

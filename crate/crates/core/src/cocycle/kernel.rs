use crate::error::{Error, Result};
use crate::group::Group;
use crate::odometer::{mask, ProductMeasure};
use crate::rational::Q;

use super::StepFunction;

/// Largest working depth for which kernels are tabulated.
pub const MAX_KERNEL_DEPTH: u32 = 12;

/// A cocycle of `S_m` restricted to depth-`depth` words: `c(w, w')` for `w`,
/// `w'` agreeing beyond coordinate `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleKernel<V> {
    pub depth: u32,
    pub m: u32,
    table: Vec<V>,
}

/// A failed kernel identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KernelViolation {
    Unit { w: u64 },
    Symmetry { w: u64, v: u64 },
    Cocycle { w: u64, v: u64, u: u64 },
}

impl<V: Clone> CocycleKernel<V> {
    pub fn from_fn(depth: u32, m: u32, f: impl Fn(u64, u64) -> V) -> Result<Self> {
        if depth > MAX_KERNEL_DEPTH || m > depth {
            return Err(Error::SizeGuard(format!(
                "kernel tables need m <= depth <= {MAX_KERNEL_DEPTH}"
            )));
        }
        let mut table = Vec::with_capacity(1 << (depth + m));
        for w in 0..1u64 << depth {
            for p in 0..1u64 << m {
                table.push(f(w, (w & !mask(m)) | p));
            }
        }
        Ok(CocycleKernel { depth, m, table })
    }

    /// `c(w, v)`; `w` and `v` must agree beyond `m`.
    pub fn get(&self, w: u64, v: u64) -> &V {
        debug_assert_eq!(w >> self.m, v >> self.m);
        &self.table[((w << self.m) | (v & mask(self.m))) as usize]
    }

    pub fn set(&mut self, w: u64, v: u64, value: V) {
        let i = ((w << self.m) | (v & mask(self.m))) as usize;
        self.table[i] = value;
    }

    fn class(&self, w: u64) -> impl Iterator<Item = u64> {
        let high = w & !mask(self.m);
        (0..1u64 << self.m).map(move |p| high | p)
    }
}

/// Checks `c(w,w) = 1`, `c(w,v) = c(v,w)⁻¹` and `c(w,u) = c(w,v)·c(v,u)` on
/// every admissible word, pair and triple.
pub fn cocycle_check<V: Clone + PartialEq>(
    k: &CocycleKernel<V>,
    identity: &V,
    mul: impl Fn(&V, &V) -> V,
    inv: impl Fn(&V) -> V,
) -> std::result::Result<(), KernelViolation> {
    for w in 0..1u64 << k.depth {
        if k.get(w, w) != identity {
            return Err(KernelViolation::Unit { w });
        }
        for v in k.class(w) {
            if *k.get(w, v) != inv(k.get(v, w)) {
                return Err(KernelViolation::Symmetry { w, v });
            }
            for u in k.class(w) {
                if *k.get(w, u) != mul(k.get(w, v), k.get(v, u)) {
                    return Err(KernelViolation::Cocycle { w, v, u });
                }
            }
        }
    }
    Ok(())
}

/// The coboundary kernel `α(w, v) = f(w)·f(v)⁻¹`.
pub fn coboundary_kernel<G: Group>(
    group: &G,
    f: &StepFunction<G::Elem>,
    depth: u32,
    m: u32,
) -> Result<CocycleKernel<G::Elem>> {
    if depth < f.depth {
        return Err(Error::DepthMismatch {
            left: depth,
            right: f.depth,
        });
    }
    CocycleKernel::from_fn(depth, m, |w, v| group.mul(f.at(w), &group.inv(f.at(v))))
}

/// The Radon–Nikodym kernel `ρ(w, v) = μ[w] / μ[v]`.
pub fn radon_nikodym_kernel(mu: &ProductMeasure, depth: u32, m: u32) -> Result<CocycleKernel<Q>> {
    let t = mu.table(depth)?;
    CocycleKernel::from_fn(depth, m, |w, v| t.measure(w) / t.measure(v))
}

pub fn check_group_kernel<G: Group>(
    group: &G,
    k: &CocycleKernel<G::Elem>,
) -> std::result::Result<(), KernelViolation> {
    cocycle_check(k, &group.identity(), |a, b| group.mul(a, b), |a| group.inv(a))
}

pub fn check_rational_kernel(k: &CocycleKernel<Q>) -> std::result::Result<(), KernelViolation> {
    cocycle_check(k, &crate::rational::one(), |a, b| a * b, |a| crate::rational::one() / a)
}

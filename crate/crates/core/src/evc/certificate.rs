use serde::Serialize;

use super::{check_evc, validate_witness, EvcWitness, LabelledCocycle};
use crate::cocycle::StepFunction;
use crate::error::{Error, Result};
use crate::group::{covering_number, Group, DEFAULT_CLASS_BUDGET};
use crate::odometer::{CylinderSet, ProductMeasure, Word};
use crate::rational::{fmt_q, q, Q};

/// One checked `(A, U_k, δ)` triple.
#[derive(Clone, Debug)]
pub struct EvcRecord {
    pub a: Vec<Word>,
    pub k: usize,
    pub delta: Q,
    pub witness: Option<EvcWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "verdict")]
pub enum Verdict {
    Certified,
    Inconclusive { a: String, k: usize },
}

#[derive(Clone, Debug)]
pub struct EssentialValueReport {
    pub g: String,
    pub records: Vec<EvcRecord>,
    pub verdict: Verdict,
}

/// Budgets for the finite schedule of `(A, U)` pairs.
#[derive(Clone, Copy, Debug)]
pub struct EvcBudget {
    /// `A` ranges over non-empty unions of cylinders of this depth.
    pub ring_depth: u32,
    /// `U` ranges over `U_1..U_neighborhoods`.
    pub neighborhoods: usize,
    pub search_depth: u32,
}

impl Default for EvcBudget {
    fn default() -> Self {
        EvcBudget {
            ring_depth: 2,
            neighborhoods: 1,
            search_depth: 12,
        }
    }
}

/// All non-empty unions of depth-`d` cylinders, in a fixed order.
pub fn ring(d: u32) -> Vec<CylinderSet> {
    assert!(d <= 3, "ring enumeration is limited to depth 3");
    let n = 1u64 << d;
    (1..1u64 << n)
        .map(|bits| CylinderSet::from_fn(d, |x| bits >> x & 1 == 1))
        .collect()
}

/// `δ(U, g) = 1 / (3 Λ(g, U))`.
pub fn delta_for<G: Group>(group: &G, g: &G::Elem, k: usize) -> Result<Q> {
    let lambda = covering_number(group, g, k, DEFAULT_CLASS_BUDGET)?.lambda;
    Ok(q(1, 3 * lambda as i64))
}

/// Checks `EVC(A, U g, δ(U, g))` for the coboundary-type cocycle
/// `α(y, x) = f(y) f(x)⁻¹` over the budgeted schedule.
pub fn essential_value_certificate<G: Group>(
    group: &G,
    mu: &ProductMeasure,
    f: &StepFunction<G::Elem>,
    g: &G::Elem,
    budget: EvcBudget,
) -> Result<EssentialValueReport> {
    let mut records = Vec::new();
    let mut verdict = Verdict::Certified;
    for k in 1..=budget.neighborhoods {
        let delta = delta_for(group, g, k)?;
        let alpha = LabelledCocycle {
            labels: f,
            in_target: |y: &G::Elem, x: &G::Elem| {
                group.in_translate(k, g, &group.mul(y, &group.inv(x)))
            },
        };
        for a in ring(budget.ring_depth) {
            let witness = match check_evc(mu, &alpha, &a, &delta, budget.search_depth) {
                Ok(w) => {
                    validate_witness(mu, &alpha, &a, &delta, &w).map_err(|detail| {
                        Error::PostconditionFailure {
                            clause: "evc-witness".into(),
                            detail,
                        }
                    })?;
                    Some(w)
                }
                Err(Error::SearchExhausted(_)) => None,
                Err(e) => return Err(e),
            };
            if witness.is_none() && verdict == Verdict::Certified {
                verdict = Verdict::Inconclusive {
                    a: a.words().iter().map(|w| w.to_string()).collect::<Vec<_>>().join("+"),
                    k,
                };
            }
            records.push(EvcRecord {
                a: a.words(),
                k,
                delta: delta.clone(),
                witness,
            });
        }
    }
    Ok(EssentialValueReport {
        g: group.format(g),
        records,
        verdict,
    })
}

impl EssentialValueReport {
    /// One line per certificate.
    pub fn lines(&self) -> Vec<String> {
        self.records
            .iter()
            .map(|r| {
                let a: Vec<String> = r.a.iter().map(|w| w.to_string()).collect();
                match &r.witness {
                    Some(w) => format!(
                        "A={} U={} g={} delta={} depth={} |B|={} measure-slack={} derivative-slack={} reserve={}",
                        a.join("+"),
                        r.k,
                        self.g,
                        fmt_q(&r.delta),
                        w.depth,
                        w.b.count(),
                        fmt_q(&w.measure_slack),
                        fmt_q(&w.derivative_slack),
                        fmt_q(&w.reserve)
                    ),
                    None => format!(
                        "A={} U={} g={} delta={} no witness",
                        a.join("+"),
                        r.k,
                        self.g,
                        fmt_q(&r.delta)
                    ),
                }
            })
            .collect()
    }
}

use super::report::{Record, RunReport};
use crate::ledger::Check;
use crate::rational::{fmt_q, q, Q};

/// A violated clause found while re-checking a report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Record kind and round, e.g. `round 2`.
    pub place: String,
    pub clause: String,
    pub detail: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: clause {} violated: {}", self.place, self.clause, self.detail)
    }
}

fn violation(place: &str, clause: &str, detail: impl Into<String>) -> Violation {
    Violation {
        place: place.into(),
        clause: clause.into(),
        detail: detail.into(),
    }
}

fn recheck(place: &str, checks: &[Check], out: &mut Vec<Violation>) {
    for c in checks {
        if !c.holds() {
            out.push(violation(place, &c.clause, c.to_string()));
        }
    }
}

fn stored_matches(place: &str, checks: &[Check], clause: &str, lhs: &Q, rhs: &Q, out: &mut Vec<Violation>) {
    if let Some(c) = checks.iter().find(|c| c.clause == clause) {
        if &c.lhs != lhs || &c.rhs != rhs {
            out.push(violation(
                place,
                clause,
                format!("stored {c} but the record gives {} and {}", fmt_q(lhs), fmt_q(rhs)),
            ));
        }
    }
}

/// Re-checks every stored inequality of a report and re-derives the ε
/// bookkeeping from the round records. Returns all violations in order.
pub fn certify(report: &RunReport) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut eps: Vec<Q> = Vec::new();
    let mut changes: Vec<Vec<Q>> = Vec::new();
    for rec in &report.records {
        let place = match rec {
            Record::Round(r) => format!("round {}", r.round),
            Record::FinalEvc { round, .. } => format!("final-evc {round}"),
            Record::Boundedness(b) => format!("boundedness {}", b.generator),
            other => other.kind().to_string(),
        };
        recheck(&place, rec.checks(), &mut out);
        match rec {
            Record::Header { eps: e, .. } => eps.push(e.clone()),
            Record::Round(r) => {
                if let Some(prev) = eps.last() {
                    let twice = &r.eps * q(2, 1);
                    stored_matches(&place, &r.checks, "eps-halving", &twice, prev, &mut out);
                }
                let delta = q(1, 3 * r.lambda as i64);
                if r.delta != delta {
                    out.push(violation(
                        &place,
                        "delta",
                        format!("delta {} differs from 1/(3*{})", fmt_q(&r.delta), r.lambda),
                    ));
                }
                stored_matches(&place, &r.checks, "delta", &r.delta, &delta, &mut out);
                eps.push(r.eps.clone());
                changes.push(r.changes.clone());
            }
            Record::Stabilization {
                entries,
                eps: stored_eps,
                ..
            } => {
                let derived = !changes.is_empty();
                if derived && stored_eps != &eps {
                    out.push(violation(&place, "eps-sequence", "ε list differs from the round records"));
                }
                let last = stored_eps.last().cloned().unwrap_or_default();
                for e in entries {
                    let bound: Q = stored_eps.iter().skip(e.round).cloned().sum::<Q>() + &last;
                    let changed: Option<Q> = changes
                        .iter()
                        .skip(e.round - 1)
                        .map(|c| c.get(e.generator).cloned())
                        .sum();
                    let clause = format!("stabilization-{}-{}", e.round, e.generator + 1);
                    if e.bound != bound || (derived && changed.as_ref() != Some(&e.changed_after)) {
                        out.push(violation(&place, &clause, "ledger entry does not match the rounds"));
                    }
                }
            }
            Record::Boundedness(b) => {
                if let Some(v) = b.observed.iter().find(|v| !b.allowed.contains(v)) {
                    out.push(violation(&place, &format!("bounded-{}", b.generator), format!("value {v} outside K")));
                }
            }
            _ => {}
        }
    }
    out
}

/// First place where two reports differ, naming the clause when the
/// difference sits in a stored check.
pub fn first_difference(a: &RunReport, b: &RunReport) -> Option<String> {
    for (i, (x, y)) in a.records.iter().zip(&b.records).enumerate() {
        if x == y {
            continue;
        }
        for (c, d) in x.checks().iter().zip(y.checks()) {
            if c != d {
                return Some(format!("record {} ({}): clause {}: {} vs {}", i + 1, x.kind(), c.clause, c, d));
            }
        }
        return Some(format!("record {} ({}) differs", i + 1, x.kind()));
    }
    if a.records.len() != b.records.len() {
        return Some(format!("{} records vs {}", a.records.len(), b.records.len()));
    }
    None
}

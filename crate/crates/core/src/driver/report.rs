use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::schedule::Triple;
use crate::cocycle::StabilizationEntry;
use crate::error::Result;
use crate::evc::ConnectivityReport;
use crate::ledger::Check;
use crate::rational::Q;

/// Digest of a stored `(B, θ)` witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDigest {
    pub depth: u32,
    #[serde(with = "crate::rational::serde_q")]
    pub b_measure: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub measure_slack: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub derivative_slack: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub reserve: Q,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub triple: Triple,
    /// `A_n` as `+`-joined words.
    pub a: String,
    pub g: String,
    pub k: usize,
    /// Level `n` the step was run at.
    pub level: u32,
    /// Generators taken into account this round.
    pub generators: usize,
    #[serde(with = "crate::rational::serde_q")]
    pub eps: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub eps_prime: Q,
    pub m: u32,
    pub depth: u32,
    pub h: String,
    pub lambda: usize,
    #[serde(with = "crate::rational::serde_q")]
    pub delta: Q,
    /// Distinct values of the new function.
    pub values: Vec<String>,
    #[serde(with = "crate::rational::serde_q_vec")]
    pub changes: Vec<Q>,
    pub digest: String,
    pub witness: WitnessDigest,
    /// Construction, validation and the per-round conditions.
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundednessRecord {
    pub generator: String,
    /// The certificate set `K_σ`.
    pub allowed: Vec<String>,
    pub observed: Vec<String>,
    #[serde(with = "crate::rational::serde_q")]
    pub undefined_measure: Q,
    /// `c(σ)`, when the group has a norm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_bound: Option<String>,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "kebab-case")]
pub enum Record {
    Header {
        name: String,
        group: String,
        action: String,
        measure: String,
        mode: String,
        rounds: usize,
        #[serde(with = "crate::rational::serde_q")]
        eps: Q,
        max_depth: u32,
        schedule: Vec<Triple>,
    },
    Round(RoundRecord),
    Stabilization {
        entries: Vec<StabilizationEntry>,
        #[serde(with = "crate::rational::serde_q_vec")]
        eps: Vec<Q>,
        checks: Vec<Check>,
    },
    Boundedness(BoundednessRecord),
    EssentialValue {
        g: String,
        verdict: String,
        lines: Vec<String>,
    },
    FinalEvc {
        round: usize,
        /// `stored`, `pruned`, `fresh` or `failed`.
        source: String,
        checks: Vec<Check>,
    },
    Connectivity {
        ladder: Vec<ConnectivityReport>,
        control: Vec<ConnectivityReport>,
        checks: Vec<Check>,
    },
    Summary {
        rounds_completed: usize,
        terminal_depth: u32,
        status: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        error: Option<String>,
    },
}

impl Record {
    pub fn checks(&self) -> &[Check] {
        match self {
            Record::Round(r) => &r.checks,
            Record::Boundedness(b) => &b.checks,
            Record::Stabilization { checks, .. }
            | Record::FinalEvc { checks, .. }
            | Record::Connectivity { checks, .. } => checks,
            _ => &[],
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Record::Header { .. } => "header",
            Record::Round(_) => "round",
            Record::Stabilization { .. } => "stabilization",
            Record::Boundedness(_) => "boundedness",
            Record::EssentialValue { .. } => "essential-value",
            Record::FinalEvc { .. } => "final-evc",
            Record::Connectivity { .. } => "connectivity",
            Record::Summary { .. } => "summary",
        }
    }
}

/// Line-delimited run report.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunReport {
    pub records: Vec<Record>,
}

impl RunReport {
    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn rounds(&self) -> impl Iterator<Item = &RoundRecord> {
        self.records.iter().filter_map(|r| match r {
            Record::Round(x) => Some(x),
            _ => None,
        })
    }

    pub fn boundedness(&self) -> impl Iterator<Item = &BoundednessRecord> {
        self.records.iter().filter_map(|r| match r {
            Record::Boundedness(x) => Some(x),
            _ => None,
        })
    }

    pub fn connectivity(&self) -> Option<(&[ConnectivityReport], &[ConnectivityReport])> {
        self.records.iter().find_map(|r| match r {
            Record::Connectivity { ladder, control, .. } => Some((&ladder[..], &control[..])),
            _ => None,
        })
    }

    /// Every stored check, tagged with its record kind.
    pub fn all_checks(&self) -> impl Iterator<Item = (&'static str, &Check)> {
        self.records
            .iter()
            .flat_map(|r| r.checks().iter().map(move |c| (r.kind(), c)))
    }

    pub fn to_jsonl(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            s.push_str(&serde_json::to_string(r).expect("records serialize"));
            s.push('\n');
        }
        s
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(self.to_jsonl().as_bytes())?;
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Self> {
        let mut records = Vec::new();
        for line in input.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            records.push(serde_json::from_str(&line)?);
        }
        Ok(RunReport { records })
    }
}

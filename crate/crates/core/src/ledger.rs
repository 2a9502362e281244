//! Exact inequalities recorded by the construction and re-checked later.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rational::{fmt_q, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rel {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

impl Rel {
    pub fn holds(self, lhs: &Q, rhs: &Q) -> bool {
        match self {
            Rel::Lt => lhs < rhs,
            Rel::Le => lhs <= rhs,
            Rel::Gt => lhs > rhs,
            Rel::Ge => lhs >= rhs,
            Rel::Eq => lhs == rhs,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Gt => ">",
            Rel::Ge => ">=",
            Rel::Eq => "=",
        }
    }
}

/// `lhs rel rhs` under a clause name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub clause: String,
    #[serde(with = "crate::rational::serde_q")]
    pub lhs: Q,
    pub rel: Rel,
    #[serde(with = "crate::rational::serde_q")]
    pub rhs: Q,
}

impl Check {
    pub fn new(clause: impl Into<String>, lhs: Q, rel: Rel, rhs: Q) -> Self {
        Check {
            clause: clause.into(),
            lhs,
            rel,
            rhs,
        }
    }

    /// A yes/no condition stored as `0 = 0` or `1 = 0`.
    pub fn flag(clause: impl Into<String>, ok: bool) -> Self {
        let v = if ok { 0 } else { 1 };
        Check::new(clause, Q::from_integer(v.into()), Rel::Eq, Q::from_integer(0.into()))
    }

    pub fn holds(&self) -> bool {
        self.rel.holds(&self.lhs, &self.rhs)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} {} {}",
            self.clause,
            fmt_q(&self.lhs),
            self.rel.symbol(),
            fmt_q(&self.rhs)
        )
    }
}

/// First failing check, if any.
pub fn first_failure(checks: &[Check]) -> Option<&Check> {
    checks.iter().find(|c| !c.holds())
}

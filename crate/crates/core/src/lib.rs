//! Exact finite-depth models of bounded ergodic cocycles over the dyadic tail
//! relation.

pub mod cocycle;
pub mod driver;
pub mod error;
pub mod evc;
pub mod group;
pub mod ledger;
pub mod lemma;
pub mod odometer;
pub mod rational;

pub use error::{Error, Result};
pub use rational::Q;

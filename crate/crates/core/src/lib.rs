//! Sampling-based winner prediction and margin-of-victory estimation for
//! district-based elections.
//!
//! Voters are partitioned into districts; a voting rule picks each
//! district's winner and the candidate winning the most districts wins
//! overall. This crate provides:
//!
//! - exact winner determination and margin-of-victory (MOV) oracles,
//! - seeded samplers and closed-form sample-size planning,
//! - the sampling-based winner predictors and MOV estimators,
//! - instance generators (planted-MOV, adversarial lower-bound families,
//!   single-peaked profiles, TV-bounded biased distributions), and
//! - a Monte Carlo harness for checking the probabilistic guarantees.

pub mod election;
pub mod error;
pub mod generators;
pub mod harness;
pub mod io;
pub mod mov;
pub mod oracles;
pub mod predictors;
pub mod rules;
pub mod sampling;

pub use election::{Candidate, DistrictProfile, Election, HarmoniousOrder, Ranking, TieBreak};
pub use error::{Error, Result};

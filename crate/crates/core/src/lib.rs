//! Cycle covers of random graphs sampled from step-graphons.
//!
//! A step-graphon fixes community proportions `x*` and block edge
//! probabilities. Whether large samples have a cycle cover (a 2-factor) is
//! governed by where `x*` sits relative to the edge cone of the skeleton
//! graph and by whether that skeleton has an odd cycle.

pub mod cli;
pub mod cone;
pub mod cover;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod graphon;
pub mod linalg;
pub mod lp;
pub mod matching;
pub mod rational;
pub mod stochastic;

pub use error::{Error, Result};

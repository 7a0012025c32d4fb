//! Configuration-LP lower bounds and blocker-tree local search for
//! makespan minimization under restricted assignment.

pub mod cli;
pub mod configlp;
pub mod error;
pub mod localsearch;
pub mod model;
pub mod toolkit;

pub use error::{Error, Result};

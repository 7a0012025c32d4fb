//! Oracles, baselines and instance generators.

mod exact;
mod generate;

pub use exact::{brute_force_opt, greedy_baseline, BRUTE_FORCE_MAX_JOBS, BRUTE_FORCE_MAX_LEAVES};
pub use generate::{gen_chain, gen_random, gen_two_size, GenSpec, JobMix};
